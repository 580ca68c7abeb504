#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "mink/errors.hpp"
#include "mink/split_complex.hpp"

namespace mink {

// Margin (radians) below which a diamond point counts as boundary. tan() of
// anything closer to pi/2 than ~1e-9 is numerically meaningless in doubles.
inline constexpr double kBoundaryMargin = 1e-9;

// Image coordinates of the conformal compactification. Finite points map to
// the open diamond |psi + zeta| < pi, |psi - zeta| < pi.
struct PenrosePoint {
    double psi = 0.0;
    double zeta = 0.0;
};

// psi = arctan(u) + arctan(v), zeta = arctan(u) - arctan(v).
inline PenrosePoint penrose_map(const SplitComplex& x) {
    const auto [u, v] = to_null(x);
    const double au = std::atan(u);
    const double av = std::atan(v);
    return {au + av, au - av};
}

inline bool penrose_interior(const PenrosePoint& p, double margin = kBoundaryMargin) {
    return std::fabs(p.psi + p.zeta) < std::numbers::pi - margin &&
           std::fabs(p.psi - p.zeta) < std::numbers::pi - margin;
}

// Inverse chart u = tan((psi+zeta)/2), v = tan((psi-zeta)/2).
inline SplitComplex penrose_unmap(const PenrosePoint& p) {
    if (!penrose_interior(p)) {
        throw BoundaryPointError("penrose_unmap: point on or outside the diamond boundary");
    }
    return from_null(std::tan(0.5 * (p.psi + p.zeta)), std::tan(0.5 * (p.psi - p.zeta)));
}

// Conformal factor Omega^2 in du dv = Omega^2 (dpsi^2 - dzeta^2).
inline double conformal_factor(const PenrosePoint& p) {
    if (!penrose_interior(p)) {
        throw BoundaryPointError("conformal_factor: diverges on the diamond boundary");
    }
    const double cp = std::cos(0.5 * (p.psi + p.zeta));
    const double cm = std::cos(0.5 * (p.psi - p.zeta));
    return 1.0 / (4.0 * cp * cp * cm * cm);
}

struct PenroseVelocity {
    double dpsi = 0.0;
    double dzeta = 0.0;
};

// Pushforward of a velocity vector through the compactification chart.
inline PenroseVelocity penrose_velocity(const SplitComplex& x, const SplitComplex& xdot) {
    const auto [u, v] = to_null(x);
    const auto [du, dv] = to_null(xdot);
    const double a = du / (1.0 + u * u);
    const double b = dv / (1.0 + v * v);
    return {a + b, a - b};
}

// Signed norm of a Penrose-image velocity in the dpsi^2 - dzeta^2 metric.
constexpr double penrose_norm2(const PenroseVelocity& w) {
    return w.dpsi * w.dpsi - w.dzeta * w.dzeta;
}

// 4 (f'^2 - g'^2) / [(1 + (f+g)^2)(1 + (f-g)^2)] for x = (f, g). Equals the
// signed Penrose-metric speed squared of the inverted image t -> P(sigma(x(t)));
// the sigma factors cancel against the chart, leaving an expression in x itself.
// Vanishing limit along a blow-up signals a lightlike direction at infinity.
inline double lightlike_indicator(const SplitComplex& x, const SplitComplex& xdot) {
    const double sum = x.re + x.im;
    const double diff = x.re - x.im;
    const double theta = (1.0 + sum * sum) * (1.0 + diff * diff);
    return 4.0 * (xdot.re * xdot.re - xdot.im * xdot.im) / theta;
}

enum class InfinityKind { SpatialI0, TimelikeI, NullInfinity };

// Open edges of the diamond, named by which null coordinate diverges:
//   UpperRight: u -> +inf   (psi + zeta = +pi)
//   LowerLeft:  u -> -inf   (psi + zeta = -pi)
//   LowerRight: v -> +inf   (psi - zeta = +pi)
//   UpperLeft:  v -> -inf   (psi - zeta = -pi)
enum class NullEdge { UpperRight, LowerLeft, LowerRight, UpperLeft };

inline const char* to_string(NullEdge e) {
    switch (e) {
        case NullEdge::UpperRight: return "upper-right";
        case NullEdge::LowerLeft: return "lower-left";
        case NullEdge::LowerRight: return "lower-right";
        case NullEdge::UpperLeft: return "upper-left";
    }
    return "?";
}

// Which boundary stratum a diverging trajectory reaches. `side` is +-1 for
// the corner classes; `offset` is the finite limit of the non-diverging null
// coordinate on a null edge (it pins the point within the open edge).
struct InfinityClass {
    InfinityKind kind = InfinityKind::SpatialI0;
    int side = 0;
    NullEdge edge = NullEdge::UpperRight;
    double offset = 0.0;
};

inline const char* to_string(InfinityKind k) {
    switch (k) {
        case InfinityKind::SpatialI0: return "spatial";
        case InfinityKind::TimelikeI: return "timelike";
        case InfinityKind::NullInfinity: return "null";
    }
    return "?";
}

// Limit descriptor for one null coordinate along a trajectory.
struct Divergence {
    enum class Trend { Finite, PlusInfinity, MinusInfinity };

    Trend trend = Trend::Finite;
    double limit = 0.0;

    static Divergence finite(double value) { return {Trend::Finite, value}; }
    static Divergence plus_infinity() { return {Trend::PlusInfinity, 0.0}; }
    static Divergence minus_infinity() { return {Trend::MinusInfinity, 0.0}; }

    bool diverges() const { return trend != Trend::Finite; }
    int sign() const { return trend == Trend::PlusInfinity ? 1 : (trend == Trend::MinusInfinity ? -1 : 0); }
};

// Trailing-window heuristic that promotes a sampled null coordinate to a
// divergence descriptor: the last `window` values must all exceed `big` in
// magnitude with one consistent sign.
inline Divergence divergence_trend(std::span<const double> values, double big = 1e8, int window = 5) {
    if (values.empty()) return Divergence::finite(0.0);
    const std::size_t n = values.size();
    const std::size_t k = std::min<std::size_t>(window, n);
    bool all_big_pos = true;
    bool all_big_neg = true;
    for (std::size_t i = n - k; i < n; ++i) {
        all_big_pos = all_big_pos && values[i] > big;
        all_big_neg = all_big_neg && values[i] < -big;
    }
    if (all_big_pos) return Divergence::plus_infinity();
    if (all_big_neg) return Divergence::minus_infinity();
    return Divergence::finite(values.back());
}

inline InfinityClass classify_infinity(const Divergence& u, const Divergence& v) {
    if (!u.diverges() && !v.diverges()) {
        throw NotAtInfinityError("classify_infinity: both null coordinates stay finite");
    }
    if (u.diverges() && v.diverges()) {
        if (u.sign() == v.sign()) {
            return {InfinityKind::SpatialI0, u.sign(), NullEdge::UpperRight, 0.0};
        }
        // u -> +inf with v -> -inf is the future corner (0, pi).
        return {InfinityKind::TimelikeI, u.sign(), NullEdge::UpperRight, 0.0};
    }
    if (u.diverges()) {
        return {InfinityKind::NullInfinity, 0,
                u.sign() > 0 ? NullEdge::UpperRight : NullEdge::LowerLeft, v.limit};
    }
    return {InfinityKind::NullInfinity, 0,
            v.sign() > 0 ? NullEdge::LowerRight : NullEdge::UpperLeft, u.limit};
}

// Boundary point of the diamond reached by a classified trajectory.
inline PenrosePoint penrose_boundary_point(const InfinityClass& c) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    switch (c.kind) {
        case InfinityKind::SpatialI0:
            return {c.side * std::numbers::pi, 0.0};
        case InfinityKind::TimelikeI:
            return {0.0, c.side * std::numbers::pi};
        case InfinityKind::NullInfinity: {
            const double a = std::atan(c.offset);
            switch (c.edge) {
                case NullEdge::UpperRight: return {half_pi + a, half_pi - a};
                case NullEdge::LowerLeft: return {-half_pi + a, -half_pi - a};
                case NullEdge::LowerRight: return {a + half_pi, a - half_pi};
                case NullEdge::UpperLeft: return {a - half_pi, a + half_pi};
            }
        }
    }
    return {};
}

// Unit direction (Euclidean) along a null edge in the (psi, zeta) plane.
inline PenroseVelocity edge_direction(NullEdge e) {
    const double s = 1.0 / std::numbers::sqrt2;
    switch (e) {
        case NullEdge::UpperRight:
        case NullEdge::LowerLeft:
            return {s, -s};  // edges of constant psi + zeta
        case NullEdge::LowerRight:
        case NullEdge::UpperLeft:
            return {s, s};  // edges of constant psi - zeta
    }
    return {s, -s};
}

}  // namespace mink
