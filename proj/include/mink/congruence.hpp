#pragma once

#include <algorithm>
#include <cmath>

#include "mink/errors.hpp"
#include "mink/split_complex.hpp"

namespace mink {

// Kinds of tangent circle shared by a Darboux pair at one parameter. Circle
// kinds are named by the causal class of the displacement x - center; a
// lightlike offset xhat - x degenerates the circle (a degenerate point of
// the pair), a Minkowski-orthogonal offset flattens it to a line.
enum class CongruenceKind { TimelikeCircle, SpacelikeCircle, LightlikeDegenerate, Line };

inline const char* to_string(CongruenceKind k) {
    switch (k) {
        case CongruenceKind::TimelikeCircle: return "timelike-circle";
        case CongruenceKind::SpacelikeCircle: return "spacelike-circle";
        case CongruenceKind::LightlikeDegenerate: return "lightlike-degenerate";
        case CongruenceKind::Line: return "line";
    }
    return "?";
}

struct CircleCongruence {
    CongruenceKind kind = CongruenceKind::Line;
    SplitComplex center;         // circle kinds only
    double radius_xi = 0.0;      // signed radius; 0 for the degenerate kind
    SplitComplex line_direction; // Line kind only

    bool is_circle() const {
        return kind == CongruenceKind::TimelikeCircle || kind == CongruenceKind::SpacelikeCircle;
    }
};

// Normal n = (x2', x1'). Satisfies <n, x'> = 0 and |n|^2 = -|x'|^2.
inline SplitComplex normal_vector(const SplitComplex& xdot) {
    if (euclid_norm2(xdot) == 0.0) throw ZeroVelocityError("normal_vector: zero velocity");
    return {xdot.im, xdot.re};
}

inline constexpr double kLineRelTol = 1e-9;
inline constexpr double kDegenerateRelTol = 1e-9;

// Tangent circle through x (tangent to xdot there) passing through xhat:
// signed radius xi = |xhat - x|^2 / (2 <xhat - x, n>) and center x + n xi.
// Incidence of both members forces the unnormalized center: |p - c|^2 then
// equals xi^2 |n|^2 at p = x and p = xhat. On unit-speed curves (|n|^2 = -1)
// this is the familiar center x + n xi / sqrt(-|n|^2) and |xi| is the metric
// radius.
inline CircleCongruence congruence_at(const SplitComplex& x, const SplitComplex& xdot,
                                      const SplitComplex& xhat) {
    const SplitComplex y = xhat - x;
    if (euclid_norm2(y) == 0.0) {
        throw CoincidentPointsError("congruence_at: xhat coincides with x");
    }
    const SplitComplex n = normal_vector(xdot);

    // A lightlike tangent direction admits no finite tangent circle: the only
    // circles tangent to a lightlike direction are degenerate, so the
    // congruence flattens to the tangent line.
    if (classify(xdot) == CausalClass::Lightlike) {
        return {CongruenceKind::Line, {}, 0.0, xdot};
    }

    const double yn = minkowski_inner(y, n);
    if (std::fabs(yn) < kLineRelTol * std::sqrt(euclid_norm2(y) * euclid_norm2(n))) {
        return {CongruenceKind::Line, {}, 0.0, xdot};
    }
    const double y2 = norm2(y);
    if (std::fabs(y2) < kDegenerateRelTol * euclid_norm2(y)) {
        return {CongruenceKind::LightlikeDegenerate, {}, 0.0, {}};
    }

    const double xi = y2 / (2.0 * yn);
    const SplitComplex center = x + n * xi;
    const CongruenceKind kind = classify(x - center) == CausalClass::Timelike
                                    ? CongruenceKind::TimelikeCircle
                                    : CongruenceKind::SpacelikeCircle;
    return {kind, center, xi, {}};
}

// Residuals of the incidence and tangency conditions for both members of the
// pair on one congruence circle: |p - c|^2 + sigma xi^2 ||n|^2| at p = x and
// p = xhat, and the two tangency inner products. sigma = +1 for the timelike
// kind, -1 for the spacelike kind; the ||n|^2| factor reduces to 1 on
// unit-speed curves.
struct IncidenceReport {
    bool is_circle = false;
    double incidence_x = 0.0;
    double incidence_xhat = 0.0;
    double tangency_x = 0.0;
    double tangency_xhat = 0.0;

    double max_abs() const {
        return std::max(std::max(std::fabs(incidence_x), std::fabs(incidence_xhat)),
                        std::max(std::fabs(tangency_x), std::fabs(tangency_xhat)));
    }
};

inline IncidenceReport incidence_tangency_check(const CircleCongruence& cc, const SplitComplex& x,
                                                const SplitComplex& xdot, const SplitComplex& xhat,
                                                const SplitComplex& xhatdot) {
    IncidenceReport rep;
    if (!cc.is_circle()) return rep;  // NotACircle: degenerate and line inputs are skipped
    rep.is_circle = true;
    const double sigma = cc.kind == CongruenceKind::TimelikeCircle ? 1.0 : -1.0;
    const double xi2n2 = cc.radius_xi * cc.radius_xi * std::fabs(norm2(normal_vector(xdot)));
    rep.incidence_x = norm2(x - cc.center) + sigma * xi2n2;
    rep.incidence_xhat = norm2(xhat - cc.center) + sigma * xi2n2;
    rep.tangency_x = minkowski_inner(x - cc.center, xdot);
    rep.tangency_xhat = minkowski_inner(xhat - cc.center, xhatdot);
    return rep;
}

}  // namespace mink
