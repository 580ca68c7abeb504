#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "mink/errors.hpp"
#include "mink/split_complex.hpp"

namespace mink {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double t) const { return t >= lo && t <= hi; }
    bool contains(const Interval& o) const { return o.lo >= lo && o.hi <= hi; }
    double length() const { return hi - lo; }
};

enum class CurveKind { Line, EuclideanCircle, TimelikeCircle, SpacelikeCircle, LightlikeLine, Sampled };

// Parametric curve t -> x(t) with analytic derivative, immutable after
// construction. The derivative map must be the true derivative of the
// evaluator; catalog entries are validated against central differences in
// the test suite.
class ParamCurve {
public:
    using Map = std::function<SplitComplex(double)>;

    ParamCurve(CurveKind kind, Map evaluator, Map derivative, Interval domain)
        : kind_(kind), eval_(std::move(evaluator)), deriv_(std::move(derivative)), domain_(domain) {}

    SplitComplex position(double t) const { return eval_(t); }
    SplitComplex derivative(double t) const { return deriv_(t); }

    CurveKind kind() const { return kind_; }
    const Interval& domain() const { return domain_; }

private:
    CurveKind kind_;
    Map eval_;
    Map deriv_;
    Interval domain_;
};

namespace detail {

inline void require_finite(const SplitComplex& z, const char* what) {
    if (!std::isfinite(z.re) || !std::isfinite(z.im)) {
        throw InvalidParamsError(std::string(what) + ": non-finite parameter");
    }
}

inline void require_radius(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw InvalidParamsError("circle radius must be positive and finite");
    }
}

}  // namespace detail

inline constexpr Interval kDefaultDomain{-1e6, 1e6};

inline ParamCurve make_line(const SplitComplex& p, const SplitComplex& d,
                            Interval domain = kDefaultDomain) {
    detail::require_finite(p, "line point");
    detail::require_finite(d, "line direction");
    if (euclid_norm2(d) == 0.0) throw InvalidParamsError("line direction must be nonzero");
    return {CurveKind::Line,
            [p, d](double t) { return p + t * d; },
            [d](double) { return d; },
            domain};
}

inline ParamCurve make_euclidean_circle(const SplitComplex& center, double r,
                                        Interval domain = kDefaultDomain) {
    detail::require_finite(center, "circle center");
    detail::require_radius(r);
    return {CurveKind::EuclideanCircle,
            [center, r](double t) { return center + SplitComplex{r * std::cos(t), r * std::sin(t)}; },
            [r](double t) { return SplitComplex{-r * std::sin(t), r * std::cos(t)}; },
            domain};
}

// Lorentz circle with timelike velocity: (r sec t + c1, r tan t + c2).
inline ParamCurve make_timelike_circle(const SplitComplex& center, double r,
                                       Interval domain = kDefaultDomain) {
    detail::require_finite(center, "circle center");
    detail::require_radius(r);
    return {CurveKind::TimelikeCircle,
            [center, r](double t) {
                const double sec = 1.0 / std::cos(t);
                return center + SplitComplex{r * sec, r * std::tan(t)};
            },
            [r](double t) {
                const double sec = 1.0 / std::cos(t);
                return SplitComplex{r * sec * std::tan(t), r * sec * sec};
            },
            domain};
}

// Lorentz circle with spacelike velocity: (r tan t + c1, r sec t + c2).
inline ParamCurve make_spacelike_circle(const SplitComplex& center, double r,
                                        Interval domain = kDefaultDomain) {
    detail::require_finite(center, "circle center");
    detail::require_radius(r);
    return {CurveKind::SpacelikeCircle,
            [center, r](double t) {
                const double sec = 1.0 / std::cos(t);
                return center + SplitComplex{r * std::tan(t), r * sec};
            },
            [r](double t) {
                const double sec = 1.0 / std::cos(t);
                return SplitComplex{r * sec * sec, r * sec * std::tan(t)};
            },
            domain};
}

inline ParamCurve make_lightlike_line(const SplitComplex& c, Interval domain = kDefaultDomain) {
    detail::require_finite(c, "lightlike line offset");
    return {CurveKind::LightlikeLine,
            [c](double t) { return c + SplitComplex{t, t}; },
            [](double) { return SplitComplex{1.0, 1.0}; },
            domain};
}

// Cubic Hermite interpolant through (t_i, x_i) with user-supplied derivatives.
// The Riccati right-hand side needs C^1 data, hence the derivative samples.
inline ParamCurve make_sampled(std::vector<double> ts, std::vector<SplitComplex> xs,
                               std::vector<SplitComplex> dxs) {
    if (ts.size() < 2 || ts.size() != xs.size() || ts.size() != dxs.size()) {
        throw InvalidParamsError("sampled curve needs matching t/x/dx lists with >= 2 nodes");
    }
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (!(ts[i] > ts[i - 1])) throw InvalidParamsError("sampled curve nodes must be increasing");
    }
    const Interval domain{ts.front(), ts.back()};
    auto segment = [ts](double t) {
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        std::size_t i = static_cast<std::size_t>(std::distance(ts.begin(), it));
        if (i == 0) i = 1;
        if (i >= ts.size()) i = ts.size() - 1;
        return i - 1;
    };
    auto eval = [ts, xs, dxs, segment](double t) {
        const std::size_t i = segment(t);
        const double h = ts[i + 1] - ts[i];
        const double s = (t - ts[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * xs[i] + (h10 * h) * dxs[i] + h01 * xs[i + 1] + (h11 * h) * dxs[i + 1];
    };
    auto deriv = [ts, xs, dxs, segment](double t) {
        const std::size_t i = segment(t);
        const double h = ts[i + 1] - ts[i];
        const double s = (t - ts[i]) / h;
        const double s2 = s * s;
        const double d00 = (6 * s2 - 6 * s) / h, d10 = 3 * s2 - 4 * s + 1;
        const double d01 = (-6 * s2 + 6 * s) / h, d11 = 3 * s2 - 2 * s;
        return d00 * xs[i] + d10 * dxs[i] + d01 * xs[i + 1] + d11 * dxs[i + 1];
    };
    return {CurveKind::Sampled, std::move(eval), std::move(deriv), domain};
}

// Catalog parameter bundle; which fields apply depends on the kind.
struct CurveSpec {
    CurveKind kind = CurveKind::Line;
    SplitComplex point;      // Line base point / LightlikeLine offset
    SplitComplex direction;  // Line direction
    SplitComplex center;     // circle kinds
    double radius = 1.0;
};

inline ParamCurve make_catalog_curve(const CurveSpec& spec, Interval domain = kDefaultDomain) {
    switch (spec.kind) {
        case CurveKind::Line: return make_line(spec.point, spec.direction, domain);
        case CurveKind::EuclideanCircle: return make_euclidean_circle(spec.center, spec.radius, domain);
        case CurveKind::TimelikeCircle: return make_timelike_circle(spec.center, spec.radius, domain);
        case CurveKind::SpacelikeCircle: return make_spacelike_circle(spec.center, spec.radius, domain);
        case CurveKind::LightlikeLine: return make_lightlike_line(spec.point, domain);
        case CurveKind::Sampled: break;
    }
    throw InvalidParamsError("make_catalog_curve: sampled curves are built with make_sampled");
}

enum class PolarizationKind { Constant, ArcLength, Custom };

// Polarization dt^2/m stored through its reciprocal w(t) = 1/m(t). Storing w
// keeps every value finite: lightlike points have m = infinity, i.e. w = 0,
// and the Riccati right-hand side stays polynomial in w.
class Polarization {
public:
    static Polarization constant_m(double m) {
        if (m == 0.0 || !std::isfinite(m)) throw InvalidParamsError("polarization m must be finite and nonzero");
        return Polarization(PolarizationKind::Constant, [w = 1.0 / m](double) { return w; });
    }

    static Polarization arc_length(const ParamCurve& curve) {
        return Polarization(PolarizationKind::ArcLength,
                            [curve](double t) { return norm2(curve.derivative(t)); });
    }

    static Polarization custom(std::function<double(double)> reciprocal) {
        return Polarization(PolarizationKind::Custom, std::move(reciprocal));
    }

    double reciprocal(double t) const { return w_(t); }
    PolarizationKind kind() const { return kind_; }

private:
    Polarization(PolarizationKind kind, std::function<double(double)> w) : kind_(kind), w_(std::move(w)) {}

    PolarizationKind kind_;
    std::function<double(double)> w_;
};

// w(t) = |x'(t)|^2, i.e. m = 1/|x'|^2 extended by w = 0 at lightlike points.
inline Polarization arc_length_polarization(const ParamCurve& curve) {
    return Polarization::arc_length(curve);
}

struct PolarizedCurve {
    ParamCurve curve;
    Polarization polarization;
};

inline CausalClass causal_type_at(const ParamCurve& curve, double t) {
    return classify(curve.derivative(t));
}

// Result of scanning |x'|^2 for roots. A curve that is lightlike across the
// whole window is reported as such instead of as an infinite root list.
struct LightlikeScan {
    std::vector<double> points;
    bool identically_lightlike = false;
};

namespace detail {

// Bisection on a sign change of f, to |dt| < tol.
template <typename F>
double bisect_root(F&& f, double a, double b, double fa, double tol = 1e-12) {
    for (int i = 0; i < 200 && (b - a) > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// Golden-section minimization of f on [a, b].
template <typename F>
double golden_min(F&& f, double a, double b, double tol = 1e-12) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// All roots of t -> |x'(t)|^2 in the window: sign changes by bisection,
// tangential zeros by a dip of the relative magnitude below kLightlikeRelTol
// refined with golden-section minimization.
inline LightlikeScan lightlike_points(const ParamCurve& curve, Interval window, int samples = 2048) {
    if (!curve.domain().contains(window)) {
        throw DomainExceededError("lightlike_points: window outside curve domain");
    }
    LightlikeScan out;
    if (!(window.length() > 0.0)) return out;

    auto h = [&curve](double t) { return norm2(curve.derivative(t)); };
    auto rel = [&curve](double t) {
        const SplitComplex d = curve.derivative(t);
        const double scale = euclid_norm2(d);
        return scale > 0.0 ? std::fabs(norm2(d)) / scale : 0.0;
    };

    const double dt = window.length() / samples;
    std::vector<double> ts(samples + 1), hs(samples + 1);
    bool all_light = true;
    for (int i = 0; i <= samples; ++i) {
        ts[i] = window.lo + i * dt;
        hs[i] = h(ts[i]);
        all_light = all_light && rel(ts[i]) <= kLightlikeRelTol;
    }
    if (all_light) {
        out.identically_lightlike = true;
        return out;
    }

    auto push_root = [&out, &window](double t) {
        const double tol = 1e-9 * std::max(1.0, window.length());
        for (double r : out.points) {
            if (std::fabs(r - t) < tol) return;
        }
        out.points.push_back(t);
    };

    for (int i = 0; i < samples; ++i) {
        if (hs[i] == 0.0) {
            push_root(ts[i]);
            continue;
        }
        if ((hs[i] < 0.0) != (hs[i + 1] < 0.0)) {
            push_root(detail::bisect_root(h, ts[i], ts[i + 1], hs[i]));
        }
    }
    if (hs[samples] == 0.0) push_root(ts[samples]);

    // Tangential zeros: interior dips of |h| that do not change sign.
    for (int i = 1; i < samples; ++i) {
        const double ai = std::fabs(hs[i]);
        if (ai <= std::fabs(hs[i - 1]) && ai <= std::fabs(hs[i + 1]) && rel(ts[i]) <= 1e4 * kLightlikeRelTol) {
            const double t_min = detail::golden_min([&h](double t) { return std::fabs(h(t)); },
                                                    ts[i - 1], ts[i + 1]);
            if (rel(t_min) <= kLightlikeRelTol) push_root(t_min);
        }
    }

    std::sort(out.points.begin(), out.points.end());
    return out;
}

}  // namespace mink
