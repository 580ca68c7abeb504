#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "mink/curve.hpp"
#include "mink/errors.hpp"
#include "mink/penrose.hpp"
#include "mink/rk45.hpp"
#include "mink/split_complex.hpp"

namespace mink {

// How the Riccati right-hand side is formed.
//   Generic:            uhat' = lambda w (uhat - u)^2 / u',  needs u', v' != 0.
//   ArcLengthRegularized: with w = u'v' the division cancels,
//                         uhat' = lambda v' (uhat - u)^2, regular at lightlike
//                         points of the base curve, so the transform continues
//                         across them as the limit of the two-sided solutions.
enum class DarbouxMode { Generic, ArcLengthRegularized };

struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
    double chart_switch = 4.0;  // |value| bound that triggers a projective chart flip
};

struct DarbouxParams {
    double lambda = -1.0;         // spectral parameter, nonzero
    SplitComplex initial_point;   // xhat(t0), must differ from x(t0)
    double t0 = 0.0;
    DarbouxMode mode = DarbouxMode::Generic;
};

// Projective-line representation of one null offset component. Affine carries
// the offset p = xhat_null - x_null itself, Inverted carries s = 1/p so the
// flow continues smoothly through p -> infinity (s crosses 0).
enum class Chart { Affine, Inverted };

struct ComponentState {
    Chart chart = Chart::Affine;
    double value = 0.0;

    bool at_infinity() const { return chart == Chart::Inverted && value == 0.0; }

    // The affine offset p; +-inf at a blow-up sample.
    double offset() const {
        if (chart == Chart::Affine) return value;
        if (value == 0.0) return std::numeric_limits<double>::infinity();
        return 1.0 / value;
    }
};

struct RiccatiChartState {
    ComponentState u, v;
};

struct Sample {
    double t = 0.0;
    SplitComplex x;
    std::optional<SplitComplex> xhat;  // empty = at infinity (blow-up marker)
    RiccatiChartState state;
};

struct BlowupEvent {
    double t_star = 0.0;
    bool u_diverges = false;
    bool v_diverges = false;
    int sign_u = 0;  // sign of the diverging offset as t -> t_star-
    int sign_v = 0;
    InfinityClass infinity;
};

struct DarbouxSolution {
    std::vector<Sample> samples;
    std::vector<BlowupEvent> events;
    std::vector<double> lightlike_crossings;

    // Context carried for re-analysis (event relocation, residual checks).
    PolarizedCurve base;
    DarbouxParams params;
    Tolerances tol;
};

// Defining relation residual x' xhat' - lambda w (xhat - x)^2 with w = 1/m;
// zero (both components) along an exact Darboux pair.
inline SplitComplex cross_ratio_residual(const SplitComplex& x, const SplitComplex& xdot,
                                         const SplitComplex& xhat, const SplitComplex& xhatdot,
                                         double w, double lambda) {
    const SplitComplex y = xhat - x;
    return xdot * xhatdot - (lambda * w) * (y * y);
}

namespace detail {

struct RiccatiCoeffs {
    double a_u = 0.0, c_u = 0.0;  // p' = a_u p^2 + c_u
    double a_v = 0.0, c_v = 0.0;
};

inline RiccatiCoeffs riccati_coeffs(const PolarizedCurve& pc, double lambda, DarbouxMode mode,
                                    double t) {
    const auto [du, dv] = to_null(pc.curve.derivative(t));
    if (mode == DarbouxMode::Generic) {
        const double mag2 = du * du + dv * dv;
        if (du * du <= kLightlikeRelTol * mag2 || dv * dv <= kLightlikeRelTol * mag2) {
            throw LightlikeBaseCurveError(
                "generic right-hand side needs both null velocity components nonzero");
        }
        const double w = pc.polarization.reciprocal(t);
        return {lambda * w / du, -du, lambda * w / dv, -dv};
    }
    // w = u' v' exactly; the division by the null velocity cancels.
    return {lambda * dv, -du, lambda * du, -dv};
}

}  // namespace detail

// Null-coordinate right-hand side of the defining relation:
// (uhat', vhat') at parameter t for the transform position (uhat, vhat).
inline std::pair<double, double> rhs_null(const PolarizedCurve& pc, double lambda, DarbouxMode mode,
                                          double t, double uhat, double vhat) {
    const auto k = detail::riccati_coeffs(pc, lambda, mode, t);
    const auto [ux, vx] = to_null(pc.curve.position(t));
    const double p = uhat - ux;
    const double q = vhat - vx;
    return {k.a_u * p * p, k.a_v * q * q};
}

// Velocity of the transform at a finite sample, evaluated through the
// defining relation.
inline SplitComplex xhat_velocity(const PolarizedCurve& pc, double lambda, DarbouxMode mode,
                                  double t, const SplitComplex& xhat) {
    const auto [uh, vh] = to_null(xhat);
    const auto [du, dv] = rhs_null(pc, lambda, mode, t, uh, vh);
    return from_null(du, dv);
}

// Closed-form offset flow for the horizontal line x(t) = (t, 0) with m = 1,
// where both null offsets obey y' = lambda y^2 - 1. Validation oracle for the
// numerical integrator.
class LineOracle {
public:
    LineOracle(double lambda, double p0, double q0) : lambda_(lambda), p0_(p0), q0_(q0) {
        if (lambda == 0.0) throw InvalidParamsError("line oracle: lambda must be nonzero");
    }

    double p(double t) const { return flow(lambda_, p0_, t); }
    double q(double t) const { return flow(lambda_, q0_, t); }

    double blowup_time_p() const { return blowup_time(lambda_, p0_); }
    double blowup_time_q() const { return blowup_time(lambda_, q0_); }

    static double flow(double lambda, double y0, double t) {
        if (lambda < 0.0) {
            const double mu = 1.0 / std::sqrt(-lambda);
            return mu * std::tan(std::atan(y0 / mu) - t / mu);
        }
        const double root = std::sqrt(lambda);
        const double a = y0 * root;
        const double big = std::tanh(root * t);
        return (a - big) / (root * (1.0 - a * big));
    }

    // First blow-up time strictly after 0; +inf when the component stays finite.
    static double blowup_time(double lambda, double y0) {
        if (lambda < 0.0) {
            const double mu = 1.0 / std::sqrt(-lambda);
            return mu * (std::atan(y0 / mu) + std::numbers::pi / 2.0);
        }
        const double a = y0 * std::sqrt(lambda);
        if (a > 1.0) return std::atanh(1.0 / a) / std::sqrt(lambda);
        return std::numeric_limits<double>::infinity();
    }

private:
    double lambda_;
    double p0_, q0_;
};

namespace detail {

// Two decoupled scalar Riccati flows with per-component projective charts.
class RiccatiEngine {
public:
    struct State {
        double t = 0.0;
        ComponentState u, v;
        double h_hint = 0.0;
    };

    RiccatiEngine(const PolarizedCurve& pc, double lambda, DarbouxMode mode, const Tolerances& tol)
        : pc_(&pc),
          lambda_(lambda),
          mode_(mode),
          s_switch_(tol.chart_switch),
          stepper_(RhsRef{this}, StepControl{tol.rel, tol.abs}) {}

    static ComponentState component_from_offset(double p, double s_switch) {
        if (std::fabs(p) > s_switch) return {Chart::Inverted, 1.0 / p};
        return {Chart::Affine, p};
    }

    // One accepted adaptive step, charts held fixed (no switching here, so the
    // caller can inspect raw values for zero crossings).
    void raw_step(State& st, double t_cap) const {
        chart_u_ = st.u.chart;
        chart_v_ = st.v.chart;
        std::array<double, 2> y{st.u.value, st.v.value};
        stepper_.step(st.t, y, st.h_hint, t_cap);
        st.u.value = y[0];
        st.v.value = y[1];
    }

    void switch_charts(State& st) const {
        flip_if_needed(st.u);
        flip_if_needed(st.v);
    }

    void advance_to(State& st, double t_target) const {
        const double eps = 1e-15 * std::max(1.0, std::fabs(t_target));
        while (st.t < t_target - eps) {
            raw_step(st, t_target);
            switch_charts(st);
        }
        st.t = t_target;
    }

    RiccatiCoeffs coeffs(double t) const { return riccati_coeffs(*pc_, lambda_, mode_, t); }

    double s_switch() const { return s_switch_; }

private:
    struct RhsRef {
        const RiccatiEngine* eng;
        std::array<double, 2> operator()(double t, const std::array<double, 2>& y) const {
            const RiccatiCoeffs k = eng->coeffs(t);
            return {chart_rhs(eng->chart_u_, k.a_u, k.c_u, y[0]),
                    chart_rhs(eng->chart_v_, k.a_v, k.c_v, y[1])};
        }
    };

    static double chart_rhs(Chart chart, double a, double c, double y) {
        if (chart == Chart::Affine) return a * y * y + c;  // p' = A p^2 + C
        return -a - c * y * y;                             // s' = -A - C s^2
    }

    void flip_if_needed(ComponentState& cs) const {
        if (std::fabs(cs.value) > s_switch_ && cs.value != 0.0) {
            cs.value = 1.0 / cs.value;
            cs.chart = cs.chart == Chart::Affine ? Chart::Inverted : Chart::Affine;
        }
    }

    const PolarizedCurve* pc_;
    double lambda_;
    DarbouxMode mode_;
    double s_switch_;
    mutable Chart chart_u_ = Chart::Affine;
    mutable Chart chart_v_ = Chart::Affine;
    Dopri5<2, RhsRef> stepper_;
};

inline constexpr double kCascadeFloor = 1e-3;  // |s| at the last finite sample before a marker
inline constexpr int kCascadeSamples = 16;

inline Sample make_sample(const ParamCurve& curve, const RiccatiEngine::State& st) {
    Sample s;
    s.t = st.t;
    s.x = curve.position(st.t);
    s.state = {st.u, st.v};
    if (!st.u.at_infinity() && !st.v.at_infinity()) {
        const auto [ux, vx] = to_null(s.x);
        s.xhat = from_null(ux + st.u.offset(), vx + st.v.offset());
    }
    return s;
}

}  // namespace detail

enum class NullComponent { U, V };

struct BlowupLocation {
    double t_star = 0.0;
    int divergence_sign = 0;
};

// Integrates the defining relation as two decoupled real Riccati flows in
// null coordinates. Projective chart switching keeps the state bounded;
// blow-ups are located where the inverted-chart value crosses zero, recorded
// as events with at-infinity marker samples, and integration continues on
// the other projective side. A geometric cascade of samples is emitted on
// the approach to each blow-up so that trailing-limit diagnostics have
// usable data.
inline DarbouxSolution integrate(const PolarizedCurve& pcurve, const DarbouxParams& params,
                                 double t_end, const Tolerances& tol = {}) {
    using State = detail::RiccatiEngine::State;

    if (params.lambda == 0.0 || !std::isfinite(params.lambda)) {
        throw InvalidParamsError("integrate: lambda must be finite and nonzero");
    }
    if (!(t_end > params.t0)) {
        throw InvalidParamsError("integrate: t_end must exceed t0");
    }
    if (!pcurve.curve.domain().contains({params.t0, t_end})) {
        throw DomainExceededError("integrate: [t0, t_end] outside the curve domain");
    }
    if (params.mode == DarbouxMode::ArcLengthRegularized &&
        pcurve.polarization.kind() != PolarizationKind::ArcLength) {
        throw InvalidParamsError("integrate: regularized mode requires the arc-length polarization");
    }

    const SplitComplex x0 = pcurve.curve.position(params.t0);
    const SplitComplex y0 = params.initial_point - x0;
    if (euclid_norm2(y0) == 0.0) {
        throw CoincidentPointsError("integrate: initial point coincides with x(t0)");
    }

    DarbouxSolution sol{{}, {}, {}, pcurve, params, tol};

    const LightlikeScan scan = lightlike_points(pcurve.curve, {params.t0, t_end});
    if (scan.identically_lightlike) {
        throw LightlikeBaseCurveError("integrate: base curve is lightlike on the whole range");
    }
    if (params.mode == DarbouxMode::Generic && !scan.points.empty()) {
        throw LightlikeBaseCurveError(
            "integrate: base curve has lightlike points in range; use the regularized mode");
    }
    sol.lightlike_crossings = scan.points;

    const detail::RiccatiEngine eng(pcurve, params.lambda, params.mode, tol);
    const auto [p0, q0] = to_null(y0);
    State st;
    st.t = params.t0;
    st.u = detail::RiccatiEngine::component_from_offset(p0, tol.chart_switch);
    st.v = detail::RiccatiEngine::component_from_offset(q0, tol.chart_switch);
    sol.samples.push_back(detail::make_sample(pcurve.curve, st));

    const double t_eps = 1e-14 * std::max(1.0, std::fabs(t_end));

    // Bisection for the zero of one component's inverted-chart value; the
    // left state is reused as brackets shrink.
    auto refine_crossing = [&eng](State left, double t_right, bool comp_u) {
        double a = left.t, b = t_right;
        double fa = comp_u ? left.u.value : left.v.value;
        const double tol_t = 1e-12 * std::max(1.0, std::fabs(b));
        while (b - a > tol_t) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            State probe = left;
            eng.advance_to(probe, m);
            const double fm = comp_u ? probe.u.value : probe.v.value;
            if (fm == 0.0) {
                left = probe;
                a = b = m;
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
                left = probe;
            } else {
                b = m;
            }
        }
        State at_root = left;
        eng.advance_to(at_root, 0.5 * (a + b));
        return at_root;
    };

    bool done = false;
    while (!done && st.t < t_end - t_eps) {
        State prev = st;
        eng.raw_step(st, t_end);

        const bool u_inv = prev.u.chart == Chart::Inverted;
        const bool v_inv = prev.v.chart == Chart::Inverted;
        const bool u_crossed =
            u_inv && prev.u.value != 0.0 &&
            (st.u.value == 0.0 || (st.u.value < 0.0) != (prev.u.value < 0.0));
        const bool v_crossed =
            v_inv && prev.v.value != 0.0 &&
            (st.v.value == 0.0 || (st.v.value < 0.0) != (prev.v.value < 0.0));

        if (!u_crossed && !v_crossed) {
            eng.switch_charts(st);
            sol.samples.push_back(detail::make_sample(pcurve.curve, st));
            if (st.u.chart == Chart::Affine && st.v.chart == Chart::Affine &&
                std::fabs(st.u.value) < 1e-12 && std::fabs(st.v.value) < 1e-12) {
                throw CoincidentPointsError("integrate: transform collided with the base curve");
            }
            continue;
        }

        // Refine each crossing; merge when simultaneous.
        State star_u, star_v;
        double t_u = std::numeric_limits<double>::infinity();
        double t_v = std::numeric_limits<double>::infinity();
        if (u_crossed) {
            star_u = refine_crossing(prev, st.t, true);
            t_u = star_u.t;
        }
        if (v_crossed) {
            star_v = refine_crossing(prev, st.t, false);
            t_v = star_v.t;
        }
        const double merge_tol = 1e-8 * std::max(1.0, std::fabs(st.t));
        const bool joint = u_crossed && v_crossed && std::fabs(t_u - t_v) <= merge_tol;
        const bool first_is_u = t_u <= t_v;
        const double t_star = first_is_u ? t_u : t_v;
        const State star = first_is_u ? star_u : star_v;
        const bool ev_u = joint || first_is_u;
        const bool ev_v = joint || !first_is_u;

        BlowupEvent ev;
        ev.t_star = t_star;
        ev.u_diverges = ev_u;
        ev.v_diverges = ev_v;
        ev.sign_u = ev_u ? (prev.u.value > 0.0 ? 1 : -1) : 0;
        ev.sign_v = ev_v ? (prev.v.value > 0.0 ? 1 : -1) : 0;
        {
            const Divergence du = ev_u ? (ev.sign_u > 0 ? Divergence::plus_infinity()
                                                        : Divergence::minus_infinity())
                                       : Divergence::finite(to_null(pcurve.curve.position(t_star)).u +
                                                            star.u.offset());
            const Divergence dv = ev_v ? (ev.sign_v > 0 ? Divergence::plus_infinity()
                                                        : Divergence::minus_infinity())
                                       : Divergence::finite(to_null(pcurve.curve.position(t_star)).v +
                                                            star.v.offset());
            ev.infinity = classify_infinity(du, dv);
        }
        sol.events.push_back(ev);

        // Cascade floor: land the last finite sample at |s| ~ kCascadeFloor.
        const detail::RiccatiCoeffs k_star = eng.coeffs(t_star);
        double slope = 0.0;
        if (ev_u) slope = std::max(slope, std::fabs(k_star.a_u));
        if (ev_v) slope = std::max(slope, std::fabs(k_star.a_v));
        slope = std::max(slope, 1e-6);
        const double span0 = t_star - prev.t;
        const double delta_end = std::clamp(detail::kCascadeFloor / slope, 1e-9, 0.25 * span0);

        State walker = prev;
        const double ratio = std::pow(delta_end / span0, 1.0 / detail::kCascadeSamples);
        for (int j = 1; j <= detail::kCascadeSamples; ++j) {
            const double target = t_star - span0 * std::pow(ratio, j);
            if (target <= walker.t + 4.0 * t_eps) continue;
            eng.advance_to(walker, target);
            sol.samples.push_back(detail::make_sample(pcurve.curve, walker));
        }

        // Marker sample exactly at the blow-up parameter.
        {
            State marker = walker;
            eng.advance_to(marker, t_star);
            if (ev_u) marker.u = {Chart::Inverted, 0.0};
            if (ev_v) marker.v = {Chart::Inverted, 0.0};
            sol.samples.push_back(detail::make_sample(pcurve.curve, marker));
        }

        // Bridge over the crossing and resume ordinary stepping. Capped below
        // the other (unmerged) crossing so it is re-detected later.
        double t_bridge = std::min(t_star + delta_end, t_end);
        if (!joint && u_crossed && v_crossed) {
            t_bridge = std::min(t_bridge, 0.5 * (t_u + t_v));
        }
        if (t_bridge <= t_star + 4.0 * t_eps) {
            done = true;
            continue;
        }
        eng.advance_to(walker, t_bridge);
        sol.samples.push_back(detail::make_sample(pcurve.curve, walker));
        st = walker;
        st.h_hint = 0.0;
    }

    return sol;
}

// Refines the blow-up parameter of one null component from the recorded
// samples: takes the finite bracketing pair whose inverted-chart value
// changes sign inside `bracket` and bisects the flow between them.
inline BlowupLocation locate_blowup(const DarbouxSolution& sol, NullComponent comp,
                                    Interval bracket) {
    const detail::RiccatiEngine eng(sol.base, sol.params.lambda, sol.params.mode, sol.tol);
    const bool want_u = comp == NullComponent::U;

    // consecutive finite samples; at-infinity markers sit between the
    // bracketing pair and are skipped
    std::vector<const Sample*> finite;
    for (const Sample& s : sol.samples) {
        if (s.xhat) finite.push_back(&s);
    }
    for (std::size_t i = 0; i + 1 < finite.size(); ++i) {
        const Sample& a = *finite[i];
        const Sample& b = *finite[i + 1];
        if (!bracket.contains(a.t) || !bracket.contains(b.t)) continue;
        const ComponentState& ca = want_u ? a.state.u : a.state.v;
        const ComponentState& cb = want_u ? b.state.u : b.state.v;
        if (ca.chart != Chart::Inverted || cb.chart != Chart::Inverted) continue;
        if (ca.value == 0.0 || (ca.value < 0.0) == (cb.value < 0.0)) continue;

        detail::RiccatiEngine::State left;
        left.t = a.t;
        left.u = a.state.u;
        left.v = a.state.v;
        double lo = a.t, hi = b.t;
        double f_lo = ca.value;
        const double tol_t = 1e-12 * std::max(1.0, std::fabs(hi));
        while (hi - lo > tol_t) {
            const double m = 0.5 * (lo + hi);
            if (m <= lo || m >= hi) break;
            auto probe = left;
            eng.advance_to(probe, m);
            const double fm = want_u ? probe.u.value : probe.v.value;
            if (fm == 0.0) {
                lo = hi = m;
                break;
            }
            if ((fm < 0.0) == (f_lo < 0.0)) {
                lo = m;
                f_lo = fm;
                left = probe;
            } else {
                hi = m;
            }
        }
        return {0.5 * (lo + hi), f_lo > 0.0 ? 1 : -1};
    }
    throw NoSignChangeError("locate_blowup: no inverted-chart sign change in the bracket");
}

}  // namespace mink
