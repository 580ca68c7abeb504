#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mink/congruence.hpp"
#include "mink/curve.hpp"
#include "mink/darboux.hpp"
#include "mink/errors.hpp"
#include "mink/penrose.hpp"
#include "mink/split_complex.hpp"

namespace mink {

// Simultaneous arc-length polarization certificate: a pair sharing the
// arc-length polarization keeps |xhat - x|^2 = 1/lambda along the whole flow.
// Returns the worst deviation over the finite samples; the Minkowski square
// of the offset is formed from the projective chart state (p*q), which stays
// accurate arbitrarily close to a blow-up where the Cartesian difference
// cancels catastrophically.
inline double check_simultaneous_alp(const DarbouxSolution& sol, double lambda) {
    const double target = 1.0 / lambda;
    double worst = 0.0;
    for (const Sample& s : sol.samples) {
        if (!s.xhat) continue;
        const double pq = s.state.u.offset() * s.state.v.offset();
        worst = std::max(worst, std::fabs(pq - target));
    }
    return worst;
}

// Max relative error of |x'|^2 |xhat'|^2 = (lambda w)^2 (|xhat - x|^2)^2 over
// the finite samples, with xhat' evaluated through the defining relation.
// Every Minkowski square is formed as a null-coordinate product u*v; the
// Cartesian difference of squares cancels catastrophically near a blow-up,
// where one null component of xhat' dwarfs the other.
inline double velocity_identity_residual(const DarbouxSolution& sol) {
    double worst = 0.0;
    for (const Sample& s : sol.samples) {
        if (!s.xhat) continue;
        const auto [du, dv] = to_null(sol.base.curve.derivative(s.t));
        const auto [uh, vh] = to_null(*s.xhat);
        const auto [ux, vx] = to_null(s.x);
        const double w = sol.base.polarization.reciprocal(s.t);
        const auto [uhd, vhd] =
            rhs_null(sol.base, sol.params.lambda, sol.params.mode, s.t, uh, vh);
        const double lhs = (du * dv) * (uhd * vhd);
        const double y2 = (uh - ux) * (vh - vx);
        const double rhs = (sol.params.lambda * w) * (sol.params.lambda * w) * y2 * y2;
        const double denom = std::max(std::fabs(lhs), std::fabs(rhs));
        if (denom > 1e-250) worst = std::max(worst, std::fabs(lhs - rhs) / denom);
    }
    return worst;
}

struct CurvePointEvent {
    enum class Kind { SingularCandidate, LightlikeVelocity, DegeneratePoint };
    Kind kind = Kind::DegeneratePoint;
    double t = 0.0;
    double value = 0.0;  // |xhat'|^2 resp. |xhat - x|^2 at t
};

inline const char* to_string(CurvePointEvent::Kind k) {
    switch (k) {
        case CurvePointEvent::Kind::SingularCandidate: return "singular-candidate";
        case CurvePointEvent::Kind::LightlikeVelocity: return "lightlike-velocity";
        case CurvePointEvent::Kind::DegeneratePoint: return "degenerate";
    }
    return "?";
}

namespace detail {

inline double hermite_value(double t0, double y0, double d0, double t1, double y1, double d1,
                            double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * d1;
}

// Piecewise-Hermite reconstruction of the two null offsets between the
// recorded samples, with derivatives supplied by the Riccati flow itself.
class OffsetInterp {
public:
    explicit OffsetInterp(const DarbouxSolution& sol) : sol_(&sol) {
        for (std::size_t i = 0; i < sol.samples.size(); ++i) {
            const Sample& s = sol.samples[i];
            if (!s.xhat) continue;
            idx_.push_back(i);
            ts_.push_back(s.t);
        }
    }

    bool segment_for(double t, std::size_t& left) const {
        if (ts_.size() < 2 || t < ts_.front() || t > ts_.back()) return false;
        auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
        std::size_t j = static_cast<std::size_t>(std::distance(ts_.begin(), it));
        if (j == 0) j = 1;
        if (j >= ts_.size()) j = ts_.size() - 1;
        left = j - 1;
        // refuse to interpolate across a blow-up
        for (const BlowupEvent& ev : sol_->events) {
            if (ev.t_star > ts_[left] && ev.t_star < ts_[left + 1]) return false;
        }
        return true;
    }

    std::pair<double, double> offsets_at(double t, std::size_t left) const {
        const Sample& a = sol_->samples[idx_[left]];
        const Sample& b = sol_->samples[idx_[left + 1]];
        const auto da = offset_rates(a);
        const auto db = offset_rates(b);
        const double p = hermite_value(a.t, a.state.u.offset(), da.first, b.t, b.state.u.offset(),
                                       db.first, t);
        const double q = hermite_value(a.t, a.state.v.offset(), da.second, b.t, b.state.v.offset(),
                                       db.second, t);
        return {p, q};
    }

    std::size_t count() const { return ts_.size(); }
    double node_t(std::size_t i) const { return ts_[i]; }
    const Sample& node(std::size_t i) const { return sol_->samples[idx_[i]]; }

    // |xhat'|^2 = uhat' * vhat' reconstructed at an arbitrary t.
    double speed2_at(double t) const {
        std::size_t left;
        if (!segment_for(t, left)) return std::numeric_limits<double>::infinity();
        const auto [p, q] = offsets_at(t, left);
        const auto k = riccati_coeffs(sol_->base, sol_->params.lambda, sol_->params.mode, t);
        return (k.a_u * p * p) * (k.a_v * q * q);
    }

    std::pair<double, double> null_rates_at(double t) const {
        std::size_t left;
        if (!segment_for(t, left)) return {0.0, 0.0};
        const auto [p, q] = offsets_at(t, left);
        const auto k = riccati_coeffs(sol_->base, sol_->params.lambda, sol_->params.mode, t);
        return {k.a_u * p * p, k.a_v * q * q};
    }

private:
    std::pair<double, double> offset_rates(const Sample& s) const {
        const auto k = riccati_coeffs(sol_->base, sol_->params.lambda, sol_->params.mode, s.t);
        const double p = s.state.u.offset();
        const double q = s.state.v.offset();
        return {k.a_u * p * p + k.c_u, k.a_v * q * q + k.c_v};
    }

    const DarbouxSolution* sol_;
    std::vector<std::size_t> idx_;
    std::vector<double> ts_;
};

}  // namespace detail

// Scans a solution for (a) singular candidates (both null components of
// xhat' vanish), (b) lightlike-velocity points (|xhat'|^2 = 0 with one
// component bounded away), and (c) degenerate points (xhat - x lightlike,
// i.e. one null offset crosses zero). Event parameters are refined on the
// Hermite reconstruction of the offsets.
inline std::vector<CurvePointEvent> detect_singular_and_degenerate(const DarbouxSolution& sol) {
    std::vector<CurvePointEvent> events;
    const detail::OffsetInterp interp(sol);
    if (interp.count() < 2) return events;

    // (c) degenerate points: a sign change of one affine offset between
    // adjacent samples. Scanned per component over samples where that
    // component is finite, so an offset zero right next to a blow-up of the
    // other component is still caught; pairs straddling an event are skipped.
    for (std::size_t i = 0; i + 1 < sol.samples.size(); ++i) {
        const Sample& a = sol.samples[i];
        const Sample& b = sol.samples[i + 1];
        bool straddles = false;
        for (const BlowupEvent& ev : sol.events) {
            straddles = straddles || (ev.t_star > a.t && ev.t_star < b.t);
        }
        if (straddles) continue;
        for (int comp = 0; comp < 2; ++comp) {
            const ComponentState& ca = comp == 0 ? a.state.u : a.state.v;
            const ComponentState& cb = comp == 0 ? b.state.u : b.state.v;
            if (ca.at_infinity() || cb.at_infinity()) continue;
            const double ya = ca.offset();
            const double yb = cb.offset();
            if (ya == 0.0 || (ya < 0.0) == (yb < 0.0)) continue;
            const auto ka = detail::riccati_coeffs(sol.base, sol.params.lambda, sol.params.mode, a.t);
            const auto kb = detail::riccati_coeffs(sol.base, sol.params.lambda, sol.params.mode, b.t);
            const double da = comp == 0 ? ka.a_u * ya * ya + ka.c_u : ka.a_v * ya * ya + ka.c_v;
            const double db = comp == 0 ? kb.a_u * yb * yb + kb.c_u : kb.a_v * yb * yb + kb.c_v;
            auto f = [&](double t) { return detail::hermite_value(a.t, ya, da, b.t, yb, db, t); };
            const double t_star = detail::bisect_root(f, a.t, b.t, ya);
            // an offset zero coinciding with a blow-up of the partner
            // component is the projective flip (|xhat - x|^2 stays away from
            // zero there), not a degenerate point
            bool at_blowup = false;
            for (const BlowupEvent& ev : sol.events) {
                at_blowup = at_blowup ||
                            std::fabs(ev.t_star - t_star) < 1e-8 * std::max(1.0, std::fabs(t_star));
            }
            if (at_blowup) continue;
            // residual magnitude |xhat - x|^2: the vanishing offset from the
            // interpolant, the other one from the nearest finite endpoint
            double other = 0.0;
            {
                const ComponentState& oa = comp == 0 ? a.state.v : a.state.u;
                const ComponentState& ob = comp == 0 ? b.state.v : b.state.u;
                if (!oa.at_infinity() && !ob.at_infinity()) {
                    other = t_star - a.t < b.t - t_star ? oa.offset() : ob.offset();
                } else {
                    other = oa.at_infinity() ? ob.offset() : oa.offset();
                }
            }
            events.push_back({CurvePointEvent::Kind::DegeneratePoint, t_star,
                              std::fabs(f(t_star) * other)});
        }
    }

    // (a)/(b): vanishing |xhat'|^2. Lightlike points of the base curve are
    // checked directly; elsewhere a sample counts as a candidate when the
    // reconstructed velocity lies on the lightlike cone (relative test, so
    // huge near-blow-up velocities cannot mask it).
    std::vector<double> g(interp.count()), cone(interp.count());
    for (std::size_t i = 0; i < interp.count(); ++i) {
        const auto [du, dv] = interp.null_rates_at(interp.node_t(i));
        g[i] = du * dv;
        cone[i] = 0.5 * (du * du + dv * dv);
    }
    auto push_speed_event = [&](double t_star) {
        std::size_t seg;
        if (!interp.segment_for(t_star, seg)) return;  // cannot evaluate across a blow-up
        const auto [du, dv] = interp.null_rates_at(t_star);
        double ref = 0.0;
        for (std::size_t i = 0; i < interp.count(); ++i) {
            if (std::fabs(interp.node_t(i) - t_star) < 0.25) {
                const auto [a, b] = interp.null_rates_at(interp.node_t(i));
                ref = std::max(ref, std::max(std::fabs(a), std::fabs(b)));
            }
        }
        const bool both_vanish =
            std::max(std::fabs(du), std::fabs(dv)) <= 1e-6 * std::max(ref, 1e-30);
        events.push_back({both_vanish ? CurvePointEvent::Kind::SingularCandidate
                                      : CurvePointEvent::Kind::LightlikeVelocity,
                          t_star, du * dv});
    };

    for (double tc : sol.lightlike_crossings) {
        std::size_t left;
        if (!interp.segment_for(tc, left)) continue;
        const double gap = interp.node_t(left + 1) - interp.node_t(left);
        const double lo = std::max(interp.node_t(0), tc - gap);
        const double hi = std::min(interp.node_t(interp.count() - 1), tc + gap);
        const double t_star = detail::golden_min(
            [&interp](double t) { return std::fabs(interp.speed2_at(t)); }, lo, hi);
        push_speed_event(t_star);
    }

    for (std::size_t i = 1; i + 1 < interp.count(); ++i) {
        const double gi = std::fabs(g[i]);
        if (gi > kLightlikeRelTol * cone[i]) continue;
        if (gi > std::fabs(g[i - 1]) || gi > std::fabs(g[i + 1])) continue;
        const double t_star =
            detail::golden_min([&interp](double t) { return std::fabs(interp.speed2_at(t)); },
                               interp.node_t(i - 1), interp.node_t(i + 1));
        bool dup = false;
        for (const CurvePointEvent& e : events) {
            if (e.kind != CurvePointEvent::Kind::DegeneratePoint && std::fabs(e.t - t_star) < 1e-6) {
                dup = true;
            }
        }
        if (!dup) push_speed_event(t_star);
    }

    std::sort(events.begin(), events.end(),
              [](const CurvePointEvent& a, const CurvePointEvent& b) { return a.t < b.t; });
    return events;
}

struct BlowupReport {
    double t_star = 0.0;
    InfinityClass infinity;
    double direction_indicator = 0.0;  // trailing value of the sigma-image indicator
    double boundary_angle_deg = 0.0;   // Euclidean angle to the boundary edge
    std::vector<std::pair<double, double>> radius_trend;  // (t, xi), trailing samples
    std::vector<double> indicator_trail;                  // last 8 indicator values
};

// Full classification of one blow-up event: infinity type from the null
// divergence pattern, direction at infinity through the inversion indicator,
// and the Euclidean angle between the Penrose-image tangent and the boundary
// edge measured at the last interior samples.
inline BlowupReport classify_blowup(const DarbouxSolution& sol, const BlowupEvent& ev) {
    std::vector<const Sample*> trail;
    for (const Sample& s : sol.samples) {
        if (s.xhat && s.t < ev.t_star) trail.push_back(&s);
    }
    if (trail.size() < 8) {
        throw InsufficientSamplesError("classify_blowup: fewer than 8 samples precede the event");
    }

    BlowupReport rep;
    rep.t_star = ev.t_star;
    {
        auto desc = [](bool div, int sign, double fin) {
            if (!div) return Divergence::finite(fin);
            return sign > 0 ? Divergence::plus_infinity() : Divergence::minus_infinity();
        };
        // finite-limit estimate from the last interior sample
        const auto [u_fin, v_fin] = to_null(*trail.back()->xhat);
        rep.infinity = classify_infinity(desc(ev.u_diverges, ev.sign_u, u_fin),
                                         desc(ev.v_diverges, ev.sign_v, v_fin));
    }

    for (std::size_t i = trail.size() - 8; i < trail.size(); ++i) {
        const Sample& s = *trail[i];
        const SplitComplex vel =
            xhat_velocity(sol.base, sol.params.lambda, sol.params.mode, s.t, *s.xhat);
        rep.indicator_trail.push_back(lightlike_indicator(*s.xhat, vel));
    }
    rep.direction_indicator = rep.indicator_trail.back();

    {
        const Sample& s = *trail.back();
        const SplitComplex vel =
            xhat_velocity(sol.base, sol.params.lambda, sol.params.mode, s.t, *s.xhat);
        const PenroseVelocity pv = penrose_velocity(*s.xhat, vel);
        const double mag = std::hypot(pv.dpsi, pv.dzeta);
        auto angle_vs = [&](const PenroseVelocity& e) {
            const double c = std::fabs(pv.dpsi * e.dpsi + pv.dzeta * e.dzeta) / mag;
            return std::acos(std::clamp(c, 0.0, 1.0)) * 180.0 / std::numbers::pi;
        };
        if (mag == 0.0) {
            rep.boundary_angle_deg = 0.0;
        } else if (rep.infinity.kind == InfinityKind::NullInfinity) {
            rep.boundary_angle_deg = angle_vs(edge_direction(rep.infinity.edge));
        } else {
            // corner classes: angle against the nearer of the two edge families
            rep.boundary_angle_deg = std::min(angle_vs(edge_direction(NullEdge::UpperRight)),
                                              angle_vs(edge_direction(NullEdge::UpperLeft)));
        }
    }

    const std::size_t first = trail.size() >= 10 ? trail.size() - 10 : 0;
    for (std::size_t i = first; i < trail.size(); ++i) {
        const Sample& s = *trail[i];
        const CircleCongruence cc = congruence_at(s.x, sol.base.curve.derivative(s.t), *s.xhat);
        if (cc.is_circle()) rep.radius_trend.emplace_back(s.t, cc.radius_xi);
    }
    return rep;
}

// One point of a trajectory handed to the tangency test.
struct PathSample {
    double t = 0.0;
    SplitComplex pos;
    SplitComplex vel;
};

struct TangencyReport {
    bool tangent = false;
    double position_residual = 0.0;
    double direction_residual = 0.0;
};

namespace detail {

struct SigmaImage {
    SplitComplex pos;
    SplitComplex vel;
};

inline SigmaImage sigma_image(const PathSample& s, const SplitComplex& center) {
    const SplitComplex rel = s.pos - center;
    const auto [u, v] = to_null(rel);
    if (std::fabs(u * v) <= kLightlikeRelTol * 0.5 * (u * u + v * v)) {
        throw LightlikeObstructionError("tangent_at_infinity: sigma image hits the lightlike cone");
    }
    const auto [du, dv] = to_null(s.vel);
    return {from_null(1.0 / v, 1.0 / u), from_null(-dv / (v * v), -du / (u * u))};
}

}  // namespace detail

// First-order contact test for two trajectories blowing up at the same
// parameter: a plane inversion about `center` brings the contact point to a
// finite position; positions are extrapolated to t_star and the image
// tangent directions compared up to orientation.
inline TangencyReport tangent_at_infinity(std::span<const PathSample> a,
                                          std::span<const PathSample> b, double t_star,
                                          const SplitComplex& center = {0.0, 0.0}) {
    auto limit_of = [&](std::span<const PathSample> path) {
        std::vector<detail::SigmaImage> tail;
        double t_last = 0.0;
        for (const PathSample& s : path) {
            if (s.t < t_star) {
                tail.push_back(detail::sigma_image(s, center));
                t_last = s.t;
            }
        }
        if (tail.size() < 2) {
            throw InsufficientSamplesError("tangent_at_infinity: need >= 2 samples before t_star");
        }
        const detail::SigmaImage& last = tail.back();
        const SplitComplex pos_lim = last.pos + (t_star - t_last) * last.vel;
        SplitComplex dir = last.vel;
        if (euclid_norm2(dir) < 1e-300) {
            dir = last.pos - tail[tail.size() - 2].pos;
        }
        const double mag = std::sqrt(euclid_norm2(dir));
        if (mag > 0.0) dir = dir / mag;
        return std::pair<SplitComplex, SplitComplex>{pos_lim, dir};
    };

    const auto [pos_a, dir_a] = limit_of(a);
    const auto [pos_b, dir_b] = limit_of(b);

    TangencyReport rep;
    const double scale = 1.0 + std::sqrt(std::max(euclid_norm2(pos_a), euclid_norm2(pos_b)));
    rep.position_residual = std::sqrt(euclid_norm2(pos_a - pos_b)) / scale;
    rep.direction_residual = std::sqrt(
        std::min(euclid_norm2(dir_a - dir_b), euclid_norm2(dir_a + dir_b)));
    rep.tangent = rep.position_residual < 1e-2 && rep.direction_residual < 5e-2;
    return rep;
}

}  // namespace mink
