#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mink/analysis.hpp"
#include "mink/darboux.hpp"
#include "support.hpp"

using namespace mink;
using testutil::close;
using testutil::close_rel;
using testutil::Rng;

namespace {

constexpr double pi = std::numbers::pi;

PolarizedCurve horizontal_line() {
    ParamCurve line = make_line({0, 0}, {1, 0});
    return {line, arc_length_polarization(line)};
}

Tolerances tight() {
    Tolerances t;
    t.rel = 1e-12;
    t.abs = 1e-14;
    return t;
}

}  // namespace

TEST_CASE("cross ratio residual") {
    // hand-checked: x'(0,0)=(1,0), xhat=(0,1), xhat'=(-1,0), w=1, lambda=-1
    const SplitComplex r =
        cross_ratio_residual({0, 0}, {1, 0}, {0, 1}, {-1, 0}, 1.0, -1.0);
    CHECK(close(r, {0, 0}, 1e-15));

    // stationary offset probe: xhat = x + c with xhat' = 0 leaves -lambda w c^2
    const SplitComplex c{0.3, 0.7};
    const SplitComplex probe =
        cross_ratio_residual({1, 2}, {1, 0}, SplitComplex{1, 2} + c, {0, 0}, 2.0, 1.5);
    CHECK(close(probe, (-1.5 * 2.0) * (c * c), 1e-13));

    // finite-difference oracle on a known smooth pair
    const LineOracle oracle(-1.0, 1.0, -1.0);
    auto xhat_at = [&oracle](double t) {
        return SplitComplex{t, 0} + from_null(oracle.p(t), oracle.q(t));
    };
    for (double t : {0.1, 0.3, 0.5}) {
        const SplitComplex xhd = testutil::central_diff(xhat_at, t);
        const SplitComplex res = cross_ratio_residual({t, 0}, {1, 0}, xhat_at(t), xhd, 1.0, -1.0);
        CHECK(close(res, {0, 0}, 1e-7));
    }
}

TEST_CASE("null right-hand side") {
    const PolarizedCurve pc = horizontal_line();
    // uhat' = lambda w (uhat - u)^2 / u' = -1 at uhat = 1, t = 0
    const auto [du, dv] = rhs_null(pc, -1.0, DarbouxMode::Generic, 0.0, 1.0, 0.0);
    CHECK(close(du, -1.0, 1e-15));
    CHECK(close(dv, 0.0, 1e-15));

    // regularized mode at lightlike points: the vanishing null velocity
    // factor kills the matching component of xhat'. u_x' = 0 at t = pi/4
    // (so vhat' = 0 there) and v_x' = 0 at t = 3 pi/4 (so uhat' = 0).
    ParamCurve ec = make_euclidean_circle({0, 0}, 1.0);
    PolarizedCurve pec{ec, arc_length_polarization(ec)};
    {
        const auto [cu, cv] = rhs_null(pec, 1.0, DarbouxMode::ArcLengthRegularized, pi / 4, 10.0, 0.5);
        (void)cu;
        CHECK(std::fabs(cv) < 1e-12);
    }
    {
        const auto [cu, cv] =
            rhs_null(pec, 1.0, DarbouxMode::ArcLengthRegularized, 3 * pi / 4, 10.0, 0.5);
        (void)cv;
        CHECK(std::fabs(cu) < 1e-12 * 100);
    }

    // generic mode refuses lightlike base points
    CHECK_THROWS_AS((void)rhs_null(pec, 1.0, DarbouxMode::Generic, pi / 4, 1.0, 1.0),
                    LightlikeBaseCurveError);
}

TEST_CASE("line oracle solves its own equation") {
    for (double lambda : {-1.0, -0.25, 1.0, 2.25}) {
        for (double y0 : {1.0, 2.0, -0.5, 0.3}) {
            for (int k = 0; k <= 40; ++k) {
                const double t = -0.4 + 0.02 * k;
                const double h = 1e-6;
                const double deriv =
                    (LineOracle::flow(lambda, y0, t + h) - LineOracle::flow(lambda, y0, t - h)) /
                    (2 * h);
                const double y = LineOracle::flow(lambda, y0, t);
                if (std::fabs(y) > 50) continue;  // away from its own pole
                CHECK(close(deriv, lambda * y * y - 1.0, 1e-5 * (1 + y * y)));
            }
        }
    }
    // tan-product identity: p0 = 1, q0 = -1 gives p q = -1 for all t
    const LineOracle alp(-1.0, 1.0, -1.0);
    for (double t : {0.0, 0.2, 0.5, 0.7}) {
        CHECK(close(alp.p(t) * alp.q(t), -1.0, 1e-12));
    }
    // equilibrium of p' = p^2 - 1
    const LineOracle eq(1.0, 1.0, 1.0);
    CHECK(close(eq.p(2.0), 1.0, 1e-12));
}

TEST_CASE("integrator matches the closed form") {
    const PolarizedCurve pc = horizontal_line();
    const DarbouxParams params{-1.0, {0, 1}, 0.0, DarbouxMode::Generic};
    const DarbouxSolution sol = integrate(pc, params, pi / 4 - 0.1, tight());
    const LineOracle oracle(-1.0, 1.0, -1.0);
    double worst = 0.0;
    for (const Sample& s : sol.samples) {
        REQUIRE(s.xhat);
        worst = std::max(worst, std::fabs(s.state.u.offset() - oracle.p(s.t)));
        worst = std::max(worst, std::fabs(s.state.v.offset() - oracle.q(s.t)));
    }
    CHECK(worst < 1e-8);
    CHECK(sol.events.empty());
}

TEST_CASE("blow-up is located and continued through") {
    const PolarizedCurve pc = horizontal_line();

    SUBCASE("negative lambda: v component reaches pi/4") {
        const DarbouxParams params{-1.0, {0, 1}, 0.0, DarbouxMode::Generic};
        const DarbouxSolution sol = integrate(pc, params, 1.2, tight());
        REQUIRE(sol.events.size() == 1);
        CHECK(close(sol.events[0].t_star, pi / 4, 1e-9));
        CHECK(sol.events[0].v_diverges);
        CHECK(!sol.events[0].u_diverges);
        CHECK(sol.events[0].infinity.kind == InfinityKind::NullInfinity);
        CHECK(sol.events[0].infinity.edge == NullEdge::UpperLeft);

        const BlowupLocation loc = locate_blowup(sol, NullComponent::V, {0.7, 0.9});
        CHECK(close(loc.t_star, pi / 4, 1e-9));
        CHECK(loc.divergence_sign == -1);

        // one at-infinity marker, coinciding with the event
        int markers = 0;
        for (const Sample& s : sol.samples) {
            if (!s.xhat) {
                ++markers;
                CHECK(close(s.t, sol.events[0].t_star, 1e-12));
                CHECK(s.state.v.at_infinity());
            }
        }
        CHECK(markers == 1);

        // integration continued to t_end with the offset on the other side
        CHECK(sol.samples.back().t == 1.2);
        const LineOracle oracle(-1.0, 1.0, -1.0);
        CHECK(close(sol.samples.back().state.v.offset(), oracle.q(1.2), 1e-6));
    }

    SUBCASE("positive lambda: u component reaches artanh(1/2)") {
        const DarbouxParams params{1.0, from_null(2.0, 0.5), 0.0, DarbouxMode::Generic};
        const DarbouxSolution sol = integrate(pc, params, 1.0, tight());
        REQUIRE(sol.events.size() == 1);
        CHECK(close(sol.events[0].t_star, std::atanh(0.5), 1e-9));
        CHECK(sol.events[0].u_diverges);
        CHECK(sol.events[0].infinity.edge == NullEdge::UpperRight);
        // the finite null coordinate of the event: vhat(t*) = t* + q(t*) = t*
        CHECK(close(sol.events[0].infinity.offset, std::atanh(0.5), 1e-8));

        const BlowupLocation loc = locate_blowup(sol, NullComponent::U, {0.4, 0.7});
        CHECK(close(loc.t_star, std::atanh(0.5), 1e-9));
        CHECK(loc.divergence_sign == 1);
    }

    SUBCASE("stationary equilibrium never blows up") {
        const DarbouxParams params{1.0, {1, 0}, 0.0, DarbouxMode::Generic};
        const DarbouxSolution sol = integrate(pc, params, 2.0, tight());
        CHECK(sol.events.empty());
        for (const Sample& s : sol.samples) {
            REQUIRE(s.xhat);
            CHECK(close(*s.xhat, {s.t + 1.0, 0.0}, 1e-9));
        }
        CHECK_THROWS_AS((void)locate_blowup(sol, NullComponent::U, {0.0, 2.0}), NoSignChangeError);
    }
}

TEST_CASE("offset norm is conserved exactly when |xhat-x|^2 = 1/lambda") {
    const PolarizedCurve pc = horizontal_line();
    {
        const DarbouxParams params{-1.0, {0, 1}, 0.0, DarbouxMode::Generic};
        const DarbouxSolution sol = integrate(pc, params, 1.2, tight());
        CHECK(check_simultaneous_alp(sol, -1.0) < 1e-9);
        // simultaneous unit speed: |xhat'|^2 = |x'|^2 = 1
        for (const Sample& s : sol.samples) {
            if (!s.xhat) continue;
            const auto [uh, vh] = to_null(*s.xhat);
            const auto [du, dv] = rhs_null(pc, -1.0, DarbouxMode::Generic, s.t, uh, vh);
            CHECK(close_rel(du * dv, 1.0, 1e-8));
        }
    }
    {
        const DarbouxParams params{1.0, from_null(2.0, 0.5), 0.0, DarbouxMode::Generic};
        const DarbouxSolution sol = integrate(pc, params, 1.0, tight());
        CHECK(check_simultaneous_alp(sol, 1.0) < 1e-9);
    }
    {
        // negative control: |xhat-x|^2 = 2 != 1/lambda drifts
        const DarbouxParams params{1.0, from_null(2.0, 1.0), 0.0, DarbouxMode::Generic};
        const DarbouxSolution sol = integrate(pc, params, 0.4, tight());
        CHECK(check_simultaneous_alp(sol, 1.0) > 1e-3);
    }
}

TEST_CASE("chart switching is consistent") {
    const PolarizedCurve pc = horizontal_line();
    const DarbouxParams params{-1.0, {0, 1}, 0.0, DarbouxMode::Generic};

    // p * s = 1 wherever a component is on the inverted chart
    const DarbouxSolution sol = integrate(pc, params, 1.2, tight());
    for (const Sample& s : sol.samples) {
        if (!s.xhat) continue;
        CHECK(std::fabs(s.state.u.value) <= sol.tol.chart_switch * (1 + 1e-12));
        CHECK(std::fabs(s.state.v.value) <= sol.tol.chart_switch * (1 + 1e-12));
        if (s.state.v.chart == Chart::Inverted && s.state.v.value != 0.0) {
            CHECK(close_rel(s.state.v.offset() * s.state.v.value, 1.0, 1e-14));
        }
    }

    // different switch thresholds integrate the same flow
    std::vector<double> finals;
    for (double s_switch : {2.0, 4.0, 8.0}) {
        Tolerances tol = tight();
        tol.chart_switch = s_switch;
        const DarbouxSolution run = integrate(pc, params, 1.2, tol);
        finals.push_back(run.samples.back().state.v.offset());
    }
    CHECK(close_rel(finals[0], finals[1], 1e-10));
    CHECK(close_rel(finals[1], finals[2], 1e-10));
}

TEST_CASE("tolerance classes converge like a fifth-order method") {
    const PolarizedCurve pc = horizontal_line();
    const DarbouxParams params{-1.0, {0, 1}, 0.0, DarbouxMode::Generic};
    const LineOracle oracle(-1.0, 1.0, -1.0);
    std::vector<double> errs;
    for (double rel : {1e-4, 1e-7, 1e-10}) {
        Tolerances tol;
        tol.rel = rel;
        tol.abs = rel * 1e-2;
        const DarbouxSolution sol = integrate(pc, params, 0.6, tol);
        double worst = 0.0;
        for (const Sample& s : sol.samples) {
            worst = std::max(worst, std::fabs(s.state.u.offset() - oracle.p(s.t)));
        }
        errs.push_back(worst);
    }
    CHECK(errs[1] < errs[0] / 30.0);
    CHECK(errs[2] < errs[1] / 30.0);
}

TEST_CASE("validation and typed failures") {
    const PolarizedCurve pc = horizontal_line();
    CHECK_THROWS_AS((void)integrate(pc, {0.0, {0, 1}, 0.0, DarbouxMode::Generic}, 1.0),
                    InvalidParamsError);
    CHECK_THROWS_AS((void)integrate(pc, {-1.0, {0, 0}, 0.0, DarbouxMode::Generic}, 1.0),
                    CoincidentPointsError);
    CHECK_THROWS_AS((void)integrate(pc, {-1.0, {0, 1}, 0.0, DarbouxMode::Generic}, 2e6),
                    DomainExceededError);

    // regularized mode requires the arc-length polarization
    PolarizedCurve constant_pol{make_line({0, 0}, {1, 0}), Polarization::constant_m(1.0)};
    CHECK_THROWS_AS(
        (void)integrate(constant_pol, {-1.0, {0, 1}, 0.0, DarbouxMode::ArcLengthRegularized}, 1.0),
        InvalidParamsError);

    // generic mode refuses a base curve with lightlike points in range
    ParamCurve ec = make_euclidean_circle({0, 0}, 1.0);
    PolarizedCurve pec{ec, arc_length_polarization(ec)};
    CHECK_THROWS_AS((void)integrate(pec, {1.0, {2, 0.5}, 0.0, DarbouxMode::Generic}, 6.0),
                    LightlikeBaseCurveError);

    // identically lightlike base curves are rejected outright
    ParamCurve ll = make_lightlike_line({0, 0});
    PolarizedCurve pll{ll, Polarization::constant_m(1.0)};
    CHECK_THROWS_AS((void)integrate(pll, {1.0, {2, 0.5}, 0.0, DarbouxMode::Generic}, 1.0),
                    LightlikeBaseCurveError);
}

TEST_CASE("cross ratio residual vanishes along integrated pairs") {
    const PolarizedCurve pc = horizontal_line();
    const DarbouxParams params{1.0, from_null(2.0, 0.5), 0.0, DarbouxMode::Generic};
    const DarbouxSolution sol = integrate(pc, params, 1.0, tight());
    for (const Sample& s : sol.samples) {
        if (!s.xhat) continue;
        const SplitComplex xd = pc.curve.derivative(s.t);
        const SplitComplex xhd = xhat_velocity(pc, 1.0, DarbouxMode::Generic, s.t, *s.xhat);
        const SplitComplex res = cross_ratio_residual(s.x, xd, *s.xhat, xhd, 1.0, 1.0);
        const double y4 = euclid_norm2(*s.xhat - s.x) * euclid_norm2(*s.xhat - s.x);
        CHECK(std::fabs(res.re) < 1e-7 * (1 + y4));
        CHECK(std::fabs(res.im) < 1e-7 * (1 + y4));
    }
}
