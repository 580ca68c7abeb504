#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mink/penrose.hpp"
#include "support.hpp"

using namespace mink;
using testutil::close;
using testutil::close_rel;
using testutil::Rng;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("penrose map basics") {
    CHECK(close(penrose_map({0, 0}).psi, 0.0, 0.0));
    CHECK(close(penrose_map({0, 0}).zeta, 0.0, 0.0));
    const PenrosePoint p = penrose_map({1, 0});
    CHECK(close(p.psi, pi / 2, 1e-15));
    CHECK(close(p.zeta, 0.0, 1e-15));
    // spatial infinity limit
    const PenrosePoint far = penrose_map({1e12, 0});
    CHECK(close(far.psi, pi, 1e-11));
    CHECK(close(far.zeta, 0.0, 1e-11));
}

TEST_CASE("unmap inverts the chart") {
    CHECK(close(penrose_unmap({0, 0}), {0, 0}, 0.0));
    CHECK(close(penrose_unmap({pi / 2, 0}), {1, 0}, 1e-15));
    const SplitComplex x{3, -2};
    CHECK(close(penrose_unmap(penrose_map(x)), x, 1e-12));
    CHECK_THROWS_AS((void)penrose_unmap({pi, 0.0}), BoundaryPointError);
    CHECK_THROWS_AS((void)penrose_unmap({pi / 2, pi / 2}), BoundaryPointError);
}

TEST_CASE("round trip degrades only with the chart conditioning") {
    Rng rng(3);
    for (int i = 0; i < 400; ++i) {
        const double mag = std::pow(10.0, rng.uniform(0.0, 6.0));
        const double u = mag * (rng.next() % 2 ? 1 : -1);
        const double v = rng.uniform(-mag, mag);
        const SplitComplex x = from_null(u, v);
        const SplitComplex back = penrose_unmap(penrose_map(x));
        const auto [ub, vb] = to_null(back);
        // error of tan(atan(u)) grows like eps * (1 + u^2) / |u|; allow 32 ulp
        const double tol_u = 32 * 2.3e-16 * (1.0 + u * u) / std::max(1.0, std::fabs(u));
        const double tol_v = 32 * 2.3e-16 * (1.0 + v * v) / std::max(1.0, std::fabs(v)) + 1e-12;
        CHECK(std::fabs(ub - u) <= tol_u * std::max(1.0, std::fabs(u)));
        CHECK(std::fabs(vb - v) <= tol_v * std::max(1.0, std::fabs(v)));
        // moderate magnitudes meet the tight bound
        if (mag <= 1e3) {
            CHECK(std::fabs(ub - u) <= 1e-12 * std::max(1.0, std::fabs(u)));
        }
    }
}

TEST_CASE("conformal factor") {
    CHECK(close(conformal_factor({0, 0}), 0.25, 1e-15));
    CHECK(close(conformal_factor({pi / 2, 0}), 1.0, 1e-12));
    CHECK_THROWS_AS((void)conformal_factor({pi / 2, pi / 2}), BoundaryPointError);

    // finite-difference pullback oracle: du dv = Omega^2 (dpsi^2 - dzeta^2)
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const SplitComplex x = rng.point(-5, 5);
        const SplitComplex d = rng.point(-1, 1);
        const double h = 1e-6;
        const PenrosePoint pp = penrose_map(x + h * d);
        const PenrosePoint pm = penrose_map(x - h * d);
        const double dpsi = (pp.psi - pm.psi) / (2 * h);
        const double dzeta = (pp.zeta - pm.zeta) / (2 * h);
        const double lhs = norm2(d);
        const double rhs = conformal_factor(penrose_map(x)) * (dpsi * dpsi - dzeta * dzeta);
        if (std::fabs(lhs) > 1e-3) CHECK(close_rel(lhs, rhs, 1e-8));
    }
}

TEST_CASE("penrose velocity and conformality") {
    const PenroseVelocity w0 = penrose_velocity({0, 0}, {1, 0});
    CHECK(close(w0.dpsi, 2.0, 1e-15));
    CHECK(close(w0.dzeta, 0.0, 1e-15));

    // a lightlike line maps to a lightlike image direction everywhere
    for (double t : {-3.0, 0.0, 1.7, 40.0}) {
        const PenroseVelocity w = penrose_velocity({t, t}, {1, 1});
        CHECK(close(penrose_norm2(w), 0.0, 1e-14));
        CHECK(w.dpsi > 0);
    }

    Rng rng(23);
    for (int i = 0; i < 300; ++i) {
        const SplitComplex x = rng.point(-10, 10);
        const SplitComplex d = rng.point(-2, 2);
        const PenroseVelocity w = penrose_velocity(x, d);
        const double back = conformal_factor(penrose_map(x)) * penrose_norm2(w);
        CHECK(close_rel(back, norm2(d), 1e-8));
        // causal class is preserved
        if (std::fabs(norm2(d)) > 1e-6) {
            CHECK((norm2(d) > 0) == (penrose_norm2(w) > 0));
        }
    }
}

TEST_CASE("lightlike indicator") {
    CHECK(close(lightlike_indicator({0, 0}, {1, 0}), 4.0, 1e-15));
    CHECK(close(lightlike_indicator({3, 2}, {2, 1}), 12.0 / 52.0, 1e-15));
    for (double t : {-2.0, 0.0, 5.0}) {
        CHECK(close(lightlike_indicator({t, t}, {1, 1}), 0.0, 1e-300));
    }
}

TEST_CASE("infinity classification") {
    // timelike unit circle: u = sec + tan diverges, v = sec - tan -> 0
    std::vector<double> us, vs;
    for (int k = 1; k <= 12; ++k) {
        const double t = pi / 2 - std::pow(10.0, -k);
        us.push_back(1.0 / std::cos(t) + std::tan(t));
        vs.push_back(1.0 / std::cos(t) - std::tan(t));
    }
    const InfinityClass c = classify_infinity(divergence_trend(us), divergence_trend(vs));
    CHECK(c.kind == InfinityKind::NullInfinity);
    CHECK(c.edge == NullEdge::UpperRight);
    // sec - tan -> 0, observed through ulp noise of the ~1e12 intermediates
    CHECK(std::fabs(c.offset) < 1e-3);
    const PenrosePoint b = penrose_boundary_point(c);
    CHECK(close(b.psi + b.zeta, pi, 1e-9));

    const InfinityClass spatial =
        classify_infinity(Divergence::plus_infinity(), Divergence::plus_infinity());
    CHECK(spatial.kind == InfinityKind::SpatialI0);
    CHECK(spatial.side == 1);
    CHECK(close(penrose_boundary_point(spatial).psi, pi, 0.0));
    CHECK(close(penrose_boundary_point(spatial).zeta, 0.0, 0.0));

    const InfinityClass timelike =
        classify_infinity(Divergence::plus_infinity(), Divergence::minus_infinity());
    CHECK(timelike.kind == InfinityKind::TimelikeI);
    CHECK(close(penrose_boundary_point(timelike).zeta, pi, 0.0));

    CHECK_THROWS_AS((void)classify_infinity(Divergence::finite(1.0), Divergence::finite(2.0)),
                    NotAtInfinityError);
}
