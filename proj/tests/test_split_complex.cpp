#include "doctest.h"
#include "mink/split_complex.hpp"
#include "support.hpp"

using namespace mink;
using testutil::close;
using testutil::Rng;

TEST_CASE("product follows j^2 = 1") {
    CHECK(close(SplitComplex{1, 1} * SplitComplex{1, -1}, {0, 0}, 0.0));  // zero divisors
    CHECK(close(SplitComplex{2, 1} * SplitComplex{3, 2}, {8, 7}, 0.0));
}

TEST_CASE("null coordinates are a ring isomorphism") {
    const auto [u1, v1] = to_null({2, 1});
    const auto [u2, v2] = to_null({3, 2});
    CHECK(u1 == 3);
    CHECK(v1 == 1);
    CHECK(u2 == 5);
    CHECK(v2 == 1);
    CHECK(close(from_null(u1 * u2, v1 * v2), {8, 7}, 0.0));

    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const SplitComplex z = rng.point(-50, 50);
        const SplitComplex w = rng.point(-50, 50);
        const auto [zu, zv] = to_null(z);
        const auto [wu, wv] = to_null(w);
        const auto [pu, pv] = to_null(z * w);
        // componentwise product within 4 rounding units of the term scale
        // (the two evaluation orders cancel differently)
        const double scale =
            (std::fabs(z.re) + std::fabs(z.im)) * (std::fabs(w.re) + std::fabs(w.im));
        CHECK(std::fabs(pu - zu * wu) <= 4 * 2.3e-16 * scale);
        CHECK(std::fabs(pv - zv * wv) <= 4 * 2.3e-16 * scale);
        CHECK(close(from_null(to_null(z).u, to_null(z).v), z, 1e-15 * (1 + euclid_norm2(z))));
    }
}

TEST_CASE("norm and inner product have signature (+,-)") {
    CHECK(norm2({3, 2}) == 5);
    CHECK(norm2({1, 1}) == 0);
    CHECK(minkowski_inner({1, 2}, {3, 1}) == 1);

    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const SplitComplex z = rng.point(-20, 20);
        const SplitComplex w = rng.point(-20, 20);
        // |zw|^2 = |z|^2 |w|^2, at the cancellation-limited accuracy when a
        // factor sits near the cone and at 1e-12 relative away from it
        const double lhs = norm2(z * w);
        const double rhs = norm2(z) * norm2(w);
        CHECK(std::fabs(lhs - rhs) <= 8 * 2.3e-16 * euclid_norm2(z) * euclid_norm2(w));
        if (std::fabs(norm2(z)) > 0.1 * euclid_norm2(z) &&
            std::fabs(norm2(w)) > 0.1 * euclid_norm2(w)) {
            CHECK(testutil::close_rel(lhs, rhs, 1e-12));
        }
        // u = z1+z2, v = z1-z2 and |z|^2 = u v
        const auto [u, v] = to_null(z);
        CHECK(std::fabs(norm2(z) - u * v) <= 8 * 2.3e-16 * euclid_norm2(z));
    }
}

TEST_CASE("inverse exists away from the zero divisors") {
    CHECK(close(inverse({2, 1}), {2.0 / 3.0, -1.0 / 3.0}, 1e-15));
    const auto [iu, iv] = to_null(inverse({2, 1}));
    CHECK(close(iu, 1.0 / 3.0, 1e-15));
    CHECK(close(iv, 1.0, 1e-15));
    CHECK_THROWS_AS((void)inverse({1, 1}), ZeroDivisorError);
    CHECK_THROWS_AS((void)inverse({-2, 2}), ZeroDivisorError);
    CHECK_THROWS_AS((void)inverse({0, 0}), ZeroDivisorError);

    Rng rng(11);
    int tested = 0;
    while (tested < 500) {
        const SplitComplex z = rng.point(-30, 30);
        if (std::fabs(norm2(z)) < 1e-6 * euclid_norm2(z)) continue;
        ++tested;
        const SplitComplex one = z * inverse(z);
        CHECK(close(one, {1, 0}, 1e-12));
    }
}

TEST_CASE("plane inversion is an involution off the cone") {
    CHECK(close(inversion_sigma({2, 1}), {2.0 / 3.0, 1.0 / 3.0}, 1e-15));
    CHECK(close(inversion_sigma(inversion_sigma({2, 1})), {2, 1}, 1e-14));
    CHECK_THROWS_AS((void)inversion_sigma({1, 1}), LightlikePointError);
}

TEST_CASE("causal classification") {
    CHECK(classify({1, 0}) == CausalClass::Spacelike);
    CHECK(classify({0, 1}) == CausalClass::Timelike);
    CHECK(classify({1, 1}) == CausalClass::Lightlike);
    CHECK(classify({0, 0}) == CausalClass::Zero);
    // relative tolerance: large vectors near the cone still classify lightlike
    CHECK(classify({1e8, 1e8 * (1 + 1e-14)}) == CausalClass::Lightlike);

    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        const SplitComplex z = rng.point(-10, 10);
        const auto [u, v] = to_null(z);
        const CausalClass c = classify(z);
        if (c == CausalClass::Spacelike) CHECK(u * v > 0);
        if (c == CausalClass::Timelike) CHECK(u * v < 0);
    }
}
