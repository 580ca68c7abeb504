#pragma once

#include <cmath>
#include <cstdint>

#include "mink/split_complex.hpp"

namespace testutil {

// Deterministic RNG so failures reproduce.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ? seed : 1) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * (next() >> 11) * 0x1.0p-53; }
    mink::SplitComplex point(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
};

inline bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool close_rel(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool close(const mink::SplitComplex& a, const mink::SplitComplex& b, double tol) {
    return close(a.re, b.re, tol) && close(a.im, b.im, tol);
}

// Central difference of a curve-valued map.
template <typename F>
mink::SplitComplex central_diff(F&& f, double t, double h = 1e-6) {
    const mink::SplitComplex a = f(t + h);
    const mink::SplitComplex b = f(t - h);
    return (a - b) / (2.0 * h);
}

}  // namespace testutil
