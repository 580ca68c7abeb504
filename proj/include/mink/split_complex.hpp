#pragma once

#include <cmath>
#include <ostream>

#include "mink/errors.hpp"

namespace mink {

// Relative tolerance for deciding that a vector sits on the lightlike cone:
// z is lightlike when ||z|^2| <= kLightlikeRelTol * (z1^2 + z2^2).
inline constexpr double kLightlikeRelTol = 1e-10;

// Element a + jb of the split complex plane (j^2 = +1), identified with the
// point (a, b) of the Minkowski plane R^{1,1}. Both components are always
// finite; points at infinity live in the projective charts of the Riccati
// solver, never here.
struct SplitComplex {
    double re = 0.0;
    double im = 0.0;

    constexpr SplitComplex() = default;
    constexpr SplitComplex(double re_, double im_) : re(re_), im(im_) {}

    constexpr SplitComplex operator+(const SplitComplex& o) const { return {re + o.re, im + o.im}; }
    constexpr SplitComplex operator-(const SplitComplex& o) const { return {re - o.re, im - o.im}; }
    constexpr SplitComplex operator-() const { return {-re, -im}; }

    // Ring product: j^2 = +1, so (a+jb)(c+jd) = (ac+bd) + j(ad+bc).
    constexpr SplitComplex operator*(const SplitComplex& o) const {
        return {re * o.re + im * o.im, re * o.im + im * o.re};
    }

    constexpr SplitComplex operator*(double s) const { return {re * s, im * s}; }
    constexpr SplitComplex operator/(double s) const { return {re / s, im / s}; }

    constexpr bool operator==(const SplitComplex& o) const { return re == o.re && im == o.im; }
    constexpr bool operator!=(const SplitComplex& o) const { return !(*this == o); }
};

constexpr SplitComplex operator*(double s, const SplitComplex& z) { return z * s; }

inline std::ostream& operator<<(std::ostream& os, const SplitComplex& z) {
    return os << "(" << z.re << ", " << z.im << ")";
}

constexpr SplitComplex mul(const SplitComplex& z, const SplitComplex& w) { return z * w; }

constexpr SplitComplex conj(const SplitComplex& z) { return {z.re, -z.im}; }

// Signature (+,-) inner product; can be negative.
constexpr double minkowski_inner(const SplitComplex& x, const SplitComplex& y) {
    return x.re * y.re - x.im * y.im;
}

// |z|^2 = z1^2 - z2^2 = u*v in null coordinates.
constexpr double norm2(const SplitComplex& z) { return z.re * z.re - z.im * z.im; }

// Ordinary Euclidean magnitude squared; used only to scale tolerances.
constexpr double euclid_norm2(const SplitComplex& z) { return z.re * z.re + z.im * z.im; }

struct NullCoords {
    double u = 0.0;
    double v = 0.0;
};

// u = z1 + z2, v = z1 - z2. The ring is isomorphic to R (+) R in these
// coordinates: products, inverses and |.|^2 all act componentwise.
constexpr NullCoords to_null(const SplitComplex& z) { return {z.re + z.im, z.re - z.im}; }

constexpr SplitComplex from_null(double u, double v) { return {0.5 * (u + v), 0.5 * (u - v)}; }
constexpr SplitComplex from_null(const NullCoords& n) { return from_null(n.u, n.v); }

enum class CausalClass { Spacelike, Timelike, Lightlike, Zero };

inline const char* to_string(CausalClass c) {
    switch (c) {
        case CausalClass::Spacelike: return "spacelike";
        case CausalClass::Timelike: return "timelike";
        case CausalClass::Lightlike: return "lightlike";
        case CausalClass::Zero: return "zero";
    }
    return "?";
}

inline CausalClass classify(const SplitComplex& z, double eps_light = kLightlikeRelTol) {
    const double scale = euclid_norm2(z);
    if (scale == 0.0) return CausalClass::Zero;
    const double n = norm2(z);
    if (std::fabs(n) <= eps_light * scale) return CausalClass::Lightlike;
    return n > 0.0 ? CausalClass::Spacelike : CausalClass::Timelike;
}

// Ring inverse conj(z)/|z|^2. Undefined on the zero-divisor set A = {a +- ja}.
inline SplitComplex inverse(const SplitComplex& z) {
    const double n = norm2(z);
    if (std::fabs(n) <= kLightlikeRelTol * euclid_norm2(z)) {
        throw ZeroDivisorError("inverse: |z|^2 = 0, z has no inverse in C'");
    }
    return {z.re / n, -z.im / n};
}

// Plane inversion sigma(x) = x/|x|^2 (a real rescaling, no conjugation).
// Involutive away from the lightlike cone.
inline SplitComplex inversion_sigma(const SplitComplex& x) {
    const double n = norm2(x);
    if (std::fabs(n) <= kLightlikeRelTol * euclid_norm2(x)) {
        throw LightlikePointError("inversion_sigma: |x|^2 = 0");
    }
    return {x.re / n, x.im / n};
}

}  // namespace mink
