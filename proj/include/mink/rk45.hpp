#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "mink/errors.hpp"

namespace mink {

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double safety = 0.9;
    double shrink_limit = 0.2;
    double grow_limit = 5.0;
};

// Adaptive embedded Dormand-Prince 5(4) driver over a fixed-size state.
// The right-hand side is a callable f(t, y) -> StateVec. Stateless apart from
// the step-size memory, so callers can copy the whole (t, y, h) tuple and
// branch integrations freely (event refinement does exactly that).
template <std::size_t N, typename Rhs>
class Dopri5 {
public:
    using State = std::array<double, N>;

    Dopri5(Rhs rhs, StepControl control) : rhs_(std::move(rhs)), ctrl_(control) {}

    // One accepted step from (t, y), not stepping past t_limit. h_hint is the
    // step-size memory, updated in place. Returns the new t.
    double step(double& t, State& y, double& h_hint, double t_limit) const {
        double h = h_hint > 0.0 ? h_hint : initial_step(t, y, t_limit);
        const double span = t_limit - t;
        for (int attempt = 0; attempt < 64; ++attempt) {
            h = std::min(h, span > 0.0 ? span : h);
            if (!(h > min_step(t))) {
                throw StepSizeUnderflowError("dopri5: step size underflow");
            }
            State y_new{}, err{};
            try_step(t, y, h, y_new, err);
            const double e = error_norm(y, y_new, err);
            if (e <= 1.0) {
                t += h;
                y = y_new;
                const double fac = e > 0.0 ? ctrl_.safety * std::pow(e, -0.2) : ctrl_.grow_limit;
                h_hint = h * std::clamp(fac, ctrl_.shrink_limit, ctrl_.grow_limit);
                return t;
            }
            h *= std::clamp(ctrl_.safety * std::pow(e, -0.2), ctrl_.shrink_limit, 1.0);
        }
        throw StepSizeUnderflowError("dopri5: repeated step rejection");
    }

    // Integrate exactly to t_target (several accepted steps, last one clamped).
    void advance_to(double& t, State& y, double& h_hint, double t_target) const {
        while (t < t_target - 1e-15 * std::max(1.0, std::fabs(t_target))) {
            step(t, y, h_hint, t_target);
        }
        t = t_target;
    }

    const StepControl& control() const { return ctrl_; }

private:
    // Dormand-Prince coefficients (the classic DOPRI5 tableau).
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    static double min_step(double t) { return 1e-14 * std::max(1.0, std::fabs(t)); }

    void try_step(double t, const State& y, double h, State& y_new, State& err) const {
        const State k1 = rhs_(t, y);
        State tmp;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        const State k2 = rhs_(t + c2 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const State k3 = rhs_(t + c3 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State k4 = rhs_(t + c4 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State k5 = rhs_(t + c5 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const State k6 = rhs_(t + h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const State k7 = rhs_(t + h, y_new);
        for (std::size_t i = 0; i < N; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    double error_norm(const State& y_old, const State& y_new, const State& err) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double scale =
                ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::fabs(y_old[i]), std::fabs(y_new[i]));
            const double r = err[i] / scale;
            sum += r * r;
        }
        return std::sqrt(sum / N);
    }

    double initial_step(double t, const State& y, double t_limit) const {
        const State f = rhs_(t, y);
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ynorm = std::max(ynorm, std::fabs(y[i]));
            fnorm = std::max(fnorm, std::fabs(f[i]));
        }
        double h = 0.01 * (1.0 + ynorm) / (1.0 + fnorm);
        h = std::max(h, 16.0 * min_step(t));
        return std::min(h, std::max(t_limit - t, 16.0 * min_step(t)));
    }

    Rhs rhs_;
    StepControl ctrl_;
};

}  // namespace mink
