#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mink/analysis.hpp"
#include "mink/darboux.hpp"
#include "mink/runner.hpp"
#include "mink/scenario.hpp"
#include "mink/trace_csv.hpp"

namespace mink::checks {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

// Deterministic RNG for the random-sample criteria.
struct Xorshift64 {
    std::uint64_t s;
    explicit Xorshift64(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (next() >> 11) * 0x1.0p-53;
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
};

struct CatalogRun {
    std::string name;
    PolarizedCurve pc;
    DarbouxParams params;
    double t_end = 1.0;
    bool spacelike = false;  // base curve spacelike on the whole range
};

inline Tolerances tight_tol() {
    Tolerances t;
    t.rel = 1e-12;
    t.abs = 1e-14;
    return t;
}

inline CatalogRun run_spec(std::string name, ParamCurve curve, double lambda, double p0, double q0,
                           double t0, double t_end, DarbouxMode mode, bool spacelike) {
    PolarizedCurve pc{curve, arc_length_polarization(curve)};
    DarbouxParams params{lambda, curve.position(t0) + from_null(p0, q0), t0, mode};
    return {std::move(name), std::move(pc), params, t_end, spacelike};
}

// Six spacelike scenarios, two timelike-circle segments and the embedded
// Euclidean circle. Initial offsets sit on the side of zero that the flow
// moves away from (sign opposite to the null velocity component), so the
// no-singularity sweep stays clear of degenerate crossings for every lambda.
inline std::vector<CatalogRun> catalog_battery() {
    const double pi = std::numbers::pi;
    std::vector<CatalogRun> runs;
    runs.push_back(run_spec("line_h", make_line({0, 0}, {1, 0}), -1.0, -0.9, -0.7, 0.0, 0.45,
                            DarbouxMode::Generic, true));
    runs.push_back(run_spec("line_tilted", make_line({1, 2}, {2, 0.5}), 1.0, -0.9, -0.7, 0.0, 0.45,
                            DarbouxMode::Generic, true));
    runs.push_back(run_spec("scircle_r1", make_spacelike_circle({0, 0}, 1.0, {-1.45, 1.45}), -1.0,
                            -0.9, -0.7, -0.4, 0.4, DarbouxMode::Generic, true));
    runs.push_back(run_spec("scircle_r2", make_spacelike_circle({1, -1}, 0.8, {-1.45, 1.45}), 1.0,
                            -0.9, -0.7, -0.4, 0.45, DarbouxMode::Generic, true));
    runs.push_back(run_spec("earc_1", make_euclidean_circle({0, 0}, 1.0), 1.0, 0.9, 0.7,
                            pi / 4 + 0.2, pi / 4 + 0.7, DarbouxMode::ArcLengthRegularized,
                            true));
    runs.push_back(run_spec("earc_2", make_euclidean_circle({0.5, 0.3}, 2.0), -1.0, 0.9, 0.7,
                            pi / 4 + 0.25, pi / 4 + 0.65, DarbouxMode::ArcLengthRegularized,
                            true));
    runs.push_back(run_spec("tcircle_r1", make_timelike_circle({0, 0}, 1.0, {-1.45, 1.45}), -1.0,
                            -0.9, 0.7, -0.5, 0.5, DarbouxMode::Generic, false));
    runs.push_back(run_spec("tcircle_r15", make_timelike_circle({0.5, -0.25}, 1.5, {-1.45, 1.45}),
                            1.0, -0.9, 0.7, -0.4, 0.55, DarbouxMode::Generic, false));
    runs.push_back(run_spec("eucircle_full", make_euclidean_circle({0, 0}, 1.0), -2.0, 0.5, 0.9,
                            0.0, 2 * pi, DarbouxMode::ArcLengthRegularized, false));
    return runs;
}

// Simultaneously arc-length polarized pairs (|xhat - x|^2 = 1/lambda at t0)
// with a blow-up inside the integration range.
inline std::vector<CatalogRun> alp_battery() {
    const double pi = std::numbers::pi;
    std::vector<CatalogRun> runs;
    runs.push_back(run_spec("alp_line_neg", make_line({0, 0}, {1, 0}), -1.0, 1.0, -1.0, 0.0, 1.2,
                            DarbouxMode::ArcLengthRegularized, true));
    runs.push_back(run_spec("alp_line_pos", make_line({0, 0}, {1, 0}), 1.0, 2.0, 0.5, 0.0, 1.0,
                            DarbouxMode::ArcLengthRegularized, true));
    runs.push_back(run_spec("alp_scircle", make_spacelike_circle({0, 0}, 1.0, {-1.45, 1.45}), -1.0,
                            1.0, -1.0, -0.5, 1.0, DarbouxMode::ArcLengthRegularized, true));
    runs.push_back(run_spec("alp_earc", make_euclidean_circle({0, 0}, 1.0), -1.0, 1.0, -1.0,
                            pi / 4 + 0.2, 3 * pi / 4 - 0.2, DarbouxMode::ArcLengthRegularized,
                            true));
    return runs;
}

inline double min_speed2(const DarbouxSolution& sol) {
    double worst = std::numeric_limits<double>::infinity();
    for (const Sample& s : sol.samples) {
        if (!s.xhat) continue;
        const auto [uh, vh] = to_null(*s.xhat);
        const auto [du, dv] = rhs_null(sol.base, sol.params.lambda, sol.params.mode, s.t, uh, vh);
        worst = std::min(worst, du * dv);
    }
    return worst;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace detail

// --- criteria -------------------------------------------------------------

inline CriterionResult criterion_riccati_oracle() {
    using namespace detail;
    CriterionResult r{1, "Riccati closed-form oracle and blow-up location", false, ""};
    const Tolerances tol = tight_tol();
    double worst_err = 0.0, worst_tstar = 0.0;

    {
        ParamCurve line = make_line({0, 0}, {1, 0});
        PolarizedCurve pc{line, arc_length_polarization(line)};
        DarbouxParams params{-1.0, from_null(1.0, -1.0), 0.0, DarbouxMode::Generic};
        const DarbouxSolution sol = integrate(pc, params, 1.2, tol);
        const LineOracle oracle(-1.0, 1.0, -1.0);
        for (const Sample& s : sol.samples) {
            if (!s.xhat || s.t > std::numbers::pi / 4 - 0.1) continue;
            worst_err = std::max(worst_err, std::fabs(s.state.u.offset() - oracle.p(s.t)));
            worst_err = std::max(worst_err, std::fabs(s.state.v.offset() - oracle.q(s.t)));
        }
        const BlowupLocation loc = locate_blowup(sol, NullComponent::V, {0.7, 0.9});
        worst_tstar = std::max(worst_tstar, std::fabs(loc.t_star - std::numbers::pi / 4));
    }
    {
        ParamCurve line = make_line({0, 0}, {1, 0});
        PolarizedCurve pc{line, arc_length_polarization(line)};
        DarbouxParams params{1.0, from_null(2.0, 0.5), 0.0, DarbouxMode::Generic};
        const DarbouxSolution sol = integrate(pc, params, 1.0, tol);
        const LineOracle oracle(1.0, 2.0, 0.5);
        const double t_star = std::atanh(0.5);
        for (const Sample& s : sol.samples) {
            if (!s.xhat || s.t > t_star - 0.1) continue;
            worst_err = std::max(worst_err, std::fabs(s.state.u.offset() - oracle.p(s.t)));
            worst_err = std::max(worst_err, std::fabs(s.state.v.offset() - oracle.q(s.t)));
        }
        const BlowupLocation loc = locate_blowup(sol, NullComponent::U, {0.4, 0.7});
        worst_tstar = std::max(worst_tstar, std::fabs(loc.t_star - t_star));
    }
    r.pass = worst_err < 1e-8 && worst_tstar < 1e-9;
    r.detail = "max oracle error " + fmt(worst_err) + ", max t* error " + fmt(worst_tstar);
    return r;
}

inline CriterionResult criterion_alp_conservation() {
    using namespace detail;
    CriterionResult r{2, "offset norm conservation for arc-length polarized pairs", false, ""};
    double worst = 0.0;
    for (const CatalogRun& run :
         {alp_battery()[0], alp_battery()[1]}) {
        const DarbouxSolution sol = integrate(run.pc, run.params, run.t_end, tight_tol());
        worst = std::max(worst, check_simultaneous_alp(sol, run.params.lambda));
    }
    r.pass = worst < 1e-9;
    r.detail = "max | |xhat-x|^2 - 1/lambda | = " + fmt(worst);
    return r;
}

inline CriterionResult criterion_norm_identity() {
    using namespace detail;
    CriterionResult r{3, "norm identity across the catalog scenarios", false, ""};
    double worst = 0.0;
    std::string worst_name;
    for (const CatalogRun& run : catalog_battery()) {
        const DarbouxSolution sol = integrate(run.pc, run.params, run.t_end, tight_tol());
        const double res = velocity_identity_residual(sol);
        if (res > worst) {
            worst = res;
            worst_name = run.name;
        }
    }
    r.pass = worst < 1e-8;
    r.detail = "max relative error " + fmt(worst) + " (" + worst_name + ")";
    return r;
}

inline CriterionResult criterion_no_singular_points() {
    using namespace detail;
    CriterionResult r{4, "no singular points on spacelike base curves", false, ""};
    const double lambdas[] = {0.25, -0.25, 1.0, -1.0, 4.0, -4.0};
    double worst = std::numeric_limits<double>::infinity();
    std::string worst_name;
    for (const CatalogRun& run : catalog_battery()) {
        if (!run.spacelike) continue;
        for (double lam : lambdas) {
            DarbouxParams params = run.params;
            params.lambda = lam;
            const DarbouxSolution sol = integrate(run.pc, params, run.t_end, tight_tol());
            const double m = min_speed2(sol);
            if (m < worst) {
                worst = m;
                worst_name = run.name + " lambda=" + std::to_string(lam);
            }
        }
    }
    r.pass = worst > 1e-6;
    r.detail = "min |xhat'|^2 = " + fmt(worst) + " (" + worst_name + ")";
    return r;
}

inline CriterionResult criterion_null_infinity_direction() {
    using namespace detail;
    CriterionResult r{5, "arc-length polarized blow-ups: null infinity, lightlike direction", false,
                      ""};
    bool ok = true;
    std::ostringstream detail_os;
    int n_events = 0;
    for (const CatalogRun& run : alp_battery()) {
        const DarbouxSolution sol = integrate(run.pc, run.params, run.t_end, tight_tol());
        for (const BlowupEvent& ev : sol.events) {
            ++n_events;
            const BlowupReport rep = classify_blowup(sol, ev);
            const bool is_null = rep.infinity.kind == InfinityKind::NullInfinity;
            bool decreasing = true;
            for (std::size_t i = 1; i < rep.indicator_trail.size(); ++i) {
                decreasing = decreasing && std::fabs(rep.indicator_trail[i]) <=
                                               std::fabs(rep.indicator_trail[i - 1]) * (1 + 1e-9);
            }
            const double first = std::fabs(rep.indicator_trail.front());
            const double last = std::fabs(rep.indicator_trail.back());
            const bool toward_zero = last <= 0.5 * first && last < 1e-3;
            const bool angle_ok = rep.boundary_angle_deg >= 88.0 && rep.boundary_angle_deg <= 90.0;
            if (!(is_null && decreasing && toward_zero && angle_ok)) {
                ok = false;
                detail_os << run.name << "@t*=" << ev.t_star << " failed (null=" << is_null
                          << " dec=" << decreasing << " zero=" << toward_zero
                          << " angle=" << rep.boundary_angle_deg << "); ";
            }
        }
    }
    r.pass = ok && n_events > 0;
    r.detail = ok ? std::to_string(n_events) + " events, all null-infinity with boundary angle in "
                    "[88, 90] deg"
                  : detail_os.str();
    return r;
}

inline CriterionResult criterion_radius_collapse() {
    using namespace detail;
    CriterionResult r{6, "congruence radius collapse at arc-length polarized blow-ups", false, ""};
    bool ok = true;
    double worst_last = 0.0;
    for (const CatalogRun& run : alp_battery()) {
        const DarbouxSolution sol = integrate(run.pc, run.params, run.t_end, tight_tol());
        for (const BlowupEvent& ev : sol.events) {
            const BlowupReport rep = classify_blowup(sol, ev);
            if (rep.radius_trend.size() < 10) {
                ok = false;
                continue;
            }
            for (std::size_t i = 1; i < rep.radius_trend.size(); ++i) {
                ok = ok && std::fabs(rep.radius_trend[i].second) <=
                               std::fabs(rep.radius_trend[i - 1].second) * (1 + 1e-9);
            }
            const double last = std::fabs(rep.radius_trend.back().second);
            worst_last = std::max(worst_last, last);
            ok = ok && last < 1e-2;
        }
    }
    r.pass = ok;
    r.detail = "max |xi| at last finite sample " + fmt(worst_last) + ", trends decreasing";
    return r;
}

inline CriterionResult criterion_congruence_geometry() {
    using namespace detail;
    CriterionResult r{7, "circle congruence incidence and tangency", false, ""};

    // hand-checked configuration
    const CircleCongruence hand = congruence_at({0, 0}, {1, 0}, {0, 1});
    const bool hand_ok = std::fabs(hand.radius_xi - 0.5) < 1e-12 &&
                         std::fabs(hand.center.re) < 1e-12 &&
                         std::fabs(hand.center.im - 0.5) < 1e-12;

    struct Pick {
        SplitComplex x, xd, xh, xhd;
        double xi;
    };
    std::vector<Pick> pool;
    for (const CatalogRun& run : catalog_battery()) {
        const DarbouxSolution sol = integrate(run.pc, run.params, run.t_end, tight_tol());
        for (const Sample& s : sol.samples) {
            if (!s.xhat) continue;
            if (std::fabs(s.state.u.offset()) > 10 || std::fabs(s.state.v.offset()) > 10) continue;
            const SplitComplex xd = sol.base.curve.derivative(s.t);
            if (classify(xd) == CausalClass::Lightlike) continue;
            const CircleCongruence cc = congruence_at(s.x, xd, *s.xhat);
            if (!cc.is_circle()) continue;
            pool.push_back({s.x, xd, *s.xhat,
                            xhat_velocity(sol.base, sol.params.lambda, sol.params.mode, s.t,
                                          *s.xhat),
                            cc.radius_xi});
        }
    }
    Xorshift64 rng(0x5eedu);
    double worst = 0.0;
    for (int k = 0; k < 200 && !pool.empty(); ++k) {
        const Pick& p = pool[rng.index(pool.size())];
        const CircleCongruence cc = congruence_at(p.x, p.xd, p.xh);
        const IncidenceReport rep = incidence_tangency_check(cc, p.x, p.xd, p.xh, p.xhd);
        worst = std::max(worst, rep.max_abs());
    }
    r.pass = hand_ok && worst < 1e-7 && !pool.empty();
    r.detail = "hand example " + std::string(hand_ok ? "exact" : "WRONG") +
               ", max residual over 200 samples " + fmt(worst);
    return r;
}

inline CriterionResult criterion_penrose_conformality() {
    using namespace detail;
    CriterionResult r{8, "Penrose chart conformality, round trip, circle blow-up class", false, ""};
    Xorshift64 rng(0xc0ffee);
    double worst_pullback = 0.0, worst_roundtrip = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SplitComplex x{rng.uniform(-40, 40), rng.uniform(-40, 40)};
        const SplitComplex d{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const PenrosePoint p = penrose_map(x);
        const PenroseVelocity w = penrose_velocity(x, d);
        const double lhs = norm2(d);
        const double rhs = conformal_factor(p) * penrose_norm2(w);
        if (std::fabs(lhs) > 1e-12) {
            worst_pullback = std::max(worst_pullback, std::fabs(lhs - rhs) / std::fabs(lhs));
        }
        const SplitComplex back = penrose_unmap(p);
        const double scale = 1.0 + std::sqrt(euclid_norm2(x));
        worst_roundtrip =
            std::max(worst_roundtrip, std::sqrt(euclid_norm2(back - x)) / scale);
    }

    // timelike unit circle runs into the upper-right null edge as t -> pi/2
    ParamCurve circ = make_timelike_circle({0, 0}, 1.0);
    std::vector<double> us, vs;
    for (int k = 1; k <= 12; ++k) {
        const double t = std::numbers::pi / 2 - std::pow(10.0, -k);
        const auto [u, v] = to_null(circ.position(t));
        us.push_back(u);
        vs.push_back(v);
    }
    bool class_ok = false;
    double offset = 1.0;
    try {
        const InfinityClass c = classify_infinity(divergence_trend(us), divergence_trend(vs));
        class_ok = c.kind == InfinityKind::NullInfinity && c.edge == NullEdge::UpperRight;
        offset = c.offset;
    } catch (const Error&) {
    }

    r.pass = worst_pullback < 1e-8 && worst_roundtrip < 1e-12 && class_ok && std::fabs(offset) < 1e-3;
    r.detail = "pullback " + fmt(worst_pullback) + ", round trip " + fmt(worst_roundtrip) +
               ", circle -> null infinity " + (class_ok ? "ok" : "WRONG");
    return r;
}

inline CriterionResult criterion_type_changing() {
    using namespace detail;
    CriterionResult r{9, "continuation across lightlike points of the embedded circle", false, ""};
    const double pi = std::numbers::pi;
    CatalogRun run = catalog_battery().back();  // eucircle_full
    std::vector<CurvePointEvent> events;
    std::size_t n_samples = 0;
    try {
        const DarbouxSolution sol = integrate(run.pc, run.params, run.t_end, tight_tol());
        events = detect_singular_and_degenerate(sol);
        n_samples = sol.samples.size();
    } catch (const Error& e) {
        r.detail = std::string("integration failed: ") + e.what();
        return r;
    }

    std::vector<double> expected;
    for (int k = 0; k < 4; ++k) expected.push_back(pi / 4 + k * pi / 2);

    // |xhat'(t)|^2 at the lightlike points, via the event values
    double worst_speed = 0.0;
    std::vector<double> light_ts;
    for (const CurvePointEvent& e : events) {
        if (e.kind == CurvePointEvent::Kind::DegeneratePoint) continue;
        light_ts.push_back(e.t);
        worst_speed = std::max(worst_speed, std::fabs(e.value));
    }
    bool list_ok = light_ts.size() == expected.size() &&
                   events.size() == expected.size();  // no degenerate/singular extras
    if (list_ok) {
        for (std::size_t i = 0; i < expected.size(); ++i) {
            list_ok = list_ok && std::fabs(light_ts[i] - expected[i]) < 1e-6;
        }
    }
    r.pass = worst_speed < 1e-10 && list_ok;
    r.detail = "completed " + std::to_string(n_samples) + " samples, max |xhat'|^2 " +
               fmt(worst_speed) + ", event list " + (list_ok ? "matches" : "MISMATCH");
    return r;
}

inline CriterionResult criterion_determinism(const std::string& scratch_dir) {
    using namespace detail;
    CriterionResult r{10, "deterministic figures and loss-free trace round trip", false, ""};
    namespace fs = std::filesystem;

    auto read_file = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    };

    const fs::path a = fs::path(scratch_dir) / "figures_a";
    const fs::path b = fs::path(scratch_dir) / "figures_b";
    const std::vector<std::string> fa = figures_command(a.string());
    const std::vector<std::string> fb = figures_command(b.string());
    bool identical = fa.size() == fb.size() && fa.size() >= 6;
    for (std::size_t i = 0; identical && i < fa.size(); ++i) {
        identical = read_file(fa[i]) == read_file(fb[i]);
    }

    // CSV round trip on the negative-lambda line pair
    const CatalogRun run = alp_battery()[0];
    const DarbouxSolution sol = integrate(run.pc, run.params, run.t_end, tight_tol());
    const std::vector<CurvePointEvent> pevents = detect_singular_and_degenerate(sol);
    const std::string csv = render_csv(sol, pevents);
    const std::vector<CsvRow> rows = parse_csv(csv);

    const double target = 1.0 / run.params.lambda;
    double alp_orig = check_simultaneous_alp(sol, run.params.lambda);
    double alp_csv = 0.0;
    for (const CsvRow& row : rows) {
        if (row.xhat && row.offset_norm2) {
            alp_csv = std::max(alp_csv, std::fabs(*row.offset_norm2 - target));
        }
    }
    double vel_orig = velocity_identity_residual(sol);
    double vel_csv = 0.0;
    for (const CsvRow& row : rows) {
        if (!row.xhat) continue;
        const auto [du, dv] = to_null(run.pc.curve.derivative(row.t));
        const auto [uh, vh] = to_null(*row.xhat);
        const auto [ux, vx] = to_null(row.x);
        const double w = run.pc.polarization.reciprocal(row.t);
        const auto [uhd, vhd] =
            rhs_null(run.pc, run.params.lambda, run.params.mode, row.t, uh, vh);
        const double lhs = (du * dv) * (uhd * vhd);
        const double y2 = (uh - ux) * (vh - vx);
        const double rhs = (run.params.lambda * w) * (run.params.lambda * w) * y2 * y2;
        const double denom = std::max(std::fabs(lhs), std::fabs(rhs));
        if (denom > 1e-250) vel_csv = std::max(vel_csv, std::fabs(lhs - rhs) / denom);
    }
    const bool roundtrip_ok =
        rows.size() == sol.samples.size() && std::fabs(alp_csv - alp_orig) < 1e-12 &&
        std::fabs(vel_csv - vel_orig) < 1e-12;

    r.pass = identical && roundtrip_ok;
    r.detail = std::string("figures ") + (identical ? "byte-identical" : "DIFFER") +
               ", csv round trip |d_alp|=" + fmt(std::fabs(alp_csv - alp_orig)) +
               " |d_vel|=" + fmt(std::fabs(vel_csv - vel_orig));
    return r;
}

inline std::vector<CriterionResult> run_all(const std::string& scratch_dir) {
    std::vector<CriterionResult> out;
    out.push_back(criterion_riccati_oracle());
    out.push_back(criterion_alp_conservation());
    out.push_back(criterion_norm_identity());
    out.push_back(criterion_no_singular_points());
    out.push_back(criterion_null_infinity_direction());
    out.push_back(criterion_radius_collapse());
    out.push_back(criterion_congruence_geometry());
    out.push_back(criterion_penrose_conformality());
    out.push_back(criterion_type_changing());
    out.push_back(criterion_determinism(scratch_dir));
    return out;
}

// Prints one line per criterion; returns the number of failures.
inline int report(std::ostream& os, const std::string& scratch_dir) {
    int failures = 0;
    for (const CriterionResult& c : run_all(scratch_dir)) {
        os << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " ("
           << c.detail << ")\n";
        if (!c.pass) ++failures;
    }
    return failures;
}

}  // namespace mink::checks
