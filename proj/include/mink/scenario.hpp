#pragma once

#include <charconv>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mink/curve.hpp"
#include "mink/darboux.hpp"
#include "mink/errors.hpp"

namespace mink {

// One declarative run: curve + polarization + spectral parameter + initial
// transform point + parameter range + requested outputs. Parsed from a strict
// line-based `key = value` file, `#` starts a comment, unknown keys are errors.
struct Scenario {
    std::string name = "scenario";
    CurveSpec curve;
    PolarizationKind polarization = PolarizationKind::ArcLength;
    double polarization_m = 1.0;  // Constant kind only
    double lambda = -1.0;
    bool initial_is_null = false;  // true: initial given as null offsets (p0, q0)
    SplitComplex initial;
    double p0 = 0.0, q0 = 0.0;
    double t0 = 0.0, t1 = 1.0;
    DarbouxMode mode = DarbouxMode::Generic;
    bool mode_given = false;
    Tolerances tol;
    std::set<std::string> outputs = {"csv", "svg_plane", "svg_penrose", "diagnostics"};
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline double parse_real(std::string_view v, int line) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError("expected a real number, got '" + std::string(v) + "'", line);
    }
    return out;
}

inline SplitComplex parse_pair(std::string_view v, int line) {
    const auto comma = v.find(',');
    if (comma == std::string_view::npos) {
        throw ParseError("expected 'a,b' pair, got '" + std::string(v) + "'", line);
    }
    return {parse_real(trim(v.substr(0, comma)), line), parse_real(trim(v.substr(comma + 1)), line)};
}

}  // namespace detail

inline Scenario parse_scenario(std::string_view text) {
    Scenario s;
    bool have_initial = false, have_initial_null = false, have_curve = false;
    bool have_polarization = false;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value'", line_no);
        }
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string_view val = detail::trim(line.substr(eq + 1));
        if (val.empty()) throw ParseError("empty value for key '" + key + "'", line_no);

        if (key == "name") {
            s.name = std::string(val);
        } else if (key == "curve") {
            have_curve = true;
            if (val == "line") s.curve.kind = CurveKind::Line;
            else if (val == "euclidean_circle") s.curve.kind = CurveKind::EuclideanCircle;
            else if (val == "timelike_circle") s.curve.kind = CurveKind::TimelikeCircle;
            else if (val == "spacelike_circle") s.curve.kind = CurveKind::SpacelikeCircle;
            else if (val == "lightlike_line") s.curve.kind = CurveKind::LightlikeLine;
            else throw ParseError("unknown curve kind '" + std::string(val) + "'", line_no);
        } else if (key == "curve.p" || key == "curve.c") {
            s.curve.point = detail::parse_pair(val, line_no);
        } else if (key == "curve.d") {
            s.curve.direction = detail::parse_pair(val, line_no);
        } else if (key == "curve.center") {
            s.curve.center = detail::parse_pair(val, line_no);
        } else if (key == "curve.r") {
            s.curve.radius = detail::parse_real(val, line_no);
        } else if (key == "polarization") {
            have_polarization = true;
            if (val == "arclength") s.polarization = PolarizationKind::ArcLength;
            else if (val == "constant") s.polarization = PolarizationKind::Constant;
            else throw ParseError("unknown polarization '" + std::string(val) + "'", line_no);
        } else if (key == "polarization.m") {
            s.polarization_m = detail::parse_real(val, line_no);
        } else if (key == "lambda") {
            s.lambda = detail::parse_real(val, line_no);
        } else if (key == "initial") {
            have_initial = true;
            s.initial = detail::parse_pair(val, line_no);
        } else if (key == "initial_null") {
            have_initial_null = true;
            const SplitComplex pq = detail::parse_pair(val, line_no);
            s.p0 = pq.re;
            s.q0 = pq.im;
        } else if (key == "t0") {
            s.t0 = detail::parse_real(val, line_no);
        } else if (key == "t1") {
            s.t1 = detail::parse_real(val, line_no);
        } else if (key == "mode") {
            s.mode_given = true;
            if (val == "generic") s.mode = DarbouxMode::Generic;
            else if (val == "alp_regularized") s.mode = DarbouxMode::ArcLengthRegularized;
            else throw ParseError("unknown mode '" + std::string(val) + "'", line_no);
        } else if (key == "tol_rel") {
            s.tol.rel = detail::parse_real(val, line_no);
        } else if (key == "tol_abs") {
            s.tol.abs = detail::parse_real(val, line_no);
        } else if (key == "outputs") {
            s.outputs.clear();
            std::string_view rest = val;
            while (!rest.empty()) {
                const std::size_t comma = rest.find(',');
                const std::string_view item = detail::trim(rest.substr(0, comma));
                if (item != "csv" && item != "svg_plane" && item != "svg_penrose" &&
                    item != "diagnostics") {
                    throw ParseError("unknown output '" + std::string(item) + "'", line_no);
                }
                s.outputs.insert(std::string(item));
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
        } else {
            throw ParseError("unknown key '" + key + "'", line_no);
        }
    }

    // validation
    if (!have_curve) throw ValidationError("missing 'curve'", "curve");
    if (s.lambda == 0.0 || !std::isfinite(s.lambda)) {
        throw ValidationError("lambda must be finite and nonzero", "lambda");
    }
    if (!(s.t1 > s.t0)) throw ValidationError("t1 must exceed t0", "t1");
    if (have_initial && have_initial_null) {
        throw ValidationError("give either 'initial' or 'initial_null', not both", "initial");
    }
    if (!have_initial && !have_initial_null) {
        throw ValidationError("missing 'initial' or 'initial_null'", "initial");
    }
    s.initial_is_null = have_initial_null;
    if (s.polarization == PolarizationKind::Constant &&
        (s.polarization_m == 0.0 || !std::isfinite(s.polarization_m))) {
        throw ValidationError("polarization.m must be finite and nonzero", "polarization.m");
    }
    if (!s.mode_given) {
        s.mode = s.polarization == PolarizationKind::ArcLength ? DarbouxMode::ArcLengthRegularized
                                                               : DarbouxMode::Generic;
    }
    if (s.mode == DarbouxMode::ArcLengthRegularized &&
        s.polarization != PolarizationKind::ArcLength) {
        throw ValidationError("alp_regularized mode requires polarization = arclength", "mode");
    }
    (void)have_polarization;
    return s;
}

// Curve domain padded a touch beyond the run range so derivative probes at
// the endpoints stay in-domain.
inline ParamCurve build_curve(const Scenario& s) {
    const double pad = 1e-6 * std::max(1.0, s.t1 - s.t0);
    return make_catalog_curve(s.curve, {s.t0 - pad, s.t1 + pad});
}

inline PolarizedCurve build_polarized_curve(const Scenario& s) {
    ParamCurve curve = build_curve(s);
    Polarization pol = s.polarization == PolarizationKind::ArcLength
                           ? arc_length_polarization(curve)
                           : Polarization::constant_m(s.polarization_m);
    return {std::move(curve), std::move(pol)};
}

inline DarbouxParams build_params(const Scenario& s, const ParamCurve& curve) {
    DarbouxParams p;
    p.lambda = s.lambda;
    p.t0 = s.t0;
    p.mode = s.mode;
    p.initial_point = s.initial_is_null ? curve.position(s.t0) + from_null(s.p0, s.q0) : s.initial;
    const SplitComplex x0 = curve.position(s.t0);
    if (p.initial_point == x0) {
        throw ValidationError("initial point coincides with x(t0)", "initial");
    }
    return p;
}

}  // namespace mink
