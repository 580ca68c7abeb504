#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mink/analysis.hpp"
#include "mink/congruence.hpp"
#include "mink/darboux.hpp"
#include "mink/errors.hpp"
#include "mink/penrose.hpp"

namespace mink {

inline constexpr const char* kCsvHeader =
    "t,x1,x2,xhat1,xhat2,psi_x,zeta_x,psi_xhat,zeta_xhat,offset_norm2,xi,causal_x,causal_xhat,event";

namespace detail {

// Shortest decimal that round-trips to the same double.
inline void append_double(std::string& out, double v) {
    if (std::isinf(v)) {
        out += v > 0 ? "inf" : "-inf";
        return;
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace detail

// One row per accepted sample, strictly ordered by t. Blow-up markers render
// the transform fields as `inf` with the event column set; the Penrose image
// of a marker is the boundary point itself, which is finite.
inline std::string render_csv(const DarbouxSolution& sol,
                              const std::vector<CurvePointEvent>& point_events) {
    std::string out;
    out += kCsvHeader;
    out += '\n';

    auto event_label = [&](const Sample& s) -> std::string {
        for (const BlowupEvent& ev : sol.events) {
            if (std::fabs(ev.t_star - s.t) <= 1e-9 * std::max(1.0, std::fabs(s.t)) && !s.xhat) {
                return std::string("blowup:") + to_string(ev.infinity.kind);
            }
        }
        // nearest-sample labels for pointwise events
        for (const CurvePointEvent& e : point_events) {
            double best = 1e300;
            for (const Sample& other : sol.samples) {
                best = std::min(best, std::fabs(other.t - e.t));
            }
            if (std::fabs(s.t - e.t) <= best * (1.0 + 1e-12)) {
                return e.kind == CurvePointEvent::Kind::DegeneratePoint ? "degenerate"
                       : e.kind == CurvePointEvent::Kind::LightlikeVelocity
                           ? "lightlike"
                           : "singular";
            }
        }
        return "";
    };

    for (const Sample& s : sol.samples) {
        detail::append_double(out, s.t);
        out += ',';
        detail::append_double(out, s.x.re);
        out += ',';
        detail::append_double(out, s.x.im);
        out += ',';
        const PenrosePoint px = penrose_map(s.x);
        if (s.xhat) {
            detail::append_double(out, s.xhat->re);
            out += ',';
            detail::append_double(out, s.xhat->im);
            out += ',';
            detail::append_double(out, px.psi);
            out += ',';
            detail::append_double(out, px.zeta);
            out += ',';
            const PenrosePoint ph = penrose_map(*s.xhat);
            detail::append_double(out, ph.psi);
            out += ',';
            detail::append_double(out, ph.zeta);
            out += ',';
            detail::append_double(out, s.state.u.offset() * s.state.v.offset());
            out += ',';
            CircleCongruence cc;
            bool have_cc = false;
            try {
                cc = congruence_at(s.x, sol.base.curve.derivative(s.t), *s.xhat);
                have_cc = true;
            } catch (const Error&) {
            }
            if (have_cc && cc.is_circle()) {
                detail::append_double(out, cc.radius_xi);
            } else if (have_cc && cc.kind == CongruenceKind::LightlikeDegenerate) {
                out += '0';
            } else {
                out += "inf";
            }
            out += ',';
            out += to_string(classify(sol.base.curve.derivative(s.t)));
            out += ',';
            out += to_string(classify(xhat_velocity(sol.base, sol.params.lambda, sol.params.mode,
                                                    s.t, *s.xhat)));
        } else {
            out += "inf,inf,";
            detail::append_double(out, px.psi);
            out += ',';
            detail::append_double(out, px.zeta);
            out += ',';
            // boundary image of the marker
            PenrosePoint ph{0.0, 0.0};
            for (const BlowupEvent& ev : sol.events) {
                if (std::fabs(ev.t_star - s.t) <= 1e-9 * std::max(1.0, std::fabs(s.t))) {
                    ph = penrose_boundary_point(ev.infinity);
                }
            }
            detail::append_double(out, ph.psi);
            out += ',';
            detail::append_double(out, ph.zeta);
            out += ",inf,inf,";
            out += to_string(classify(sol.base.curve.derivative(s.t)));
            out += ",at_infinity";
        }
        out += ',';
        out += event_label(s);
        out += '\n';
    }
    return out;
}

inline void emit_csv(const DarbouxSolution& sol, const std::vector<CurvePointEvent>& point_events,
                     const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("emit_csv: cannot open '" + path + "'");
    f << render_csv(sol, point_events);
    if (!f) throw IoError("emit_csv: write failed for '" + path + "'");
}

struct CsvRow {
    double t = 0.0;
    SplitComplex x;
    std::optional<SplitComplex> xhat;
    double psi_x = 0.0, zeta_x = 0.0;
    double psi_xhat = 0.0, zeta_xhat = 0.0;
    std::optional<double> offset_norm2;
    std::optional<double> xi;
    std::string causal_x, causal_xhat, event;
};

namespace detail {

inline std::optional<double> parse_csv_field(std::string_view v) {
    if (v == "inf" || v == "-inf") return std::nullopt;
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ParseError("bad numeric field '" + std::string(v) + "'", 0);
    }
    return out;
}

}  // namespace detail

inline std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                               : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        if (line.empty()) continue;
        if (first) {
            if (line != kCsvHeader) throw ParseError("unexpected CSV header", 1);
            first = false;
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t p = 0;
        while (true) {
            const std::size_t c = line.find(',', p);
            f.push_back(line.substr(p, c == std::string_view::npos ? line.size() - p : c - p));
            if (c == std::string_view::npos) break;
            p = c + 1;
        }
        if (f.size() != 14) throw ParseError("expected 14 CSV fields", 0);
        CsvRow r;
        r.t = *detail::parse_csv_field(f[0]);
        r.x = {*detail::parse_csv_field(f[1]), *detail::parse_csv_field(f[2])};
        const auto xh1 = detail::parse_csv_field(f[3]);
        const auto xh2 = detail::parse_csv_field(f[4]);
        if (xh1 && xh2) r.xhat = SplitComplex{*xh1, *xh2};
        r.psi_x = *detail::parse_csv_field(f[5]);
        r.zeta_x = *detail::parse_csv_field(f[6]);
        r.psi_xhat = *detail::parse_csv_field(f[7]);
        r.zeta_xhat = *detail::parse_csv_field(f[8]);
        r.offset_norm2 = detail::parse_csv_field(f[9]);
        r.xi = detail::parse_csv_field(f[10]);
        r.causal_x = std::string(f[11]);
        r.causal_xhat = std::string(f[12]);
        r.event = std::string(f[13]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<CsvRow> parse_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("parse_csv_file: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_csv(text);
}

}  // namespace mink
