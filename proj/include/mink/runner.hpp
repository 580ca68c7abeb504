#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mink/analysis.hpp"
#include "mink/darboux.hpp"
#include "mink/scenario.hpp"
#include "mink/svg.hpp"
#include "mink/trace_csv.hpp"

namespace mink {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;

struct RunArtifacts {
    DarbouxSolution solution;
    std::vector<CurvePointEvent> point_events;
    std::vector<BlowupReport> blowup_reports;
    double alp_deviation = 0.0;
    double velocity_residual = 0.0;
    std::vector<std::string> files;
};

// Integrate + analyze one scenario; no files touched.
inline RunArtifacts analyze_scenario(const Scenario& s) {
    RunArtifacts art{integrate(build_polarized_curve(s),
                               build_params(s, build_curve(s)), s.t1, s.tol),
                     {}, {}, 0.0, 0.0, {}};
    art.point_events = detect_singular_and_degenerate(art.solution);
    for (const BlowupEvent& ev : art.solution.events) {
        try {
            art.blowup_reports.push_back(classify_blowup(art.solution, ev));
        } catch (const InsufficientSamplesError&) {
            // events too early in the run are reported without trailing data
        }
    }
    art.alp_deviation = check_simultaneous_alp(art.solution, s.lambda);
    art.velocity_residual = velocity_identity_residual(art.solution);
    return art;
}

namespace detail {

inline nlohmann::json infinity_json(const InfinityClass& c) {
    nlohmann::json j;
    j["kind"] = to_string(c.kind);
    if (c.kind == InfinityKind::NullInfinity) {
        j["edge"] = to_string(c.edge);
        j["offset"] = c.offset;
    } else {
        j["side"] = c.side;
    }
    return j;
}

inline std::string diagnostics_jsonl(const Scenario& s, const RunArtifacts& art) {
    std::string out;
    {
        nlohmann::json j;
        j["type"] = "summary";
        j["name"] = s.name;
        j["lambda"] = s.lambda;
        j["samples"] = art.solution.samples.size();
        j["alp_deviation"] = art.alp_deviation;
        j["velocity_identity_residual"] = art.velocity_residual;
        j["lightlike_crossings"] = art.solution.lightlike_crossings;
        out += j.dump() + "\n";
    }
    for (const BlowupReport& rep : art.blowup_reports) {
        nlohmann::json j;
        j["type"] = "blowup";
        j["t_star"] = rep.t_star;
        j["infinity"] = infinity_json(rep.infinity);
        j["direction_indicator"] = rep.direction_indicator;
        j["boundary_angle_deg"] = rep.boundary_angle_deg;
        if (!rep.radius_trend.empty()) j["xi_last"] = rep.radius_trend.back().second;
        out += j.dump() + "\n";
    }
    for (const CurvePointEvent& e : art.point_events) {
        nlohmann::json j;
        j["type"] = "point-event";
        j["kind"] = to_string(e.kind);
        j["t"] = e.t;
        j["value"] = e.value;
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace detail

inline std::string scenario_summary(const Scenario& s, const RunArtifacts& art) {
    std::ostringstream os;
    os.precision(12);
    os << "scenario '" << s.name << "': " << art.solution.samples.size() << " samples";
    os << ", alp deviation " << art.alp_deviation;
    os << ", velocity identity residual " << art.velocity_residual << "\n";
    for (const BlowupEvent& ev : art.solution.events) {
        os << "  blow-up at t = " << ev.t_star << " -> " << to_string(ev.infinity.kind)
           << " infinity";
        if (ev.infinity.kind == InfinityKind::NullInfinity) {
            os << " (" << to_string(ev.infinity.edge) << " edge)";
        }
        os << "\n";
    }
    for (const BlowupReport& rep : art.blowup_reports) {
        os << "  classified t = " << rep.t_star << ": indicator " << rep.direction_indicator
           << ", boundary angle " << rep.boundary_angle_deg << " deg\n";
    }
    for (const CurvePointEvent& e : art.point_events) {
        os << "  " << to_string(e.kind) << " at t = " << e.t << "\n";
    }
    if (art.solution.events.empty() && art.point_events.empty()) {
        os << "  no events\n";
    }
    return os.str();
}

// Runs one scenario and writes the requested artifacts into out_dir.
// Returns the human summary; IO failures surface as IoError.
inline std::string run_scenario(const Scenario& s, const std::string& out_dir) {
    RunArtifacts art = analyze_scenario(s);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("run_scenario: cannot create '" + out_dir + "'");

    auto path_for = [&](const std::string& suffix) {
        return (fs::path(out_dir) / (s.name + suffix)).string();
    };
    if (s.outputs.count("csv")) {
        emit_csv(art.solution, art.point_events, path_for(".csv"));
        art.files.push_back(path_for(".csv"));
    }
    if (s.outputs.count("svg_plane")) {
        emit_svg(art.solution, SvgView::Plane, path_for("_plane.svg"));
        art.files.push_back(path_for("_plane.svg"));
    }
    if (s.outputs.count("svg_penrose")) {
        emit_svg(art.solution, SvgView::Penrose, path_for("_penrose.svg"));
        art.files.push_back(path_for("_penrose.svg"));
    }
    if (s.outputs.count("diagnostics")) {
        const std::string p = path_for("_diagnostics.jsonl");
        std::ofstream f(p, std::ios::binary);
        if (!f) throw IoError("run_scenario: cannot open '" + p + "'");
        f << detail::diagnostics_jsonl(s, art);
        art.files.push_back(p);
    }
    return scenario_summary(s, art);
}

// The built-in figure set: Darboux transforms of the horizontal line for both
// signs of lambda (plane + Penrose), a simultaneously arc-length polarized
// pair (plane + Penrose), and the embedded Euclidean circle for both signs
// (Penrose). Initial data chosen for legible pictures.
inline std::vector<Scenario> figure_scenarios() {
    std::vector<Scenario> list;

    auto line = [](const char* name, double lambda, double p0, double q0, double t0, double t1) {
        Scenario s;
        s.name = name;
        s.curve.kind = CurveKind::Line;
        s.curve.point = {0.0, 0.0};
        s.curve.direction = {1.0, 0.0};
        s.lambda = lambda;
        s.initial_is_null = true;
        s.p0 = p0;
        s.q0 = q0;
        s.t0 = t0;
        s.t1 = t1;
        s.mode = DarbouxMode::ArcLengthRegularized;
        s.mode_given = true;
        return s;
    };
    auto circle = [](const char* name, double lambda, double p0, double q0) {
        Scenario s;
        s.name = name;
        s.curve.kind = CurveKind::EuclideanCircle;
        s.curve.center = {0.0, 0.0};
        s.curve.radius = 1.0;
        s.lambda = lambda;
        s.initial_is_null = true;
        s.p0 = p0;
        s.q0 = q0;
        s.t0 = 0.0;
        s.t1 = 2.0 * std::numbers::pi;
        s.mode = DarbouxMode::ArcLengthRegularized;
        s.mode_given = true;
        return s;
    };

    list.push_back(line("fig_line_pos", 1.0, 2.0, 0.8, -1.5, 1.5));
    list.push_back(line("fig_line_neg", -1.0, 1.0, 0.6, -1.5, 1.5));
    list.push_back(line("fig_alp_pair", 1.0, 2.0, 0.5, -1.0, 1.0));
    list.push_back(circle("fig_circle_pos", 2.0, -0.5, -0.9));
    list.push_back(circle("fig_circle_neg", -2.0, 0.5, 0.9));
    return list;
}

// Writes the declared figure files (stable names) into out_dir.
inline std::vector<std::string> figures_command(const std::string& out_dir) {
    std::vector<std::string> files;
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("figures: cannot create '" + out_dir + "'");

    for (const Scenario& s : figure_scenarios()) {
        const RunArtifacts art = analyze_scenario(s);
        const bool with_plane = s.curve.kind == CurveKind::Line;
        if (with_plane) {
            const std::string p = (fs::path(out_dir) / (s.name + ".svg")).string();
            emit_svg(art.solution, SvgView::Plane, p);
            files.push_back(p);
        }
        const std::string p = (fs::path(out_dir) / (s.name + "_penrose.svg")).string();
        emit_svg(art.solution, SvgView::Penrose, p);
        files.push_back(p);
    }
    return files;
}

}  // namespace mink
