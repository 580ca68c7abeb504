#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mink/runner.hpp"
#include "mink/scenario.hpp"
#include "mink/svg.hpp"
#include "mink/trace_csv.hpp"
#include "support.hpp"

using namespace mink;
using testutil::close;

namespace {

const char* kMinimalScenario =
    "# horizontal line, negative lambda\n"
    "name = line_demo\n"
    "curve = line\n"
    "curve.p = 0,0\n"
    "curve.d = 1,0\n"
    "lambda = -1\n"
    "initial = 0,1\n"
    "t0 = 0\n"
    "t1 = 1.2\n";

}  // namespace

TEST_CASE("scenario parsing") {
    const Scenario s = parse_scenario(kMinimalScenario);
    CHECK(s.name == "line_demo");
    CHECK(s.curve.kind == CurveKind::Line);
    CHECK(s.lambda == -1.0);
    CHECK(close(s.initial, {0, 1}, 0.0));
    CHECK(s.t1 == 1.2);
    CHECK(s.mode == DarbouxMode::ArcLengthRegularized);  // arclength default
    CHECK(s.outputs.count("csv") == 1);

    CHECK_THROWS_AS((void)parse_scenario("curve = line\nlambda = 0\ninitial = 0,1\nt1 = 1\n"),
                    ValidationError);
    CHECK_THROWS_AS((void)parse_scenario(std::string(kMinimalScenario) + "gamma = 2\n"),
                    ParseError);
    CHECK_THROWS_AS((void)parse_scenario(std::string(kMinimalScenario) + "lambda\n"), ParseError);
    CHECK_THROWS_AS((void)parse_scenario("curve = line\nlambda = -1\nt1 = 1\n"), ValidationError);
    // both initial forms at once
    CHECK_THROWS_AS(
        (void)parse_scenario(std::string(kMinimalScenario) + "initial_null = 1,-1\n"),
        ValidationError);

    try {
        (void)parse_scenario("curve = line\nlambda = 0\ninitial = 0,1\nt0 = 0\nt1 = 1\n");
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(e.field == "lambda");
    }
}

TEST_CASE("scenario to solver objects") {
    Scenario s = parse_scenario(kMinimalScenario);
    const PolarizedCurve pc = build_polarized_curve(s);
    const DarbouxParams params = build_params(s, pc.curve);
    CHECK(close(params.initial_point, {0, 1}, 0.0));
    const DarbouxSolution sol = integrate(pc, params, s.t1, s.tol);
    CHECK(sol.events.size() == 1);
}

TEST_CASE("csv trace format") {
    Scenario s = parse_scenario(kMinimalScenario);
    s.tol.rel = 1e-12;
    s.tol.abs = 1e-14;
    const RunArtifacts art = analyze_scenario(s);
    const std::string csv = render_csv(art.solution, art.point_events);

    // header is bit-exact
    CHECK(csv.rfind(kCsvHeader, 0) == 0);

    const std::vector<CsvRow> rows = parse_csv(csv);
    REQUIRE(rows.size() == art.solution.samples.size());

    // first row: t=0, x=(0,0), xhat=(0,1), offset_norm2=-1, xi=0.5
    const CsvRow& r0 = rows.front();
    CHECK(r0.t == 0.0);
    CHECK(close(r0.x, {0, 0}, 0.0));
    REQUIRE(r0.xhat);
    CHECK(close(*r0.xhat, {0, 1}, 0.0));
    REQUIRE(r0.offset_norm2);
    CHECK(close(*r0.offset_norm2, -1.0, 1e-12));
    REQUIRE(r0.xi);
    CHECK(close(*r0.xi, 0.5, 1e-12));
    CHECK(r0.causal_x == "spacelike");

    // causal_x stays spacelike on a line scenario, rows strictly ordered
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].causal_x == "spacelike");
        if (i > 0) CHECK(rows[i].t > rows[i - 1].t);
    }

    // the marker row: xhat fields are inf, event names the blow-up class
    bool saw_marker = false;
    for (const CsvRow& r : rows) {
        if (!r.xhat) {
            saw_marker = true;
            CHECK(r.event == "blowup:null");
            CHECK(!r.offset_norm2);
            CHECK(r.causal_xhat == "at_infinity");
        }
    }
    CHECK(saw_marker);

    // parsed values reproduce the doubles bit-exactly
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].t == art.solution.samples[i].t);
        if (art.solution.samples[i].xhat) {
            CHECK(rows[i].xhat->re == art.solution.samples[i].xhat->re);
            CHECK(rows[i].xhat->im == art.solution.samples[i].xhat->im);
        }
    }
}

TEST_CASE("svg output is deterministic and structured") {
    Scenario s = parse_scenario(kMinimalScenario);
    const RunArtifacts art = analyze_scenario(s);
    const std::string plane_a = render_svg(art.solution, SvgView::Plane);
    const std::string plane_b = render_svg(art.solution, SvgView::Plane);
    CHECK(plane_a == plane_b);
    CHECK(plane_a.rfind("<svg", 0) == 0);
    CHECK(plane_a.find("</svg>") != std::string::npos);

    const std::string penrose = render_svg(art.solution, SvgView::Penrose);
    CHECK(penrose.find("I+") != std::string::npos);
    CHECK(penrose.find("I0") != std::string::npos);
}

TEST_CASE("run_scenario writes the requested artifacts") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mink_cli_test";
    fs::remove_all(dir);

    Scenario s = parse_scenario(kMinimalScenario);
    const std::string summary = run_scenario(s, dir.string());
    CHECK(summary.find("line_demo") != std::string::npos);
    CHECK(summary.find("blow-up") != std::string::npos);
    CHECK(fs::exists(dir / "line_demo.csv"));
    CHECK(fs::exists(dir / "line_demo_plane.svg"));
    CHECK(fs::exists(dir / "line_demo_penrose.svg"));
    CHECK(fs::exists(dir / "line_demo_diagnostics.jsonl"));

    // blow-up near pi/4 shows up in the summary
    CHECK(summary.find("0.785398") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("circle scenario trace carries lightlike labels") {
    const char* cfg =
        "name = circle_demo\n"
        "curve = euclidean_circle\n"
        "curve.center = 0,0\n"
        "curve.r = 1\n"
        "lambda = -2\n"
        "initial_null = 0.5,0.9\n"
        "t0 = 0\n"
        "t1 = 6.283185307179586\n";
    const Scenario s = parse_scenario(cfg);
    const RunArtifacts art = analyze_scenario(s);
    const std::vector<CsvRow> rows = parse_csv(render_csv(art.solution, art.point_events));
    int lightlike_labels = 0;
    for (const CsvRow& r : rows) {
        if (r.event == "lightlike") ++lightlike_labels;
    }
    CHECK(lightlike_labels == 4);
}

TEST_CASE("io failures are typed") {
    Scenario s = parse_scenario(kMinimalScenario);
    CHECK_THROWS_AS((void)run_scenario(s, "/proc/definitely/not/writable"), IoError);
}

TEST_CASE("diagnostics stream is valid json lines") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mink_diag_test";
    fs::remove_all(dir);
    Scenario s = parse_scenario(kMinimalScenario);
    (void)run_scenario(s, dir.string());
    std::ifstream f(dir / "line_demo_diagnostics.jsonl");
    REQUIRE(f.good());
    std::string line;
    int lines = 0;
    bool saw_blowup = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        ++lines;
        if (j["type"] == "blowup") {
            saw_blowup = true;
            CHECK(j["infinity"]["kind"] == "null");
        }
    }
    CHECK(lines >= 2);
    CHECK(saw_blowup);
    fs::remove_all(dir);
}

TEST_CASE("figures command emits the declared set") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mink_figures_test";
    fs::remove_all(dir);
    const std::vector<std::string> files = figures_command(dir.string());
    CHECK(files.size() == 8);
    const char* expected[] = {
        "fig_line_pos.svg",  "fig_line_pos_penrose.svg", "fig_line_neg.svg",
        "fig_line_neg_penrose.svg", "fig_alp_pair.svg",  "fig_alp_pair_penrose.svg",
        "fig_circle_pos_penrose.svg", "fig_circle_neg_penrose.svg",
    };
    for (const char* name : expected) {
        CHECK(fs::exists(dir / name));
    }
    fs::remove_all(dir);
}
