// Command-line front end: runs scenario files, regenerates the built-in
// figure set, and executes the acceptance self-check.
//
// Exit codes: 0 ok, 2 config/validation error, 3 solver error, 4 IO error.

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mink/checks.hpp"
#include "mink/runner.hpp"
#include "mink/scenario.hpp"

namespace {

int classify_exit(const mink::Error& e) {
    if (dynamic_cast<const mink::ParseError*>(&e) || dynamic_cast<const mink::ValidationError*>(&e) ||
        dynamic_cast<const mink::InvalidParamsError*>(&e)) {
        return mink::kExitValidation;
    }
    if (dynamic_cast<const mink::IoError*>(&e)) {
        return mink::kExitIo;
    }
    return mink::kExitSolver;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw mink::IoError("cannot open scenario file '" + path + "'");
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

int run_one(const std::string& path, const std::string& out_dir, double tol_rel, double tol_abs,
            std::mutex& io_mutex) {
    try {
        mink::Scenario s = mink::parse_scenario(slurp(path));
        if (tol_rel > 0) s.tol.rel = tol_rel;
        if (tol_abs > 0) s.tol.abs = tol_abs;
        const std::string summary = mink::run_scenario(s, out_dir);
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << summary;
        return mink::kExitOk;
    } catch (const mink::Error& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << path << ": " << e.what() << "\n";
        return classify_exit(e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lorentz-Darboux transformations in the Minkowski plane"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    int jobs = 1;
    double tol_rel = 0.0, tol_abs = 0.0;
    std::vector<std::string> scenario_files;

    CLI::App* cmd_run = app.add_subcommand("run", "run scenario file(s)");
    cmd_run->add_option("scenarios", scenario_files, "scenario .cfg files")->required();
    cmd_run->add_option("--out", out_dir, "output directory");
    cmd_run->add_option("--jobs", jobs, "parallel scenario workers")->check(CLI::PositiveNumber);
    cmd_run->add_option("--tol-rel", tol_rel, "override relative tolerance");
    cmd_run->add_option("--tol-abs", tol_abs, "override absolute tolerance");

    CLI::App* cmd_figures = app.add_subcommand("figures", "emit the built-in figure set");
    cmd_figures->add_option("--out", out_dir, "output directory");

    CLI::App* cmd_check = app.add_subcommand("check", "run the acceptance suite");
    cmd_check->add_option("--out", out_dir, "scratch directory for the suite");

    CLI11_PARSE(app, argc, argv);

    if (cmd_figures->parsed()) {
        try {
            for (const std::string& f : mink::figures_command(out_dir)) {
                std::cout << f << "\n";
            }
            return mink::kExitOk;
        } catch (const mink::Error& e) {
            std::cerr << e.what() << "\n";
            return classify_exit(e);
        }
    }

    if (cmd_check->parsed()) {
        const int failures = mink::checks::report(std::cout, out_dir);
        return failures == 0 ? mink::kExitOk : 1;
    }

    // run
    std::mutex io_mutex;
    std::atomic<int> worst{mink::kExitOk};
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(scenario_files.size())));
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= scenario_files.size()) break;
            const int code = run_one(scenario_files[i], out_dir, tol_rel, tol_abs, io_mutex);
            int cur = worst.load();
            while (code > cur && !worst.compare_exchange_weak(cur, code)) {
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return worst.load();
}
