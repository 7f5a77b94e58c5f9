// Command-line front end for the beta-plane simulator and its checks.
//
// Exit status: 0 success, 1 invalid config or path, 2 numerical blow-up,
// 3 a property check failed (results are still written).

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "betaplane/config.hpp"
#include "betaplane/harness.hpp"
#include "betaplane/snapshot.hpp"

namespace fs = std::filesystem;
using namespace betaplane;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kBlowUp = 2, kViolation = 3 };

struct Common {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> resolution;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "Config file (key = value)");
    cmd->add_option("--out", c.out_dir, "Output directory");
    cmd->add_option("--seed", c.seed, "Seed for random initial data");
    cmd->add_option("--resolution", c.resolution, "Grid points per direction")->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", c.quiet, "Suppress the summary table");
}

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg;
    if (!c.config_path.empty()) {
        if (!fs::exists(c.config_path)) throw ConfigError("config file not found: " + c.config_path);
        cfg = load_config(c.config_path);
    }
    if (c.resolution) cfg.domain = Domain(cfg.domain.L1, cfg.domain.L2, *c.resolution, *c.resolution);
    if (c.seed) {
        cfg.seed = *c.seed;
        cfg.seeds = {*c.seed, *c.seed + 1, *c.seed + 2};
    }
    validate(cfg);
    return cfg;
}

int report_violations(const std::vector<std::string>& violations) {
    for (const auto& v : violations) std::cerr << v << '\n';
    return violations.empty() ? kOk : kViolation;
}

void print_sweep(const SweepSummary& s) {
    std::cout << std::setw(10) << "epsilon" << std::setw(15) << "sup|w~|^2" << std::setw(15) << "ratio"
              << std::setw(15) << "sup|grad w~|^2" << std::setw(15) << "ratio_h1" << std::setw(12) << "spread"
              << '\n';
    for (const auto& r : s.rows) {
        std::cout << std::setw(10) << r.epsilon << std::setw(15) << r.sup_fast_sq << std::setw(15) << r.ratio_fast
                  << std::setw(15) << r.sup_fast_h1_sq << std::setw(15) << r.ratio_fast_h1 << std::setw(12)
                  << r.seed_spread << '\n';
    }
    std::cout << "slope |w~|^2 vs eps: " << s.slope_fast << "\nslope |grad w~|^2 vs eps: " << s.slope_fast_h1 << '\n';
}

int cmd_simulate(const Common& c, std::optional<double> epsilon, const std::string& restart_path) {
    ExperimentConfig cfg = load(c);
    std::optional<Snapshot> restart;
    if (!restart_path.empty()) {
        if (!fs::exists(restart_path)) throw ConfigError("restart snapshot not found: " + restart_path);
        restart = read_snapshot(restart_path);
    }
    const double eps = epsilon ? *epsilon : restart ? restart->epsilon : cfg.epsilons.front();
    const fs::path out = c.out_dir.empty() ? fs::path("run") : fs::path(c.out_dir);
    fs::create_directories(out);

    std::ofstream csv(out / "diagnostics.csv");
    write_diagnostics_header(csv);
    int snapshot_count = 0;
    SimulationHooks hooks;
    hooks.restart = restart ? &*restart : nullptr;
    hooks.on_record = [&](const DiagnosticsRecord& r) { write_diagnostics_row(csv, r); };
    hooks.on_snapshot = [&](const Snapshot& s) {
        std::ostringstream name;
        name << "snapshot_" << std::setw(4) << std::setfill('0') << snapshot_count++ << ".zns1";
        write_snapshot((out / name.str()).string(), s);
    };
    const TrajectoryRecord t = simulate(cfg, eps, cfg.seed, hooks);
    write_snapshot((out / "final.zns1").string(), Snapshot{t.final_state, eps, cfg.mu, t.final_time});
    if (!c.quiet && !t.series.empty()) {
        const auto& last = t.series.back();
        std::cout << "t = " << last.t << "  |w|^2 = " << last.enstrophy << "  |w~|^2 = " << last.fast_sq
                  << "  step = " << t.h << '\n';
    }
    return kOk;
}

int cmd_sweep(const Common& c) {
    const ExperimentConfig cfg = load(c);
    const RunRecord rec = run_epsilon_sweep(cfg);
    if (!c.out_dir.empty()) write_run_outputs(rec, c.out_dir);
    if (!c.quiet) {
        print_sweep(*rec.sweep);
        std::cout << "spin-up " << cfg.spin_time() << ", window end " << cfg.end_time() << ", step " << rec.h << '\n';
    }
    return report_violations(rec.violations());
}

int cmd_contraction(const Common& c, std::optional<double> epsilon) {
    const ExperimentConfig cfg = load(c);
    const RunRecord rec = run_contraction_test(cfg, epsilon ? *epsilon : cfg.contraction_epsilon);
    if (!c.out_dir.empty()) write_run_outputs(rec, c.out_dir);
    if (!c.quiet) {
        const auto& s = *rec.contraction;
        std::cout << "nu = " << s.nu << "\ndistance rate = " << s.distance.rate << " (" << s.distance.samples
                  << " samples)\ntangent rate = " << s.tangent.rate << " (" << s.tangent.samples
                  << " samples)\nmonotone fraction = " << s.monotone_fraction << '\n';
    }
    return report_violations(rec.violations());
}

int cmd_steady(const Common& c) {
    const ExperimentConfig cfg = load(c);
    const RunRecord rec = run_steady_residual_sweep(cfg);
    if (!c.out_dir.empty()) write_run_outputs(rec, c.out_dir);
    if (!c.quiet) write_steady_summary_csv(std::cout, *rec.steady);
    return report_violations(rec.violations());
}

int cmd_triad(const Common& c, int max_k) {
    const ExperimentConfig cfg = load(c);
    const TriadScan scan = run_triad_scan(cfg.domain, max_k);
    if (c.out_dir.empty()) {
        write_triad_csv(std::cout, scan);
    } else {
        fs::create_directories(c.out_dir);
        std::ofstream os(fs::path(c.out_dir) / "triad_scan.csv");
        write_triad_csv(os, scan);
    }
    if (!c.quiet) {
        std::cerr << scan.rows.size() << " triads, max residual " << scan.max_residual << " (bound "
                  << 1e-10 * scan.area << ")\n";
    }
    return scan.ok ? kOk : kViolation;
}

int cmd_agmon(const Common& c, std::size_t samples, double constant, int oversample) {
    const ExperimentConfig cfg = load(c);
    const AgmonEnsemble e = run_agmon_ensemble(cfg.domain, cfg.seed, samples, constant, oversample);
    if (!c.quiet) {
        std::cout << "samples = " << e.samples << "\nratio range = [" << e.min_ratio << ", " << e.max_ratio
                  << "] (worst sample " << e.argmax << ")\nconstant = " << e.constant
                  << "\nviolations = " << e.violations << "\nchain failures = " << e.chain_failures
                  << "\ndomain = " << cfg.domain.L1 << " x " << cfg.domain.L2 << '\n';
    }
    return e.ok() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral beta-plane simulator"};
    app.require_subcommand(1);

    Common common;
    std::optional<double> epsilon;
    std::string restart;
    int max_k = 16;
    std::size_t samples = 1000;
    double constant = 0.5;
    int oversample = 1;

    auto* sim = app.add_subcommand("simulate", "Single run with snapshots and diagnostics CSV");
    add_common(sim, common);
    sim->add_option("--epsilon", epsilon, "Rossby number");
    sim->add_option("--restart", restart, "Resume from a snapshot");

    auto* sweep = app.add_subcommand("sweep-epsilon", "Zonalization scaling over the epsilon list");
    add_common(sweep, common);

    auto* contraction = app.add_subcommand("contraction", "Two-trajectory and tangent contraction test");
    add_common(contraction, common);
    contraction->add_option("--epsilon", epsilon, "Rossby number");

    auto* steady = app.add_subcommand("steady-residual", "First-order steady state against converged runs");
    add_common(steady, common);

    auto* triad = app.add_subcommand("triad-check", "Exhaustive triad identity scan");
    add_common(triad, common);
    triad->add_option("--max-k", max_k, "Largest wavenumber index")->check(CLI::PositiveNumber);

    auto* agmon = app.add_subcommand("agmon-check", "Agmon inequality on random orthogonal pairs");
    add_common(agmon, common);
    agmon->add_option("--samples", samples, "Number of pairs");
    agmon->add_option("--constant", constant, "Candidate constant");
    agmon->add_option("--oversample", oversample, "Grid refinement for the sup norm")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*sim) return cmd_simulate(common, epsilon, restart);
        if (*sweep) return cmd_sweep(common);
        if (*contraction) return cmd_contraction(common, epsilon);
        if (*steady) return cmd_steady(common);
        if (*triad) return cmd_triad(common, max_k);
        if (*agmon) return cmd_agmon(common, samples, constant, oversample);
    } catch (const ExperimentBlowUp& e) {
        std::cerr << "blow-up: " << e.what() << '\n';
        return kBlowUp;
    } catch (const BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << '\n';
        return kBlowUp;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
