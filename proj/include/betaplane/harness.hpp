#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "betaplane/config.hpp"
#include "betaplane/diagnostics.hpp"
#include "betaplane/snapshot.hpp"
#include "betaplane/timestepper.hpp"

namespace betaplane {

/// A blow-up inside an experiment, tagged with the run it happened in.
class ExperimentBlowUp : public std::runtime_error {
public:
    ExperimentBlowUp(double epsilon, std::uint64_t seed, const BlowUpError& e);
    double epsilon() const { return epsilon_; }
    std::uint64_t seed() const { return seed_; }

private:
    double epsilon_;
    std::uint64_t seed_;
};

/// Random odd-in-y real field with modal variance proportional to |k|^-2 on
/// |n| <= N/4, scaled to |w| = target_norm. Deterministic in the seed.
SpectralField random_initial_condition(const Domain& d, std::uint64_t seed, double target_norm);

/// Step size: cfg.h if set, otherwise cfl * dx / U with U the larger of the
/// initial-data and approximate-steady-state velocity maxima; also capped at
/// 0.1 and at 0.05 * period for time-periodic forcing. Rounded down so that
/// sample_interval is a whole number of steps.
double resolve_step(const ExperimentConfig& cfg);

/// Ordinary least squares y = slope * x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t samples = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// One integrated trajectory.
struct TrajectoryRecord {
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double h = 0.0;
    std::vector<DiagnosticsRecord> series;
    SpectralField final_state;
    double final_time = 0.0;
};

struct SimulationHooks {
    /// Resume from this state instead of random initial data.
    const Snapshot* restart = nullptr;
    std::function<void(const DiagnosticsRecord&)> on_record;
    /// Called every snapshot_interval and at the end.
    std::function<void(const Snapshot&)> on_snapshot;
};

/// Integrates one trajectory from random data (or a restart snapshot) to cfg.end_time().
/// A blow-up is rethrown as ExperimentBlowUp.
TrajectoryRecord simulate(const ExperimentConfig& cfg, double epsilon, std::uint64_t seed,
                          const SimulationHooks& hooks = {});

/// Late-window summary of one trajectory (t >= t_spin).
struct WindowStats {
    double sup_fast_sq = 0.0;
    double sup_fast_h1_sq = 0.0;
    double sup_enstrophy = 0.0;
    std::size_t samples = 0;
};
WindowStats window_stats(const std::vector<DiagnosticsRecord>& series, double t_spin);

struct SweepRow {
    double epsilon = 0.0;
    double sup_fast_sq = 0.0;     ///< max over seeds of the window sup
    double sup_fast_h1_sq = 0.0;
    double ratio_fast = 0.0;      ///< sup_fast_sq / eps
    double ratio_fast_h1 = 0.0;
    double seed_spread = 0.0;     ///< (max - min)/max of the per-seed sup_fast_sq
    std::vector<double> enstrophy_constants;  ///< per seed: sup|w| mu / |grad^{-1} f|
    double constant_spread = 0.0; ///< max relative deviation from the seed mean
};

struct SweepSummary {
    std::vector<SweepRow> rows;   ///< in decreasing epsilon
    double slope_fast = 0.0;
    double slope_fast_h1 = 0.0;
    bool ratio_nonincreasing = false;
    bool ratio_h1_nonincreasing = false;
    bool seeds_agree = false;
    bool constant_stable = false;
    std::vector<std::string> violations;
};

/// Pure post-processing of sweep trajectories.
SweepSummary summarize_sweep(const std::vector<TrajectoryRecord>& runs, double t_spin, double mu,
                             double forcing_inv_grad_norm, const Tolerances& tol);

struct ContractionSample {
    double t = 0.0;
    double distance = 0.0;  ///< |w1 - w2|
    double tangent = 0.0;   ///< |phi|
};

struct RateFit {
    double rate = 0.0;  ///< decay rate of the amplitude, -d log|x|/dt
    std::size_t samples = 0;
    bool valid = false;
};

struct ContractionSummary {
    double nu = 0.0;
    RateFit distance;
    RateFit tangent;
    double monotone_fraction = 0.0;  ///< fraction of tail steps where the distance decreased
    bool ok = false;
    std::vector<std::string> violations;
};

/// Fits log x against t over samples with t >= t_spin and x above `floor`.
/// Fewer than min_samples such samples gives an invalid fit.
RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& x, double t_spin, double floor,
                       int min_samples);

/// Pure post-processing of a contraction run.
ContractionSummary summarize_contraction(const std::vector<ContractionSample>& samples, double t_spin,
                                         double nu, double distance_floor, double tangent_floor,
                                         const Tolerances& tol);

struct SteadyRow {
    double epsilon = 0.0;
    double residual = 0.0;        ///< steady residual of the first-order approximation
    double distance = 0.0;        ///< |w_final - w*^(1)|
    double end_derivative = 0.0;  ///< |dw/dt| of the end state
    bool converged = false;
};

struct SteadySummary {
    std::vector<SteadyRow> rows;
    LineFit residual_fit;  ///< log residual vs log eps
    LineFit distance_fit;
    bool residual_slope_ok = false;
    std::vector<std::string> violations;
};

SteadySummary summarize_steady(std::vector<SteadyRow> rows, const Tolerances& tol);

struct RunRecord {
    std::uint64_t config_hash = 0;
    std::string config_text;
    double mu = 0.0;
    double h = 0.0;
    std::vector<TrajectoryRecord> trajectories;
    std::optional<SweepSummary> sweep;
    std::vector<ContractionSample> contraction_samples;
    std::optional<ContractionSummary> contraction;
    std::optional<SteadySummary> steady;

    /// True when no property check failed.
    bool ok() const;
    std::vector<std::string> violations() const;
};

/// Every (epsilon, seed) pair in the config; runs use up to cfg.workers threads.
/// A blow-up aborts the sweep with an ExperimentBlowUp naming the offending epsilon.
RunRecord run_epsilon_sweep(const ExperimentConfig& cfg);

/// Two trajectories from cfg.seeds[0] and cfg.seeds[1] (or seed and seed + 1)
/// at `epsilon`, plus a tangent perturbation along the first.
RunRecord run_contraction_test(const ExperimentConfig& cfg, double epsilon);

/// First-order steady state against converged end states for each epsilon.
/// End states are taken from `sweep` when given (seed cfg.seeds[0]), otherwise simulated.
RunRecord run_steady_residual_sweep(const ExperimentConfig& cfg, const RunRecord* sweep = nullptr);

/// One row of the exhaustive triad-identity scan.
struct TriadRow {
    WaveVector j, k, l;
    double b_jkl = 0.0;
    double b_kjl = 0.0;
    double omega_sum = 0.0;
    double residual = 0.0;
};

struct TriadScan {
    std::vector<TriadRow> rows;
    double max_residual = 0.0;
    double area = 0.0;
    bool ok = false;  ///< max_residual < 1e-10 |M|
};

/// All j, k with |j1|,|j2|,|k2| <= max_k, k1 = -j1, j,k != 0 (so l = j + k is zonal).
TriadScan run_triad_scan(const Domain& d, int max_k);
void write_triad_csv(std::ostream& os, const TriadScan& scan);

struct AgmonEnsemble {
    std::size_t samples = 0;
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    std::size_t argmax = 0;
    std::size_t violations = 0;        ///< samples whose ratio exceeds the candidate constant
    std::size_t chain_failures = 0;    ///< samples whose constructive chain is inconsistent
    double constant = 0.0;
    bool ok() const { return samples > 0 && violations == 0 && chain_failures == 0; }
};

/// Random real odd-in-y orthogonal pairs (u, v) with random spectral slopes
/// and cutoffs inside the 2/3 band, checked against `constant`.
AgmonEnsemble run_agmon_ensemble(const Domain& d, std::uint64_t seed, std::size_t samples, double constant,
                                 int oversample = 1);

/// Result files: run_<eps>_<seed>/diagnostics.csv, summary.csv, manifest.txt.
void write_run_outputs(const RunRecord& record, const std::filesystem::path& dir);
void write_sweep_summary_csv(std::ostream& os, const SweepSummary& s);
void write_contraction_csv(std::ostream& os, const std::vector<ContractionSample>& samples);
void write_steady_summary_csv(std::ostream& os, const SteadySummary& s);

}  // namespace betaplane
