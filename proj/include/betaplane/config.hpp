#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "betaplane/forcing.hpp"
#include "betaplane/lattice.hpp"

namespace betaplane {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pass/fail thresholds of the experiment checks.
struct Tolerances {
    double min_slope = 0.8;            ///< log-log slope of sup|w~|^2 and sup|grad w~|^2 vs eps
    double seed_agreement = 0.10;      ///< relative spread of late-window sup|w~|^2 across seeds
    double constant_stability = 0.20;  ///< relative spread of the enstrophy-bound constant across seeds
    double rate_fraction = 0.5;        ///< contraction rates must reach this fraction of nu
    double residual_slope = 1.0;       ///< expected steady-residual slope
    double residual_slope_tol = 0.2;
    double steady_derivative = 1e-6;   ///< |dw/dt| / |f| below which an end state counts as converged
    int min_tail_samples = 50;
};

/// Everything an experiment needs. Times are in model units; zero means "derive a default".
struct ExperimentConfig {
    Domain domain{2 * std::numbers::pi, 2 * std::numbers::pi, 64, 64};
    double mu = 0.5;
    std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
    bool nonlinear = true;
    ForcingSpec forcing = benchmark_forcing_spec();
    double t_spin = 0.0;           ///< default 10/nu
    double t_end = 0.0;            ///< default t_spin + 10/nu
    double h = 0.0;                ///< default from the advective CFL estimate
    double cfl = 0.5;
    double sample_interval = 0.0;  ///< default every step
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    double initial_norm = 20.0;    ///< |w(0)| of the random initial data
    int reproject_every = 100;
    double snapshot_interval = 0.0;  ///< 0 disables intermediate snapshots
    double contraction_epsilon = 0.01;
    int workers = 0;               ///< 0: one per hardware thread
    Tolerances tol;

    /// nu = c0^2 mu.
    double nu() const { return domain.c0() * domain.c0() * mu; }
    double spin_time() const { return t_spin > 0.0 ? t_spin : 10.0 / nu(); }
    double end_time() const { return t_end > 0.0 ? t_end : spin_time() + 10.0 / nu(); }
};

/// Parses flat `key = value` text; `#` starts a comment. Unknown keys,
/// malformed values and invariant violations raise ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks the invariants: positive distinct epsilons, 0 < t_spin < t_end,
/// a valid forcing spec on the domain, positive mu unless the model is inviscid.
void validate(const ExperimentConfig& cfg);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& cfg);

/// FNV-1a over the canonical text.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace betaplane
