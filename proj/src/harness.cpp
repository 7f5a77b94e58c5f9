#include "betaplane/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "betaplane/operators.hpp"

namespace betaplane {
namespace {

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

std::string eps_tag(double eps) {
    std::ostringstream os;
    os << eps;
    return os.str();
}

// Runs task(i) for i in [0, n) on up to `workers` threads; rethrows the
// exception of the lowest failing index.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task) {
    const std::size_t threads = std::min<std::size_t>(
        n, static_cast<std::size_t>(workers > 0 ? workers : std::max(1u, std::thread::hardware_concurrency())));
    std::vector<std::exception_ptr> errors(n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

double relative_spread(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
}

double max_deviation_from_mean(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (mean == 0.0) return 0.0;
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - mean) / mean);
    return worst;
}

}  // namespace

ExperimentBlowUp::ExperimentBlowUp(double epsilon, std::uint64_t seed, const BlowUpError& e)
    : std::runtime_error("run eps = " + eps_tag(epsilon) + ", seed = " + std::to_string(seed) + ": " + e.what()),
      epsilon_(epsilon),
      seed_(seed) {}

SpectralField random_initial_condition(const Domain& d, std::uint64_t seed, double target_norm) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int radius = std::min(d.N1, d.N2) / 4;
    SpectralField w(d);
    for (int n2 = -d.N2 / 2 + 1; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2 + 1; n1 < d.N1 / 2; ++n1) {
            if (n1 * n1 + n2 * n2 > radius * radius || (n1 == 0 && n2 == 0)) continue;
            const double amp = 1.0 / std::sqrt(WaveVector::on(d, n1, n2).norm_sq());
            const double re = gauss(rng);
            const double im = gauss(rng);
            w(n1, n2) = amp * Complex(re, im);
        }
    }
    w = project_parity(project_real(w));
    const double n = norm(w);
    if (n > 0.0) w *= target_norm / n;
    return w;
}

double resolve_step(const ExperimentConfig& cfg) {
    double h = cfg.h;
    if (!(h > 0.0)) {
        const Domain& d = cfg.domain;
        const Forcing forcing = make_forcing(cfg.forcing, d);
        double u = 0.0;
        for (const auto seed : cfg.seeds) {
            u = std::max(u, max_velocity(random_initial_condition(d, seed, cfg.initial_norm)));
        }
        u = std::max(u, max_velocity(random_initial_condition(d, cfg.seed, cfg.initial_norm)));
        std::vector<double> eps = cfg.epsilons;
        eps.push_back(cfg.contraction_epsilon);
        for (double e : eps) u = std::max(u, max_velocity(approx_steady_state(forcing.base(), cfg.mu, e)));
        const double dx = std::min(d.L1 / d.N1, d.L2 / d.N2);
        h = u > 0.0 ? cfg.cfl * dx / u : 0.1;
        h = std::min(h, 0.1);
        if (!forcing.is_steady()) h = std::min(h, 0.05 * 2.0 * std::numbers::pi / std::abs(cfg.forcing.sigma));
    }
    if (cfg.sample_interval > 0.0) {
        const double steps = std::ceil(cfg.sample_interval / h - 1e-9);
        h = cfg.sample_interval / steps;
    }
    return h;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    LineFit fit;
    fit.samples = x.size();
    if (x.size() < 2) return fit;
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

TrajectoryRecord simulate(const ExperimentConfig& cfg, double epsilon, std::uint64_t seed,
                          const SimulationHooks& hooks) {
    const Domain& d = cfg.domain;
    const Forcing forcing = make_forcing(cfg.forcing, d);
    const ForcingFunction f = as_function(forcing);
    const ModelParams params{epsilon, cfg.mu, cfg.nonlinear};
    const double h = resolve_step(cfg);
    const Stepper stepper(d, params, h, f);

    SpectralField w0(d);
    double t0 = 0.0;
    if (hooks.restart) {
        const Snapshot& s = *hooks.restart;
        if (!(s.omega.domain() == d) || s.epsilon != epsilon || s.mu != cfg.mu) {
            throw ConfigError("restart snapshot does not match the configured domain, epsilon or mu");
        }
        w0 = s.omega;
        t0 = s.t;
    } else {
        w0 = random_initial_condition(d, seed, cfg.initial_norm);
    }

    Integrator run(stepper, w0, t0);
    run.reproject_every = cfg.reproject_every;
    const auto sample_every =
        cfg.sample_interval > 0.0 ? std::max<std::int64_t>(1, std::llround(cfg.sample_interval / h)) : 1;
    const auto snapshot_every =
        cfg.snapshot_interval > 0.0 ? std::max<std::int64_t>(1, std::llround(cfg.snapshot_interval / h)) : 0;
    const auto last = std::llround(cfg.end_time() / h);

    TrajectoryRecord rec;
    rec.epsilon = epsilon;
    rec.seed = seed;
    rec.h = h;
    auto record = [&](double budget) {
        rec.series.push_back(diagnose(run.state(), run.time(), budget));
        if (hooks.on_record) hooks.on_record(rec.series.back());
    };
    auto snapshot = [&] {
        if (hooks.on_snapshot) hooks.on_snapshot(Snapshot{run.state(), epsilon, cfg.mu, run.time()});
    };

    if (!hooks.restart) record(0.0);
    try {
        while (run.step_index() < last) {
            run.advance();
            const auto idx = run.step_index();
            if (idx % sample_every == 0 || idx == last) {
                record(budget_residual(run.previous_state(), run.state(), run.time() - h, h, f, params));
            }
            if (snapshot_every > 0 && idx % snapshot_every == 0 && idx != last) snapshot();
        }
    } catch (const BlowUpError& e) {
        throw ExperimentBlowUp(epsilon, seed, e);
    }
    snapshot();
    rec.final_state = run.state();
    rec.final_time = run.time();
    return rec;
}

WindowStats window_stats(const std::vector<DiagnosticsRecord>& series, double t_spin) {
    WindowStats s;
    for (const auto& r : series) {
        if (r.t < t_spin) continue;
        ++s.samples;
        s.sup_fast_sq = std::max(s.sup_fast_sq, r.fast_sq);
        s.sup_fast_h1_sq = std::max(s.sup_fast_h1_sq, r.fast_h1_sq);
        s.sup_enstrophy = std::max(s.sup_enstrophy, r.enstrophy);
    }
    return s;
}

SweepSummary summarize_sweep(const std::vector<TrajectoryRecord>& runs, double t_spin, double mu,
                             double forcing_inv_grad_norm, const Tolerances& tol) {
    std::map<double, std::vector<const TrajectoryRecord*>, std::greater<>> by_eps;
    for (const auto& r : runs) by_eps[r.epsilon].push_back(&r);

    SweepSummary s;
    double scale = 0.0;
    for (const auto& [eps, members] : by_eps) {
        SweepRow row;
        row.epsilon = eps;
        std::vector<double> per_seed;
        for (const auto* r : members) {
            const WindowStats w = window_stats(r->series, t_spin);
            if (w.samples == 0) {
                s.violations.push_back("no samples after t_spin at eps = " + eps_tag(eps));
                continue;
            }
            per_seed.push_back(w.sup_fast_sq);
            row.sup_fast_sq = std::max(row.sup_fast_sq, w.sup_fast_sq);
            row.sup_fast_h1_sq = std::max(row.sup_fast_h1_sq, w.sup_fast_h1_sq);
            if (forcing_inv_grad_norm > 0.0) {
                row.enstrophy_constants.push_back(std::sqrt(w.sup_enstrophy) * mu / forcing_inv_grad_norm);
            }
            scale = std::max(scale, w.sup_enstrophy);
        }
        row.ratio_fast = row.sup_fast_sq / eps;
        row.ratio_fast_h1 = row.sup_fast_h1_sq / eps;
        row.seed_spread = relative_spread(per_seed);
        row.constant_spread = max_deviation_from_mean(row.enstrophy_constants);
        s.rows.push_back(std::move(row));
    }

    // A fast part at round-off level (e.g. purely zonal forcing) has no scaling to measure.
    const double roundoff = 1e2 * kMachineEps * kMachineEps * std::max(1.0, scale);
    const bool fast_resolved = std::all_of(s.rows.begin(), s.rows.end(),
                                           [&](const SweepRow& r) { return r.sup_fast_sq > roundoff; });
    s.ratio_nonincreasing = s.ratio_h1_nonincreasing = true;
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
        s.ratio_nonincreasing &= s.rows[i].ratio_fast <= s.rows[i - 1].ratio_fast;
        s.ratio_h1_nonincreasing &= s.rows[i].ratio_fast_h1 <= s.rows[i - 1].ratio_fast_h1;
    }
    if (fast_resolved && s.rows.size() >= 2) {
        std::vector<double> le, lf, lg;
        for (const auto& r : s.rows) {
            le.push_back(std::log(r.epsilon));
            lf.push_back(std::log(r.sup_fast_sq));
            lg.push_back(std::log(r.sup_fast_h1_sq));
        }
        s.slope_fast = fit_line(le, lf).slope;
        s.slope_fast_h1 = fit_line(le, lg).slope;
        if (!s.ratio_nonincreasing) s.violations.push_back("THEOREM-VIOLATION: sup|w~|^2/eps increases as eps decreases");
        if (!s.ratio_h1_nonincreasing) {
            s.violations.push_back("THEOREM-VIOLATION: sup|grad w~|^2/eps increases as eps decreases");
        }
        if (s.slope_fast < tol.min_slope) s.violations.push_back("THEOREM-VIOLATION: slope of sup|w~|^2 below threshold");
        if (s.slope_fast_h1 < tol.min_slope) {
            s.violations.push_back("THEOREM-VIOLATION: slope of sup|grad w~|^2 below threshold");
        }
    } else if (s.rows.size() < 2) {
        s.violations.push_back("sweep needs at least two epsilon values for a slope");
    }

    s.seeds_agree = s.constant_stable = true;
    for (const auto& r : s.rows) {
        if (fast_resolved && r.seed_spread > tol.seed_agreement) {
            s.seeds_agree = false;
            s.violations.push_back("late-window sup|w~|^2 differs across seeds at eps = " + eps_tag(r.epsilon));
        }
        if (r.constant_spread > tol.constant_stability) {
            s.constant_stable = false;
            s.violations.push_back("enstrophy-bound constant unstable across seeds at eps = " + eps_tag(r.epsilon));
        }
    }
    return s;
}

RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& x, double t_spin, double floor,
                       int min_samples) {
    std::vector<double> tt, lx;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_spin && x[i] > floor) {
            tt.push_back(t[i]);
            lx.push_back(std::log(x[i]));
        }
    }
    RateFit fit;
    fit.samples = tt.size();
    if (static_cast<int>(tt.size()) < min_samples) return fit;
    fit.rate = -fit_line(tt, lx).slope;
    fit.valid = true;
    return fit;
}

ContractionSummary summarize_contraction(const std::vector<ContractionSample>& samples, double t_spin,
                                         double nu, double distance_floor, double tangent_floor,
                                         const Tolerances& tol) {
    std::vector<double> t, d, p;
    for (const auto& s : samples) {
        t.push_back(s.t);
        d.push_back(s.distance);
        p.push_back(s.tangent);
    }
    ContractionSummary s;
    s.nu = nu;
    s.distance = fit_decay_rate(t, d, t_spin, distance_floor, tol.min_tail_samples);
    s.tangent = fit_decay_rate(t, p, t_spin, tangent_floor, tol.min_tail_samples);

    std::size_t steps = 0, decreasing = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (t[i - 1] < t_spin || d[i] <= distance_floor) continue;
        ++steps;
        decreasing += d[i] < d[i - 1];
    }
    s.monotone_fraction = steps ? static_cast<double>(decreasing) / static_cast<double>(steps) : 0.0;

    const double required = tol.rate_fraction * nu;
    if (!s.distance.valid) {
        s.violations.push_back("contraction: fewer than " + std::to_string(tol.min_tail_samples) +
                               " tail samples of |w1 - w2| above the round-off floor");
    } else if (s.distance.rate < required) {
        s.violations.push_back("THEOREM-VIOLATION: trajectory contraction rate below the required fraction of nu");
    }
    if (!s.tangent.valid) {
        s.violations.push_back("contraction: fewer than " + std::to_string(tol.min_tail_samples) +
                               " tail samples of |phi| above the round-off floor");
    } else if (s.tangent.rate < required) {
        s.violations.push_back("THEOREM-VIOLATION: tangent decay rate below the required fraction of nu");
    }
    s.ok = s.violations.empty();
    return s;
}

SteadySummary summarize_steady(std::vector<SteadyRow> rows, const Tolerances& tol) {
    std::sort(rows.begin(), rows.end(), [](const SteadyRow& a, const SteadyRow& b) { return a.epsilon > b.epsilon; });
    SteadySummary s;
    std::vector<double> le, lr, ld;
    bool exact = true;
    for (const auto& r : rows) {
        if (!r.converged) s.violations.push_back("end state not converged at eps = " + eps_tag(r.epsilon));
        exact &= r.residual < 1e-12;
        if (r.residual > 0.0 && r.distance > 0.0) {
            le.push_back(std::log(r.epsilon));
            lr.push_back(std::log(r.residual));
            ld.push_back(std::log(r.distance));
        }
    }
    if (exact) {
        // Zonal forcing: the first-order state is an exact steady solution.
        s.residual_slope_ok = true;
    } else if (le.size() >= 2 && le.size() == rows.size()) {
        s.residual_fit = fit_line(le, lr);
        s.distance_fit = fit_line(le, ld);
        s.residual_slope_ok = std::abs(s.residual_fit.slope - tol.residual_slope) <= tol.residual_slope_tol;
        if (!s.residual_slope_ok) s.violations.push_back("THEOREM-VIOLATION: steady residual slope outside tolerance");
    } else {
        s.violations.push_back("steady sweep needs at least two epsilon values with nonzero residual");
    }
    s.rows = std::move(rows);
    return s;
}

bool RunRecord::ok() const { return violations().empty(); }

std::vector<std::string> RunRecord::violations() const {
    std::vector<std::string> v;
    if (sweep) v.insert(v.end(), sweep->violations.begin(), sweep->violations.end());
    if (contraction) v.insert(v.end(), contraction->violations.begin(), contraction->violations.end());
    if (steady) v.insert(v.end(), steady->violations.begin(), steady->violations.end());
    return v;
}

RunRecord run_epsilon_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    RunRecord rec;
    rec.config_hash = config_hash(cfg);
    rec.config_text = to_text(cfg);
    rec.mu = cfg.mu;
    rec.h = resolve_step(cfg);

    struct Task {
        double eps;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (double eps : cfg.epsilons)
        for (auto seed : cfg.seeds) tasks.push_back({eps, seed});
    rec.trajectories.resize(tasks.size());
    parallel_for(tasks.size(), cfg.workers,
                 [&](std::size_t i) { rec.trajectories[i] = simulate(cfg, tasks[i].eps, tasks[i].seed); });

    const Forcing forcing = make_forcing(cfg.forcing, cfg.domain);
    rec.sweep = summarize_sweep(rec.trajectories, cfg.spin_time(), cfg.mu, sobolev_norm(forcing.base(), -1.0), cfg.tol);
    return rec;
}

RunRecord run_contraction_test(const ExperimentConfig& cfg, double epsilon) {
    validate(cfg);
    const Domain& d = cfg.domain;
    const Forcing forcing = make_forcing(cfg.forcing, d);
    if (!forcing.is_steady()) throw ConfigError("contraction test requires time-independent forcing");

    RunRecord rec;
    rec.config_hash = config_hash(cfg);
    rec.config_text = to_text(cfg);
    rec.mu = cfg.mu;
    rec.h = resolve_step(cfg);
    const double h = rec.h;

    const std::uint64_t seed1 = cfg.seeds.size() >= 2 ? cfg.seeds[0] : cfg.seed;
    const std::uint64_t seed2 = cfg.seeds.size() >= 2 ? cfg.seeds[1] : cfg.seed + 1;
    const ModelParams params{epsilon, cfg.mu, cfg.nonlinear};
    const Stepper stepper(d, params, h, as_function(forcing));
    Integrator a(stepper, random_initial_condition(d, seed1, cfg.initial_norm));
    Integrator b(stepper, random_initial_condition(d, seed2, cfg.initial_norm));
    a.reproject_every = b.reproject_every = cfg.reproject_every;

    // Tangent seed: a unit-norm random field independent of both initial states.
    SpectralField phi = random_initial_condition(d, seed1 ^ 0x9e3779b97f4a7c15ull, 1.0);
    const double phi0 = norm(phi);

    auto sample = [&] { rec.contraction_samples.push_back({a.time(), norm(a.state() - b.state()), norm(phi)}); };
    sample();
    const auto last = std::llround(cfg.end_time() / h);
    TrajectorySegment seg;
    double state_scale = 0.0;
    try {
        while (a.step_index() < last) {
            a.advance(&seg);
            b.advance();
            phi = stepper.tangent_step(phi, seg);
            if (cfg.reproject_every > 0 && a.step_index() % cfg.reproject_every == 0) phi = reproject(phi);
            state_scale = std::max(state_scale, norm(a.state()));
            sample();
        }
    } catch (const BlowUpError& e) {
        throw ExperimentBlowUp(epsilon, seed1, e);
    }
    rec.trajectories.push_back({epsilon, seed1, h, {}, a.state(), a.time()});
    rec.trajectories.push_back({epsilon, seed2, h, {}, b.state(), b.time()});

    const double distance_floor = 1e2 * kMachineEps * std::max(1.0, state_scale);
    const double tangent_floor = 1e2 * kMachineEps * std::max(1.0, phi0);
    rec.contraction =
        summarize_contraction(rec.contraction_samples, cfg.spin_time(), cfg.nu(), distance_floor, tangent_floor, cfg.tol);
    return rec;
}

RunRecord run_steady_residual_sweep(const ExperimentConfig& cfg, const RunRecord* sweep) {
    validate(cfg);
    const Forcing forcing = make_forcing(cfg.forcing, cfg.domain);
    if (!forcing.is_steady()) throw ConfigError("steady-residual sweep requires time-independent forcing");

    RunRecord rec;
    rec.config_hash = config_hash(cfg);
    rec.config_text = to_text(cfg);
    rec.mu = cfg.mu;
    rec.h = resolve_step(cfg);
    const std::uint64_t seed = cfg.seeds.front();

    std::vector<const TrajectoryRecord*> reuse(cfg.epsilons.size(), nullptr);
    if (sweep) {
        for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
            for (const auto& t : sweep->trajectories) {
                if (t.epsilon == cfg.epsilons[i] && t.seed == seed) reuse[i] = &t;
            }
        }
    }
    std::vector<TrajectoryRecord> fresh(cfg.epsilons.size());
    parallel_for(cfg.epsilons.size(), cfg.workers, [&](std::size_t i) {
        if (!reuse[i]) fresh[i] = simulate(cfg, cfg.epsilons[i], seed);
    });

    const double f_norm = norm(forcing.base());
    std::vector<SteadyRow> rows;
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        const double eps = cfg.epsilons[i];
        const TrajectoryRecord& run = reuse[i] ? *reuse[i] : fresh[i];
        const SpectralField approx = approx_steady_state(forcing, cfg.mu, eps);
        SteadyRow row;
        row.epsilon = eps;
        row.residual = steady_residual(approx, forcing, cfg.mu, eps);
        row.distance = norm(run.final_state - approx);
        row.end_derivative = steady_residual(run.final_state, forcing, cfg.mu, eps);
        row.converged = row.end_derivative <= cfg.tol.steady_derivative * std::max(f_norm, 1.0);
        rows.push_back(row);
        if (!reuse[i]) rec.trajectories.push_back(std::move(fresh[i]));
    }
    rec.steady = summarize_steady(std::move(rows), cfg.tol);
    return rec;
}

void write_sweep_summary_csv(std::ostream& os, const SweepSummary& s) {
    const auto old = os.precision(17);
    os << "epsilon,sup_fast_sq,sup_fast_h1_sq,ratio_fast,ratio_fast_h1,seed_spread,constant_mean,constant_spread,"
          "slope_fast,slope_fast_h1\n";
    for (const auto& r : s.rows) {
        const double mean = r.enstrophy_constants.empty()
                                ? 0.0
                                : std::accumulate(r.enstrophy_constants.begin(), r.enstrophy_constants.end(), 0.0) /
                                      static_cast<double>(r.enstrophy_constants.size());
        os << r.epsilon << ',' << r.sup_fast_sq << ',' << r.sup_fast_h1_sq << ',' << r.ratio_fast << ','
           << r.ratio_fast_h1 << ',' << r.seed_spread << ',' << mean << ',' << r.constant_spread << ','
           << s.slope_fast << ',' << s.slope_fast_h1 << '\n';
    }
    os.precision(old);
}

void write_contraction_csv(std::ostream& os, const std::vector<ContractionSample>& samples) {
    const auto old = os.precision(17);
    os << "t,distance,tangent\n";
    for (const auto& s : samples) os << s.t << ',' << s.distance << ',' << s.tangent << '\n';
    os.precision(old);
}

void write_steady_summary_csv(std::ostream& os, const SteadySummary& s) {
    const auto old = os.precision(17);
    os << "epsilon,residual,distance,end_derivative,converged,residual_slope,distance_slope\n";
    for (const auto& r : s.rows) {
        os << r.epsilon << ',' << r.residual << ',' << r.distance << ',' << r.end_derivative << ','
           << (r.converged ? 1 : 0) << ',' << s.residual_fit.slope << ',' << s.distance_fit.slope << '\n';
    }
    os.precision(old);
}

void write_run_outputs(const RunRecord& record, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream m(dir / "manifest.txt");
        m << "# config hash " << std::hex << std::setw(16) << std::setfill('0') << record.config_hash << std::dec
          << "\n# step size " << std::setprecision(17) << record.h << '\n'
          << record.config_text;
    }
    for (const auto& t : record.trajectories) {
        const fs::path run_dir = dir / ("run_eps" + eps_tag(t.epsilon) + "_seed" + std::to_string(t.seed));
        fs::create_directories(run_dir);
        if (!t.series.empty()) {
            std::ofstream csv(run_dir / "diagnostics.csv");
            write_diagnostics_header(csv);
            for (const auto& r : t.series) write_diagnostics_row(csv, r);
        }
        write_snapshot(run_dir / "final.zns1", Snapshot{t.final_state, t.epsilon, record.mu, t.final_time});
    }
    if (record.sweep) {
        std::ofstream os(dir / "summary.csv");
        write_sweep_summary_csv(os, *record.sweep);
    }
    if (record.contraction) {
        std::ofstream os(dir / "contraction.csv");
        write_contraction_csv(os, record.contraction_samples);
    }
    if (record.steady) {
        std::ofstream os(dir / "steady.csv");
        write_steady_summary_csv(os, *record.steady);
    }
}

TriadScan run_triad_scan(const Domain& d, int max_k) {
    if (max_k < 1) throw std::invalid_argument("run_triad_scan: max_k must be positive");
    TriadScan scan;
    scan.area = d.area();
    for (int j1 = -max_k; j1 <= max_k; ++j1) {
        for (int j2 = -max_k; j2 <= max_k; ++j2) {
            if (j1 == 0 && j2 == 0) continue;
            for (int k2 = -max_k; k2 <= max_k; ++k2) {
                if (j1 == 0 && k2 == 0) continue;
                TriadRow r;
                r.j = WaveVector::on(d, j1, j2);
                r.k = WaveVector::on(d, -j1, k2);
                r.l = WaveVector::on(d, 0, j2 + k2);
                r.b_jkl = b_coeff(r.j, r.k, r.l, d);
                r.b_kjl = b_coeff(r.k, r.j, r.l, d);
                r.omega_sum = omega_freq(r.j) + omega_freq(r.k);
                r.residual = triad_identity_residual(r.j, r.k, r.l, d);
                scan.max_residual = std::max(scan.max_residual, r.residual);
                scan.rows.push_back(r);
            }
        }
    }
    scan.ok = scan.max_residual < 1e-10 * scan.area;
    return scan;
}

void write_triad_csv(std::ostream& os, const TriadScan& scan) {
    const auto old = os.precision(17);
    os << "j1,j2,k1,k2,l1,l2,Bjkl,Bkjl,omega_sum,residual\n";
    for (const auto& r : scan.rows) {
        os << r.j.n1 << ',' << r.j.n2 << ',' << r.k.n1 << ',' << r.k.n2 << ',' << r.l.n1 << ',' << r.l.n2 << ','
           << r.b_jkl << ',' << r.b_kjl << ',' << r.omega_sum << ',' << r.residual << '\n';
    }
    os.precision(old);
}

AgmonEnsemble run_agmon_ensemble(const Domain& d, std::uint64_t seed, std::size_t samples, double constant,
                                 int oversample) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> slope_dist(0.0, 3.0);
    const int band = (std::min(d.N1, d.N2) - 1) / 3;
    std::uniform_int_distribution<int> cutoff_dist(1, band);

    auto draw = [&] {
        const double slope = slope_dist(rng);
        const int cutoff = cutoff_dist(rng);
        SpectralField f(d);
        for (int n2 = -cutoff; n2 <= cutoff; ++n2) {
            for (int n1 = -cutoff; n1 <= cutoff; ++n1) {
                if (n1 == 0 && n2 == 0) continue;
                const double amp = std::pow(WaveVector::on(d, n1, n2).norm_sq(), -0.5 * slope);
                const double re = gauss(rng);
                const double im = gauss(rng);
                f(n1, n2) = amp * Complex(re, im);
            }
        }
        return project_parity(project_real(f));
    };

    AgmonEnsemble e;
    e.constant = constant;
    e.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        SpectralField u = draw();
        SpectralField v = draw();
        u *= 1.0 / norm(u);
        v.axpy(-inner(v, u), u);
        v *= 1.0 / norm(v);
        const AgmonReport r = agmon_check(u, v, constant, oversample);
        ++e.samples;
        if (r.ratio > e.max_ratio) {
            e.max_ratio = r.ratio;
            e.argmax = i;
        }
        e.min_ratio = std::min(e.min_ratio, r.ratio);
        e.violations += r.violation;
        e.chain_failures += !r.chain_consistent;
    }
    return e;
}

}  // namespace betaplane
