#include "betaplane/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace betaplane {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
    }
    return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& text) {
    Int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config: '" + key + "' expects an integer, got '" + text + "'");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + text + "'");
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    double l1 = cfg.domain.L1, l2 = cfg.domain.L2;
    int n1 = cfg.domain.N1, n2 = cfg.domain.N2;
    bool modes_listed = false;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"L1", [&](auto& k, auto& v) { l1 = to_double(k, v); }},
        {"L2", [&](auto& k, auto& v) { l2 = to_double(k, v); }},
        {"N", [&](auto& k, auto& v) { n1 = n2 = to_int<int>(k, v); }},
        {"N1", [&](auto& k, auto& v) { n1 = to_int<int>(k, v); }},
        {"N2", [&](auto& k, auto& v) { n2 = to_int<int>(k, v); }},
        {"mu", [&](auto& k, auto& v) { cfg.mu = to_double(k, v); }},
        {"epsilons",
         [&](auto& k, auto& v) {
             cfg.epsilons.clear();
             for (const auto& item : split_list(v)) cfg.epsilons.push_back(to_double(k, item));
         }},
        {"nonlinear", [&](auto& k, auto& v) { cfg.nonlinear = to_bool(k, v); }},
        {"forcing.preset",
         [&](auto& k, auto& v) {
             if (v == "benchmark") {
                 cfg.forcing.modes = benchmark_forcing_spec().modes;
             } else if (v == "zonal") {
                 cfg.forcing.modes = zonal_forcing_spec().modes;
             } else if (v == "none") {
                 cfg.forcing.modes.clear();
             } else {
                 throw ConfigError("config: '" + k + "' must be benchmark, zonal or none");
             }
             modes_listed = true;
         }},
        {"forcing.kind",
         [&](auto& k, auto& v) {
             if (v == "steady") {
                 cfg.forcing.kind = ForcingKind::steady;
             } else if (v == "time_periodic") {
                 cfg.forcing.kind = ForcingKind::time_periodic;
             } else {
                 throw ConfigError("config: '" + k + "' must be steady or time_periodic");
             }
         }},
        {"forcing.sigma", [&](auto& k, auto& v) { cfg.forcing.sigma = to_double(k, v); }},
        {"forcing.mode",
         [&](auto& k, auto& v) {
             const auto parts = split_list(v);
             if (parts.size() != 4) throw ConfigError("config: '" + k + "' expects k1,k2,re,im");
             if (!modes_listed) cfg.forcing.modes.clear();
             modes_listed = true;
             cfg.forcing.modes.push_back({to_int<int>(k, parts[0]), to_int<int>(k, parts[1]),
                                          Complex(to_double(k, parts[2]), to_double(k, parts[3]))});
         }},
        {"t_spin", [&](auto& k, auto& v) { cfg.t_spin = to_double(k, v); }},
        {"t_end", [&](auto& k, auto& v) { cfg.t_end = to_double(k, v); }},
        {"h", [&](auto& k, auto& v) { cfg.h = to_double(k, v); }},
        {"cfl", [&](auto& k, auto& v) { cfg.cfl = to_double(k, v); }},
        {"sample_interval", [&](auto& k, auto& v) { cfg.sample_interval = to_double(k, v); }},
        {"seed", [&](auto& k, auto& v) { cfg.seed = to_int<std::uint64_t>(k, v); }},
        {"seeds",
         [&](auto& k, auto& v) {
             cfg.seeds.clear();
             for (const auto& item : split_list(v)) cfg.seeds.push_back(to_int<std::uint64_t>(k, item));
         }},
        {"initial_norm", [&](auto& k, auto& v) { cfg.initial_norm = to_double(k, v); }},
        {"reproject_every", [&](auto& k, auto& v) { cfg.reproject_every = to_int<int>(k, v); }},
        {"snapshot_interval", [&](auto& k, auto& v) { cfg.snapshot_interval = to_double(k, v); }},
        {"contraction_epsilon", [&](auto& k, auto& v) { cfg.contraction_epsilon = to_double(k, v); }},
        {"workers", [&](auto& k, auto& v) { cfg.workers = to_int<int>(k, v); }},
        {"tol.min_slope", [&](auto& k, auto& v) { cfg.tol.min_slope = to_double(k, v); }},
        {"tol.seed_agreement", [&](auto& k, auto& v) { cfg.tol.seed_agreement = to_double(k, v); }},
        {"tol.constant_stability", [&](auto& k, auto& v) { cfg.tol.constant_stability = to_double(k, v); }},
        {"tol.rate_fraction", [&](auto& k, auto& v) { cfg.tol.rate_fraction = to_double(k, v); }},
        {"tol.residual_slope", [&](auto& k, auto& v) { cfg.tol.residual_slope = to_double(k, v); }},
        {"tol.residual_slope_tol", [&](auto& k, auto& v) { cfg.tol.residual_slope_tol = to_double(k, v); }},
        {"tol.steady_derivative", [&](auto& k, auto& v) { cfg.tol.steady_derivative = to_double(k, v); }},
        {"tol.min_tail_samples", [&](auto& k, auto& v) { cfg.tol.min_tail_samples = to_int<int>(k, v); }},
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        it->second(key, value);
    }

    try {
        cfg.domain = Domain(l1, l2, n1, n2);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.epsilons.empty()) throw ConfigError("config: at least one epsilon is required");
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        if (!(cfg.epsilons[i] > 0.0)) throw ConfigError("config: epsilons must be positive");
        for (std::size_t j = 0; j < i; ++j) {
            if (cfg.epsilons[i] == cfg.epsilons[j]) throw ConfigError("config: epsilons must be distinct");
        }
    }
    if (!(cfg.contraction_epsilon > 0.0)) throw ConfigError("config: contraction_epsilon must be positive");
    if (!(cfg.mu > 0.0)) throw ConfigError("config: mu must be positive");
    if (cfg.t_spin < 0.0 || cfg.t_end < 0.0 || cfg.h < 0.0 || cfg.sample_interval < 0.0 ||
        cfg.snapshot_interval < 0.0) {
        throw ConfigError("config: times and intervals must be non-negative");
    }
    if (!(cfg.spin_time() > 0.0 && cfg.end_time() > cfg.spin_time())) {
        throw ConfigError("config: need 0 < t_spin < t_end");
    }
    if (!(cfg.cfl > 0.0)) throw ConfigError("config: cfl must be positive");
    if (!(cfg.initial_norm >= 0.0)) throw ConfigError("config: initial_norm must be non-negative");
    if (cfg.reproject_every < 0) throw ConfigError("config: reproject_every must be non-negative");
    if (cfg.workers < 0) throw ConfigError("config: workers must be non-negative");
    if (cfg.seeds.empty()) throw ConfigError("config: at least one seed is required");
    if (cfg.forcing.kind == ForcingKind::time_periodic && !std::isfinite(cfg.forcing.sigma)) {
        throw ConfigError("config: forcing.sigma must be finite");
    }
    try {
        make_forcing(cfg.forcing, cfg.domain);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::string to_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    auto list = [](const auto& values, auto conv) {
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + conv(values[i]);
        return s;
    };
    os << "L1 = " << fmt(cfg.domain.L1) << '\n'
       << "L2 = " << fmt(cfg.domain.L2) << '\n'
       << "N1 = " << cfg.domain.N1 << '\n'
       << "N2 = " << cfg.domain.N2 << '\n'
       << "mu = " << fmt(cfg.mu) << '\n'
       << "epsilons = " << list(cfg.epsilons, fmt) << '\n'
       << "nonlinear = " << (cfg.nonlinear ? "true" : "false") << '\n'
       << "forcing.kind = " << (cfg.forcing.kind == ForcingKind::steady ? "steady" : "time_periodic") << '\n'
       << "forcing.sigma = " << fmt(cfg.forcing.sigma) << '\n';
    if (cfg.forcing.modes.empty()) os << "forcing.preset = none\n";
    for (const auto& m : cfg.forcing.modes) {
        os << "forcing.mode = " << m.n1 << ',' << m.n2 << ',' << fmt(m.amplitude.real()) << ','
           << fmt(m.amplitude.imag()) << '\n';
    }
    os << "t_spin = " << fmt(cfg.t_spin) << '\n'
       << "t_end = " << fmt(cfg.t_end) << '\n'
       << "h = " << fmt(cfg.h) << '\n'
       << "cfl = " << fmt(cfg.cfl) << '\n'
       << "sample_interval = " << fmt(cfg.sample_interval) << '\n'
       << "seed = " << cfg.seed << '\n'
       << "seeds = " << list(cfg.seeds, [](std::uint64_t s) { return std::to_string(s); }) << '\n'
       << "initial_norm = " << fmt(cfg.initial_norm) << '\n'
       << "reproject_every = " << cfg.reproject_every << '\n'
       << "snapshot_interval = " << fmt(cfg.snapshot_interval) << '\n'
       << "contraction_epsilon = " << fmt(cfg.contraction_epsilon) << '\n'
       << "workers = " << cfg.workers << '\n'
       << "tol.min_slope = " << fmt(cfg.tol.min_slope) << '\n'
       << "tol.seed_agreement = " << fmt(cfg.tol.seed_agreement) << '\n'
       << "tol.constant_stability = " << fmt(cfg.tol.constant_stability) << '\n'
       << "tol.rate_fraction = " << fmt(cfg.tol.rate_fraction) << '\n'
       << "tol.residual_slope = " << fmt(cfg.tol.residual_slope) << '\n'
       << "tol.residual_slope_tol = " << fmt(cfg.tol.residual_slope_tol) << '\n'
       << "tol.steady_derivative = " << fmt(cfg.tol.steady_derivative) << '\n'
       << "tol.min_tail_samples = " << cfg.tol.min_tail_samples << '\n';
    return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : to_text(cfg)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace betaplane
