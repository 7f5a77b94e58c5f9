#include "betaplane/forcing.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "betaplane/diagnostics.hpp"

namespace betaplane {
namespace {

std::string mode_name(int n1, int n2) {
    return "(" + std::to_string(n1) + "," + std::to_string(n2) + ")";
}

SpectralField build_base(const ForcingSpec& spec, const Domain& d) {
    std::map<std::pair<int, int>, Complex> assigned;
    double scale = 0.0;
    for (const auto& m : spec.modes) scale = std::max(scale, std::abs(m.amplitude));
    const double tol = 1e-12 * scale;

    auto assign = [&](int n1, int n2, Complex value) {
        auto [it, inserted] = assigned.emplace(std::make_pair(n1, n2), value);
        if (!inserted && std::abs(it->second - value) > tol) {
            throw std::invalid_argument("forcing: amplitudes at " + mode_name(n1, n2) +
                                        " are inconsistent with the parity/reality closure");
        }
    };

    for (const auto& m : spec.modes) {
        if (m.n1 == 0 && m.n2 == 0) {
            throw std::invalid_argument("forcing: k = 0 cannot be forced (zero-mean forcing)");
        }
        if (3 * std::abs(m.n1) >= d.N1 || 3 * std::abs(m.n2) >= d.N2) {
            throw std::invalid_argument("forcing: mode " + mode_name(m.n1, m.n2) +
                                        " lies outside the resolved 2/3 band");
        }
        const Complex a = m.amplitude;
        assign(m.n1, m.n2, a);
        assign(m.n1, -m.n2, -a);
        assign(-m.n1, -m.n2, std::conj(a));
        assign(-m.n1, m.n2, -std::conj(a));
    }

    SpectralField base(d);
    for (const auto& [mode, value] : assigned) base(mode.first, mode.second) = value;
    return base;
}

}  // namespace

ForcingSpec benchmark_forcing_spec() {
    ForcingSpec spec;
    spec.kind = ForcingKind::steady;
    spec.modes = {{0, 1, Complex(0.0, -1.0)}, {1, 1, Complex(0.5, 0.0)}};
    return spec;
}

ForcingSpec zonal_forcing_spec() {
    ForcingSpec spec;
    spec.kind = ForcingKind::steady;
    spec.modes = {{0, 1, Complex(0.0, -1.0)}};
    return spec;
}

Forcing::Forcing(const ForcingSpec& spec, const Domain& d) : spec_(spec), base_(build_base(spec, d)) {
    if (spec.kind == ForcingKind::time_periodic && !std::isfinite(spec.sigma)) {
        throw std::invalid_argument("forcing: sigma must be finite");
    }
}

void Forcing::evaluate(double t, SpectralField& out) const {
    out = base_;
    if (is_steady()) return;
    const Domain& d = base_.domain();
    const double angle = spec_.sigma * t;
    const Complex rot = std::polar(1.0, -angle);
    const double modulation = std::cos(angle);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == Complex{}) continue;
        const int n1 = d.n1_of(i);
        if (n1 == 0) {
            out[i] *= modulation;
        } else {
            out[i] *= n1 > 0 ? rot : std::conj(rot);
        }
    }
}

SpectralField Forcing::operator()(double t) const {
    SpectralField out;
    evaluate(t, out);
    return out;
}

SpectralField Forcing::time_derivative(double t) const {
    const Domain& d = base_.domain();
    SpectralField out(d);
    if (is_steady()) return out;
    const double s = spec_.sigma;
    const double angle = s * t;
    const Complex rot = std::polar(1.0, -angle);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (base_[i] == Complex{}) continue;
        const int n1 = d.n1_of(i);
        if (n1 == 0) {
            out[i] = -s * std::sin(angle) * base_[i];
        } else if (n1 > 0) {
            out[i] = Complex(0.0, -s) * rot * base_[i];
        } else {
            out[i] = Complex(0.0, s) * std::conj(rot) * base_[i];
        }
    }
    return out;
}

Forcing make_forcing(const ForcingSpec& spec, const Domain& d) { return Forcing(spec, d); }

double k_s_norm(const ForcingSpec& spec, const Domain& d, int s) {
    if (s < 0) throw std::invalid_argument("k_s_norm: s must be >= 0");
    const Forcing f(spec, d);
    double value = sobolev_norm(f.base(), s + 2);
    if (!f.is_steady()) {
        // |d/dt f(t)|^2 = sigma^2 (|f~|^2 + sin^2(sigma t) |f_bar|^2) in every H^s.
        value += std::abs(spec.sigma) * sobolev_norm(f.base(), s);
    }
    return value;
}

}  // namespace betaplane
