#include "betaplane/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "betaplane/operators.hpp"
#include "betaplane/transform.hpp"

namespace betaplane {

double sobolev_norm(const SpectralField& f, double s) {
    const Domain& d = f.domain();
    const bool integer_order = s == std::round(s) && std::abs(s) <= 4.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::norm(f[i]);
        if (a == 0.0) continue;
        const auto k = WaveVector::on(d, d.n1_of(i), d.n2_of(i));
        if (k.is_zero()) continue;
        const double k2 = k.norm_sq();
        double weight = 1.0;
        if (integer_order) {
            for (int p = 0; p < std::abs(static_cast<int>(s)); ++p) weight *= k2;
            if (s < 0) weight = 1.0 / weight;
        } else {
            weight = std::pow(k2, s);
        }
        sum += weight * a;
    }
    return std::sqrt(d.area() * sum);
}

double max_velocity(const SpectralField& omega) {
    const VelocityField vel = velocity(omega);
    const GridField u = to_grid(vel.u);
    const GridField v = to_grid(vel.v);
    double best = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        best = std::max(best, std::hypot(u.values[i], v.values[i]));
    }
    return best;
}

DiagnosticsRecord diagnose(const SpectralField& omega, double t, double budget_residual) {
    const ZonalSplit parts = split(omega);
    DiagnosticsRecord r;
    r.t = t;
    r.enstrophy = norm_sq(omega);
    r.grad_enstrophy = std::pow(sobolev_norm(omega, 1.0), 2);
    r.zonal_sq = norm_sq(parts.zonal);
    r.fast_sq = norm_sq(parts.fast);
    r.fast_h1_sq = std::pow(sobolev_norm(parts.fast, 1.0), 2);
    r.fast_h2_sq = std::pow(sobolev_norm(parts.fast, 2.0), 2);
    r.budget_residual = budget_residual;
    r.max_velocity = max_velocity(omega);
    return r;
}

void write_diagnostics_header(std::ostream& os) {
    os << "t,enstrophy,grad_enstrophy,zonal_sq,fast_sq,fast_h1_sq,fast_h2_sq,budget_residual,max_velocity\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
    const auto old = os.precision(17);
    os << r.t << ',' << r.enstrophy << ',' << r.grad_enstrophy << ',' << r.zonal_sq << ',' << r.fast_sq << ','
       << r.fast_h1_sq << ',' << r.fast_h2_sq << ',' << r.budget_residual << ',' << r.max_velocity << '\n';
    os.precision(old);
}

double grashof(const Forcing& forcing, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("grashof: mu must be positive");
    return sobolev_norm(forcing.base(), -1.0) / (mu * mu);
}

double dim_bound(double grashof_number, double c) {
    const double log_factor = std::max(0.0, 1.0 + std::log(grashof_number));
    return c * std::pow(grashof_number, 2.0 / 3.0) * std::cbrt(log_factor);
}

AgmonReport agmon_check(const SpectralField& u, const SpectralField& v, double constant_candidate,
                        int oversample) {
    if (!(u.domain() == v.domain())) throw std::invalid_argument("agmon_check: domain mismatch");
    const Domain& d = u.domain();
    const double nu = norm(u);
    const double nv = norm(v);
    if (std::abs(inner(u, v)) > 1e-10 * nu * nv) {
        throw std::invalid_argument("agmon_check: u and v are not L2-orthogonal");
    }
    const SpectralField w = u + v;

    AgmonReport r;
    r.c0 = d.c0();
    r.grad_w = sobolev_norm(w, 1.0);
    if (!(r.grad_w > 0.0)) throw std::invalid_argument("agmon_check: |grad w| = 0");
    r.lap_w = sobolev_norm(w, 2.0);
    r.kappa = r.lap_w / (r.c0 * r.grad_w);
    // Poincare gives kappa >= 1 up to rounding.
    r.rhs = r.grad_w * std::sqrt(std::max(0.0, std::log(r.kappa)) + 1.0);

    const auto samples = to_grid_complex(u, oversample);
    for (const auto& s : samples) r.sup_u = std::max(r.sup_u, std::abs(s));
    r.ratio = r.sup_u / r.rhs;

    r.u_low = SpectralField(d);
    r.u_high = SpectralField(d);
    double inv2_low = 0.0, grad2_low = 0.0, inv4_high = 0.0, lap2_high = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const int n1 = d.n1_of(i);
        const int n2 = d.n2_of(i);
        if ((n1 == 0 && n2 == 0) || d.is_nyquist(n1, n2)) continue;
        const double k2 = WaveVector::on(d, n1, n2).norm_sq();
        const double a = std::abs(u[i]);
        if (std::sqrt(k2) < r.kappa) {
            r.u_low[i] = u[i];
            r.low_sum += a;
            inv2_low += 1.0 / k2;
            grad2_low += k2 * a * a;
        } else {
            r.u_high[i] = u[i];
            r.high_sum += a;
            inv4_high += 1.0 / (k2 * k2);
            lap2_high += k2 * k2 * a * a;
        }
    }
    r.low_bound = std::sqrt(inv2_low) * std::sqrt(grad2_low);
    r.high_bound = std::sqrt(inv4_high) * std::sqrt(lap2_high);

    constexpr double kRoundoff = 1e-12;
    const double scale = r.low_sum + r.high_sum;
    r.chain_consistent = r.sup_u <= scale * (1.0 + kRoundoff) + 1e-300 &&
                         r.low_sum <= r.low_bound * (1.0 + kRoundoff) + 1e-300 &&
                         r.high_sum <= r.high_bound * (1.0 + kRoundoff) + 1e-300;
    r.violation = r.ratio > constant_candidate;
    return r;
}

SpectralField approx_steady_state(const SpectralField& f, double mu, double epsilon) {
    if (!(mu > 0.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument("approx_steady_state: mu and epsilon must be positive");
    }
    const ZonalSplit parts = split(f);
    SpectralField out = apply_inv_laplacian(parts.zonal);
    out *= -1.0 / mu;
    out.axpy(epsilon, apply_I_omega(parts.fast));
    return out;
}

SpectralField approx_steady_state(const Forcing& forcing, double mu, double epsilon) {
    if (!forcing.is_steady()) {
        throw std::invalid_argument("approx_steady_state: forcing must be time independent");
    }
    return approx_steady_state(forcing.base(), mu, epsilon);
}

double steady_residual(const SpectralField& omega, const SpectralField& f, double mu, double epsilon) {
    SpectralField r = apply_L(omega);
    r *= 1.0 / epsilon;
    r += jacobian(omega, omega);
    r.axpy(mu, apply_A(omega));
    r -= f;
    return norm(r);
}

double steady_residual(const SpectralField& omega, const Forcing& forcing, double mu, double epsilon) {
    if (!forcing.is_steady()) {
        throw std::invalid_argument("steady_residual: forcing must be time independent");
    }
    return steady_residual(omega, forcing.base(), mu, epsilon);
}

}  // namespace betaplane
