#include "betaplane/timestepper.hpp"

#include <cmath>
#include <sstream>

#include "betaplane/operators.hpp"

namespace betaplane {
namespace {

std::string blow_up_message(double t, int n1, int n2, double magnitude) {
    std::ostringstream os;
    os << "numerical blow-up at t = " << t << ": |coeff" << "(" << n1 << "," << n2 << ")| = " << magnitude;
    return os.str();
}

// w = E u + W n, mode by mode.
void stage(SpectralField& out, const std::vector<Complex>& e, const SpectralField& u,
           const std::vector<Complex>& w, const SpectralField& n) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = e[i] * u[i] + w[i] * n[i];
}

}  // namespace

BlowUpError::BlowUpError(double t, int n1, int n2, double magnitude)
    : std::runtime_error(blow_up_message(t, n1, n2, magnitude)), t_(t), n1_(n1), n2_(n2), magnitude_(magnitude) {}

LinearSymbol make_linear_symbol(const Domain& d, const ModelParams& p) {
    if (!(p.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(p.mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
    LinearSymbol s{d, std::vector<Complex>(d.size())};
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int n1 = d.n1_of(i);
        const int n2 = d.n2_of(i);
        if ((n1 == 0 && n2 == 0) || d.is_nyquist(n1, n2)) continue;
        const auto k = WaveVector::on(d, n1, n2);
        s.lambda[i] = Complex(-p.mu * k.norm_sq(), -omega_freq(k) / p.epsilon);
    }
    return s;
}

std::array<Complex, 4> phi_functions(Complex z) {
    std::array<Complex, 4> phi{};
    if (std::abs(z) < 0.5) {
        // phi_k(z) = sum_n z^n/(n+k)!; 20 terms leave a remainder below 0.5^20/20! ~ 4e-25.
        constexpr int kTerms = 20;
        for (int k = 0; k < 4; ++k) {
            // Horner on sum_{n<kTerms} z^n / (n+k)!
            Complex acc = 0.0;
            for (int n = kTerms - 1; n >= 0; --n) {
                acc = acc * z / static_cast<double>(n + k + 1) + 1.0;
            }
            // acc = sum z^n k!/(n+k)!; divide by k!.
            double kfact = 1.0;
            for (int m = 2; m <= k; ++m) kfact *= m;
            phi[k] = acc / kfact;
        }
        return phi;
    }
    phi[0] = std::exp(z);
    phi[1] = (phi[0] - 1.0) / z;
    phi[2] = (phi[1] - 1.0) / z;
    phi[3] = (phi[2] - 0.5) / z;
    return phi;
}

EtdCoefficients build_coefficients(const LinearSymbol& symbol, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("build_coefficients: step size must be positive");
    const std::size_t n = symbol.lambda.size();
    EtdCoefficients c;
    c.h = h;
    c.e_full.resize(n);
    c.e_half.resize(n);
    c.w_half.resize(n);
    c.w_first.resize(n);
    c.w_middle.resize(n);
    c.w_last.resize(n);
    const Domain& d = symbol.domain;
    for (std::size_t i = 0; i < n; ++i) {
        const int n1 = d.n1_of(i);
        const int n2 = d.n2_of(i);
        if ((n1 == 0 && n2 == 0) || d.is_nyquist(n1, n2)) continue;  // held at zero
        const Complex z = symbol.lambda[i] * h;
        const auto full = phi_functions(z);
        const auto half = phi_functions(0.5 * z);
        c.e_full[i] = full[0];
        c.e_half[i] = half[0];
        c.w_half[i] = 0.5 * h * half[1];
        c.w_first[i] = h * (full[1] - 3.0 * full[2] + 4.0 * full[3]);
        c.w_middle[i] = 2.0 * h * (full[2] - 2.0 * full[3]);
        c.w_last[i] = h * (4.0 * full[3] - full[2]);
    }
    return c;
}

Stepper::Stepper(const Domain& d, const ModelParams& params, double h, ForcingFunction forcing)
    : params_(params),
      symbol_(make_linear_symbol(d, params)),
      coeffs_(build_coefficients(symbol_, h)),
      forcing_(std::move(forcing)) {}

SpectralField Stepper::nonlinear_term(const SpectralField& omega, double t) const {
    SpectralField n = forcing_ ? forcing_(t) : SpectralField(omega.domain());
    if (params_.nonlinear) n -= jacobian(omega, omega);
    return n;
}

SpectralField Stepper::tangent_term(const SpectralField& base, const SpectralField& phi) const {
    if (!params_.nonlinear) return SpectralField(phi.domain());
    SpectralField n = jacobian(base, phi);
    n += jacobian(phi, base);
    n *= -1.0;
    return n;
}

void Stepper::check_finite(const SpectralField& omega, double t) const {
    int n1 = 0, n2 = 0;
    const double m = omega.max_abs(&n1, &n2);
    if (!std::isfinite(m) || m > kBlowUpThreshold) throw BlowUpError(t, n1, n2, m);
}

SpectralField Stepper::step(const SpectralField& u, double t, TrajectorySegment* segment) const {
    if (!(u.domain() == domain())) throw std::invalid_argument("step: domain mismatch");
    const auto& c = coeffs_;
    const double h = c.h;
    const Domain& d = domain();

    const SpectralField nu = nonlinear_term(u, t);
    SpectralField a(d);
    stage(a, c.e_half, u, c.w_half, nu);
    const SpectralField na = nonlinear_term(a, t + 0.5 * h);
    SpectralField b(d);
    stage(b, c.e_half, u, c.w_half, na);
    const SpectralField nb = nonlinear_term(b, t + 0.5 * h);
    SpectralField cc(d);
    for (std::size_t i = 0; i < cc.size(); ++i) {
        cc[i] = c.e_half[i] * a[i] + c.w_half[i] * (2.0 * nb[i] - nu[i]);
    }
    const SpectralField nc = nonlinear_term(cc, t + h);

    SpectralField out(d);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = c.e_full[i] * u[i] + c.w_first[i] * nu[i] + c.w_middle[i] * (na[i] + nb[i]) +
                 c.w_last[i] * nc[i];
    }
    check_finite(out, t + h);
    if (segment) {
        segment->t = t;
        segment->h = h;
        segment->stages = {u, std::move(a), std::move(b), std::move(cc)};
    }
    return out;
}

SpectralField Stepper::tangent_step(const SpectralField& phi, const TrajectorySegment& seg) const {
    if (std::abs(seg.h - coeffs_.h) > 1e-15 * coeffs_.h) {
        throw std::invalid_argument("tangent_step: segment step size differs from the stepper's");
    }
    const auto& c = coeffs_;
    const Domain& d = domain();
    const SpectralField nu = tangent_term(seg.stages[0], phi);
    SpectralField a(d);
    stage(a, c.e_half, phi, c.w_half, nu);
    const SpectralField na = tangent_term(seg.stages[1], a);
    SpectralField b(d);
    stage(b, c.e_half, phi, c.w_half, na);
    const SpectralField nb = tangent_term(seg.stages[2], b);
    SpectralField cc(d);
    for (std::size_t i = 0; i < cc.size(); ++i) {
        cc[i] = c.e_half[i] * a[i] + c.w_half[i] * (2.0 * nb[i] - nu[i]);
    }
    const SpectralField nc = tangent_term(seg.stages[3], cc);
    SpectralField out(d);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = c.e_full[i] * phi[i] + c.w_first[i] * nu[i] + c.w_middle[i] * (na[i] + nb[i]) +
                 c.w_last[i] * nc[i];
    }
    check_finite(out, seg.t + seg.h);
    return out;
}

double budget_residual(const SpectralField& omega, const SpectralField& omega_next, double t, double h,
                       const ForcingFunction& forcing, const ModelParams& params) {
    const double d_enstrophy = 0.5 * (norm_sq(omega_next) - norm_sq(omega)) / h;
    const double dissipation = 0.5 * params.mu * (inner(apply_A(omega), omega).real() +
                                                  inner(apply_A(omega_next), omega_next).real());
    double work = 0.0;
    if (forcing) {
        work = 0.5 * (inner(forcing(t), omega).real() + inner(forcing(t + h), omega_next).real());
    }
    return std::abs(d_enstrophy + dissipation - work);
}

SpectralField reproject(const SpectralField& omega) {
    SpectralField out = project_parity(project_real(omega));
    out.zero_mean();
    out.zero_nyquist();
    return out;
}

Integrator::Integrator(Stepper stepper, SpectralField omega, double t0)
    : stepper_(std::move(stepper)), omega_(std::move(omega)), previous_(omega_) {
    index_ = std::llround(t0 / stepper_.h());
    offset_ = t0 - static_cast<double>(index_) * stepper_.h();
}

void Integrator::advance(TrajectorySegment* segment) {
    SpectralField next = stepper_.step(omega_, time(), segment);
    ++index_;
    if (reproject_every > 0 && index_ % reproject_every == 0) next = reproject(next);
    previous_ = std::move(omega_);
    omega_ = std::move(next);
}

void Integrator::advance_to(double t_target) {
    const auto target = std::llround((t_target - offset_) / stepper_.h());
    while (index_ < target) advance();
}

}  // namespace betaplane
