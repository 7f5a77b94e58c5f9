#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "betaplane/forcing.hpp"
#include "betaplane/spectral_field.hpp"

namespace betaplane {

/// Physical parameters of d/dt w + B(w,w) + (1/eps) L w + mu A w = f.
struct ModelParams {
    double epsilon = 0.1;
    double mu = 0.5;
    /// Drop B(w,w); used for linear verification runs.
    bool nonlinear = true;
};

/// Thrown when a coefficient becomes non-finite or exceeds the blow-up threshold.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, int n1, int n2, double magnitude);
    double time() const { return t_; }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    double magnitude() const { return magnitude_; }

private:
    double t_;
    int n1_;
    int n2_;
    double magnitude_;
};

inline constexpr double kBlowUpThreshold = 1e12;

/// Per-mode lambda_k = -mu |k|^2 - i Omega_k / eps, enumerate_modes order.
/// Entries for k = 0 and the Nyquist lines are 0.
struct LinearSymbol {
    Domain domain;
    std::vector<Complex> lambda;
};

LinearSymbol make_linear_symbol(const Domain& d, const ModelParams& p);

/// phi_0..phi_3 at z: phi_0 = e^z, phi_{n+1}(z) = (phi_n(z) - 1/n!)/z.
/// A 20-term Taylor series is used for |z| < 1/2.
std::array<Complex, 4> phi_functions(Complex z);

/// Cox-Matthews ETDRK4 weights for step h. The nonlinear-stage weights carry
/// the factor h (resp. h/2), so a stage reads  E u + w * N.
struct EtdCoefficients {
    double h = 0.0;
    std::vector<Complex> e_full;    ///< e^{lambda h}
    std::vector<Complex> e_half;    ///< e^{lambda h/2}
    std::vector<Complex> w_half;    ///< (h/2) phi_1(lambda h/2)
    std::vector<Complex> w_first;   ///< h (phi_1 - 3 phi_2 + 4 phi_3)
    std::vector<Complex> w_middle;  ///< 2h (phi_2 - 2 phi_3), applied to N_a + N_b
    std::vector<Complex> w_last;    ///< h (4 phi_3 - phi_2)
};

/// Throws std::invalid_argument unless h > 0.
EtdCoefficients build_coefficients(const LinearSymbol& symbol, double h);

/// States of one step at its quadrature nodes: t, t+h/2 (twice), t+h.
/// This is the base-trajectory segment the tangent step needs.
struct TrajectorySegment {
    double t = 0.0;
    double h = 0.0;
    std::array<SpectralField, 4> stages;
};

/// Fourth-order exponential integrator. The stiff linear part (viscosity and
/// the 1/eps beta term) is propagated exactly per mode, so only the advective
/// nonlinearity and the forcing limit the step size.
class Stepper {
public:
    Stepper(const Domain& d, const ModelParams& params, double h, ForcingFunction forcing);

    const Domain& domain() const { return symbol_.domain; }
    const ModelParams& params() const { return params_; }
    double h() const { return coeffs_.h; }
    const EtdCoefficients& coefficients() const { return coeffs_; }

    /// Advances omega from t to t+h. Throws BlowUpError if the result is not finite
    /// or exceeds kBlowUpThreshold. When `segment` is given it receives the stage states.
    SpectralField step(const SpectralField& omega, double t, TrajectorySegment* segment = nullptr) const;

    /// Propagates a perturbation phi across the step described by `segment`
    /// with the linearisation dphi/dt = -B(w,phi) - B(phi,w) - (1/eps) L phi - mu A phi.
    /// This is the exact derivative of step() at the base state.
    SpectralField tangent_step(const SpectralField& phi, const TrajectorySegment& segment) const;

    /// -B(w,w) + f(t), or just f(t) when the model is linear.
    SpectralField nonlinear_term(const SpectralField& omega, double t) const;

private:
    SpectralField tangent_term(const SpectralField& base, const SpectralField& phi) const;
    void check_finite(const SpectralField& omega, double t) const;

    ModelParams params_;
    LinearSymbol symbol_;
    EtdCoefficients coeffs_;
    ForcingFunction forcing_;
};

/// |(|w'|^2 - |w|^2)/(2h) + mu <|grad w|^2> - <(f, w)>| where <.> is the
/// trapezoidal average over the two ends of the step; O(h^2) for smooth runs.
/// The beta term does not enter: (L w, w) = 0.
double budget_residual(const SpectralField& omega, const SpectralField& omega_next, double t, double h,
                       const ForcingFunction& forcing, const ModelParams& params);

/// Holds a trajectory: state, clock, and the periodic parity re-projection.
class Integrator {
public:
    /// The step index is llround(t0/h).
    Integrator(Stepper stepper, SpectralField omega, double t0 = 0.0);

    /// One step. Every `reproject_every` steps (counted from t = 0) the state is
    /// projected back onto the odd-in-y, Hermitian, zero-mean subspace.
    void advance(TrajectorySegment* segment = nullptr);
    void advance_to(double t_target);

    const SpectralField& state() const { return omega_; }
    const SpectralField& previous_state() const { return previous_; }
    /// step_index * h plus the offset of the starting time from its step grid,
    /// so a run restarted from a snapshot sees bit-identical clock values.
    double time() const { return static_cast<double>(index_) * stepper_.h() + offset_; }
    std::int64_t step_index() const { return index_; }
    const Stepper& stepper() const { return stepper_; }

    int reproject_every = 100;

private:
    Stepper stepper_;
    SpectralField omega_;
    SpectralField previous_;
    double offset_;
    std::int64_t index_;
};

/// Parity, reality, zero mean and Nyquist projection in one pass.
SpectralField reproject(const SpectralField& omega);

}  // namespace betaplane
