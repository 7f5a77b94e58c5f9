#pragma once

#include <functional>
#include <vector>

#include "betaplane/spectral_field.hpp"

namespace betaplane {

enum class ForcingKind { steady, time_periodic };

/// One generator entry: integer lattice indices and the coefficient placed at
/// (n1, n2). The odd-in-y and Hermitian partners are implied:
///   (n1,-n2) -> -A,  (-n1,-n2) -> conj(A),  (-n1,n2) -> -conj(A).
/// For zonal entries (n1 = 0) this forces A to be purely imaginary.
struct ForcingMode {
    int n1 = 0;
    int n2 = 0;
    Complex amplitude{};
};

struct ForcingSpec {
    ForcingKind kind = ForcingKind::steady;
    std::vector<ForcingMode> modes;
    double sigma = 0.0;  ///< angular frequency, ignored for steady forcing
};

/// Zonal mode (0,1) with |A| = 1 plus the non-zonal mode (1,1) with A = 0.5.
ForcingSpec benchmark_forcing_spec();
/// The zonal half of the benchmark only.
ForcingSpec zonal_forcing_spec();

/// Vorticity-form forcing f(x, t).
///
/// Time-periodic forcing rotates each non-zonal coefficient as
/// exp(-i sigma t sign(k1)) and modulates the zonal coefficients by
/// cos(sigma t). Both preserve the parity and reality of f; non-zonal
/// moduli are t-independent and every sup over t is attained at t = 0
/// (for f itself) or at sigma t = pi/2 (for d/dt f).
class Forcing {
public:
    /// Throws std::invalid_argument for k = 0 entries, entries outside the
    /// 2/3 band of `d`, or amplitudes inconsistent with the parity closure.
    Forcing(const ForcingSpec& spec, const Domain& d);

    SpectralField operator()(double t) const;
    void evaluate(double t, SpectralField& out) const;
    /// d/dt f at time t.
    SpectralField time_derivative(double t) const;

    bool is_steady() const { return spec_.kind == ForcingKind::steady || spec_.sigma == 0.0; }
    const ForcingSpec& spec() const { return spec_; }
    const Domain& domain() const { return base_.domain(); }
    /// f at t = 0.
    const SpectralField& base() const { return base_; }

private:
    ForcingSpec spec_;
    SpectralField base_;
};

Forcing make_forcing(const ForcingSpec& spec, const Domain& d);

/// K_s(f) = sup_t |grad^{s+2} f| + sup_t |grad^s d/dt f|, in closed form.
double k_s_norm(const ForcingSpec& spec, const Domain& d, int s);

/// Forcing as seen by the time stepper; any callable of t will do.
using ForcingFunction = std::function<SpectralField(double)>;

inline ForcingFunction as_function(const Forcing& f) {
    return [f](double t) { return f(t); };
}

}  // namespace betaplane
