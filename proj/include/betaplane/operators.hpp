#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "betaplane/spectral_field.hpp"

namespace betaplane {

/// Velocity v = grad^perp Delta^{-1} omega, as spectral arrays.
/// u is even in y and v odd in y when omega is odd in y.
struct VelocityField {
    SpectralField u;
    SpectralField v;
};

struct ZonalSplit {
    SpectralField zonal;  ///< k1 == 0 modes
    SpectralField fast;   ///< k1 != 0 modes
};

/// Omega_k = -k1/|k|^2; the L operator acts on e^{ik.x} as i*Omega_k.
/// Throws std::invalid_argument for k = 0.
double omega_freq(const WaveVector& k);

/// A = -Delta: multiply by |k|^2.
SpectralField apply_A(const SpectralField& f);
/// Delta^{-1} on zero-mean fields: multiply by -1/|k|^2, k = 0 stays 0.
SpectralField apply_inv_laplacian(const SpectralField& f);
/// L = d/dx Delta^{-1}: multiply by i*Omega_k.
SpectralField apply_L(const SpectralField& f);
/// Restricted inverse of L: zonal modes to 0, others multiplied by i|k|^2/k1.
SpectralField apply_I_omega(const SpectralField& f);

VelocityField velocity(const SpectralField& omega);

/// B(a, b) = (grad^perp Delta^{-1} a) . grad b, evaluated pseudo-spectrally.
/// The product is formed on the collocation grid, transformed back, truncated
/// with the 2/3 mask and stripped of its mean. For inputs inside the 2/3
/// band the result equals the Galerkin triad sum exactly.
SpectralField jacobian(const SpectralField& a, const SpectralField& b);

/// B_jkl = |M| (j ^ k)/|j|^2 when j + k = l, else 0.
double b_coeff(const WaveVector& j, const WaveVector& k, const WaveVector& l, const Domain& d);

/// Whether Omega_j + Omega_k == 0, decided in integer arithmetic on the
/// lattice indices. On domains whose aspect ratio L2/L1 is not a rational
/// with denominator <= 1000 only the trivially resonant pairs are found.
bool is_resonant(const WaveVector& j, const WaveVector& k, const Domain& d);

/// |B_jkl + B_kjl + l2 (Omega_j + Omega_k) |M||, zero in exact arithmetic.
/// Requires j + k = l, l1 = 0 and j, k != 0.
double triad_identity_residual(const WaveVector& j, const WaveVector& k, const WaveVector& l,
                               const Domain& d);

/// (B_Omega(a, b), c) at time t:
///   (|M|/2i) sum' l2 a_j b_k conj(c_l) exp(-i(Omega_j + Omega_k) t/eps)
/// over j + k = l with l1 = 0, excluding exact resonances. a and b must be
/// purely non-zonal and c purely zonal.
Complex b_omega_triple(const SpectralField& a, const SpectralField& b, const SpectralField& c,
                       double t, double epsilon);

ZonalSplit split(const SpectralField& omega);

}  // namespace betaplane
