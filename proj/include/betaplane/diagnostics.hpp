#pragma once

#include <iosfwd>
#include <vector>

#include "betaplane/forcing.hpp"
#include "betaplane/spectral_field.hpp"

namespace betaplane {

/// |grad^s f| = (|M| sum_k |k|^{2s} |f_k|^2)^{1/2}; s may be fractional or -1.
double sobolev_norm(const SpectralField& f, double s);

/// Largest |v| on the collocation grid.
double max_velocity(const SpectralField& omega);

/// One row of a run's time series. Squared norms are L2 norms, not halved.
struct DiagnosticsRecord {
    double t = 0.0;
    double enstrophy = 0.0;       ///< |w|^2
    double grad_enstrophy = 0.0;  ///< |grad w|^2
    double zonal_sq = 0.0;        ///< |w_bar|^2
    double fast_sq = 0.0;         ///< |w~|^2
    double fast_h1_sq = 0.0;      ///< |grad w~|^2
    double fast_h2_sq = 0.0;      ///< |Delta w~|^2
    double budget_residual = 0.0;
    double max_velocity = 0.0;
};

DiagnosticsRecord diagnose(const SpectralField& omega, double t, double budget_residual = 0.0);

void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r);

/// G = |grad^{-1} f| / mu^2 with the sup over time of |grad^{-1} f|.
/// Throws std::invalid_argument unless mu > 0.
double grashof(const Forcing& forcing, double mu);

/// c G^{2/3} (1 + log G)^{1/3}, an upper-bound report rather than a measured
/// dimension. For G < 1/e the factor 1 + log G would be negative and is clamped at 0.
double dim_bound(double grashof_number, double c);

struct AgmonReport {
    double c0 = 0.0;        ///< Poincare constant used in kappa
    double sup_u = 0.0;     ///< max |u| over the (possibly refined) collocation grid
    double grad_w = 0.0;    ///< |grad w|
    double lap_w = 0.0;     ///< |Delta w|
    double kappa = 0.0;     ///< |Delta w| / (c0 |grad w|)
    double rhs = 0.0;       ///< |grad w| (log kappa + 1)^{1/2}
    double ratio = 0.0;     ///< sup_u / rhs
    /// Constructive split of u at |k| = kappa.
    SpectralField u_low;
    SpectralField u_high;
    double low_sum = 0.0;    ///< sum_{|k|<kappa} |u_k|
    double high_sum = 0.0;   ///< sum_{|k|>=kappa} |u_k|
    double low_bound = 0.0;  ///< (sum^< |k|^-2)^{1/2} (sum^< |k|^2 |u_k|^2)^{1/2}
    double high_bound = 0.0; ///< (sum^> |k|^-4)^{1/2} (sum^> |k|^4 |u_k|^2)^{1/2}
    /// sup_u <= low_sum + high_sum, low_sum <= low_bound, high_sum <= high_bound.
    bool chain_consistent = false;
    /// ratio exceeded the candidate constant.
    bool violation = false;
};

/// L-infinity bound |u| <= C |grad w| (log(|Delta w|/(c0 |grad w|)) + 1)^{1/2}
/// for L2-orthogonal zero-mean u, v and w = u + v.
///
/// The sup norm is the maximum modulus of sum_k u_k e^{ik.x}, so a single
/// complex mode e^{ik.x} has sup norm 1 (no folding with a conjugate partner).
/// Wavenumbers are physical; on the 2*pi domain c0 = 1.
/// Throws std::invalid_argument if |grad w| = 0 or |(u,v)| > 1e-10 |u||v|.
AgmonReport agmon_check(const SpectralField& u, const SpectralField& v, double constant_candidate,
                        int oversample = 1);

/// w*^(1) = -mu^{-1} Delta^{-1} f_bar + eps I_Omega f~ for steady forcing.
SpectralField approx_steady_state(const SpectralField& f, double mu, double epsilon);
/// Throws std::invalid_argument for time-dependent forcing.
SpectralField approx_steady_state(const Forcing& forcing, double mu, double epsilon);

/// |(1/eps) L w + B(w,w) + mu A w - f| in L2. For steady forcing this is |dw/dt|.
double steady_residual(const SpectralField& omega, const SpectralField& f, double mu, double epsilon);
double steady_residual(const SpectralField& omega, const Forcing& forcing, double mu, double epsilon);

}  // namespace betaplane
