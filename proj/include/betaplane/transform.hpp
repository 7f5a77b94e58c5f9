#pragma once

#include <vector>

#include "betaplane/spectral_field.hpp"

namespace betaplane {

// Grid/spectral transform pair backed by FFTW. Plans are created once per
// grid shape, cached process-wide, and shared read-only; every call uses its
// own buffers so concurrent calls are safe.

/// Real samples of Re f on the collocation grid. Exact inverse of to_spectral
/// for Hermitian, zero-mean, Nyquist-free fields.
GridField to_grid(const SpectralField& f);

/// Continuum coefficients of grid samples; the mean and Nyquist lines are dropped.
SpectralField to_spectral(const GridField& g);

/// Complex samples of sum_k f_k e^{i k.x} (no Hermitian folding) on a grid
/// refined by `oversample` in each direction. values[j*(oversample*N1) + i].
std::vector<Complex> to_grid_complex(const SpectralField& f, int oversample = 1);

}  // namespace betaplane
