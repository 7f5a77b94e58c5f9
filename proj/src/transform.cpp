#include "betaplane/transform.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace betaplane {
namespace {

// FFTW planning is not thread safe, execution with new-array calls is.
// FFTW_ESTIMATE keeps the chosen algorithm, and hence the output bits,
// identical from run to run.
struct PlanSet {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    fftw_plan c2c_backward = nullptr;

    PlanSet(int ny, int nx) {
        constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        const std::size_t n = static_cast<std::size_t>(ny) * nx;
        const std::size_t nh = static_cast<std::size_t>(ny) * (nx / 2 + 1);
        std::vector<double> real(n);
        std::vector<fftw_complex> half(nh);
        std::vector<fftw_complex> full(n);
        r2c = fftw_plan_dft_r2c_2d(ny, nx, real.data(), half.data(), flags);
        c2r = fftw_plan_dft_c2r_2d(ny, nx, half.data(), real.data(), flags);
        c2c_backward = fftw_plan_dft_2d(ny, nx, full.data(), full.data(), FFTW_BACKWARD, flags);
        if (!r2c || !c2r || !c2c_backward) {
            throw std::runtime_error("FFTW planning failed");
        }
    }
    PlanSet(const PlanSet&) = delete;
    PlanSet& operator=(const PlanSet&) = delete;
    ~PlanSet() {
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
        fftw_destroy_plan(c2c_backward);
    }
};

const PlanSet& plans_for(int ny, int nx) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<PlanSet>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{ny, nx}];
    if (!slot) slot = std::make_unique<PlanSet>(ny, nx);
    return *slot;
}

inline int wrap(int n, int size) { return n < 0 ? n + size : n; }
inline double y_offset_sign(int n2) { return (n2 % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

GridField to_grid(const SpectralField& f) {
    const Domain& d = f.domain();
    const int nx = d.N1;
    const int ny = d.N2;
    const int nxh = nx / 2 + 1;
    std::vector<fftw_complex> half(static_cast<std::size_t>(ny) * nxh);
    for (int j2 = 0; j2 < ny; ++j2) {
        const int n2 = j2 < ny / 2 ? j2 : j2 - ny;
        for (int n1 = 0; n1 < nxh; ++n1) {
            Complex h{};
            if (n1 < nx / 2 && n2 != -ny / 2) {
                // Hermitian part, so the samples are Re of the full series.
                h = 0.5 * (f(n1, n2) + std::conj(f.at(-n1, -n2)));
                // y_j = -L2/2 + j*dy contributes e^{-i k2 L2/2} = (-1)^{n2}.
                h *= y_offset_sign(n2);
            }
            auto& slot = half[static_cast<std::size_t>(j2) * nxh + n1];
            slot[0] = h.real();
            slot[1] = h.imag();
        }
    }
    GridField g(d);
    fftw_execute_dft_c2r(plans_for(ny, nx).c2r, half.data(), g.values.data());
    return g;
}

SpectralField to_spectral(const GridField& g) {
    const Domain& d = g.domain;
    if (g.values.size() != d.size()) {
        throw std::invalid_argument("to_spectral: sample count does not match domain");
    }
    const int nx = d.N1;
    const int ny = d.N2;
    const int nxh = nx / 2 + 1;
    std::vector<double> real(g.values);
    std::vector<fftw_complex> half(static_cast<std::size_t>(ny) * nxh);
    fftw_execute_dft_r2c(plans_for(ny, nx).r2c, real.data(), half.data());

    const double scale = 1.0 / static_cast<double>(d.size());
    SpectralField f(d);
    for (int n2 = -ny / 2 + 1; n2 < ny / 2; ++n2) {
        const int j2 = wrap(n2, ny);
        for (int n1 = 0; n1 < nx / 2; ++n1) {
            // The k1 = 0 column is filled from its upper half so it is exactly Hermitian.
            if (n1 == 0 && n2 <= 0) continue;
            const auto& slot = half[static_cast<std::size_t>(j2) * nxh + n1];
            const Complex c = Complex(slot[0], slot[1]) * (scale * y_offset_sign(n2));
            f(n1, n2) = c;
            f(-n1, -n2) = std::conj(c);
        }
    }
    return f;
}

std::vector<Complex> to_grid_complex(const SpectralField& f, int oversample) {
    if (oversample < 1) {
        throw std::invalid_argument("to_grid_complex: oversample must be >= 1");
    }
    const Domain& d = f.domain();
    const int nx = oversample * d.N1;
    const int ny = oversample * d.N2;
    std::vector<fftw_complex> buf(static_cast<std::size_t>(nx) * ny);
    for (auto& b : buf) b[0] = b[1] = 0.0;
    for (int n2 = -d.N2 / 2; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
            const Complex c = f(n1, n2) * y_offset_sign(n2);
            auto& slot = buf[static_cast<std::size_t>(wrap(n2, ny)) * nx + wrap(n1, nx)];
            slot[0] = c.real();
            slot[1] = c.imag();
        }
    }
    fftw_execute_dft(plans_for(ny, nx).c2c_backward, buf.data(), buf.data());
    std::vector<Complex> out(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = Complex(buf[i][0], buf[i][1]);
    return out;
}

}  // namespace betaplane
