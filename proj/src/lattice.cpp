#include "betaplane/lattice.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace betaplane {

Domain::Domain(double l1, double l2, int n1, int n2) : L1(l1), L2(l2), N1(n1), N2(n2) {
    if (!(L1 > 0.0) || !(L2 > 0.0)) {
        throw std::invalid_argument("Domain: periods must be positive");
    }
    if (N1 < 4 || N2 < 4 || N1 % 2 != 0 || N2 % 2 != 0) {
        throw std::invalid_argument("Domain: mode counts must be even and >= 4, got " +
                                    std::to_string(N1) + "x" + std::to_string(N2));
    }
}

double Domain::c0() const { return std::min(dk1(), dk2()); }

std::vector<WaveVector> enumerate_modes(const Domain& d) {
    std::vector<WaveVector> modes;
    modes.reserve(d.size());
    for (int n2 = -d.N2 / 2; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
            modes.push_back(WaveVector::on(d, n1, n2));
        }
    }
    return modes;
}

std::vector<WaveVector> active_modes(const Domain& d) {
    std::vector<WaveVector> modes;
    for (const auto& k : enumerate_modes(d)) {
        if (!k.is_zero() && !d.is_nyquist(k.n1, k.n2)) {
            modes.push_back(k);
        }
    }
    return modes;
}

}  // namespace betaplane
