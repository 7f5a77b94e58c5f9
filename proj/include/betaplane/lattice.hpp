#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace betaplane {

/// Periodic rectangle [0, L1) x [-L2/2, L2/2) resolved by N1 x N2 Fourier modes.
///
/// Mode indices run over -N/2 .. N/2-1 in each direction; the Nyquist index
/// -N/2 is part of the storage but always holds zero.
struct Domain {
    double L1 = 2.0 * std::numbers::pi;
    double L2 = 2.0 * std::numbers::pi;
    int N1 = 32;
    int N2 = 32;

    Domain() = default;
    /// Throws std::invalid_argument unless L > 0 and N is even and >= 4.
    Domain(double l1, double l2, int n1, int n2);

    /// L1 = L2 = 2*pi, so the lattice is Z^2.
    static Domain periodic_2pi(int n) { return Domain(2.0 * std::numbers::pi, 2.0 * std::numbers::pi, n, n); }

    double area() const { return L1 * L2; }
    double dk1() const { return 2.0 * std::numbers::pi / L1; }
    double dk2() const { return 2.0 * std::numbers::pi / L2; }
    /// Poincare constant: the smallest nonzero wavenumber magnitude.
    double c0() const;

    std::size_t size() const { return static_cast<std::size_t>(N1) * static_cast<std::size_t>(N2); }

    bool contains(int n1, int n2) const {
        return n1 >= -N1 / 2 && n1 < N1 / 2 && n2 >= -N2 / 2 && n2 < N2 / 2;
    }
    bool is_nyquist(int n1, int n2) const { return n1 == -N1 / 2 || n2 == -N2 / 2; }

    /// Storage offset, k2-major then k1 (the enumerate_modes order).
    std::size_t index(int n1, int n2) const {
        return static_cast<std::size_t>(n2 + N2 / 2) * static_cast<std::size_t>(N1) +
               static_cast<std::size_t>(n1 + N1 / 2);
    }
    int n1_of(std::size_t idx) const { return static_cast<int>(idx % static_cast<std::size_t>(N1)) - N1 / 2; }
    int n2_of(std::size_t idx) const { return static_cast<int>(idx / static_cast<std::size_t>(N1)) - N2 / 2; }

    bool operator==(const Domain&) const = default;
};

/// Lattice point of Z_L: integer indices plus the physical wavenumbers they stand for.
struct WaveVector {
    int n1 = 0;
    int n2 = 0;
    double k1 = 0.0;
    double k2 = 0.0;

    static WaveVector on(const Domain& d, int n1, int n2) {
        return WaveVector{n1, n2, n1 * d.dk1(), n2 * d.dk2()};
    }

    double norm_sq() const { return k1 * k1 + k2 * k2; }
    bool is_zero() const { return n1 == 0 && n2 == 0; }
    bool is_zonal() const { return n1 == 0; }

    friend WaveVector operator+(const WaveVector& a, const WaveVector& b) {
        return WaveVector{a.n1 + b.n1, a.n2 + b.n2, a.k1 + b.k1, a.k2 + b.k2};
    }
    friend WaveVector operator-(const WaveVector& a) { return WaveVector{-a.n1, -a.n2, -a.k1, -a.k2}; }
    friend bool operator==(const WaveVector& a, const WaveVector& b) { return a.n1 == b.n1 && a.n2 == b.n2; }
};

/// Every stored mode once, k2-major then k1, including k = 0 and the Nyquist lines.
std::vector<WaveVector> enumerate_modes(const Domain& d);

/// Modes that may carry nonzero coefficients: k != 0 and not on a Nyquist line.
std::vector<WaveVector> active_modes(const Domain& d);

}  // namespace betaplane
