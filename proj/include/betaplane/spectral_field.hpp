#pragma once

#include <complex>
#include <span>
#include <vector>

#include "betaplane/lattice.hpp"

namespace betaplane {

using Complex = std::complex<double>;

/// Truncated Fourier series of a scalar on the periodic domain.
///
/// coeff(k) is the continuum Fourier coefficient, f(x) = sum_k coeff(k) e^{i k.x},
/// so the L2 norm is |f|^2 = |M| sum_k |coeff(k)|^2 and the grid mean-square of
/// a real field equals sum_k |coeff(k)|^2. Coefficients are stored in
/// enumerate_modes order.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const Domain& d) : domain_(d), coeffs_(d.size()) {}
    /// Throws std::invalid_argument if coeffs.size() != N1*N2.
    SpectralField(const Domain& d, std::vector<Complex> coeffs);

    const Domain& domain() const { return domain_; }

    Complex& operator()(int n1, int n2) { return coeffs_[domain_.index(n1, n2)]; }
    const Complex& operator()(int n1, int n2) const { return coeffs_[domain_.index(n1, n2)]; }
    Complex& operator[](std::size_t idx) { return coeffs_[idx]; }
    const Complex& operator[](std::size_t idx) const { return coeffs_[idx]; }
    /// Bounds-checked read; zero outside the stored range.
    Complex at(int n1, int n2) const;

    std::span<Complex> coeffs() { return coeffs_; }
    std::span<const Complex> coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }

    void set_zero();
    void zero_mean() { (*this)(0, 0) = 0.0; }
    void zero_nyquist();
    /// Largest coefficient modulus and the mode holding it.
    double max_abs(int* n1 = nullptr, int* n2 = nullptr) const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(Complex s);
    /// this += s * o
    SpectralField& axpy(Complex s, const SpectralField& o);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= Complex(s, 0.0); }

private:
    void require_same_domain(const SpectralField& o) const;

    Domain domain_;
    std::vector<Complex> coeffs_;
};

/// Real samples on the collocation grid x_i = i L1/N1, y_j = -L2/2 + j L2/N2.
/// values[j*N1 + i], x fastest.
struct GridField {
    Domain domain;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(const Domain& d) : domain(d), values(d.size(), 0.0) {}

    double& operator()(int i, int j) { return values[static_cast<std::size_t>(j) * domain.N1 + i]; }
    double operator()(int i, int j) const { return values[static_cast<std::size_t>(j) * domain.N1 + i]; }
    double x(int i) const { return i * domain.L1 / domain.N1; }
    double y(int j) const { return -0.5 * domain.L2 + j * domain.L2 / domain.N2; }
    double mean() const;
};

/// L2 inner product (a, b) = |M| sum_k a_k conj(b_k).
Complex inner(const SpectralField& a, const SpectralField& b);
/// |f|_{L2}^2
double norm_sq(const SpectralField& f);
double norm(const SpectralField& f);

/// Orthogonal projection onto fields odd in y: coeff(k1,-k2) = -coeff(k1,k2).
SpectralField project_parity(const SpectralField& f);
/// Hermitian part, the spectral image of Re f: coeff(-k) = conj(coeff(k)).
SpectralField project_real(const SpectralField& f);
/// Max violation of the odd-in-y symmetry, |coeff(k1,-k2) + coeff(k1,k2)|.
double parity_defect(const SpectralField& f);
/// Max violation of Hermitian symmetry, |coeff(-k) - conj(coeff(k))|.
double reality_defect(const SpectralField& f);

/// 2/3-rule mask: true iff |n1| < N1/3 and |n2| < N2/3. Enumerate_modes order.
std::vector<bool> dealias_mask(const Domain& d);
void apply_dealias(SpectralField& f);
/// True when every coefficient outside the 2/3 band is exactly zero.
bool is_band_limited(const SpectralField& f);

}  // namespace betaplane
