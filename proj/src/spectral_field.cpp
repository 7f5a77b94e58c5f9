#include "betaplane/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace betaplane {

SpectralField::SpectralField(const Domain& d, std::vector<Complex> coeffs)
    : domain_(d), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != d.size()) {
        throw std::invalid_argument("SpectralField: coefficient count does not match domain");
    }
}

Complex SpectralField::at(int n1, int n2) const {
    if (!domain_.contains(n1, n2)) {
        return Complex{};
    }
    return (*this)(n1, n2);
}

void SpectralField::set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), Complex{}); }

void SpectralField::zero_nyquist() {
    const int h1 = domain_.N1 / 2;
    const int h2 = domain_.N2 / 2;
    for (int n1 = -h1; n1 < h1; ++n1) (*this)(n1, -h2) = 0.0;
    for (int n2 = -h2; n2 < h2; ++n2) (*this)(-h1, n2) = 0.0;
}

double SpectralField::max_abs(int* n1, int* n2) const {
    double best = 0.0;
    std::size_t where = 0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const double a = std::abs(coeffs_[i]);
        // NaN compares false; make sure it is reported.
        if (a > best || std::isnan(a)) {
            best = a;
            where = i;
            if (std::isnan(a)) break;
        }
    }
    if (n1) *n1 = domain_.n1_of(where);
    if (n2) *n2 = domain_.n2_of(where);
    return best;
}

void SpectralField::require_same_domain(const SpectralField& o) const {
    if (!(domain_ == o.domain_)) {
        throw std::invalid_argument("SpectralField: domain mismatch");
    }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_domain(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_domain(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

SpectralField& SpectralField::axpy(Complex s, const SpectralField& o) {
    require_same_domain(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
    return *this;
}

double GridField::mean() const {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

Complex inner(const SpectralField& a, const SpectralField& b) {
    if (!(a.domain() == b.domain())) {
        throw std::invalid_argument("inner: domain mismatch");
    }
    Complex sum{};
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * std::conj(b[i]);
    return a.domain().area() * sum;
}

double norm_sq(const SpectralField& f) {
    double sum = 0.0;
    for (const auto& c : f.coeffs()) sum += std::norm(c);
    return f.domain().area() * sum;
}

double norm(const SpectralField& f) { return std::sqrt(norm_sq(f)); }

SpectralField project_parity(const SpectralField& f) {
    const Domain& d = f.domain();
    SpectralField out(d);
    for (int n2 = -d.N2 / 2 + 1; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
            out(n1, n2) = 0.5 * (f(n1, n2) - f(n1, -n2));
        }
    }
    // The n2 = -N2/2 row has no partner; it is annihilated together with n2 = 0.
    return out;
}

SpectralField project_real(const SpectralField& f) {
    const Domain& d = f.domain();
    SpectralField out(d);
    for (int n2 = -d.N2 / 2 + 1; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2 + 1; n1 < d.N1 / 2; ++n1) {
            out(n1, n2) = 0.5 * (f(n1, n2) + std::conj(f(-n1, -n2)));
        }
    }
    return out;
}

double parity_defect(const SpectralField& f) {
    const Domain& d = f.domain();
    double worst = 0.0;
    for (int n2 = -d.N2 / 2 + 1; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
            worst = std::max(worst, std::abs(f(n1, n2) + f(n1, -n2)));
        }
    }
    for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
        worst = std::max(worst, std::abs(f(n1, -d.N2 / 2)));
    }
    return worst;
}

double reality_defect(const SpectralField& f) {
    const Domain& d = f.domain();
    double worst = 0.0;
    for (int n2 = -d.N2 / 2 + 1; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2 + 1; n1 < d.N1 / 2; ++n1) {
            worst = std::max(worst, std::abs(f(n1, n2) - std::conj(f(-n1, -n2))));
        }
    }
    return worst;
}

std::vector<bool> dealias_mask(const Domain& d) {
    std::vector<bool> mask(d.size(), false);
    for (int n2 = -d.N2 / 2; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
            // |n| < N/3 without floating point: 3|n| < N.
            mask[d.index(n1, n2)] = 3 * std::abs(n1) < d.N1 && 3 * std::abs(n2) < d.N2;
        }
    }
    return mask;
}

void apply_dealias(SpectralField& f) {
    const Domain& d = f.domain();
    for (int n2 = -d.N2 / 2; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
            if (3 * std::abs(n1) >= d.N1 || 3 * std::abs(n2) >= d.N2) f(n1, n2) = 0.0;
        }
    }
}

bool is_band_limited(const SpectralField& f) {
    const Domain& d = f.domain();
    for (int n2 = -d.N2 / 2; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
            if ((3 * std::abs(n1) >= d.N1 || 3 * std::abs(n2) >= d.N2) && f(n1, n2) != Complex{}) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace betaplane
