#include "betaplane/operators.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "betaplane/transform.hpp"

namespace betaplane {
namespace {

constexpr Complex kI{0.0, 1.0};

template <typename Symbol>
SpectralField apply_symbol(const SpectralField& f, Symbol symbol) {
    const Domain& d = f.domain();
    SpectralField out(d);
    for (int n2 = -d.N2 / 2; n2 < d.N2 / 2; ++n2) {
        for (int n1 = -d.N1 / 2; n1 < d.N1 / 2; ++n1) {
            if (n1 == 0 && n2 == 0) continue;
            out(n1, n2) = symbol(WaveVector::on(d, n1, n2)) * f(n1, n2);
        }
    }
    return out;
}

// (L2/L1)^2 = p/q with small integers, if the aspect ratio is rational.
std::optional<std::pair<std::int64_t, std::int64_t>> squared_aspect(const Domain& d) {
    const double r = d.L2 / d.L1;
    // Continued-fraction convergents of r.
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = r;
    for (int iter = 0; iter < 40; ++iter) {
        const double a = std::floor(x);
        const auto ai = static_cast<std::int64_t>(a);
        const std::int64_t p2 = ai * p1 + p0;
        const std::int64_t q2 = ai * q1 + q0;
        if (q2 > 1000) break;
        if (std::abs(static_cast<double>(p2) / static_cast<double>(q2) - r) <= 1e-12 * r) {
            return std::make_pair(p2 * p2, q2 * q2);
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double frac = x - a;
        if (frac == 0.0) break;
        x = 1.0 / frac;
    }
    return std::nullopt;
}

void require_zero_outside(const SpectralField& f, bool keep_zonal, const char* what) {
    const Domain& d = f.domain();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const bool zonal = d.n1_of(i) == 0;
        if (zonal != keep_zonal && f[i] != Complex{}) {
            throw std::invalid_argument(what);
        }
    }
}

}  // namespace

double omega_freq(const WaveVector& k) {
    if (k.is_zero()) {
        throw std::invalid_argument("omega_freq: k = 0 has no frequency");
    }
    return -k.k1 / k.norm_sq();
}

SpectralField apply_A(const SpectralField& f) {
    return apply_symbol(f, [](const WaveVector& k) { return Complex(k.norm_sq(), 0.0); });
}

SpectralField apply_inv_laplacian(const SpectralField& f) {
    return apply_symbol(f, [](const WaveVector& k) { return Complex(-1.0 / k.norm_sq(), 0.0); });
}

SpectralField apply_L(const SpectralField& f) {
    return apply_symbol(f, [](const WaveVector& k) { return kI * omega_freq(k); });
}

SpectralField apply_I_omega(const SpectralField& f) {
    return apply_symbol(f, [](const WaveVector& k) {
        return k.is_zonal() ? Complex{} : kI * (k.norm_sq() / k.k1);
    });
}

VelocityField velocity(const SpectralField& omega) {
    return VelocityField{
        apply_symbol(omega, [](const WaveVector& k) { return kI * (k.k2 / k.norm_sq()); }),
        apply_symbol(omega, [](const WaveVector& k) { return -kI * (k.k1 / k.norm_sq()); }),
    };
}

SpectralField jacobian(const SpectralField& a, const SpectralField& b) {
    if (!(a.domain() == b.domain())) {
        throw std::invalid_argument("jacobian: domain mismatch");
    }
    const VelocityField vel = velocity(a);
    const SpectralField bx = apply_symbol(b, [](const WaveVector& k) { return kI * k.k1; });
    const SpectralField by = apply_symbol(b, [](const WaveVector& k) { return kI * k.k2; });

    const GridField u = to_grid(vel.u);
    const GridField v = to_grid(vel.v);
    GridField prod = to_grid(bx);
    const GridField gy = to_grid(by);
    for (std::size_t i = 0; i < prod.values.size(); ++i) {
        prod.values[i] = u.values[i] * prod.values[i] + v.values[i] * gy.values[i];
    }
    SpectralField out = to_spectral(prod);
    apply_dealias(out);
    out.zero_mean();
    return out;
}

double b_coeff(const WaveVector& j, const WaveVector& k, const WaveVector& l, const Domain& d) {
    if (j.is_zero() || k.is_zero()) {
        throw std::invalid_argument("b_coeff: j and k must be nonzero");
    }
    if (j.n1 + k.n1 != l.n1 || j.n2 + k.n2 != l.n2) return 0.0;
    const double wedge = j.k1 * k.k2 - j.k2 * k.k1;
    return d.area() * wedge / j.norm_sq();
}

bool is_resonant(const WaveVector& j, const WaveVector& k, const Domain& d) {
    // Omega_j + Omega_k = 0  <=>  j1|k|^2 + k1|j|^2 = 0  <=>  P (L2/L1)^2 + Q = 0
    // with P = m1 n1 (m1 + n1), Q = m1 n2^2 + n1 m2^2 in lattice indices.
    const std::int64_t m1 = j.n1, m2 = j.n2, n1 = k.n1, n2 = k.n2;
    const std::int64_t P = m1 * n1 * (m1 + n1);
    const std::int64_t Q = m1 * n2 * n2 + n1 * m2 * m2;
    if (P == 0 && Q == 0) return true;
    const auto ratio = squared_aspect(d);
    if (!ratio) return false;
    return P * ratio->first + Q * ratio->second == 0;
}

double triad_identity_residual(const WaveVector& j, const WaveVector& k, const WaveVector& l,
                               const Domain& d) {
    if (j.is_zero() || k.is_zero()) {
        throw std::invalid_argument("triad_identity_residual: j and k must be nonzero");
    }
    if (j.n1 + k.n1 != l.n1 || j.n2 + k.n2 != l.n2 || l.n1 != 0) {
        throw std::invalid_argument("triad_identity_residual: requires j + k = l with l1 = 0");
    }
    const double lhs = b_coeff(j, k, l, d) + b_coeff(k, j, l, d);
    const double rhs = l.k2 * (omega_freq(j) + omega_freq(k)) * d.area();
    return std::abs(lhs + rhs);
}

Complex b_omega_triple(const SpectralField& a, const SpectralField& b, const SpectralField& c,
                       double t, double epsilon) {
    if (!(a.domain() == b.domain()) || !(a.domain() == c.domain())) {
        throw std::invalid_argument("b_omega_triple: domain mismatch");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("b_omega_triple: epsilon must be positive");
    }
    require_zero_outside(c, true, "b_omega_triple: third argument must be purely zonal");
    require_zero_outside(a, false, "b_omega_triple: first argument must be purely non-zonal");
    require_zero_outside(b, false, "b_omega_triple: second argument must be purely non-zonal");

    const Domain& d = a.domain();
    Complex sum{};
    for (std::size_t ij = 0; ij < a.size(); ++ij) {
        if (a[ij] == Complex{}) continue;
        const auto j = WaveVector::on(d, d.n1_of(ij), d.n2_of(ij));
        for (int l2 = -d.N2 / 2; l2 < d.N2 / 2; ++l2) {
            if (l2 == 0) continue;  // l2 factor vanishes
            const Complex cl = c(0, l2);
            if (cl == Complex{}) continue;
            const int k1 = -j.n1;
            const int k2 = l2 - j.n2;
            if (!d.contains(k1, k2)) continue;
            const Complex bk = b(k1, k2);
            if (bk == Complex{}) continue;
            const auto k = WaveVector::on(d, k1, k2);
            if (is_resonant(j, k, d)) continue;
            const double phase = -(omega_freq(j) + omega_freq(k)) * t / epsilon;
            sum += (l2 * d.dk2()) * a[ij] * bk * std::conj(cl) * std::polar(1.0, phase);
        }
    }
    return d.area() / (2.0 * kI) * sum;
}

ZonalSplit split(const SpectralField& omega) {
    const Domain& d = omega.domain();
    ZonalSplit s{SpectralField(d), SpectralField(d)};
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (d.n1_of(i) == 0) {
            s.zonal[i] = omega[i];
        } else {
            s.fast[i] = omega[i];
        }
    }
    return s;
}

}  // namespace betaplane
