#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>

#include "betaplane/diagnostics.hpp"
#include "betaplane/operators.hpp"
#include "betaplane/snapshot.hpp"
#include "betaplane/timestepper.hpp"
#include "test_util.hpp"

using namespace betaplane;
using betaplane::test::random_field;
using betaplane::test::rel_diff;

namespace {

using LComplex = std::complex<long double>;

// Extended-precision phi_0..phi_3: long series near 0, direct recursion elsewhere.
std::array<LComplex, 4> phi_reference(LComplex z) {
    std::array<LComplex, 4> phi{};
    if (std::abs(z) < 4.0L) {
        for (int k = 0; k < 4; ++k) {
            LComplex term = 1.0L, sum = 0.0L;
            long double fact = 1.0L;
            for (int m = 2; m <= k; ++m) fact *= m;
            term /= fact;
            for (int n = 0; n < 120; ++n) {
                sum += term;
                term *= z / static_cast<long double>(n + k + 1);
            }
            phi[k] = sum;
        }
        return phi;
    }
    phi[0] = std::exp(z);
    phi[1] = (phi[0] - 1.0L) / z;
    phi[2] = (phi[1] - 1.0L) / z;
    phi[3] = (phi[2] - 0.5L) / z;
    return phi;
}

double rel_err(Complex v, LComplex ref) {
    const LComplex diff = LComplex(v.real(), v.imag()) - ref;
    return static_cast<double>(std::abs(diff) / std::abs(ref));
}

Stepper linear_stepper(const Domain& d, double eps, double mu, double h) {
    return Stepper(d, ModelParams{eps, mu, false}, h, nullptr);
}

// Repeated steps without reprojection, recording the segments.
SpectralField solve(const Stepper& s, SpectralField w, int steps, std::vector<TrajectorySegment>* segs = nullptr) {
    double t = 0.0;
    for (int n = 0; n < steps; ++n) {
        TrajectorySegment seg;
        w = s.step(w, t, segs ? &seg : nullptr);
        if (segs) segs->push_back(std::move(seg));
        t += s.h();
    }
    return w;
}

double energy(const SpectralField& w) { return std::pow(sobolev_norm(w, -1.0), 2); }

}  // namespace

TEST(PhiFunctions, AnalyticValues) {
    const auto at0 = phi_functions(0.0);
    EXPECT_EQ(at0[0], Complex(1.0));
    EXPECT_EQ(at0[1], Complex(1.0));
    EXPECT_EQ(at0[2], Complex(0.5));
    EXPECT_NEAR(std::abs(at0[3] - 1.0 / 6.0), 0.0, 1e-17);
    EXPECT_NEAR(phi_functions(1.0)[1].real(), std::exp(1.0) - 1.0, 1e-15);
    EXPECT_NEAR(phi_functions(1.0)[1].real(), 1.718281828459045, 1e-15);
}

TEST(PhiFunctions, MatchExtendedPrecisionReference) {
    std::vector<Complex> zs;
    for (double r : {1e-12, 1e-6, 1e-3, 0.1, 0.3, 0.4999, 0.5, 0.5001, 0.7, 1.0, 2.0, 3.9, 4.1, 10.0, 60.0}) {
        for (int a = 0; a < 16; ++a) zs.push_back(std::polar(r, a * std::numbers::pi / 8));
    }
    double worst = 0.0;
    for (const Complex z : zs) {
        const auto v = phi_functions(z);
        const auto ref = phi_reference(LComplex(z.real(), z.imag()));
        for (int k = 0; k < 4; ++k) worst = std::max(worst, rel_err(v[k], ref[k]));
    }
    EXPECT_LT(worst, 1e-13);
}

TEST(PhiFunctions, ExtremeArgumentStaysFinite) {
    const auto phi = phi_functions(Complex(-1e3, 1e6));
    for (const auto& p : phi) EXPECT_TRUE(std::isfinite(p.real()) && std::isfinite(p.imag()));
    EXPECT_LT(std::abs(phi[0]), 1e-300);
    // phi_1 ~ -1/z when e^z underflows.
    EXPECT_LT(std::abs(phi[1] + 1.0 / Complex(-1e3, 1e6)) / std::abs(phi[1]), 1e-13);
}

TEST(EtdCoefficients, ReduceToRk4AndAreContractive) {
    const Domain d = Domain::periodic_2pi(16);
    const double h = 0.01;
    const auto c = build_coefficients(make_linear_symbol(d, ModelParams{1e15, 1e-15, true}), h);
    const std::size_t i = d.index(1, 1);
    EXPECT_NEAR(std::abs(c.w_first[i] - h / 6), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.w_middle[i] - h / 3), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.w_last[i] - h / 6), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.w_half[i] - h / 2), 0.0, 1e-15);

    const auto stiff = build_coefficients(make_linear_symbol(d, ModelParams{1e-6, 0.3, true}), 0.1);
    for (const auto& e : stiff.e_full) EXPECT_LE(std::abs(e), 1.0);
    EXPECT_EQ(stiff.e_full[d.index(0, 0)], Complex{});
    EXPECT_THROW(build_coefficients(make_linear_symbol(d, ModelParams{}), 0.0), std::invalid_argument);
}

TEST(LinearSymbol, ValuesAndValidation) {
    const Domain d = Domain::periodic_2pi(16);
    const auto s = make_linear_symbol(d, ModelParams{0.01, 0.1, true});
    EXPECT_NEAR(std::abs(s.lambda[d.index(1, 1)] - Complex(-0.2, 50.0)), 0.0, 1e-12);
    EXPECT_EQ(s.lambda[d.index(0, 2)], Complex(-0.4));
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (s.lambda[i] != Complex{}) {
            EXPECT_LE(s.lambda[i].real(), -0.1 * d.c0() * d.c0());
        }
    }
    const auto inviscid = make_linear_symbol(d, ModelParams{0.01, 0.0, true});
    for (const auto& l : inviscid.lambda) EXPECT_EQ(l.real(), 0.0);
    EXPECT_THROW(make_linear_symbol(d, ModelParams{0.0, 0.1, true}), std::invalid_argument);
    EXPECT_THROW(make_linear_symbol(d, ModelParams{0.1, -1.0, true}), std::invalid_argument);
}

TEST(Step, SingleLinearModeMatchesExponential) {
    const Domain d = Domain::periodic_2pi(16);
    const double h = 0.013;
    SpectralField w(d);
    w(1, 1) = Complex(0.3, -0.7);
    const SpectralField out = linear_stepper(d, 0.01, 0.1, h).step(w, 0.0);
    const Complex expected = std::exp(Complex(-0.2, 50.0) * h) * w(1, 1);
    EXPECT_LT(std::abs(out(1, 1) - expected), 1e-15);
    EXPECT_EQ(norm(out) - std::abs(out(1, 1)) * std::sqrt(d.area()), 0.0);
}

TEST(Step, LinearExactnessAtStiffEpsilon) {
    std::mt19937_64 rng(21);
    const Domain d = Domain::periodic_2pi(32);
    for (double mu : {0.0, 0.1, 2.0}) {
        for (double eps : {1e-6, 0.1}) {
            const double h = 0.05;
            const SpectralField w = random_field(d, rng);
            const SpectralField out = linear_stepper(d, eps, mu, h).step(w, 0.0);
            SpectralField exact(d);
            for (const auto& k : enumerate_modes(d)) {
                if (k.is_zero() || d.is_nyquist(k.n1, k.n2)) continue;
                const Complex lambda(-mu * k.norm_sq(), k.k1 / k.norm_sq() / eps);
                exact(k.n1, k.n2) = std::exp(lambda * h) * w(k.n1, k.n2);
            }
            EXPECT_LT(rel_diff(exact, out), 1e-14) << "mu=" << mu << " eps=" << eps;
        }
    }
}

TEST(Step, LinearZonalSteadyState) {
    const Domain d = Domain::periodic_2pi(16);
    const double mu = 0.5;
    const Forcing f = make_forcing(zonal_forcing_spec(), d);
    const ModelParams params{0.1, mu, false};
    SpectralField w(d);
    w(0, 1) = f.base()(0, 1) / mu;
    w(0, -1) = f.base()(0, -1) / mu;
    const Stepper s(d, params, 0.05, as_function(f));
    const SpectralField next = s.step(w, 0.0);
    EXPECT_LT(norm(next - w), 1e-14 * norm(w));
    EXPECT_LT(budget_residual(w, next, 0.0, 0.05, as_function(f), params), 1e-12);
    // Started from rest the linear zonal response relaxes onto f/mu.
    Integrator run(s, SpectralField(d));
    run.advance_to(40.0);
    EXPECT_LT(std::abs(run.state()(0, 1) - f.base()(0, 1) / mu), 1e-7);
}

TEST(Step, InviscidInvariants) {
    std::mt19937_64 rng(22);
    const Domain d = Domain::periodic_2pi(32);
    SpectralField w = random_field(d, rng);
    w *= 5.0 / norm(w);
    const ModelParams params{0.1, 0.0, true};
    const Stepper s(d, params, 1e-3, nullptr);
    const double z0 = norm_sq(w), e0 = energy(w);
    double worst_budget = 0.0;
    for (int n = 0; n < 100; ++n) {
        const SpectralField next = s.step(w, n * 1e-3);
        worst_budget = std::max(worst_budget, budget_residual(w, next, n * 1e-3, 1e-3, nullptr, params));
        w = next;
    }
    EXPECT_LT(std::abs(norm_sq(w) - z0) / z0, 1e-10);
    EXPECT_LT(std::abs(energy(w) - e0) / e0, 1e-10);
    EXPECT_LT(worst_budget, 1e-8);
}

TEST(Step, PreservesParityMeanAndBand) {
    std::mt19937_64 rng(23);
    const Domain d = Domain::periodic_2pi(32);
    const Forcing f = make_forcing(benchmark_forcing_spec(), d);
    const Stepper s(d, ModelParams{0.05, 0.5, true}, 0.01, as_function(f));
    SpectralField w = random_field(d, rng);
    w *= 10.0 / norm(w);
    for (int n = 0; n < 50; ++n) {
        w = s.step(w, 0.01 * n);
        ASSERT_LT(parity_defect(w), 1e-13 * norm(w));
        ASSERT_LT(reality_defect(w), 1e-13 * norm(w));
        ASSERT_EQ(w(0, 0), Complex{});
        ASSERT_TRUE(is_band_limited(w));
    }
}

TEST(Step, ManufacturedSolutionFourthOrder) {
    std::mt19937_64 rng(24);
    const Domain d = Domain::periodic_2pi(16);
    const ModelParams params{0.1, 0.1, true};
    const SpectralField a = random_field(d, rng, {.max_index = 3});
    const SpectralField b = random_field(d, rng, {.max_index = 3});
    auto exact = [&](double t) { return std::cos(t) * a + std::sin(2 * t) * b; };
    auto exact_dt = [&](double t) { return -std::sin(t) * a + 2 * std::cos(2 * t) * b; };
    const ForcingFunction forcing = [&](double t) {
        const SpectralField w = exact(t);
        SpectralField f = exact_dt(t);
        f += jacobian(w, w);
        f.axpy(1.0 / params.epsilon, apply_L(w));
        f.axpy(params.mu, apply_A(w));
        return f;
    };
    const double T = 1.0;
    std::vector<double> hs{1e-2, 5e-3, 2.5e-3}, errs;
    for (double h : hs) {
        const Stepper s(d, params, h, forcing);
        const SpectralField w = solve(s, exact(0.0), static_cast<int>(std::lround(T / h)));
        errs.push_back(norm(w - exact(T)));
    }
    // Least-squares slope of log err against log h.
    double mx = 0, my = 0;
    for (int i = 0; i < 3; ++i) mx += std::log(hs[i]) / 3, my += std::log(errs[i]) / 3;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
        sxy += (std::log(hs[i]) - mx) * (std::log(errs[i]) - my);
        sxx += std::pow(std::log(hs[i]) - mx, 2);
    }
    EXPECT_GE(sxy / sxx, 3.7) << errs[0] << " " << errs[1] << " " << errs[2];
}

TEST(Step, BudgetResidualIsSecondOrder) {
    std::mt19937_64 rng(25);
    const Domain d = Domain::periodic_2pi(32);
    const Forcing f = make_forcing(benchmark_forcing_spec(), d);
    const ModelParams params{0.1, 0.5, true};
    SpectralField w0 = random_field(d, rng);
    w0 *= 10.0 / norm(w0);
    std::vector<double> res;
    for (double h : {0.02, 0.01, 0.005}) {
        const Stepper s(d, params, h, as_function(f));
        SpectralField w = w0;
        const int n = static_cast<int>(std::lround(0.2 / h));
        for (int i = 0; i < n; ++i) w = s.step(w, i * h);
        const SpectralField next = s.step(w, n * h);
        res.push_back(budget_residual(w, next, n * h, h, as_function(f), params));
    }
    for (int i = 0; i < 2; ++i) {
        const double ratio = res[i] / res[i + 1];
        EXPECT_GT(ratio, 3.0) << res[i] << " " << res[i + 1];
        EXPECT_LT(ratio, 5.5) << res[i] << " " << res[i + 1];
    }
}

TEST(Step, BlowUpIsReported) {
    const Domain d = Domain::periodic_2pi(16);
    const Stepper s = linear_stepper(d, 0.1, 0.0, 0.01);
    SpectralField w(d);
    w(2, 3) = std::numeric_limits<double>::quiet_NaN();
    try {
        s.step(w, 1.5);
        FAIL() << "expected BlowUpError";
    } catch (const BlowUpError& e) {
        EXPECT_EQ(e.n1(), 2);
        EXPECT_EQ(e.n2(), 3);
        EXPECT_DOUBLE_EQ(e.time(), 1.51);
    }
    SpectralField big(d);
    big(1, 1) = 5e12;
    EXPECT_THROW(s.step(big, 0.0), BlowUpError);
}

TEST(Tangent, ZeroIsFixedPoint) {
    std::mt19937_64 rng(26);
    const Domain d = Domain::periodic_2pi(16);
    const Stepper s(d, ModelParams{0.1, 0.5, true}, 0.01, nullptr);
    TrajectorySegment seg;
    s.step(random_field(d, rng), 0.0, &seg);
    EXPECT_EQ(norm(s.tangent_step(SpectralField(d), seg)), 0.0);
}

TEST(Tangent, ZeroBaseIsLinearPropagation) {
    std::mt19937_64 rng(27);
    const Domain d = Domain::periodic_2pi(16);
    const double h = 0.02;
    const Stepper s(d, ModelParams{0.05, 0.3, true}, h, nullptr);
    TrajectorySegment seg;
    s.step(SpectralField(d), 0.0, &seg);
    const SpectralField phi = random_field(d, rng);
    const SpectralField out = s.tangent_step(phi, seg);
    const auto& e = s.coefficients().e_full;
    SpectralField exact(d);
    for (std::size_t i = 0; i < d.size(); ++i) exact[i] = e[i] * phi[i];
    EXPECT_LT(rel_diff(exact, out), 1e-15);
}

TEST(Tangent, FiniteDifferenceConsistency) {
    std::mt19937_64 rng(28);
    const Domain d = Domain::periodic_2pi(32);
    const Forcing f = make_forcing(benchmark_forcing_spec(), d);
    const Stepper s(d, ModelParams{0.1, 0.5, true}, 0.01, as_function(f));
    SpectralField w0 = random_field(d, rng);
    w0 *= 10.0 / norm(w0);
    SpectralField phi0 = random_field(d, rng);
    phi0 *= 1.0 / norm(phi0);
    const int steps = 30;
    std::vector<TrajectorySegment> segs;
    const SpectralField base = solve(s, w0, steps, &segs);
    SpectralField phi = phi0;
    for (const auto& seg : segs) phi = s.tangent_step(phi, seg);

    std::vector<double> errs;
    for (double delta : {1e-3, 1e-4, 1e-5}) {
        SpectralField perturbed = w0;
        perturbed.axpy(delta, phi0);
        SpectralField diff = solve(s, perturbed, steps) - base;
        diff.axpy(-delta, phi);
        errs.push_back(norm(diff));
    }
    EXPECT_GE(std::log10(errs[0] / errs[1]), 1.9) << errs[0] << " " << errs[1];
    EXPECT_GE(std::log10(errs[1] / errs[2]), 1.9) << errs[1] << " " << errs[2];
}

TEST(Tangent, Linearity) {
    std::mt19937_64 rng(29);
    const Domain d = Domain::periodic_2pi(32);
    const Forcing f = make_forcing(benchmark_forcing_spec(), d);
    const Stepper s(d, ModelParams{0.1, 0.5, true}, 0.01, as_function(f));
    TrajectorySegment seg;
    SpectralField w = random_field(d, rng);
    w *= 10.0 / norm(w);
    s.step(w, 0.0, &seg);
    const SpectralField p1 = random_field(d, rng), p2 = random_field(d, rng);
    const double alpha = -2.75;
    SpectralField combo = p2;
    combo.axpy(alpha, p1);
    SpectralField expected = s.tangent_step(p2, seg);
    expected.axpy(alpha, s.tangent_step(p1, seg));
    EXPECT_LT(rel_diff(expected, s.tangent_step(combo, seg)), 1e-14);
}

TEST(Tangent, SegmentStepSizeMismatchRejected) {
    const Domain d = Domain::periodic_2pi(16);
    const Stepper a(d, ModelParams{}, 0.01, nullptr), b(d, ModelParams{}, 0.02, nullptr);
    TrajectorySegment seg;
    a.step(SpectralField(d), 0.0, &seg);
    EXPECT_THROW(b.tangent_step(SpectralField(d), seg), std::invalid_argument);
}

TEST(Integrator, RestartFromSnapshotIsBitIdentical) {
    std::mt19937_64 rng(30);
    const Domain d = Domain::periodic_2pi(32);
    const Forcing f = make_forcing(benchmark_forcing_spec(), d);
    const ModelParams params{0.1, 0.5, true};
    const Stepper s(d, params, 0.01, as_function(f));
    SpectralField w0 = random_field(d, rng);
    w0 *= 10.0 / norm(w0);

    Integrator full(s, w0);
    full.reproject_every = 7;
    for (int n = 0; n < 40; ++n) full.advance();

    Integrator first(s, w0);
    first.reproject_every = 7;
    for (int n = 0; n < 19; ++n) first.advance();
    std::stringstream ss;
    write_snapshot(ss, Snapshot{first.state(), params.epsilon, params.mu, first.time()});
    const Snapshot snap = read_snapshot(ss);
    Integrator second(s, snap.omega, snap.t);
    second.reproject_every = 7;
    EXPECT_EQ(second.step_index(), 19);
    EXPECT_EQ(second.time(), first.time());
    for (int n = 0; n < 21; ++n) second.advance();

    EXPECT_EQ(second.time(), full.time());
    for (std::size_t i = 0; i < d.size(); ++i) ASSERT_EQ(second.state()[i], full.state()[i]);
}

TEST(Integrator, DeterministicAndClockExact) {
    std::mt19937_64 rng(31);
    const Domain d = Domain::periodic_2pi(16);
    const Stepper s(d, ModelParams{0.1, 0.5, true}, 0.1, as_function(make_forcing(benchmark_forcing_spec(), d)));
    const SpectralField w0 = random_field(d, rng);
    Integrator a(s, w0), b(s, w0);
    a.advance_to(3.0);
    b.advance_to(3.0);
    EXPECT_EQ(a.step_index(), 30);
    EXPECT_DOUBLE_EQ(a.time(), 3.0);
    for (std::size_t i = 0; i < d.size(); ++i) ASSERT_EQ(a.state()[i], b.state()[i]);
    EXPECT_LT(parity_defect(a.state()), 1e-13 * norm(a.state()));
}
