#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "betaplane/diagnostics.hpp"
#include "betaplane/operators.hpp"
#include "betaplane/transform.hpp"
#include "test_util.hpp"

using namespace betaplane;
using betaplane::test::random_field;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField orthogonalize(SpectralField v, const SpectralField& u) {
    v.axpy(-inner(v, u) / norm_sq(u), u);
    return v;
}

}  // namespace

TEST(SobolevNorm, SingleModePowers) {
    const Domain d(4 * kPi, 2 * kPi, 16, 16);
    SpectralField f(d);
    f(3, 0) = Complex(0.25, -1.0);  // |k| = 1.5
    const double l2 = norm(f);
    for (double s : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0}) {
        EXPECT_NEAR(sobolev_norm(f, s), std::pow(1.5, s) * l2, 1e-14 * std::pow(1.5, s) * l2);
    }
}

TEST(SobolevNorm, L2MatchesGridRms) {
    std::mt19937_64 rng(41);
    const Domain d(3.0, 7.0, 16, 32);
    const SpectralField f = random_field(d, rng, {.band_limited = false});
    const GridField g = to_grid(f);
    double ms = 0.0;
    for (double x : g.values) ms += x * x;
    const double rms = std::sqrt(ms / static_cast<double>(g.values.size()));
    EXPECT_NEAR(sobolev_norm(f, 0.0), rms * std::sqrt(d.area()), 1e-13 * norm(f));
    EXPECT_NEAR(sobolev_norm(f, 0.0), norm(f), 1e-14 * norm(f));
}

TEST(SobolevNorm, PoincareOnRandomFields) {
    std::mt19937_64 rng(42);
    for (const Domain& d : {Domain::periodic_2pi(16), Domain(3.0, 7.0, 16, 16)}) {
        for (int trial = 0; trial < 1000; ++trial) {
            const SpectralField f = random_field(d, rng, {.band_limited = false});
            for (double s : {0.0, 1.0}) {
                ASSERT_GE(sobolev_norm(f, s + 1), d.c0() * sobolev_norm(f, s) * (1 - 1e-14));
            }
        }
    }
}

TEST(SobolevNorm, OrthogonalDecomposition) {
    std::mt19937_64 rng(43);
    const Domain d = Domain::periodic_2pi(32);
    for (int trial = 0; trial < 20; ++trial) {
        const SpectralField w = random_field(d, rng, {.band_limited = false});
        const ZonalSplit p = split(w);
        for (double s : {0.0, 1.0, 2.0}) {
            const double total = std::pow(sobolev_norm(w, s), 2);
            const double parts = std::pow(sobolev_norm(p.zonal, s), 2) + std::pow(sobolev_norm(p.fast, s), 2);
            EXPECT_NEAR(total, parts, 1e-12 * total);
        }
    }
}

TEST(Diagnose, RecordConsistency) {
    std::mt19937_64 rng(44);
    const Domain d = Domain::periodic_2pi(32);
    const SpectralField w = random_field(d, rng);
    const DiagnosticsRecord r = diagnose(w, 1.25, 3e-9);
    EXPECT_EQ(r.t, 1.25);
    EXPECT_EQ(r.budget_residual, 3e-9);
    EXPECT_NEAR(r.enstrophy, r.zonal_sq + r.fast_sq, 1e-12 * r.enstrophy);
    for (double x : {r.enstrophy, r.grad_enstrophy, r.zonal_sq, r.fast_sq, r.fast_h1_sq, r.fast_h2_sq, r.max_velocity}) {
        EXPECT_GE(x, 0.0);
    }
    // Single zonal mode (0,1) with coefficient -i/2 pair: u = sin-profile of amplitude 1.
    SpectralField z(d);
    z(0, 1) = Complex(0.0, -0.5);
    z(0, -1) = Complex(0.0, 0.5);
    EXPECT_NEAR(diagnose(z, 0.0).max_velocity, 1.0, 1e-14);
}

TEST(Diagnose, CsvRoundTrip) {
    std::ostringstream os;
    write_diagnostics_header(os);
    DiagnosticsRecord r{0.1, 1.0 / 3.0, 2.0 / 7.0, 1e-300, 5.5, 6.25, 7.125, 1e-17, 4.0 / 9.0};
    write_diagnostics_row(os, r);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "t,enstrophy,grad_enstrophy,zonal_sq,fast_sq,fast_h1_sq,fast_h2_sq,budget_residual,max_velocity");
    std::vector<double> vals;
    std::stringstream rs(row);
    for (std::string cell; std::getline(rs, cell, ',');) vals.push_back(std::stod(cell));
    ASSERT_EQ(vals.size(), 9u);
    EXPECT_EQ(vals[0], r.t);
    EXPECT_EQ(vals[1], r.enstrophy);
    EXPECT_EQ(vals[2], r.grad_enstrophy);
    EXPECT_EQ(vals[3], r.zonal_sq);
    EXPECT_EQ(vals[8], r.max_velocity);
}

TEST(Grashof, Examples) {
    const Domain d = Domain::periodic_2pi(16);
    ForcingSpec spec;
    // |grad^{-1} f| = 1: two zonal coefficients i*a, -i*a at |k| = 1 give |M| * 2a^2 = 1.
    const double a = 1.0 / std::sqrt(2.0 * d.area());
    spec.modes = {{0, 1, Complex(0.0, a)}};
    const Forcing f = make_forcing(spec, d);
    EXPECT_NEAR(sobolev_norm(f.base(), -1.0), 1.0, 1e-15);
    EXPECT_NEAR(grashof(f, 1.0), 1.0, 1e-15);
    EXPECT_NEAR(grashof(f, 0.5), 4.0, 1e-14);
    EXPECT_EQ(grashof(f, 0.3), grashof(f, 0.3));
    EXPECT_THROW(grashof(f, -0.1), std::invalid_argument);
}

TEST(DimBound, Examples) {
    EXPECT_DOUBLE_EQ(dim_bound(1.0, 2.5), 2.5);
    EXPECT_NEAR(dim_bound(std::exp(1.0), 1.0), std::exp(2.0 / 3.0) * std::cbrt(2.0), 1e-14);
    double prev = dim_bound(1.0, 1.0);
    for (double g = 1.1; g < 1e6; g *= 1.3) {
        const double v = dim_bound(g, 1.0);
        EXPECT_GT(v, prev);
        prev = v;
    }
    // Below 1/e the log factor is clamped at zero.
    EXPECT_EQ(dim_bound(0.1, 1.0), 0.0);
    EXPECT_GT(dim_bound(0.5, 1.0), 0.0);
}

TEST(Agmon, SingleModeRatio) {
    const Domain d = Domain::periodic_2pi(16);
    SpectralField u(d);
    u(1, 0) = 1.0;
    const AgmonReport r = agmon_check(u, SpectralField(d), 1.0);
    EXPECT_NEAR(r.kappa, 1.0, 1e-15);
    EXPECT_NEAR(r.sup_u, 1.0, 1e-15);
    EXPECT_NEAR(r.grad_w, 2 * kPi, 1e-13);
    EXPECT_NEAR(r.rhs, r.grad_w, 1e-13);
    EXPECT_NEAR(r.ratio, 1.0 / (2 * kPi), 1e-15);
    EXPECT_TRUE(r.chain_consistent);
    EXPECT_FALSE(r.violation);
    EXPECT_TRUE(agmon_check(u, SpectralField(d), 0.1).violation);
}

TEST(Agmon, ZeroUGivesZeroRatio) {
    const Domain d = Domain::periodic_2pi(16);
    SpectralField v(d);
    v(2, 1) = 1.0;
    const AgmonReport r = agmon_check(SpectralField(d), v, 1.0);
    EXPECT_EQ(r.ratio, 0.0);
    EXPECT_TRUE(r.chain_consistent);
}

TEST(Agmon, ArgumentValidation) {
    const Domain d = Domain::periodic_2pi(16);
    SpectralField u(d);
    u(1, 0) = 1.0;
    EXPECT_THROW(agmon_check(u, u, 1.0), std::invalid_argument);
    EXPECT_THROW(agmon_check(SpectralField(d), SpectralField(d), 1.0), std::invalid_argument);
}

TEST(Agmon, ConstructiveChainOnEnsemble) {
    std::mt19937_64 rng(45);
    const Domain d = Domain::periodic_2pi(32);
    for (int trial = 0; trial < 100; ++trial) {
        const SpectralField u = random_field(d, rng);
        const SpectralField v = orthogonalize(random_field(d, rng), u);
        const AgmonReport r = agmon_check(u, v, 1e9, trial % 2 ? 4 : 1);
        ASSERT_TRUE(r.chain_consistent);
        EXPECT_EQ(norm(r.u_low + r.u_high - u), 0.0);
        // Partial sums against a direct lattice summation.
        double low = 0.0, high = 0.0;
        for (const auto& k : enumerate_modes(d)) {
            if (k.is_zero()) continue;
            (std::sqrt(k.norm_sq()) < r.kappa ? low : high) += std::abs(u(k.n1, k.n2));
        }
        EXPECT_NEAR(r.low_sum, low, 1e-12 * (low + high));
        EXPECT_NEAR(r.high_sum, high, 1e-12 * (low + high));
        EXPECT_GE(r.kappa, 1.0 - 1e-14);
    }
}

TEST(Agmon, OversamplingRefinesSup) {
    std::mt19937_64 rng(46);
    const Domain d = Domain::periodic_2pi(16);
    const SpectralField u = random_field(d, rng);
    const SpectralField v = orthogonalize(random_field(d, rng), u);
    const AgmonReport coarse = agmon_check(u, v, 1.0, 1);
    const AgmonReport fine = agmon_check(u, v, 1.0, 4);
    EXPECT_GE(fine.sup_u, coarse.sup_u);
    EXPECT_LE(fine.sup_u, fine.low_sum + fine.high_sum);
}

TEST(SteadyState, ZonalForcingIsExact) {
    const Domain d = Domain::periodic_2pi(32);
    const Forcing f = make_forcing(zonal_forcing_spec(), d);
    for (double eps : {0.1, 0.01}) {
        const SpectralField w = approx_steady_state(f, 0.5, eps);
        EXPECT_EQ(norm(split(w).fast), 0.0);
        SpectralField expected = apply_inv_laplacian(f.base());
        expected *= -1.0 / 0.5;
        EXPECT_EQ(norm(w - expected), 0.0);
        EXPECT_LT(steady_residual(w, f, 0.5, eps), 1e-12);
    }
}

TEST(SteadyState, SingleFastModeValue) {
    const Domain d = Domain::periodic_2pi(16);
    ForcingSpec spec;
    const Complex a(0.5, 0.0);
    spec.modes = {{1, 1, a}};
    const double eps = 0.05;
    const SpectralField w = approx_steady_state(make_forcing(spec, d), 0.5, eps);
    // Omega_(1,1) = -1/2: a / (i Omega) = 2i a.
    EXPECT_NEAR(std::abs(w(1, 1) - eps * Complex(0.0, 2.0) * a), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(w(-1, 1) - eps * Complex(0.0, -2.0) * (-a)), 0.0, 1e-16);
}

TEST(SteadyState, FastPartLinearInEpsilon) {
    const Domain d = Domain::periodic_2pi(32);
    const Forcing f = make_forcing(benchmark_forcing_spec(), d);
    const SpectralField w1 = approx_steady_state(f, 0.5, 0.1);
    const SpectralField w2 = approx_steady_state(f, 0.5, 0.05);
    EXPECT_NEAR(norm(split(w1).fast) / norm(split(w2).fast), 2.0, 1e-14);
    EXPECT_EQ(norm(split(w1).zonal - split(w2).zonal), 0.0);
}

TEST(SteadyState, ResidualIsFirstOrderInEpsilon) {
    const Domain d = Domain::periodic_2pi(32);
    const Forcing f = make_forcing(benchmark_forcing_spec(), d);
    std::vector<double> le, lr;
    for (double eps : {0.1, 0.05, 0.025}) {
        le.push_back(std::log(eps));
        lr.push_back(std::log(steady_residual(approx_steady_state(f, 0.5, eps), f, 0.5, eps)));
    }
    const double mx = (le[0] + le[1] + le[2]) / 3, my = (lr[0] + lr[1] + lr[2]) / 3;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) sxy += (le[i] - mx) * (lr[i] - my), sxx += (le[i] - mx) * (le[i] - mx);
    EXPECT_NEAR(sxy / sxx, 1.0, 0.2);
}

TEST(SteadyState, TimeDependentForcingRejected) {
    const Domain d = Domain::periodic_2pi(16);
    ForcingSpec spec = benchmark_forcing_spec();
    spec.kind = ForcingKind::time_periodic;
    spec.sigma = 1.0;
    const Forcing f = make_forcing(spec, d);
    EXPECT_THROW(approx_steady_state(f, 0.5, 0.1), std::invalid_argument);
    EXPECT_THROW(steady_residual(SpectralField(d), f, 0.5, 0.1), std::invalid_argument);
}
