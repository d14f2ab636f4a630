#include "sigfield/error.hpp"
#include "sigfield/hermite_rkhs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace sigfield;

namespace {

const MeasurableSet kUnit = MeasurableSet::interval(0, 1);

MeasureSpace lebesgue(double scale = 1.0) { return MeasureSpace(Density::lebesgue(scale)); }

MeasureSpace ramp() { return MeasureSpace(Density::piecewise_polynomial({{0.0, 3.0, {0.0, 2.0}}})); }

FieldSimulator make_sim(const MeasureSpace& space, unsigned depth, std::size_t replicas, std::uint64_t seed = 19) {
    return FieldSimulator(space, build_haar_basis(space, kUnit, depth), seed, replicas, 1);
}

double factorial(unsigned n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST(Hermite, LowOrderValues) {
    for (double x : {-1.5, 0.0, 0.7, 3.0}) {
        EXPECT_EQ(hermite_eval(0, x), 1.0);
        EXPECT_EQ(hermite_eval(1, x), x);
    }
    EXPECT_EQ(hermite_eval(2, 0.0), -1.0);
    EXPECT_EQ(hermite_eval(3, 2.0), 2.0);
}

TEST(Hermite, ValuesSatisfyRecurrenceAndGeneratingFunction) {
    for (double x : {-2.0, 0.3, 1.1}) {
        const auto h = hermite_values(10, x);
        ASSERT_EQ(h.size(), 11u);
        for (unsigned n = 1; n < 10; ++n) EXPECT_NEAR(h[n + 1], x * h[n] - n * h[n - 1], 1e-9 * std::abs(h[n + 1]) + 1e-12);
        // e^{zx - z^2/2} = sum H_n(x) z^n / n!
        const double z = 0.3;
        double series = 0.0;
        for (unsigned n = 0; n <= 10; ++n) series += h[n] * std::pow(z, n) / factorial(n);
        EXPECT_NEAR(series, std::exp(z * x - 0.5 * z * z), 1e-8);
    }
}

TEST(Hermite, OrthogonalityUnderGaussHermite) {
    for (unsigned n = 0; n <= 10; ++n) {
        for (unsigned m = 0; m <= 10; ++m) {
            EXPECT_NEAR(hermite_inner(n, m), n == m ? factorial(n) : 0.0, 1e-9 * std::max(1.0, factorial(n)));
        }
    }
}

TEST(Bracket, Examples) {
    const auto b1 = bracket_transform({{0.0, 1.0}});
    EXPECT_NEAR(b1(0.4), 0.4, 1e-15);
    const auto b2 = bracket_transform({{0.0, 0.0, 1.0}});
    EXPECT_NEAR(b2(0.5), 2.0 * 0.25, 1e-15);
    const auto b01 = bracket_transform({{1.0, 1.0}});
    EXPECT_NEAR(b01(0.3), 1.3, 1e-15);
}

TEST(Bracket, CoefficientsNonNegativeAndAtOneIsGaussianNorm) {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> z;
    const auto gh = gauss_hermite_rule(40);
    for (int trial = 0; trial < 5; ++trial) {
        HermiteSeries psi;
        for (int n = 0; n <= 6; ++n) psi.coefficients.push_back(z(gen));
        const auto b = bracket_transform(psi);
        for (double c : b.coefficients) EXPECT_GE(c, 0.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < gh.nodes.size(); ++i) norm += gh.weights[i] * psi(gh.nodes[i]) * psi(gh.nodes[i]);
        EXPECT_NEAR(b(1.0), norm, 1e-8 * norm);
    }
}

TEST(Mehler, Examples) {
    EXPECT_NEAR(mehler_moment(0, 0, 0.4), 1.0, 1e-12);
    EXPECT_NEAR(mehler_moment(1, 1, 0.5), 0.5, 1e-12);
    EXPECT_NEAR(mehler_moment(2, 1, 0.5), 0.0, 1e-12);
    EXPECT_NEAR(mehler_moment(2, 1, -0.8), 0.0, 1e-12);
    EXPECT_THROW(mehler_moment(1, 1, 1.0), InputError);
    EXPECT_THROW(mehler_moment(1, 1, -1.2), InputError);
}

TEST(Mehler, FullTableWithinTolerance) {
    for (double c : {0.0, 0.3, -0.3, 0.9, -0.9}) {
        for (unsigned n = 0; n <= 8; ++n) {
            for (unsigned k = 0; k <= 8; ++k) {
                const double want = n == k ? factorial(n) * std::pow(c, n) : 0.0;
                EXPECT_NEAR(mehler_moment(n, k, c), want, 1e-8) << n << "," << k << " c=" << c;
            }
        }
    }
}

TEST(PsiCovariance, StructuralCases) {
    const auto sim = make_sim(lebesgue(), 4, 4000);
    const HermiteSeries psi{{0.5, 1.0, -0.3}};
    const auto a = MeasurableSet::interval(0, 0.5);
    const auto same = psi_covariance_check(sim, psi, a, a);
    EXPECT_NEAR(same.correlation, 1.0, 1e-12);
    EXPECT_NEAR(same.prediction, 0.25 + 1.0 + 2.0 * 0.09, 1e-12);
    const auto apart = psi_covariance_check(sim, psi, a, MeasurableSet::interval(0.5, 1));
    EXPECT_NEAR(apart.prediction, 0.25, 1e-12);
    const auto nested = psi_covariance_check(sim, {{0.0, 1.0}}, kUnit, a);
    EXPECT_NEAR(nested.correlation, 0.70710678118654752, 1e-12);
    EXPECT_NEAR(nested.prediction, 0.70710678118654752, 1e-12);
    EXPECT_THROW(psi_covariance_check(sim, psi, a, MeasurableSet{}), InputError);
    EXPECT_THROW(psi_covariance_check(sim, HermiteSeries{std::vector<double>(10, 1.0)}, a, a), InputError);
}

TEST(PsiCovariance, RandomSeriesAgreeWithBracket) {
    const std::size_t R = 20000;
    const auto space = lebesgue();
    const auto sim = make_sim(space, 6, R);
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z;
    int checked = 0;
    for (int trial = 0; checked < 10; ++trial) {
        HermiteSeries psi;
        for (int n = 0; n <= 4; ++n) psi.coefficients.push_back(z(gen) / (1.0 + n));
        // Endpoints on the depth-6 dyadic grid, so the truncated field carries W_A exactly.
        auto random_set = [&] {
            const double a = std::floor(64.0 * u(gen)) / 64.0, b = std::floor(64.0 * u(gen)) / 64.0;
            return MeasurableSet::interval(std::min(a, b), std::max(a, b));
        };
        const auto a = random_set();
        const auto b = random_set();
        if (measure_of(space, a) < 0.05 || measure_of(space, b) < 0.05) continue;
        const auto pc = psi_covariance_check(sim, psi, a, b);
        EXPECT_NEAR(pc.mc.value, pc.prediction, 4.0 * pc.mc.se) << trial;
        ++checked;
    }
}

TEST(Kernel, Examples) {
    const auto space = lebesgue();
    const auto a = MeasurableSet::interval(0, 1);
    EXPECT_EQ(rkhs_kernel_eval(space, a, a), 1.0);
    EXPECT_NEAR(rkhs_kernel_eval(space, a, MeasurableSet{}), 0.60653065971263342, 1e-15);
    EXPECT_NEAR(rkhs_kernel_eval(space, a, MeasurableSet::interval(1, 2)), 0.36787944117144233, 1e-15);
}

TEST(Kernel, SymmetricBoundedAndPositiveSemidefinite) {
    const RkhsKernel k(ramp());
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<MeasurableSet> sets;
    for (int i = 0; i < 8; ++i) {
        const double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
        sets.push_back(MeasurableSet::from_intervals({{std::min(a, b), std::max(a, b)}, {std::min(c, d), std::max(c, d)}}));
    }
    const auto g = k.gram(sets);
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(g[i * 8 + i], 1.0);
        for (std::size_t j = 0; j < 8; ++j) {
            EXPECT_EQ(g[i * 8 + j], g[j * 8 + i]);
            EXPECT_GT(g[i * 8 + j], 0.0);
            EXPECT_LE(g[i * 8 + j], 1.0);
        }
    }
    EXPECT_GE(min_eigenvalue(g, 8), -1e-10);
}

TEST(GeneralizedFourier, Examples) {
    const std::size_t R = 20000;
    const auto sim = make_sim(lebesgue(2.0), 4, R);  // the two halves of [0,1) carry unit mass
    const auto a = MeasurableSet::interval(0, 0.5);
    const auto b = MeasurableSet::interval(0.5, 1);
    const MeasurableSet sets[] = {a, b, kUnit};
    const auto ones = generalized_fourier(sim, constant_functional(), sets);
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = std::exp(-0.5 * measure_of(sim.space(), sets[i]));
        EXPECT_LE(std::abs(ones[i].value - exact), 4.0 * ones[i].se) << i;
    }
    const MeasurableSet only_a[] = {a};
    const auto self = generalized_fourier(sim, exp_functional(sim, a, -1.0), only_a).front();
    EXPECT_NEAR(std::abs(self.value - 1.0), 0.0, 1e-12);
    const auto cross = generalized_fourier(sim, exp_functional(sim, b, -1.0), only_a).front();
    EXPECT_NEAR(rkhs_kernel_eval(sim.space(), a, b), std::exp(-1.0), 1e-15);
    EXPECT_LE(std::abs(cross.value - std::exp(-1.0)), 4.0 * cross.se);
    const MeasurableSet overlap[] = {MeasurableSet::interval(0.25, 0.75)};
    const auto partial = generalized_fourier(sim, exp_functional(sim, a, -1.0), overlap).front();
    EXPECT_LE(std::abs(partial.value - rkhs_kernel_eval(sim.space(), overlap[0], a)), 4.0 * partial.se);
}

TEST(RkSigmaKernel, Examples) {
    EXPECT_DOUBLE_EQ(rk_sigma_kernel(lebesgue(), 2.0, 3.0), 2.0);
    EXPECT_EQ(rk_sigma_kernel(lebesgue(), 0.0, 3.0), 0.0);
    EXPECT_NEAR(rk_sigma_kernel(ramp(), 1.0, 0.5), 0.25, 1e-12);
    EXPECT_NEAR(rk_sigma_kernel(ramp(), 0.5, 1.0), 0.25, 1e-12);
}

TEST(ShiftCheck, ExamplesAndSuite) {
    const std::size_t R = 20000;
    const auto sim = make_sim(lebesgue(), 3, R);
    const CoordinateFunctional one = [](std::span<const double>) { return std::complex<double>(1.0); };
    const CoordinateFunctional x1 = [](std::span<const double> x) { return std::complex<double>(x[0]); };
    const CoordinateFunctional x1sq = [](std::span<const double> x) { return std::complex<double>(x[0] * x[0]); };
    const CoordinateFunctional eix2 = [](std::span<const double> x) { return std::polar(1.0, x[1]); };

    const double none[] = {0.0, 0.0};
    const auto trivial = cameron_martin_shift_check(sim, x1sq, none);
    EXPECT_EQ(trivial.lhs.value, trivial.rhs.value);

    const double e1[] = {1.0};
    const auto constant = cameron_martin_shift_check(sim, one, e1);
    EXPECT_EQ(constant.lhs.value, std::complex<double>(1.0));
    EXPECT_LE(std::abs(constant.rhs.value - 1.0), 4.0 * constant.rhs.se);

    const auto linear = cameron_martin_shift_check(sim, x1, e1);
    EXPECT_LE(std::abs(linear.lhs.value - 1.0), 4.0 * linear.lhs.se);
    // Oracle for the right side: int x e^{x - 1/2} dgamma(x) = 1 by Gauss-Hermite quadrature.
    const auto gh = gauss_hermite_rule(40);
    double oracle = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) oracle += gh.weights[i] * gh.nodes[i] * std::exp(gh.nodes[i] - 0.5);
    EXPECT_NEAR(oracle, 1.0, 1e-12);
    EXPECT_LE(std::abs(linear.rhs.value - oracle), 4.0 * linear.rhs.se);

    const double c[] = {0.0, 0.6, 0.5, 0.4};
    for (const auto& f : {one, x1, x1sq, eix2}) {
        const auto check = cameron_martin_shift_check(sim, f, c);
        EXPECT_NEAR(check.norm_sq, 0.77, 1e-12);
        EXPECT_FALSE(check.degenerate_weights);
        EXPECT_LE(std::abs(check.lhs.value - check.rhs.value), 4.0 * check.combined_se);
    }
}

TEST(ShiftCheck, StepFunctionShiftIsProjected) {
    const auto sim = make_sim(lebesgue(), 3, 5000);
    const StepFunction f({{MeasurableSet::interval(0, 0.5), 0.8}});
    const CoordinateFunctional x1 = [](std::span<const double> x) { return std::complex<double>(x[1]); };
    const auto check = cameron_martin_shift_check(sim, x1, f);
    EXPECT_NEAR(check.norm_sq, norm_sq(sim.space(), f), 1e-12);
    EXPECT_LE(std::abs(check.lhs.value - check.rhs.value), 4.0 * check.combined_se);
    EXPECT_THROW(cameron_martin_shift_check(sim, x1, StepFunction::indicator(MeasurableSet::interval(0.5, 1.5))),
                 DomainError);
}

TEST(ShiftCheck, LargeShiftWarnsAboutWeightDegeneracy) {
    const auto sim = make_sim(lebesgue(), 3, 5000);
    const double big[] = {3.5};
    const CoordinateFunctional one = [](std::span<const double>) { return std::complex<double>(1.0); };
    const auto check = cameron_martin_shift_check(sim, one, big);
    EXPECT_TRUE(check.degenerate_weights);
    EXPECT_LT(check.effective_sample_size, 0.1 * 5000);
    EXPECT_FALSE(check.warning.empty());
}

TEST(IdentityCsv, Header) {
    const IdentityRow rows[] = {{"x", 1.0, 1.0, 0.0, true}};
    std::ostringstream os;
    write_identity_csv(os, rows);
    const std::string csv = os.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "identity,lhs,rhs,se,pass");
}
