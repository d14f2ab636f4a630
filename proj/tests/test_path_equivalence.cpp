#include "sigfield/builtins.hpp"
#include "sigfield/error.hpp"
#include "sigfield/path_equivalence.hpp"

#include <gtest/gtest.h>
#include "json.hpp"

#include <cmath>
#include <numbers>

using namespace sigfield;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralMeasure unit_spectrum() { return SpectralMeasure(make_measure("normalized-lebesgue"), "normalized-lebesgue"); }

double normal_cdf_var(double x, double var) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * var)); }

// P(X1 in (a1, b1), X2 in (a2, b2)) for a centered Gaussian pair with the given covariance,
// integrating the conditional law of X2 given X1 = x.
double rectangle_probability(double v1, double v2, double c12, double a1, double b1, double a2, double b2) {
    const double slope = c12 / v1;
    const double cond = v2 - c12 * slope;
    return integrate(
        [&](double x) {
            const double m = slope * x;
            return std::exp(-x * x / (2.0 * v1)) / std::sqrt(2.0 * kPi * v1) *
                   (normal_cdf_var(b2 - m, cond) - normal_cdf_var(a2 - m, cond));
        },
        a1, b1);
}

std::vector<double> uniform_grid(double step, double end) {
    std::vector<double> g;
    for (std::size_t k = 0; static_cast<double>(k) * step <= end + 1e-12; ++k) g.push_back(static_cast<double>(k) * step);
    return g;
}

}  // namespace

TEST(KolmProcessValue, GridPointsAndInterpolation) {
    const double grid[] = {0.0, 0.5, 1.0, 2.0};
    const double path[] = {0.0, 1.0, -1.0, 3.0};
    EXPECT_EQ(kolm_process_value(grid, path, 0.0), 0.0);
    EXPECT_EQ(kolm_process_value(grid, path, 1.0), -1.0);
    EXPECT_DOUBLE_EQ(kolm_process_value(grid, path, 0.75), 0.0);
    EXPECT_DOUBLE_EQ(kolm_process_value(grid, path, 1.5), 1.0);
    EXPECT_THROW(kolm_process_value(grid, path, 2.5), DomainError);
    EXPECT_THROW(kolm_process_value(grid, path, -0.1), DomainError);
}

TEST(GelfandPairing, ZeroDerivativeGivesZero) {
    const auto grid = uniform_grid(0.125, 2.0);
    std::vector<double> path(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) path[k] = std::sin(3.0 * grid[k]);
    const PairingEvaluator eval(grid, path);
    const SmoothTestFunction flat{"flat", [](double) { return 1.0; }, [](double) { return 0.0; }, 0.0, 2.0, {}};
    EXPECT_EQ(gelfand_pairing(eval, flat), 0.0);
}

TEST(GelfandPairing, LinearInTestFunctionAndPath) {
    const auto grid = uniform_grid(1.0 / 32.0, 2.0);
    std::vector<double> p1(grid.size()), p2(grid.size()), sum(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        p1[k] = std::cos(5.0 * grid[k]) - 1.0;
        p2[k] = grid[k] * grid[k];
        sum[k] = p1[k] + p2[k];
    }
    const auto f = mollified_indicator(1.0, 0.125);
    const auto g = mollified_indicator(0.6, 0.25);
    const SmoothTestFunction combo{"combo", [&](double x) { return 2.0 * f.phi(x) - 0.5 * g.phi(x); },
                                   [&](double x) { return 2.0 * f.dphi(x) - 0.5 * g.dphi(x); }, 0.0,
                                   std::max(f.support_hi, g.support_hi),
                                   [&] {
                                       auto b = f.breakpoints;
                                       b.insert(b.end(), g.breakpoints.begin(), g.breakpoints.end());
                                       return b;
                                   }()};
    const PairingEvaluator e1(grid, p1), e2(grid, p2), es(grid, sum);
    EXPECT_NEAR(e1.pair(combo), 2.0 * e1.pair(f) - 0.5 * e1.pair(g), 1e-12);
    EXPECT_NEAR(es.pair(f), e1.pair(f) + e2.pair(f), 1e-12);
}

TEST(GelfandPairing, MollifiedIndicatorConvergesOnSmoothPath) {
    const auto grid = uniform_grid(1.0 / 256.0, 2.0);
    std::vector<double> path(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) path[k] = std::sin(2.0 * grid[k]) + grid[k] * grid[k];
    const PairingEvaluator eval(grid, path);
    const double t = 1.0;
    const double target = std::sin(2.0) + 1.0;
    double previous = INFINITY;
    for (double h : {0.25, 0.125, 0.0625, 0.03125}) {
        const double err = std::abs(eval.pair(mollified_indicator(t, h)) - target);
        EXPECT_LE(err, 4.0 * (h + 1.0 / 256.0)) << h;  // path modulus: |omega'| <= 4 on [0, 2]
        EXPECT_LT(err, previous);
        previous = err;
    }
}

TEST(GelfandPairing, SupportMustStayOnTheGrid) {
    const auto grid = uniform_grid(0.25, 1.0);
    const std::vector<double> path(grid.size(), 0.0);
    EXPECT_THROW(PairingEvaluator(grid, path).pair(mollified_indicator(1.0, 0.25)), DomainError);
    EXPECT_THROW(mollified_indicator(0.1, 0.1), InputError);
}

TEST(PairingIdentity, HoldsReplicaWiseAndTightensWithH) {
    const VarianceFunction r(unit_spectrum());
    const double step = 1.0 / 256.0;
    double previous = INFINITY;
    for (double h : {16 * step, 8 * step, 4 * step}) {
        const auto check = pairing_check(r, 1.0, h, step, 1000, 31, 1);
        EXPECT_GE(check.fraction_within, 0.95) << h;
        EXPECT_NEAR(check.tolerance, 3.0 * std::sqrt(h + step), 1e-6);
        EXPECT_LT(check.tolerance, previous);
        previous = check.tolerance;
    }
}

TEST(Cylinders, ValidateRejectsMalformedSpecs) {
    const auto at = CylinderFunctional::at;
    EXPECT_THROW((CylinderSpec{"none", {}, {}}.validate()), InputError);
    EXPECT_THROW((CylinderSpec{"dims", {at(1.0)}, {{0, 1}, {0, 1}}}.validate()), InputError);
    EXPECT_THROW((CylinderSpec{"empty", {at(1.0)}, {{1, 1}}}.validate()), InputError);
    EXPECT_THROW(CylinderFunctional::at(0.0), InputError);
    EXPECT_NO_THROW((CylinderSpec{"ok", {at(1.0)}, {{-INFINITY, 0.0}}}.validate()));
}

TEST(Pushforward, FullSpaceIsUninformative) {
    const CylinderSpec all{"everything", {CylinderFunctional::at(1.0)}, {Bound{}}};
    const auto row = pushforward_test(unit_spectrum(), all, 2000, 3, {.field = {32.0, 10}, .workers = 1});
    EXPECT_EQ(row.p_kolm, 1.0);
    EXPECT_EQ(row.p_gelfand, 1.0);
    EXPECT_FALSE(row.informative);
    EXPECT_EQ(row.z, 0.0);
}

TEST(Pushforward, CentralIntervalHasProbabilityNinetyFive) {
    const std::size_t R = 20000;
    const VarianceFunction r(unit_spectrum());
    const auto suite = standard_cylinder_suite(r);
    const auto row = pushforward_test(unit_spectrum(), suite[0], R, 5, {.workers = 1});
    const double p = std::erf(1.96 / std::sqrt(2.0));
    const double band = 4.0 * std::sqrt(p * (1 - p) / R);
    EXPECT_NEAR(p, 0.95, 1e-3);
    EXPECT_NEAR(row.p_kolm, p, band);
    EXPECT_NEAR(row.p_gelfand, p, band);
}

TEST(Pushforward, RectangleMatchesBivariateQuadrature) {
    const std::size_t R = 20000;
    const VarianceFunction r(unit_spectrum());
    const CylinderSpec rect{"rect", {CylinderFunctional::at(0.5), CylinderFunctional::at(1.5)}, {{-0.3, 0.9}, {-1.0, 0.5}}};
    const double p = rectangle_probability(r(0.5), r(1.5), covariance(r, 0.5, 1.5), -0.3, 0.9, -1.0, 0.5);
    const auto row = pushforward_test(unit_spectrum(), rect, R, 8, {.workers = 1});
    const double band = 4.0 * std::sqrt(p * (1 - p) / R);
    EXPECT_NEAR(row.p_kolm, p, band);
    EXPECT_NEAR(row.p_gelfand, p, band);
}

TEST(Pushforward, StandardSuiteAcrossAdditiveMeasures) {
    const std::size_t R = 20000;
    for (const char* ref : {"normalized-lebesgue", "lebesgue", "lebesgue:0.05"}) {
        const SpectralMeasure spec(make_measure(ref), ref);
        const VarianceFunction r(spec);
        ASSERT_TRUE(r.is_additive());
        const auto suite = standard_cylinder_suite(r);
        const auto rows = pushforward_suite(spec, suite, R, 12, {.workers = 1});
        ASSERT_EQ(rows.size(), 5u);
        for (const auto& row : rows) {
            EXPECT_TRUE(row.informative);
            EXPECT_LE(std::abs(row.z), 3.0) << ref << " " << row.cylinder;
        }
    }
}

TEST(Pushforward, SmoothFunctionalAgrees) {
    const std::size_t R = 20000;
    const CylinderSpec cyl{"<w', molly> > 0.2", {CylinderFunctional::of(mollified_indicator(1.0, 1.0 / 16.0))}, {{0.2, INFINITY}}};
    const auto row = pushforward_test(unit_spectrum(), cyl, R, 21, {.workers = 1});
    EXPECT_TRUE(row.informative);
    EXPECT_LE(std::abs(row.z), 3.0);
}

TEST(Pushforward, NonAdditiveMeasureNeedsOverride) {
    const SpectralMeasure cauchy(make_measure("cauchy-like:1"), "cauchy-like:1");
    const VarianceFunction r(cauchy);
    const auto suite = standard_cylinder_suite(r);
    EXPECT_THROW(pushforward_suite(cauchy, suite, 100, 1, {.workers = 1}), ContractError);
    const auto rows = pushforward_suite(cauchy, suite, 2000, 1, {.allow_non_additive = true, .workers = 1});
    EXPECT_EQ(rows.size(), suite.size());
}

TEST(Pushforward, JsonReport) {
    const CylinderComparison row{"w(1) > 0", 0.5, 0.49, 1.0, true, 100, 7};
    const auto j = nlohmann::json::parse(pushforward_to_json(std::span<const CylinderComparison>(&row, 1)));
    ASSERT_EQ(j.size(), 1u);
    for (const char* key : {"cylinder", "p_kolm", "p_gelfand", "z", "replicas", "seed"}) EXPECT_TRUE(j[0].contains(key)) << key;
    EXPECT_EQ(j[0]["seed"], 7);
}

TEST(Pushforward, DeterministicAcrossWorkers) {
    const VarianceFunction r(unit_spectrum());
    const auto suite = standard_cylinder_suite(r);
    const PushforwardOptions one{.field = {32.0, 10}, .workers = 1};
    const PushforwardOptions three{.field = {32.0, 10}, .workers = 3};
    const auto a = pushforward_suite(unit_spectrum(), suite, 1500, 4, one);
    const auto b = pushforward_suite(unit_spectrum(), suite, 1500, 4, three);
    EXPECT_EQ(pushforward_to_json(a), pushforward_to_json(b));
}
