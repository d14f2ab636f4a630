#include "sigfield/error.hpp"
#include "sigfield/ortho_basis.hpp"

#include <gtest/gtest.h>
#include "json.hpp"

#include <cmath>
#include <random>

using namespace sigfield;

namespace {

MeasureSpace lebesgue() { return MeasureSpace(Density::lebesgue()); }

MeasureSpace ramp() {
    return MeasureSpace(Density::from_function(
        "ramp", [](double u) { return u >= 0.0 && u < 1.0 ? 2.0 * u : 0.0; }, {0.0, 1.0}));
}

const MeasurableSet kUnit = MeasurableSet::interval(0, 1);

// <phi_j, phi_k> by integrating the product of the two step functions cell by cell,
// independent of the leaf bookkeeping inside OrthoBasis.
double brute_inner(const MeasureSpace& space, const StepFunction& f, const StepFunction& g) {
    double acc = 0.0;
    for (const auto& a : f.cells()) {
        for (const auto& b : g.cells()) {
            acc += a.coefficient * b.coefficient *
                   space.integrate([](double) { return 1.0; }, intersect(a.set, b.set));
        }
    }
    return acc;
}

}  // namespace

TEST(HaarBasis, DepthZeroIsNormalizedConstant) {
    const auto basis = build_haar_basis(ramp(), MeasurableSet::interval(0, 0.5), 0);
    ASSERT_EQ(basis.size(), 1u);
    EXPECT_NEAR(basis.value_on_leaf(0, 0), 1.0 / std::sqrt(0.25), 1e-10);
}

TEST(HaarBasis, DepthOneLebesgue) {
    const auto basis = build_haar_basis(lebesgue(), kUnit, 1);
    ASSERT_EQ(basis.size(), 2u);
    EXPECT_NEAR(basis.value_on_leaf(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(basis.value_on_leaf(1, 0), 1.0, 1e-12);
    EXPECT_NEAR(basis.value_on_leaf(1, 1), -1.0, 1e-12);
    const auto psi = basis.function(1).function;
    EXPECT_NEAR(brute_inner(lebesgue(), psi, psi), 1.0, 1e-10);
}

TEST(HaarBasis, GramMatrixIsIdentityByBruteForce) {
    for (const auto& space : {lebesgue(), ramp()}) {
        const auto basis = build_haar_basis(space, kUnit, 3);
        for (std::size_t j = 0; j < basis.size(); ++j) {
            for (std::size_t k = 0; k < basis.size(); ++k) {
                const double g = brute_inner(space, basis.function(j).function, basis.function(k).function);
                EXPECT_NEAR(g, j == k ? 1.0 : 0.0, 1e-8) << j << "," << k;
            }
        }
    }
}

TEST(HaarBasis, GramDeviationUpToDepthTen) {
    const auto space = ramp();
    for (unsigned depth : {0u, 4u, 7u, 10u}) {
        const auto basis = build_haar_basis(space, kUnit, depth);
        const std::size_t n = basis.size();
        const auto& w = basis.leaf_measures();
        // G = Phi diag(w) Phi^T with Phi[k][j] = phi_k(leaf j); sample rows keep depth 10 cheap.
        const std::size_t step = std::max<std::size_t>(1, n / 64);
        double worst = 0.0;
        for (std::size_t j = 0; j < n; j += step) {
            for (std::size_t k = 0; k < n; ++k) {
                double g = 0.0;
                for (std::size_t l = 0; l < n; ++l) g += basis.value_on_leaf(j, l) * basis.value_on_leaf(k, l) * w[l];
                worst = std::max(worst, std::abs(g - (j == k ? 1.0 : 0.0)));
            }
        }
        EXPECT_LE(worst, 1e-8) << "depth " << depth;
    }
}

TEST(HaarBasis, AtomicDomainRejected) {
    const MeasureSpace atom(Density::lebesgue(), {{0.25, 1.0}});
    EXPECT_THROW(build_haar_basis(atom, kUnit, 2), NotRefinableError);
}

TEST(HaarBasis, SynthesizeAnalyzeAreAdjoint) {
    const auto basis = build_haar_basis(ramp(), kUnit, 6);
    std::mt19937_64 gen(5);
    std::normal_distribution<double> z;
    std::vector<double> c(basis.size()), g(basis.size()), m(basis.size());
    for (auto& x : c) x = z(gen);
    basis.synthesize(c, g);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        double direct = 0.0;
        for (std::size_t k = 0; k < basis.size(); ++k) direct += c[k] * basis.value_on_leaf(k, j);
        EXPECT_NEAR(g[j], direct, 1e-10);
        m[j] = g[j] * basis.leaf_measures()[j];
    }
    // Projecting the synthesized step function returns the coefficients.
    const auto back = basis.analyze(m);
    for (std::size_t k = 0; k < basis.size(); ++k) EXPECT_NEAR(back[k], c[k], 1e-9);
}

TEST(Project, BasisFunctionGivesUnitVector) {
    const auto space = ramp();
    const auto basis = build_haar_basis(space, kUnit, 3);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const auto c = project(space, basis.function(j).function, basis);
        for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(c[k], j == k ? 1.0 : 0.0, 1e-10);
    }
}

TEST(Project, CellIndicatorReproducesMeasure) {
    const auto space = ramp();
    const auto basis = build_haar_basis(space, kUnit, 4);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const auto& cell = basis.leaves()[j];
        const auto c = project(space, StepFunction::indicator(cell), basis);
        double sum_sq = 0.0;
        for (double x : c) sum_sq += x * x;
        EXPECT_NEAR(sum_sq, measure_of(space, cell), 1e-10);
        EXPECT_NEAR(sum_sq, 1.0 / 16.0, 1e-10);
    }
}

TEST(Project, FinerHaarIsOrthogonalToSpan) {
    const auto space = ramp();
    const auto coarse = build_haar_basis(space, kUnit, 3);
    const auto fine = build_haar_basis(space, kUnit, 5);
    for (std::size_t k = coarse.size(); k < fine.size(); ++k) {
        const auto c = project(space, fine.function(k).function, coarse);
        for (double x : c) EXPECT_NEAR(x, 0.0, 1e-8);
    }
}

TEST(Project, ReconstructsStepFunctionsOnTheLeaves) {
    const auto space = ramp();
    const auto basis = build_haar_basis(space, kUnit, 5);
    std::mt19937_64 gen(9);
    std::normal_distribution<double> z;
    std::vector<StepFunction::Cell> cells;
    for (const auto& leaf : basis.leaves()) cells.push_back({leaf, z(gen)});
    const StepFunction f(cells);
    const auto c = project(space, f, basis);
    std::vector<double> g(basis.size());
    basis.synthesize(c, g);
    double err_sq = 0.0, sum_sq = 0.0;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        err_sq += std::pow(g[j] - cells[j].coefficient, 2) * basis.leaf_measures()[j];
    }
    for (double x : c) sum_sq += x * x;
    EXPECT_LE(std::sqrt(err_sq), 1e-8);
    EXPECT_NEAR(sum_sq, norm_sq(space, f), 1e-9);
}

TEST(ParsevalResidual, AlignedSetsVanish) {
    const auto space = ramp();
    for (unsigned depth = 0; depth <= 10; ++depth) {
        const auto basis = build_haar_basis(space, kUnit, depth);
        EXPECT_NEAR(parseval_residual(space, kUnit, basis), 0.0, 1e-8);
        if (depth >= 1) {
            MeasurableSet left_half;
            for (std::size_t j = 0; j < basis.size() / 2; ++j) left_half = unite(left_half, basis.leaves()[j]);
            EXPECT_NEAR(parseval_residual(space, left_half, basis), 0.0, 1e-8);
            EXPECT_NEAR(parseval_residual(space, basis.leaves().back(), basis), 0.0, 1e-8);
        }
    }
    const auto basis = build_haar_basis(lebesgue(), kUnit, 1);
    EXPECT_NEAR(parseval_residual(lebesgue(), MeasurableSet::interval(0, 0.5), basis), 0.0, 1e-8);
}

TEST(ParsevalResidual, NonAlignedSetsDecreaseWithDepth) {
    const auto space = lebesgue();
    const auto a = MeasurableSet::interval(0.1, 0.7);
    double previous = INFINITY;
    for (unsigned depth = 2; depth <= 8; ++depth) {
        const double res = parseval_residual(space, a, build_haar_basis(space, kUnit, depth));
        EXPECT_GT(res, 0.0);
        EXPECT_LT(res, previous);
        previous = res;
    }
    // Independent oracle at depth 2: leaves of width 1/4; A covers [0.1,0.25) partially,
    // [0.25,0.5) fully, [0.5,0.7) partially. Projection onto leaf indicators:
    // residual = sigma(A) - sum_j sigma(A n leaf_j)^2 / sigma(leaf_j).
    const double expected = 0.6 - (0.15 * 0.15 + 0.25 * 0.25 + 0.2 * 0.2) / 0.25;
    EXPECT_NEAR(parseval_residual(space, a, build_haar_basis(space, kUnit, 2)), expected, 1e-10);
}

TEST(ParsevalResidual, OutsideDomainRejected) {
    const auto basis = build_haar_basis(lebesgue(), kUnit, 2);
    EXPECT_THROW(parseval_residual(lebesgue(), MeasurableSet::interval(0.5, 1.5), basis), DomainError);
}

TEST(IndicatorBasis, HandlesAtoms) {
    const MeasureSpace atom(Density::lebesgue(), {{0.5, 1.0}});
    const auto p = equal_length_partition(atom, kUnit, 4);
    const auto basis = build_indicator_basis(atom, p);
    ASSERT_EQ(basis.size(), 4u);
    EXPECT_NEAR(parseval_residual(atom, kUnit, basis), 0.0, 1e-12);
    EXPECT_NEAR(basis.leaf_measures()[2], 1.25, 1e-12);
}

TEST(BasisDump, JsonHasOneEntryPerFunction) {
    const auto basis = build_haar_basis(lebesgue(), kUnit, 2);
    const auto j = nlohmann::json::parse(basis_to_json(basis));
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 4u);
    EXPECT_EQ(j[3]["k"], 3);
    for (const auto& cell : j[3]["cells"]) EXPECT_EQ(cell.size(), 3u);
}
