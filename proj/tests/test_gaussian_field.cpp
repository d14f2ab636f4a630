#include "sigfield/error.hpp"
#include "sigfield/gaussian_field.hpp"
#include "sigfield/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace sigfield;

namespace {

const MeasurableSet kUnit = MeasurableSet::interval(0, 1);

MeasureSpace lebesgue() { return MeasureSpace(Density::lebesgue()); }

MeasureSpace ramp() {
    return MeasureSpace(Density::piecewise_polynomial({{0.0, 1.0, {0.0, 2.0}}}));
}

FieldSimulator make_sim(const MeasureSpace& space, unsigned depth, std::size_t replicas, std::uint64_t seed = 7,
                        unsigned workers = 1) {
    return FieldSimulator(space, build_haar_basis(space, kUnit, depth), seed, replicas, workers);
}

// P(a < Z <= b) for a standard normal, via the error function.
double gauss_prob(double a, double b) { return 0.5 * (std::erf(b / std::sqrt(2.0)) - std::erf(a / std::sqrt(2.0))); }

}  // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
    auto a = make_stream(1, 2, 3);
    auto b = make_stream(1, 2, 3);
    auto c = make_stream(1, 2, 4);
    auto d = make_stream(1, 3, 3);
    for (int i = 0; i < 8; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        EXPECT_NE(x, c());
        EXPECT_NE(x, d());
    }
    EXPECT_EQ(stream_key("gelfand"), stream_key("gelfand"));
    EXPECT_NE(stream_key("gelfand"), stream_key("kolmogorov"));
}

TEST(SampleField, EmptySetIsZero) {
    const auto sim = make_sim(lebesgue(), 4, 100);
    const MeasurableSet sets[] = {MeasurableSet{}};
    const auto sample = sample_field(sim, sets);
    for (double v : sample.values[0]) EXPECT_EQ(v, 0.0);
}

TEST(SampleField, UnitVarianceOnUnitInterval) {
    const std::size_t R = 20000;
    const auto sim = make_sim(lebesgue(), 6, R);
    const MeasurableSet sets[] = {kUnit};
    const auto s = summarize(sample_field(sim, sets).values[0]);
    EXPECT_NEAR(s.var, 1.0, 3.0 * std::sqrt(2.0 / R));
}

TEST(SampleField, DisjointAlignedSetsUncorrelated) {
    const std::size_t R = 20000;
    const auto sim = make_sim(lebesgue(), 4, R);
    const MeasurableSet sets[] = {MeasurableSet::interval(0, 0.5), MeasurableSet::interval(0.5, 1)};
    const auto v = sample_field(sim, sets).values;
    EXPECT_NEAR(sample_covariance(v[0], v[1]), 0.0, 4.0 * std::sqrt(0.25 / R));
}

TEST(SampleField, OutsideDomainRejected) {
    const auto sim = make_sim(lebesgue(), 3, 10);
    const MeasurableSet sets[] = {MeasurableSet::interval(0.5, 1.5)};
    EXPECT_THROW(sample_field(sim, sets), DomainError);
}

TEST(SampleField, AdditiveOverDisjointSetsPerReplica) {
    const auto sim = make_sim(ramp(), 5, 500);
    const auto a = MeasurableSet::interval(0.1, 0.35);
    const auto b = MeasurableSet::from_intervals({{0.5, 0.6}, {0.8, 0.95}});
    const MeasurableSet sets[] = {a, b, unite(a, b)};
    const auto v = sample_field(sim, sets).values;
    for (std::size_t r = 0; r < 500; ++r) EXPECT_NEAR(v[2][r], v[0][r] + v[1][r], 1e-12);
}

TEST(SampleField, CovarianceLawWithParsevalSlack) {
    const std::size_t R = 40000;
    const auto space = ramp();
    const auto sim = make_sim(space, 6, R);
    const auto basis = build_haar_basis(space, kUnit, 6);
    const std::vector<MeasurableSet> grid = {
        MeasurableSet::interval(0, 0.5), MeasurableSet::interval(0.3, 0.8), MeasurableSet::interval(0.6, 1),
        MeasurableSet::from_intervals({{0.05, 0.2}, {0.7, 0.9}}), kUnit};
    const auto v = sample_field(sim, grid).values;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i; j < grid.size(); ++j) {
            const double sa = measure_of(space, grid[i]);
            const double sb = measure_of(space, grid[j]);
            const double sab = measure_of(space, intersect(grid[i], grid[j]));
            const double slack = std::sqrt(parseval_residual(space, grid[i], basis) * parseval_residual(space, grid[j], basis)) +
                                 4.0 * std::sqrt((sa * sb + sab * sab) / R);
            EXPECT_NEAR(sample_covariance(v[i], v[j]), sab, slack) << grid[i].to_string() << " " << grid[j].to_string();
        }
    }
}

TEST(SampleField, DeterministicAcrossRunsAndWorkers) {
    const MeasurableSet sets[] = {MeasurableSet::interval(0.2, 0.7)};
    const auto one = sample_field(make_sim(ramp(), 6, 3001, 42, 1), sets).values[0];
    const auto again = sample_field(make_sim(ramp(), 6, 3001, 42, 1), sets).values[0];
    const auto four = sample_field(make_sim(ramp(), 6, 3001, 42, 4), sets).values[0];
    const auto other = sample_field(make_sim(ramp(), 6, 3001, 43, 1), sets).values[0];
    EXPECT_EQ(one, again);
    EXPECT_EQ(one, four);
    EXPECT_NE(one, other);
}

TEST(WienerIntegral, ZeroAndIndicator) {
    const auto sim = make_sim(ramp(), 5, 300);
    for (double v : wiener_integral(sim, StepFunction{})) EXPECT_EQ(v, 0.0);
    const auto a = MeasurableSet::interval(0.25, 0.6);
    const MeasurableSet sets[] = {a};
    const auto direct = sample_field(sim, sets).values[0];
    const auto via_f = wiener_integral(sim, StepFunction::indicator(a));
    for (std::size_t r = 0; r < 300; ++r) EXPECT_NEAR(via_f[r], direct[r], 1e-12);
}

TEST(WienerIntegral, BilinearPerReplica) {
    const auto sim = make_sim(ramp(), 5, 300);
    const auto basis = sim.basis();
    // Step functions on the leaves lie in the span, so linearity is exact.
    std::mt19937_64 gen(1);
    std::normal_distribution<double> z;
    std::vector<StepFunction::Cell> fc, gc, hc;
    const double alpha = 0.7, beta = -1.3;
    for (const auto& leaf : basis.leaves()) {
        const double x = z(gen), y = z(gen);
        fc.push_back({leaf, x});
        gc.push_back({leaf, y});
        hc.push_back({leaf, alpha * x + beta * y});
    }
    const auto f = wiener_integral(sim, StepFunction(fc));
    const auto g = wiener_integral(sim, StepFunction(gc));
    const auto h = wiener_integral(sim, StepFunction(hc));
    for (std::size_t r = 0; r < 300; ++r) EXPECT_NEAR(h[r], alpha * f[r] + beta * g[r], 1e-10);
}

TEST(WienerIntegral, PolarizationMatchesInnerProduct) {
    const std::size_t R = 40000;
    const auto space = ramp();
    const auto sim = make_sim(space, 5, R);
    const StepFunction f({{MeasurableSet::interval(0, 0.5), 1.0}, {MeasurableSet::interval(0.5, 1), -2.0}});
    const StepFunction g({{MeasurableSet::interval(0.25, 0.75), 1.5}});
    // Quadrature oracle: 1.5 * (int_{.25}^{.5} 2u du - 2 int_{.5}^{.75} 2u du) = 1.5 * (0.1875 - 0.625)
    const double oracle = 1.5 * (0.1875 - 2.0 * 0.3125);
    EXPECT_NEAR(inner(space, f, g), oracle, 1e-12);
    const auto wf = wiener_integral(sim, f);
    const auto wg = wiener_integral(sim, g);
    const double scale = std::sqrt(norm_sq(space, f) * norm_sq(space, g) + oracle * oracle);
    EXPECT_NEAR(sample_covariance(wf, wg), oracle, 4.0 * scale / std::sqrt(static_cast<double>(R)));
}

TEST(CoordinateMap, CoordinatesAreBasisIntegrals) {
    const auto sim = make_sim(ramp(), 3, 50);
    const auto x = coordinate_map(sim, sim.basis().size());
    for (std::size_t k = 0; k < sim.basis().size(); ++k) {
        const auto wk = wiener_integral(sim, sim.basis().function(k).function);
        for (std::size_t r = 0; r < 50; ++r) {
            EXPECT_NEAR(wk[r], x(r, k), 1e-12);
            EXPECT_EQ(sim.coordinates(r)[k], x(r, k));
        }
    }
}

TEST(CoordinateMap, IidStandardNormal) {
    const std::size_t R = 40000;
    const auto sim = make_sim(lebesgue(), 3, R);
    const auto x = coordinate_map(sim, 4);
    const double bound = 4.0 / std::sqrt(static_cast<double>(R));
    for (std::size_t n = 0; n < 4; ++n) {
        const auto cn = x.column(n);
        EXPECT_NEAR(mean(cn), 0.0, bound);
        EXPECT_LT(ks_statistic_normal(cn), 1.63 / std::sqrt(static_cast<double>(R)));  // 1% KS level
        for (std::size_t m = 0; m < 4; ++m) {
            EXPECT_NEAR(sample_covariance(cn, x.column(m)), n == m ? 1.0 : 0.0, n == m ? 5.0 * std::sqrt(2.0 / R) : bound);
        }
    }
}

TEST(CoordinateMap, CylinderProbabilitiesFactorize) {
    const std::size_t R = 40000;
    const auto sim = make_sim(lebesgue(), 3, R);
    const auto x = coordinate_map(sim, 3);
    const double lo[] = {-1.96, -0.5, 0.0};
    const double hi[] = {1.96, 1.0, INFINITY};
    std::size_t hits1 = 0, hits3 = 0;
    for (std::size_t r = 0; r < R; ++r) {
        const bool in1 = x(r, 0) > lo[0] && x(r, 0) <= hi[0];
        hits1 += in1;
        hits3 += in1 && x(r, 1) > lo[1] && x(r, 1) <= hi[1] && x(r, 2) > lo[2] && x(r, 2) <= hi[2];
    }
    const double p1 = gauss_prob(lo[0], hi[0]);
    EXPECT_NEAR(p1, 0.9500, 1e-4);
    const double p3 = p1 * gauss_prob(lo[1], hi[1]) * 0.5;
    const double n = static_cast<double>(R);
    EXPECT_NEAR(static_cast<double>(hits1) / n, p1, 4.0 * std::sqrt(p1 * (1 - p1) / n));
    EXPECT_NEAR(static_cast<double>(hits3) / n, p3, 4.0 * std::sqrt(p3 * (1 - p3) / n));
}

TEST(MomentCheck, ExactColumn) {
    const auto sim = make_sim(lebesgue(), 4, 10);
    const auto rows = moment_check(sim, kUnit, 4);
    const double exact[] = {0.0, 1.0, 0.0, 3.0};
    for (unsigned k = 0; k < 4; ++k) {
        EXPECT_EQ(rows[k].order, k + 1);
        EXPECT_DOUBLE_EQ(rows[k].exact, exact[k]);
    }
    const MeasureSpace doubled(Density::lebesgue(2.0));
    const auto rows2 = moment_check(make_sim(doubled, 4, 10), kUnit, 4);
    EXPECT_DOUBLE_EQ(rows2[1].exact, 2.0);
    EXPECT_DOUBLE_EQ(rows2[3].exact, 12.0);
}

TEST(MomentCheck, SampleMomentsWithinStandardErrors) {
    const auto sim = make_sim(ramp(), 6, 40000);
    for (const auto& row : moment_check(sim, MeasurableSet::interval(0.5, 1), 6)) {
        EXPECT_NEAR(row.sample, row.exact, 5.0 * row.standard_error) << "order " << row.order;
    }
}

TEST(CharFunctional, ZeroFunctionIsOne) {
    const auto c = char_functional_check(make_sim(lebesgue(), 3, 100), StepFunction{});
    EXPECT_EQ(c.estimate, std::complex<double>(1.0, 0.0));
    EXPECT_EQ(c.exact, 1.0);
}

TEST(CharFunctional, UnitNormGivesExpMinusHalf) {
    const std::size_t R = 40000;
    const auto sim = make_sim(lebesgue(), 4, R);
    const StepFunction f({{MeasurableSet::interval(0, 0.25), 2.0}});  // ||f||^2 = 1
    const auto c = char_functional_check(sim, f);
    EXPECT_NEAR(c.exact, 0.60653065971263342, 1e-15);
    EXPECT_LE(std::abs(c.estimate - c.exact), 3.0 / std::sqrt(static_cast<double>(R)));
    const auto minus = char_functional_check(sim, f.scaled(-1.0));
    EXPECT_NEAR(minus.estimate.real(), c.estimate.real(), 1e-12);
    EXPECT_NEAR(minus.estimate.imag(), -c.estimate.imag(), 1e-12);
}

TEST(BasisIndependence, LawOfAlignedSetAgreesAcrossDepths) {
    const std::size_t R = 40000;
    const auto space = ramp();
    const auto a = build_haar_basis(space, kUnit, 2).leaves()[1];  // in both spans
    const auto shallow = moment_check(FieldSimulator(space, build_haar_basis(space, kUnit, 2), 3, R, 1), a, 4);
    const auto deep = moment_check(FieldSimulator(space, build_haar_basis(space, kUnit, 7), 5, R, 1), a, 4);
    for (unsigned k : {0u, 1u, 3u}) {
        const double se = std::hypot(shallow[k].standard_error, deep[k].standard_error);
        EXPECT_NEAR(shallow[k].sample, deep[k].sample, 5.0 * se) << "order " << k + 1;
    }
}

TEST(Csv, SummaryHasHeaderAndOneRowPerQuery) {
    const MeasurableSet sets[] = {kUnit, MeasurableSet::interval(0, 0.5)};
    const auto sample = sample_field(make_sim(lebesgue(), 3, 20), sets);
    std::ostringstream os;
    write_summary_csv(os, sample);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "query,n,mean,var,m3,m4");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 2);
}
