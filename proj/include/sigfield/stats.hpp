#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace sigfield {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0;  // unbiased
    double m3 = 0.0;   // raw third moment
    double m4 = 0.0;   // raw fourth moment
};

/// Single pass in index order, so results never depend on how values were produced.
Summary summarize(std::span<const double> x);

double mean(std::span<const double> x);
/// Mean and standard error of the mean.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
};
Estimate estimate_mean(std::span<const double> x);

struct ComplexEstimate {
    std::complex<double> value;
    double se = 0.0;  // sqrt((var Re + var Im) / n)
};
ComplexEstimate estimate_mean(std::span<const std::complex<double>> x);

/// Unbiased sample covariance.
double sample_covariance(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);
/// Kolmogorov-Smirnov distance between the empirical CDF of x and N(0, 1).
double ks_statistic_normal(std::span<const double> x);

/// Pooled two-proportion z statistic; 0 when both proportions are degenerate and equal.
double two_proportion_z(double p1, std::size_t n1, double p2, std::size_t n2);

/// (2k-1)!! sigma^k for even orders, 0 for odd ones.
double gaussian_moment(unsigned order, double variance);

}  // namespace sigfield
