#include "sigfield/stats.hpp"

#include "sigfield/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace sigfield {

Summary summarize(std::span<const double> x) {
    Summary s;
    s.n = x.size();
    if (x.empty()) return s;
    double sum = 0.0, sum2 = 0.0, sum3 = 0.0, sum4 = 0.0;
    for (double v : x) {
        const double v2 = v * v;
        sum += v;
        sum2 += v2;
        sum3 += v2 * v;
        sum4 += v2 * v2;
    }
    const auto n = static_cast<double>(x.size());
    s.mean = sum / n;
    s.m3 = sum3 / n;
    s.m4 = sum4 / n;
    if (x.size() > 1) {
        double centered = 0.0;
        for (double v : x) centered += (v - s.mean) * (v - s.mean);
        s.var = centered / (n - 1.0);
    }
    return s;
}

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

Estimate estimate_mean(std::span<const double> x) {
    const Summary s = summarize(x);
    return {s.mean, s.n > 0 ? std::sqrt(s.var / static_cast<double>(s.n)) : 0.0};
}

ComplexEstimate estimate_mean(std::span<const std::complex<double>> x) {
    if (x.empty()) return {};
    std::vector<double> re(x.size()), im(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        re[i] = x[i].real();
        im[i] = x[i].imag();
    }
    const Summary a = summarize(re);
    const Summary b = summarize(im);
    return {{a.mean, b.mean}, std::sqrt((a.var + b.var) / static_cast<double>(x.size()))};
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("sample_covariance: size mismatch");
    if (x.size() < 2) return 0.0;
    const double mx = mean(x);
    const double my = mean(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - mx) * (y[i] - my);
    return acc / static_cast<double>(x.size() - 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double ks_statistic_normal(std::span<const double> x) {
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = normal_cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double two_proportion_z(double p1, std::size_t n1, double p2, std::size_t n2) {
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    const double pooled = (p1 * a + p2 * b) / (a + b);
    const double var = pooled * (1.0 - pooled) * (1.0 / a + 1.0 / b);
    if (var <= 0.0) return p1 == p2 ? 0.0 : INFINITY;
    return (p1 - p2) / std::sqrt(var);
}

double gaussian_moment(unsigned order, double variance) {
    if (order % 2 == 1) return 0.0;
    double double_factorial = 1.0;
    for (unsigned j = 1; j < order; j += 2) double_factorial *= j;
    return double_factorial * std::pow(variance, order / 2);
}

}  // namespace sigfield
