#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sigfield {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    /// Upper bound on the number of panels produced by adaptive bisection.
    std::size_t max_panels = 1u << 20;
};

using RealFunction = std::function<double(double)>;

/// Adaptive Gauss-Kronrod integral of f over [a, b]. Throws QuadratureError on a
/// non-finite result.
double integrate(const RealFunction& f, double a, double b, const QuadratureConfig& cfg = {});

/// Same as integrate() but also returns the error estimate.
double integrate(const RealFunction& f, double a, double b, const QuadratureConfig& cfg,
                 double& error_estimate);

/// Nodes and weights of an n-point rule.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal density (weights sum to 1),
/// computed by Golub-Welsch on the probabilists' Jacobi matrix.
QuadratureRule gauss_hermite_rule(std::size_t n);

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre_rule(std::size_t n);

}  // namespace sigfield
