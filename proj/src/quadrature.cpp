#include "sigfield/quadrature.hpp"

#include "sigfield/error.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <bit>
#include <cmath>

namespace sigfield {

double integrate(const RealFunction& f, double a, double b, const QuadratureConfig& cfg,
                 double& error_estimate) {
    if (a == b) {
        error_estimate = 0.0;
        return 0.0;
    }
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    const unsigned depth = static_cast<unsigned>(std::bit_width(cfg.max_panels));
    // A single 15-point pass settles smooth panels (and floating-point slivers).
    // Boost's stopping rule is relative to the running estimate, which never
    // triggers when the integral cancels to ~0. In that case integrate f + s with
    // s = L1 / (b - a) and subtract, which makes the tolerance relative to L1.
    double l1 = 0.0;
    double probe_err = 0.0;
    const double probe = GK::integrate(f, a, b, 0, cfg.rel_tol, &probe_err, &l1);
    double value = 0.0;
    const bool sliver = (b - a) <= 1e-12 * std::max(std::abs(a), std::abs(b));
    if (std::isfinite(probe) && (sliver || probe_err <= cfg.rel_tol * std::max(std::abs(probe), l1))) {
        error_estimate = probe_err;
        value = probe;
    } else if (std::isfinite(probe) && l1 > 0.0 && std::abs(probe) < 0.5 * l1) {
        const double shift = l1 / (b - a);
        const RealFunction shifted = [&f, shift](double x) { return f(x) + shift; };
        value = GK::integrate(shifted, a, b, depth, cfg.rel_tol, &error_estimate) - shift * (b - a);
    } else {
        value = GK::integrate(f, a, b, depth, cfg.rel_tol, &error_estimate, &l1);
    }
    if (!std::isfinite(value)) {
        throw QuadratureError("quadrature produced a non-finite value on [" + std::to_string(a) +
                              ", " + std::to_string(b) + ")");
    }
    return value;
}

double integrate(const RealFunction& f, double a, double b, const QuadratureConfig& cfg) {
    double err = 0.0;
    return integrate(f, a, b, cfg, err);
}

namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix of the
// three-term recurrence; mu0 is the total mass of the weight function.
QuadratureRule golub_welsch(std::size_t n, const std::function<double(std::size_t)>& offdiag,
                            double mu0) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                   static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const double b = offdiag(k);
        jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = b;
        jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        rule.nodes[i] = solver.eigenvalues()(idx);
        const double v0 = solver.eigenvectors()(0, idx);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_hermite_rule(std::size_t n) {
    if (n == 0) throw InputError("Gauss-Hermite rule needs at least one node");
    return golub_welsch(n, [](std::size_t k) { return std::sqrt(static_cast<double>(k)); }, 1.0);
}

QuadratureRule gauss_legendre_rule(std::size_t n) {
    if (n == 0) throw InputError("Gauss-Legendre rule needs at least one node");
    return golub_welsch(
        n,
        [](std::size_t k) {
            const double kk = static_cast<double>(k);
            return kk / std::sqrt(4.0 * kk * kk - 1.0);
        },
        2.0);
}

}  // namespace sigfield
