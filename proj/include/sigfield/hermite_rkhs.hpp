#pragma once

#include "sigfield/gaussian_field.hpp"
#include "sigfield/measure_space.hpp"
#include "sigfield/stats.hpp"
#include "sigfield/step_function.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sigfield {

/// Probabilists' Hermite polynomial: H_{n+1} = x H_n - n H_{n-1}.
double hermite_eval(unsigned n, double x);
/// H_0(x), ..., H_n(x).
std::vector<double> hermite_values(unsigned n, double x);

/// psi = sum_n c_n H_n.
struct HermiteSeries {
    std::vector<double> coefficients;

    double operator()(double x) const;
    unsigned degree() const noexcept;
};

/// [psi](x) = sum_n n! c_n^2 x^n.
struct BracketSeries {
    std::vector<double> coefficients;

    double operator()(double x) const;
};

BracketSeries bracket_transform(const HermiteSeries& psi);

/// Double integral of H_n(x) H_k(y) against the standard bivariate normal with
/// correlation c, by a 20 x 20 Gauss-Hermite tensor rule on y = c x + sqrt(1 - c^2) z.
/// Throws InputError when |c| >= 1.
double mehler_moment(unsigned n, unsigned k, double c);

/// int H_n H_m dgamma_1 by an n-node Gauss-Hermite rule.
double hermite_inner(unsigned n, unsigned m, std::size_t nodes = 16);

struct PsiCovariance {
    Estimate mc;              // E psi(W_A / sqrt sigma(A)) psi(W_B / sqrt sigma(B))
    double prediction = 0.0;  // [psi](rho)
    double correlation = 0.0; // rho = sigma(A n B) / sqrt(sigma(A) sigma(B))
};

/// Throws InputError when a set has zero or infinite measure or deg psi > 8.
PsiCovariance psi_covariance_check(const FieldSimulator& sim, const HermiteSeries& psi, const MeasurableSet& a,
                                   const MeasurableSet& b);

/// K(A, B) = exp(-||chi_A - chi_B||^2 / 2) = exp(-(sigma(A) + sigma(B)) / 2 + sigma(A n B)).
double rkhs_kernel_eval(const MeasureSpace& space, const MeasurableSet& a, const MeasurableSet& b);

class RkhsKernel {
public:
    explicit RkhsKernel(MeasureSpace space) : space_(std::move(space)) {}
    double operator()(const MeasurableSet& a, const MeasurableSet& b) const { return rkhs_kernel_eval(space_, a, b); }
    /// Row-major Gram matrix.
    std::vector<double> gram(std::span<const MeasurableSet> sets) const;
    const MeasureSpace& space() const noexcept { return space_; }

private:
    MeasureSpace space_;
};

/// Smallest eigenvalue of a symmetric row-major n x n matrix.
double min_eigenvalue(std::span<const double> matrix, std::size_t n);

/// Per-replica complex functional of the field.
using FieldFunctional = std::function<std::complex<double>(const ReplicaState&)>;

FieldFunctional constant_functional(std::complex<double> value = 1.0);
/// exp(i s W_B)
FieldFunctional exp_functional(const FieldSimulator& sim, const MeasurableSet& b, double s = 1.0);

/// F^(A) = E[F exp(i W_A)] for each set.
std::vector<ComplexEstimate> generalized_fourier(const FieldSimulator& sim, const FieldFunctional& f,
                                                 std::span<const MeasurableSet> sets);

/// k(t, s) = sigma([0, min(t, s))). Throws InputError for negative arguments.
double rk_sigma_kernel(const MeasureSpace& space, double t, double s);

/// Function of the first few coordinates X_0, X_1, ... (X_0 pairs with phi_0).
using CoordinateFunctional = std::function<std::complex<double>(std::span<const double>)>;

struct ShiftCheck {
    ComplexEstimate lhs;            // E F(X + c)
    ComplexEstimate rhs;            // E F(X) exp(-|c|^2/2 + <c, X>)
    double combined_se = 0.0;       // standard error of the paired difference
    double norm_sq = 0.0;           // |c|^2 = ||f||^2
    double effective_sample_size = 0.0;
    bool degenerate_weights = false; // ESS below 10% of the replicas
    std::string warning;
};

/// Quasi-invariance under the shift by f = sum_k c_k phi_k. Throws InputError when
/// c has more entries than the basis.
ShiftCheck cameron_martin_shift_check(const FieldSimulator& sim, const CoordinateFunctional& f_of_x,
                                      std::span<const double> shift);
/// Shift given as a step function; it is projected onto the basis span first.
ShiftCheck cameron_martin_shift_check(const FieldSimulator& sim, const CoordinateFunctional& f_of_x,
                                      const StepFunction& shift);

struct IdentityRow {
    std::string identity;
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0;
    bool pass = false;
};

/// Rows {identity, lhs, rhs, se, pass}.
void write_identity_csv(std::ostream& os, std::span<const IdentityRow> rows);

}  // namespace sigfield
