#pragma once

#include "sigfield/gaussian_field.hpp"
#include "sigfield/measure_space.hpp"
#include "sigfield/step_function.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace sigfield {

/// sum_k c_k W_{A_k} per replica. Cells must lie inside the simulation domain.
std::vector<double> simple_integral(const FieldSimulator& sim, const StepFunction& f);

/// Read access to the field on strictly earlier cells. Reading cell j >= current
/// throws ContractError.
class CellHistory {
public:
    /// prefix[k] = sum_{j<k} cell_values[j]; prefix has one more entry than cell_values.
    CellHistory(std::span<const double> cell_values, std::span<const double> prefix, std::size_t current)
        : values_(cell_values), prefix_(prefix), current_(current) {}

    std::size_t current() const noexcept { return current_; }
    double operator[](std::size_t j) const;
    /// W over the union of cells 0..current-1.
    double partial_sum() const { return prefix_[current_]; }

private:
    std::span<const double> values_;
    std::span<const double> prefix_;
    std::size_t current_;
};

/// Integrand defined on an explicitly ordered grid of disjoint cells. The value on
/// cell k may depend on the field over cells j < k only.
struct AdaptedProcess {
    std::vector<MeasurableSet> cells;
    std::function<double(std::size_t k, const CellHistory&)> rule;
};

/// Y_k = g(W(C_0 u ... u C_{k-1})): the left-point evaluation of g along the running field.
AdaptedProcess running_field_process(std::vector<MeasurableSet> cells, std::function<double(double)> g);

struct ItoResult {
    std::vector<double> values;          // per replica sum_k Y_k W_{C_k}
    std::vector<double> mean_square_integrand;  // E^[Y_k^2] per cell
    double predicted_second_moment = 0.0;       // sum_k E^[Y_k^2] sigma(C_k)
};

/// Left-point Ito sum against the field. Throws ContractError when the rule reads
/// the current or a future cell, InputError when cells overlap.
ItoResult ito_integral(const FieldSimulator& sim, const AdaptedProcess& y);

enum class PartitionRule { EqualMeasure, EqualLength };

struct QuadVarLevel {
    unsigned level = 0;
    std::size_t cells = 0;
    double mesh = 0.0;
    double predicted_second_moment = 0.0;  // 2 sum sigma(A_k)^2
    double empirical_second_moment = 0.0;  // mean of |sigma(A) - sum W_{A_k}^2|^2
    double ratio = 0.0;
    double relative_se = 0.0;              // standard error of the ratio
    double mean_sum_squares = 0.0;
    double variance_sum_squares = 0.0;
    double l2_distance = 0.0;              // sqrt(empirical_second_moment)
};

struct QuadVarReport {
    MeasurableSet set;
    double sigma = 0.0;
    std::vector<QuadVarLevel> levels;
};

/// For each dyadic level n, partitions A into 2^n cells and compares the empirical
/// second moment of sigma(A) - sum_k W_{A_k}^2 with 2 sum_k sigma(A_k)^2.
/// EqualMeasure throws NotRefinableError on atoms; EqualLength is the control path.
QuadVarReport quad_variation_experiment(const FieldSimulator& sim, const MeasurableSet& a,
                                        std::span<const unsigned> levels,
                                        PartitionRule rule = PartitionRule::EqualMeasure);

/// Same experiment on caller-supplied partitions of one set (level = index).
QuadVarReport quad_variation_experiment(const FieldSimulator& sim, std::span<const Partition> partitions);

/// Rows {level, mesh, predicted_2nd_moment, empirical_2nd_moment, ratio}.
void write_quadvar_csv(std::ostream& os, const QuadVarReport& report);

struct C2Function {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

struct ItoFormulaResult {
    unsigned depth = 0;
    std::size_t cells = 0;
    std::vector<double> residuals;  // per replica: LHS - RHS
    double residual_l2 = 0.0;
    Estimate lhs;                   // f(W_A) - f(0)
    Estimate rhs;                   // Ito term + trace term
};

/// Checks f(W_A) - f(0) = int_A f'(W_x) dW_x + 1/2 int_A f''(W_x) dsigma(x) on the
/// equal-measure partition of A into 2^depth cells, with left-point evaluation on
/// the running field for both integrals.
ItoFormulaResult ito_formula_residual(const FieldSimulator& sim, const C2Function& f, const MeasurableSet& a,
                                      unsigned depth);

}  // namespace sigfield
