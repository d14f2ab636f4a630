#pragma once

#include "sigfield/measure_space.hpp"

#include <utility>
#include <vector>

namespace sigfield {

/// Simple function sum_k c_k chi_{A_k} with pairwise disjoint A_k.
class StepFunction {
public:
    struct Cell {
        MeasurableSet set;
        double coefficient = 0.0;
    };

    StepFunction() = default;
    /// Throws InputError when two cells overlap.
    explicit StepFunction(std::vector<Cell> cells);

    static StepFunction indicator(MeasurableSet a, double coefficient = 1.0);

    const std::vector<Cell>& cells() const noexcept { return cells_; }
    bool empty() const noexcept { return cells_.empty(); }

    double operator()(double x) const;
    /// Union of the supports.
    MeasurableSet support() const;

    StepFunction scaled(double factor) const;

private:
    std::vector<Cell> cells_;
};

/// ||f||^2 in L2(sigma) = sum c_k^2 sigma(A_k).
double norm_sq(const MeasureSpace& space, const StepFunction& f);

/// <f, g> in L2(sigma), computed from measures of cell intersections.
double inner(const MeasureSpace& space, const StepFunction& f, const StepFunction& g);

}  // namespace sigfield
