#include "sigfield/step_function.hpp"

#include "sigfield/error.hpp"

namespace sigfield {

StepFunction::StepFunction(std::vector<Cell> cells) : cells_(std::move(cells)) {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        for (std::size_t j = i + 1; j < cells_.size(); ++j) {
            if (!disjoint(cells_[i].set, cells_[j].set)) {
                throw InputError("step function cells " + cells_[i].set.to_string() + " and " +
                                 cells_[j].set.to_string() + " overlap");
            }
        }
    }
}

StepFunction StepFunction::indicator(MeasurableSet a, double coefficient) {
    return StepFunction({{std::move(a), coefficient}});
}

double StepFunction::operator()(double x) const {
    for (const auto& c : cells_) {
        if (c.set.contains(x)) return c.coefficient;
    }
    return 0.0;
}

MeasurableSet StepFunction::support() const {
    MeasurableSet out;
    for (const auto& c : cells_) out = unite(out, c.set);
    return out;
}

StepFunction StepFunction::scaled(double factor) const {
    StepFunction out = *this;
    for (auto& c : out.cells_) c.coefficient *= factor;
    return out;
}

double norm_sq(const MeasureSpace& space, const StepFunction& f) {
    double total = 0.0;
    for (const auto& c : f.cells()) total += c.coefficient * c.coefficient * space.measure(c.set);
    return total;
}

double inner(const MeasureSpace& space, const StepFunction& f, const StepFunction& g) {
    double total = 0.0;
    for (const auto& a : f.cells()) {
        for (const auto& b : g.cells()) {
            total += a.coefficient * b.coefficient * space.measure(intersect(a.set, b.set));
        }
    }
    return total;
}

}  // namespace sigfield
