#include "sigfield/ortho_basis.hpp"

#include "sigfield/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace sigfield {

namespace {

struct HaarNode {
    unsigned level;
    std::size_t index;
};

HaarNode haar_node(std::size_t k) {
    const auto level = static_cast<unsigned>(std::bit_width(k) - 1);
    return {level, k - (std::size_t{1} << level)};
}

}  // namespace

double OrthoBasis::value_on_leaf(std::size_t k, std::size_t j) const {
    if (k >= size() || j >= size()) throw InputError("basis index out of range");
    if (kind_ == Kind::Indicator) return k == j ? 1.0 / std::sqrt(leaf_measures_[j]) : 0.0;
    if (k == 0) return root_scale_;
    const auto node = haar_node(k);
    const std::size_t width = std::size_t{1} << (depth_ - node.level);
    const std::size_t begin = node.index * width;
    if (j < begin || j >= begin + width) return 0.0;
    return j < begin + width / 2 ? alpha_[k] : -beta_[k];
}

BasisFunction OrthoBasis::function(std::size_t k) const {
    if (k >= size()) throw InputError("basis index out of range");
    auto union_of = [this](std::size_t begin, std::size_t end) {
        std::vector<Interval> pieces;
        for (std::size_t j = begin; j < end; ++j) {
            pieces.insert(pieces.end(), leaves_[j].intervals().begin(), leaves_[j].intervals().end());
        }
        return MeasurableSet::from_intervals(std::move(pieces));
    };
    if (kind_ == Kind::Indicator) {
        return {k, StepFunction::indicator(leaves_[k], 1.0 / std::sqrt(leaf_measures_[k]))};
    }
    if (k == 0) return {0, StepFunction::indicator(domain_, root_scale_)};
    const auto node = haar_node(k);
    const std::size_t width = std::size_t{1} << (depth_ - node.level);
    const std::size_t begin = node.index * width;
    return {k, StepFunction({{union_of(begin, begin + width / 2), alpha_[k]},
                             {union_of(begin + width / 2, begin + width), -beta_[k]}})};
}

void OrthoBasis::synthesize(std::span<const double> coeffs, std::span<double> out) const {
    const std::size_t n = size();
    if (coeffs.size() != n || out.size() != n) throw InputError("synthesize: size mismatch");
    if (kind_ == Kind::Indicator) {
        for (std::size_t j = 0; j < n; ++j) out[j] = coeffs[j] / std::sqrt(leaf_measures_[j]);
        return;
    }
    out[0] = root_scale_ * coeffs[0];
    for (unsigned level = 0; level < depth_; ++level) {
        const std::size_t count = std::size_t{1} << level;
        // descending so parents are read before their slots are reused
        for (std::size_t i = count; i-- > 0;) {
            const std::size_t k = count + i;
            const double v = out[i];
            out[2 * i] = v + alpha_[k] * coeffs[k];
            out[2 * i + 1] = v - beta_[k] * coeffs[k];
        }
    }
}

std::vector<double> OrthoBasis::analyze(std::span<const double> masses) const {
    const std::size_t n = size();
    if (masses.size() != n) throw InputError("analyze: size mismatch");
    std::vector<double> coeffs(n);
    if (kind_ == Kind::Indicator) {
        for (std::size_t j = 0; j < n; ++j) coeffs[j] = masses[j] / std::sqrt(leaf_measures_[j]);
        return coeffs;
    }
    std::vector<double> work(masses.begin(), masses.end());
    for (unsigned level = depth_; level-- > 0;) {
        const std::size_t count = std::size_t{1} << level;
        for (std::size_t i = 0; i < count; ++i) {
            const double left = work[2 * i];
            const double right = work[2 * i + 1];
            coeffs[count + i] = alpha_[count + i] * left - beta_[count + i] * right;
            work[i] = left + right;
        }
    }
    coeffs[0] = root_scale_ * work[0];
    return coeffs;
}

std::pair<std::size_t, std::size_t> OrthoBasis::leaf_range(double lo, double hi) const {
    // leaves are disjoint and ordered, so their hull upper ends are ascending too
    auto first = std::upper_bound(leaves_.begin(), leaves_.end(), lo,
                                  [](double v, const MeasurableSet& leaf) { return v < leaf.upper(); });
    auto last = std::lower_bound(leaf_lo_.begin(), leaf_lo_.end(), hi);
    const auto b = static_cast<std::size_t>(first - leaves_.begin());
    const auto e = static_cast<std::size_t>(last - leaf_lo_.begin());
    return {b, std::max(b, e)};
}

OrthoBasis build_haar_basis(const MeasureSpace& space, const MeasurableSet& domain, unsigned depth) {
    if (depth > 24) throw InputError("Haar depth above 24 is not supported");
    const Partition leaves = equal_measure_partition(space, domain, std::size_t{1} << depth);
    OrthoBasis basis;
    basis.kind_ = OrthoBasis::Kind::Haar;
    basis.domain_ = domain;
    basis.depth_ = depth;
    basis.leaves_ = leaves.cells;
    basis.leaf_measures_ = leaves.cell_measures;
    for (const auto& leaf : basis.leaves_) {
        if (leaf.empty()) throw InputError("equal-measure split produced an empty leaf");
        basis.leaf_lo_.push_back(leaf.lower());
    }
    for (double m : basis.leaf_measures_) {
        if (!(m > 0.0)) throw InputError("equal-measure split produced a null leaf");
    }

    const std::size_t n = basis.leaves_.size();
    basis.alpha_.assign(n, 0.0);
    basis.beta_.assign(n, 0.0);
    // node measures, bottom-up, from the leaf measures
    std::vector<double> work = basis.leaf_measures_;
    for (unsigned level = depth; level-- > 0;) {
        const std::size_t count = std::size_t{1} << level;
        for (std::size_t i = 0; i < count; ++i) {
            const double left = work[2 * i];
            const double right = work[2 * i + 1];
            const double total = left + right;
            basis.alpha_[count + i] = std::sqrt(right / (left * total));
            basis.beta_[count + i] = std::sqrt(left / (right * total));
            work[i] = total;
        }
    }
    basis.root_scale_ = 1.0 / std::sqrt(work[0]);
    return basis;
}

OrthoBasis build_indicator_basis(const MeasureSpace&, const Partition& partition) {
    OrthoBasis basis;
    basis.kind_ = OrthoBasis::Kind::Indicator;
    basis.domain_ = partition.parent;
    for (std::size_t j = 0; j < partition.size(); ++j) {
        if (partition.cell_measures[j] > 0.0 && !partition.cells[j].empty()) {
            basis.leaves_.push_back(partition.cells[j]);
            basis.leaf_measures_.push_back(partition.cell_measures[j]);
            basis.leaf_lo_.push_back(partition.cells[j].lower());
        }
    }
    if (basis.leaves_.empty()) throw InputError("indicator basis needs a cell of positive measure");
    return basis;
}

std::vector<double> leaf_masses(const MeasureSpace& space, const StepFunction& f, const OrthoBasis& basis) {
    std::vector<double> masses(basis.size(), 0.0);
    for (const auto& cell : f.cells()) {
        for (const auto& piece : cell.set.intervals()) {
            const auto [begin, end] = basis.leaf_range(piece.lo, piece.hi);
            const MeasurableSet piece_set = MeasurableSet::interval(piece.lo, piece.hi);
            for (std::size_t j = begin; j < end; ++j) {
                masses[j] += cell.coefficient * space.measure(intersect(piece_set, basis.leaves()[j]));
            }
        }
    }
    return masses;
}

std::vector<double> leaf_masses(const MeasureSpace& space, const std::function<double(double)>& f,
                                const OrthoBasis& basis) {
    std::vector<double> masses(basis.size(), 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) masses[j] = space.integrate(f, basis.leaves()[j]);
    return masses;
}

std::vector<double> project(const MeasureSpace& space, const StepFunction& f, const OrthoBasis& basis) {
    return basis.analyze(leaf_masses(space, f, basis));
}

std::vector<double> project(const MeasureSpace& space, const std::function<double(double)>& f,
                            const OrthoBasis& basis) {
    return basis.analyze(leaf_masses(space, f, basis));
}

double parseval_residual(const MeasureSpace& space, const MeasurableSet& a, const OrthoBasis& basis) {
    if (!basis.domain().contains(a)) {
        throw DomainError("set " + a.to_string() + " is not inside the basis domain " + basis.domain().to_string());
    }
    const auto coeffs = project(space, StepFunction::indicator(a), basis);
    double captured = 0.0;
    for (double c : coeffs) captured += c * c;
    return space.measure(a) - captured;
}

std::string basis_to_json(const OrthoBasis& basis) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t k = 0; k < basis.size(); ++k) {
        nlohmann::json cells = nlohmann::json::array();
        const BasisFunction phi = basis.function(k);
        for (const auto& cell : phi.function.cells()) {
            for (const auto& piece : cell.set.intervals()) cells.push_back({piece.lo, piece.hi, cell.coefficient});
        }
        out.push_back({{"k", k}, {"cells", std::move(cells)}});
    }
    return out.dump();
}

}  // namespace sigfield
