#pragma once

#include "sigfield/measure_space.hpp"
#include "sigfield/step_function.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sigfield {

/// One basis element phi_k as a sigma-step function.
struct BasisFunction {
    std::size_t index = 0;
    StepFunction function;
};

/// Orthonormal family in L2(sigma) made of step functions on a fixed set of
/// "leaf" cells. Every basis element is constant on each leaf, so all inner
/// products reduce to finite sums over leaf measures.
///
/// Haar kind: leaves are the 2^depth equal-measure dyadic cells of the domain.
/// Index 0 is chi_domain / sqrt(sigma(domain)); index 2^l + i is the Haar function
/// of node i on level l, positive on the left child and negative on the right.
///
/// Indicator kind: phi_j = chi_{leaf_j} / sqrt(sigma(leaf_j)) over the non-null
/// cells of a partition. Works for atomic measures.
class OrthoBasis {
public:
    enum class Kind { Haar, Indicator };

    Kind kind() const noexcept { return kind_; }
    const MeasurableSet& domain() const noexcept { return domain_; }
    /// Dyadic depth (Haar); 0 for the indicator kind.
    unsigned depth() const noexcept { return depth_; }
    std::size_t size() const noexcept { return leaves_.size(); }
    const std::vector<MeasurableSet>& leaves() const noexcept { return leaves_; }
    const std::vector<double>& leaf_measures() const noexcept { return leaf_measures_; }

    /// Value of phi_k on leaf j.
    double value_on_leaf(std::size_t k, std::size_t j) const;
    BasisFunction function(std::size_t k) const;

    /// g_j = sum_k coeffs[k] phi_k(leaf j). O(N) for the Haar kind.
    void synthesize(std::span<const double> coeffs, std::span<double> out) const;
    /// c_k = sum_j phi_k(leaf j) masses[j], i.e. <f, phi_k> when masses[j] = int_{leaf j} f dsigma.
    std::vector<double> analyze(std::span<const double> masses) const;

    /// Leaves whose hull overlaps [lo, hi).
    std::pair<std::size_t, std::size_t> leaf_range(double lo, double hi) const;

private:
    friend OrthoBasis build_haar_basis(const MeasureSpace&, const MeasurableSet&, unsigned);
    friend OrthoBasis build_indicator_basis(const MeasureSpace&, const Partition&);

    Kind kind_ = Kind::Haar;
    MeasurableSet domain_;
    unsigned depth_ = 0;
    std::vector<MeasurableSet> leaves_;
    std::vector<double> leaf_measures_;
    std::vector<double> leaf_lo_;  // hull lower end of each leaf, ascending
    double root_scale_ = 0.0;      // 1/sqrt(sigma(domain))
    std::vector<double> alpha_;    // Haar value on the left child, index k
    std::vector<double> beta_;     // magnitude of the Haar value on the right child
};

/// 2^depth orthonormal step functions on the equal-measure dyadic tree of `domain`.
/// Throws NotRefinableError when the domain carries an atom.
OrthoBasis build_haar_basis(const MeasureSpace& space, const MeasurableSet& domain, unsigned depth);

/// Normalized indicators of the non-null cells of `partition`.
OrthoBasis build_indicator_basis(const MeasureSpace& space, const Partition& partition);

/// m_j = int_{leaf j} f dsigma.
std::vector<double> leaf_masses(const MeasureSpace& space, const StepFunction& f, const OrthoBasis& basis);
std::vector<double> leaf_masses(const MeasureSpace& space, const std::function<double(double)>& f,
                                const OrthoBasis& basis);

/// Coefficients <f, phi_k>_sigma.
std::vector<double> project(const MeasureSpace& space, const StepFunction& f, const OrthoBasis& basis);
std::vector<double> project(const MeasureSpace& space, const std::function<double(double)>& f,
                            const OrthoBasis& basis);

/// sigma(A) - sum_k <chi_A, phi_k>^2. Throws DomainError when A is not inside the domain.
double parseval_residual(const MeasureSpace& space, const MeasurableSet& a, const OrthoBasis& basis);

/// JSON array of {k, cells: [[a, b, coeff], ...]}.
std::string basis_to_json(const OrthoBasis& basis);

}  // namespace sigfield
