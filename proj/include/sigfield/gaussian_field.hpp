#pragma once

#include "sigfield/measure_space.hpp"
#include "sigfield/ortho_basis.hpp"
#include "sigfield/parallel.hpp"
#include "sigfield/stats.hpp"
#include "sigfield/step_function.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sigfield {

/// Linear functional of the truncated field expressed on basis leaves:
/// value = sum_j weight_j * W(leaf_j). For f a function, weight_j is the sigma-average
/// of f over leaf j, which makes the value equal sum_k <f, phi_k> Z_k exactly.
struct LeafFunctional {
    std::vector<std::size_t> leaves;
    std::vector<double> weights;

    double apply(std::span<const double> leaf_values) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < leaves.size(); ++i) acc += weights[i] * leaf_values[leaves[i]];
        return acc;
    }
};

/// Per-replica view handed to map_replicas callbacks.
struct ReplicaState {
    std::size_t replica = 0;
    std::span<const double> coordinates;  // Z_k = X_k, k < N
    std::span<const double> leaf_values;  // W on each leaf cell

    double operator()(const LeafFunctional& f) const { return f.apply(leaf_values); }
};

/// Truncated Karhunen-Loeve simulator: W_A = sum_{k<N} (int_A phi_k dsigma) Z_k with
/// N = basis.size() and i.i.d. standard normal Z_k. Replica r draws its Z from the
/// stream (seed, stream, r), so any subset of replicas can be regenerated alone and
/// results do not depend on the worker count.
class FieldSimulator {
public:
    FieldSimulator(MeasureSpace space, OrthoBasis basis, std::uint64_t seed, std::size_t replicas,
                   unsigned workers = 0, std::uint64_t stream = 0);

    const MeasureSpace& space() const noexcept { return space_; }
    const OrthoBasis& basis() const noexcept { return basis_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }
    std::size_t replicas() const noexcept { return replicas_; }
    unsigned workers() const noexcept { return workers_; }

    /// Copy with a different seed/stream (same space and basis).
    FieldSimulator reseeded(std::uint64_t seed, std::uint64_t stream = 0) const;
    FieldSimulator with_replicas(std::size_t replicas) const;

    void coordinates(std::size_t replica, std::span<double> out) const;
    std::vector<double> coordinates(std::size_t replica) const;

    /// Functional for W_A. Throws DomainError when A is not inside the basis domain.
    LeafFunctional functional(const MeasurableSet& a) const;
    /// Functional for W(f).
    LeafFunctional functional(const StepFunction& f) const;
    LeafFunctional functional(const std::function<double(double)>& f) const;

    template <class T, class Fn>
    std::vector<T> map_replicas(Fn&& fn) const {
        return map_replica_range<T>(0, replicas_, std::forward<Fn>(fn));
    }

    /// fn applied to replicas [begin, end); result i belongs to replica begin + i.
    template <class T, class Fn>
    std::vector<T> map_replica_range(std::size_t begin, std::size_t end, Fn&& fn) const {
        const std::size_t n = basis_.size();
        return parallel_map<T>(end - begin, workers_, [&](std::size_t i) {
            thread_local std::vector<double> z;
            thread_local std::vector<double> leaf;
            z.resize(n);
            leaf.resize(n);
            fill_replica(begin + i, z, leaf);
            return fn(ReplicaState{begin + i, z, leaf});
        });
    }

private:
    void fill_replica(std::size_t replica, std::span<double> z, std::span<double> leaf) const;
    void require_inside(const MeasurableSet& a) const;

    MeasureSpace space_;
    OrthoBasis basis_;
    std::uint64_t seed_;
    std::size_t replicas_;
    unsigned workers_;
    std::uint64_t stream_;
};

/// Values of several queries across replicas: values[query][replica].
struct FieldSample {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;
};

/// W_A for each set, per replica.
FieldSample sample_field(const FieldSimulator& sim, std::span<const MeasurableSet> sets);

/// W(f) per replica.
std::vector<double> wiener_integral(const FieldSimulator& sim, const StepFunction& f);
std::vector<double> wiener_integral(const FieldSimulator& sim, const std::function<double(double)>& f);

/// Direct evaluation of sum_k coefficients[k] * coordinates[k].
double expand(std::span<const double> coefficients, std::span<const double> coordinates);

/// First m coordinates X_k = W(phi_k) of every replica, row-major.
struct GaussianVector {
    std::size_t replicas = 0;
    std::size_t dimension = 0;
    std::vector<double> data;

    double operator()(std::size_t replica, std::size_t k) const { return data[replica * dimension + k]; }
    std::vector<double> column(std::size_t k) const;
};

GaussianVector coordinate_map(const FieldSimulator& sim, std::size_t m);

struct MomentRow {
    unsigned order = 0;
    double sample = 0.0;
    double exact = 0.0;
    double standard_error = 0.0;  // from the exact law: sqrt((E W^2k - (E W^k)^2) / R)
};

/// Sample moments of W_A against (2k-1)!! sigma(A)^k (even) and 0 (odd).
std::vector<MomentRow> moment_check(const FieldSimulator& sim, const MeasurableSet& a, unsigned max_order);

struct CharFunctionalCheck {
    std::complex<double> estimate;
    double exact = 0.0;  // exp(-||f||^2 / 2)
    double standard_error = 0.0;
};

/// MC estimate of E exp(i W(f)) against exp(-||f||^2_sigma / 2).
CharFunctionalCheck char_functional_check(const FieldSimulator& sim, const StepFunction& f);

/// One row per (replica, query).
void write_sample_csv(std::ostream& os, const FieldSample& sample);
/// Rows {query, n, mean, var, m3, m4}.
void write_summary_csv(std::ostream& os, const FieldSample& sample);

}  // namespace sigfield
