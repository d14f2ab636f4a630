#include "sigfield/gaussian_field.hpp"

#include "sigfield/error.hpp"
#include "sigfield/rng.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace sigfield {

FieldSimulator::FieldSimulator(MeasureSpace space, OrthoBasis basis, std::uint64_t seed, std::size_t replicas,
                               unsigned workers, std::uint64_t stream)
    : space_(std::move(space)),
      basis_(std::move(basis)),
      seed_(seed),
      replicas_(replicas),
      workers_(workers),
      stream_(stream) {
    if (replicas_ == 0) throw InputError("replica count must be positive");
}

FieldSimulator FieldSimulator::reseeded(std::uint64_t seed, std::uint64_t stream) const {
    FieldSimulator copy = *this;
    copy.seed_ = seed;
    copy.stream_ = stream;
    return copy;
}

FieldSimulator FieldSimulator::with_replicas(std::size_t replicas) const {
    if (replicas == 0) throw InputError("replica count must be positive");
    FieldSimulator copy = *this;
    copy.replicas_ = replicas;
    return copy;
}

void FieldSimulator::coordinates(std::size_t replica, std::span<double> out) const {
    if (out.size() != basis_.size()) throw InputError("coordinate buffer has the wrong size");
    auto gen = make_stream(seed_, stream_, replica);
    std::normal_distribution<double> normal;
    for (double& z : out) z = normal(gen);
}

std::vector<double> FieldSimulator::coordinates(std::size_t replica) const {
    std::vector<double> out(basis_.size());
    coordinates(replica, out);
    return out;
}

void FieldSimulator::fill_replica(std::size_t replica, std::span<double> z, std::span<double> leaf) const {
    coordinates(replica, z);
    basis_.synthesize(z, leaf);
    const auto& m = basis_.leaf_measures();
    for (std::size_t j = 0; j < leaf.size(); ++j) leaf[j] *= m[j];
}

void FieldSimulator::require_inside(const MeasurableSet& a) const {
    if (!basis_.domain().contains(a)) {
        throw DomainError("set " + a.to_string() + " lies outside the simulation domain " + basis_.domain().to_string());
    }
}

namespace {

LeafFunctional from_masses(const std::vector<double>& masses, const OrthoBasis& basis) {
    LeafFunctional out;
    const auto& m = basis.leaf_measures();
    for (std::size_t j = 0; j < masses.size(); ++j) {
        if (masses[j] != 0.0) {
            out.leaves.push_back(j);
            out.weights.push_back(masses[j] / m[j]);
        }
    }
    return out;
}

}  // namespace

LeafFunctional FieldSimulator::functional(const MeasurableSet& a) const {
    require_inside(a);
    return from_masses(leaf_masses(space_, StepFunction::indicator(a), basis_), basis_);
}

LeafFunctional FieldSimulator::functional(const StepFunction& f) const {
    for (const auto& cell : f.cells()) require_inside(cell.set);
    return from_masses(leaf_masses(space_, f, basis_), basis_);
}

LeafFunctional FieldSimulator::functional(const std::function<double(double)>& f) const {
    return from_masses(leaf_masses(space_, f, basis_), basis_);
}

FieldSample sample_field(const FieldSimulator& sim, std::span<const MeasurableSet> sets) {
    std::vector<LeafFunctional> functionals;
    FieldSample out;
    for (const auto& a : sets) {
        functionals.push_back(sim.functional(a));
        out.labels.push_back(a.to_string());
    }
    auto rows = sim.map_replicas<std::vector<double>>([&](const ReplicaState& s) {
        std::vector<double> row(functionals.size());
        for (std::size_t q = 0; q < functionals.size(); ++q) row[q] = s(functionals[q]);
        return row;
    });
    out.values.assign(sets.size(), std::vector<double>(sim.replicas()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t q = 0; q < sets.size(); ++q) out.values[q][r] = rows[r][q];
    }
    return out;
}

namespace {

std::vector<double> evaluate(const FieldSimulator& sim, const LeafFunctional& f) {
    return sim.map_replicas<double>([&](const ReplicaState& s) { return s(f); });
}

}  // namespace

std::vector<double> wiener_integral(const FieldSimulator& sim, const StepFunction& f) {
    return evaluate(sim, sim.functional(f));
}

std::vector<double> wiener_integral(const FieldSimulator& sim, const std::function<double(double)>& f) {
    return evaluate(sim, sim.functional(f));
}

double expand(std::span<const double> coefficients, std::span<const double> coordinates) {
    if (coefficients.size() > coordinates.size()) throw InputError("more coefficients than coordinates");
    double acc = 0.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k) acc += coefficients[k] * coordinates[k];
    return acc;
}

std::vector<double> GaussianVector::column(std::size_t k) const {
    std::vector<double> out(replicas);
    for (std::size_t r = 0; r < replicas; ++r) out[r] = data[r * dimension + k];
    return out;
}

GaussianVector coordinate_map(const FieldSimulator& sim, std::size_t m) {
    if (m > sim.basis().size()) throw InputError("requested more coordinates than the basis provides");
    auto rows = sim.map_replicas<std::vector<double>>([m](const ReplicaState& s) {
        return std::vector<double>(s.coordinates.begin(), s.coordinates.begin() + static_cast<std::ptrdiff_t>(m));
    });
    GaussianVector out{sim.replicas(), m, {}};
    out.data.reserve(sim.replicas() * m);
    for (const auto& row : rows) out.data.insert(out.data.end(), row.begin(), row.end());
    return out;
}

std::vector<MomentRow> moment_check(const FieldSimulator& sim, const MeasurableSet& a, unsigned max_order) {
    const double sigma_a = sim.space().measure(a);
    if (!(sigma_a > 0.0) || !std::isfinite(sigma_a)) throw InputError("moment_check needs 0 < sigma(A) < inf");
    const auto values = evaluate(sim, sim.functional(a));
    std::vector<MomentRow> rows;
    const auto n = static_cast<double>(values.size());
    for (unsigned order = 1; order <= max_order; ++order) {
        double acc = 0.0;
        for (double v : values) acc += std::pow(v, order);
        const double exact = gaussian_moment(order, sigma_a);
        const double var = gaussian_moment(2 * order, sigma_a) - exact * exact;
        rows.push_back({order, acc / n, exact, std::sqrt(var / n)});
    }
    return rows;
}

CharFunctionalCheck char_functional_check(const FieldSimulator& sim, const StepFunction& f) {
    const auto values = wiener_integral(sim, f);
    std::vector<std::complex<double>> phases(values.size());
    for (std::size_t r = 0; r < values.size(); ++r) phases[r] = std::polar(1.0, values[r]);
    const auto est = estimate_mean(phases);
    return {est.value, std::exp(-0.5 * norm_sq(sim.space(), f)), est.se};
}

void write_sample_csv(std::ostream& os, const FieldSample& sample) {
    os << "replica,query,value\n";
    os.precision(17);
    const std::size_t replicas = sample.values.empty() ? 0 : sample.values.front().size();
    for (std::size_t r = 0; r < replicas; ++r) {
        for (std::size_t q = 0; q < sample.values.size(); ++q) {
            os << r << ",\"" << sample.labels[q] << "\"," << sample.values[q][r] << '\n';
        }
    }
}

void write_summary_csv(std::ostream& os, const FieldSample& sample) {
    os << "query,n,mean,var,m3,m4\n";
    os.precision(17);
    for (std::size_t q = 0; q < sample.values.size(); ++q) {
        const Summary s = summarize(sample.values[q]);
        os << '"' << sample.labels[q] << "\"," << s.n << ',' << s.mean << ',' << s.var << ',' << s.m3 << ',' << s.m4
           << '\n';
    }
}

}  // namespace sigfield
