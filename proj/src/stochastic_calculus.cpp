#include "sigfield/stochastic_calculus.hpp"

#include "sigfield/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace sigfield {

namespace {

// Replicas are processed in blocks so per-cell accumulators stay small; the
// reduction runs in replica order, so results do not depend on the worker count.
constexpr std::size_t kBlock = 4096;

void require_disjoint(const std::vector<MeasurableSet>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            if (!disjoint(cells[i], cells[j])) {
                throw InputError("cells " + cells[i].to_string() + " and " + cells[j].to_string() + " overlap");
            }
        }
    }
}

std::vector<LeafFunctional> cell_functionals(const FieldSimulator& sim, const std::vector<MeasurableSet>& cells) {
    std::vector<LeafFunctional> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(sim.functional(c));
    return out;
}

void fill_cells(const ReplicaState& s, const std::vector<LeafFunctional>& fs, std::vector<double>& w,
                std::vector<double>& prefix) {
    w.resize(fs.size());
    prefix.resize(fs.size() + 1);
    prefix[0] = 0.0;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        w[k] = s(fs[k]);
        prefix[k + 1] = prefix[k] + w[k];
    }
}

}  // namespace

std::vector<double> simple_integral(const FieldSimulator& sim, const StepFunction& f) {
    const auto functional = sim.functional(f);
    return sim.map_replicas<double>([&](const ReplicaState& s) { return s(functional); });
}

double CellHistory::operator[](std::size_t j) const {
    if (j >= current_) {
        throw ContractError("adaptedness violated: value on cell " + std::to_string(current_) + " reads cell " +
                            std::to_string(j));
    }
    return values_[j];
}

AdaptedProcess running_field_process(std::vector<MeasurableSet> cells, std::function<double(double)> g) {
    return {std::move(cells), [g = std::move(g)](std::size_t, const CellHistory& h) { return g(h.partial_sum()); }};
}

ItoResult ito_integral(const FieldSimulator& sim, const AdaptedProcess& y) {
    if (!y.rule) throw InputError("adapted process has no evaluation rule");
    require_disjoint(y.cells);
    const auto fs = cell_functionals(sim, y.cells);
    const std::size_t p = fs.size();

    struct Row {
        double value;
        std::vector<double> y2;
    };
    ItoResult out;
    out.values.reserve(sim.replicas());
    std::vector<double> y2_sum(p, 0.0);
    for (std::size_t begin = 0; begin < sim.replicas(); begin += kBlock) {
        const std::size_t end = std::min(sim.replicas(), begin + kBlock);
        auto rows = sim.map_replica_range<Row>(begin, end, [&](const ReplicaState& s) {
            thread_local std::vector<double> w, prefix;
            fill_cells(s, fs, w, prefix);
            Row row{0.0, std::vector<double>(p)};
            for (std::size_t k = 0; k < p; ++k) {
                const double yk = y.rule(k, CellHistory(w, prefix, k));
                row.value += yk * w[k];
                row.y2[k] = yk * yk;
            }
            return row;
        });
        for (const auto& row : rows) {
            out.values.push_back(row.value);
            for (std::size_t k = 0; k < p; ++k) y2_sum[k] += row.y2[k];
        }
    }
    const auto n = static_cast<double>(sim.replicas());
    out.mean_square_integrand.resize(p);
    for (std::size_t k = 0; k < p; ++k) {
        out.mean_square_integrand[k] = y2_sum[k] / n;
        out.predicted_second_moment += out.mean_square_integrand[k] * sim.space().measure(y.cells[k]);
    }
    return out;
}

namespace {

QuadVarReport run_quadvar(const FieldSimulator& sim, const MeasurableSet& parent, std::span<const Partition> parts,
                          std::span<const unsigned> level_labels) {
    QuadVarReport report;
    report.set = parent;
    report.sigma = sim.space().measure(parent);
    std::vector<std::vector<LeafFunctional>> fs;
    for (const auto& part : parts) fs.push_back(cell_functionals(sim, part.cells));

    auto sums = sim.map_replicas<std::vector<double>>([&](const ReplicaState& s) {
        std::vector<double> out(fs.size());
        for (std::size_t l = 0; l < fs.size(); ++l) {
            double acc = 0.0;
            for (const auto& f : fs[l]) {
                const double w = s(f);
                acc += w * w;
            }
            out[l] = acc;
        }
        return out;
    });

    const auto n = static_cast<double>(sim.replicas());
    for (std::size_t l = 0; l < parts.size(); ++l) {
        std::vector<double> s(sums.size()), d2(sums.size());
        for (std::size_t r = 0; r < sums.size(); ++r) {
            s[r] = sums[r][l];
            const double d = report.sigma - s[r];
            d2[r] = d * d;
        }
        const Summary ss = summarize(s);
        const Summary sd = summarize(d2);
        QuadVarLevel row;
        row.level = level_labels[l];
        row.cells = parts[l].size();
        row.mesh = parts[l].mesh();
        row.predicted_second_moment = 2.0 * lower_variation(parts[l]);
        row.empirical_second_moment = sd.mean;
        row.ratio = row.predicted_second_moment > 0.0 ? sd.mean / row.predicted_second_moment : 0.0;
        row.relative_se =
            row.predicted_second_moment > 0.0 ? std::sqrt(sd.var / n) / row.predicted_second_moment : 0.0;
        row.mean_sum_squares = ss.mean;
        row.variance_sum_squares = ss.var;
        row.l2_distance = std::sqrt(sd.mean);
        report.levels.push_back(row);
    }
    return report;
}

}  // namespace

QuadVarReport quad_variation_experiment(const FieldSimulator& sim, const MeasurableSet& a,
                                        std::span<const unsigned> levels, PartitionRule rule) {
    std::vector<Partition> parts;
    for (unsigned n : levels) {
        if (n > 30) throw InputError("quadratic-variation level too deep");
        const std::size_t cells = std::size_t{1} << n;
        parts.push_back(rule == PartitionRule::EqualMeasure ? equal_measure_partition(sim.space(), a, cells)
                                                            : equal_length_partition(sim.space(), a, cells));
    }
    return run_quadvar(sim, a, parts, levels);
}

QuadVarReport quad_variation_experiment(const FieldSimulator& sim, std::span<const Partition> partitions) {
    if (partitions.empty()) throw InputError("no partitions given");
    std::vector<unsigned> labels(partitions.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<unsigned>(i);
    return run_quadvar(sim, partitions.front().parent, partitions, labels);
}

void write_quadvar_csv(std::ostream& os, const QuadVarReport& report) {
    os << "level,mesh,predicted_2nd_moment,empirical_2nd_moment,ratio\n";
    os.precision(17);
    for (const auto& row : report.levels) {
        os << row.level << ',' << row.mesh << ',' << row.predicted_second_moment << ','
           << row.empirical_second_moment << ',' << row.ratio << '\n';
    }
}

ItoFormulaResult ito_formula_residual(const FieldSimulator& sim, const C2Function& f, const MeasurableSet& a,
                                      unsigned depth) {
    if (!f.f || !f.df || !f.d2f) throw InputError("f, f' and f'' must all be provided");
    if (depth > 24) throw InputError("partition depth too large");
    const Partition part = equal_measure_partition(sim.space(), a, std::size_t{1} << depth);
    const auto fs = cell_functionals(sim, part.cells);
    const auto& sig = part.cell_measures;
    const double f0 = f.f(0.0);

    struct Row {
        double lhs, rhs;
    };
    auto rows = sim.map_replicas<Row>([&](const ReplicaState& s) {
        thread_local std::vector<double> w, prefix;
        fill_cells(s, fs, w, prefix);
        double ito = 0.0, trace = 0.0;
        for (std::size_t k = 0; k < fs.size(); ++k) {
            ito += f.df(prefix[k]) * w[k];
            trace += f.d2f(prefix[k]) * sig[k];
        }
        return Row{f.f(prefix.back()) - f0, ito + 0.5 * trace};
    });

    ItoFormulaResult out;
    out.depth = depth;
    out.cells = part.size();
    std::vector<double> lhs(rows.size()), rhs(rows.size());
    out.residuals.resize(rows.size());
    double sq = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        lhs[r] = rows[r].lhs;
        rhs[r] = rows[r].rhs;
        out.residuals[r] = lhs[r] - rhs[r];
        sq += out.residuals[r] * out.residuals[r];
    }
    out.residual_l2 = std::sqrt(sq / static_cast<double>(rows.size()));
    out.lhs = estimate_mean(lhs);
    out.rhs = estimate_mean(rhs);
    return out;
}

}  // namespace sigfield
