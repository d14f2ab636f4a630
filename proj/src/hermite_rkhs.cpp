#include "sigfield/hermite_rkhs.hpp"

#include "sigfield/error.hpp"
#include "sigfield/ortho_basis.hpp"
#include "sigfield/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>

namespace sigfield {

std::vector<double> hermite_values(unsigned n, double x) {
    std::vector<double> h(n + 1);
    h[0] = 1.0;
    if (n >= 1) h[1] = x;
    for (unsigned k = 1; k < n; ++k) h[k + 1] = x * h[k] - k * h[k - 1];
    return h;
}

double hermite_eval(unsigned n, double x) { return hermite_values(n, x).back(); }

double HermiteSeries::operator()(double x) const {
    if (coefficients.empty()) return 0.0;
    const auto h = hermite_values(degree(), x);
    double acc = 0.0;
    for (std::size_t n = 0; n < coefficients.size(); ++n) acc += coefficients[n] * h[n];
    return acc;
}

unsigned HermiteSeries::degree() const noexcept {
    return coefficients.empty() ? 0 : static_cast<unsigned>(coefficients.size() - 1);
}

double BracketSeries::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t n = coefficients.size(); n-- > 0;) acc = acc * x + coefficients[n];
    return acc;
}

BracketSeries bracket_transform(const HermiteSeries& psi) {
    BracketSeries out;
    double factorial = 1.0;
    for (std::size_t n = 0; n < psi.coefficients.size(); ++n) {
        if (n > 0) factorial *= static_cast<double>(n);
        out.coefficients.push_back(factorial * psi.coefficients[n] * psi.coefficients[n]);
    }
    return out;
}

double mehler_moment(unsigned n, unsigned k, double c) {
    if (!(std::abs(c) < 1.0)) throw InputError("mehler_moment needs |c| < 1");
    static const QuadratureRule rule = gauss_hermite_rule(20);
    const double s = std::sqrt(1.0 - c * c);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double hx = hermite_eval(n, rule.nodes[i]);
        double inner = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            inner += rule.weights[j] * hermite_eval(k, c * rule.nodes[i] + s * rule.nodes[j]);
        }
        acc += rule.weights[i] * hx * inner;
    }
    return acc;
}

double hermite_inner(unsigned n, unsigned m, std::size_t nodes) {
    const auto rule = gauss_hermite_rule(nodes);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        acc += rule.weights[i] * hermite_eval(n, rule.nodes[i]) * hermite_eval(m, rule.nodes[i]);
    }
    return acc;
}

PsiCovariance psi_covariance_check(const FieldSimulator& sim, const HermiteSeries& psi, const MeasurableSet& a,
                                   const MeasurableSet& b) {
    if (psi.degree() > 8) throw InputError("psi degree is capped at 8");
    const double sa = sim.space().measure(a), sb = sim.space().measure(b);
    if (!(sa > 0.0) || !(sb > 0.0) || !std::isfinite(sa) || !std::isfinite(sb)) {
        throw InputError("psi_covariance_check needs 0 < sigma(A), sigma(B) < inf");
    }
    const auto fa = sim.functional(a), fb = sim.functional(b);
    const double na = 1.0 / std::sqrt(sa), nb = 1.0 / std::sqrt(sb);
    const auto products =
        sim.map_replicas<double>([&](const ReplicaState& s) { return psi(s(fa) * na) * psi(s(fb) * nb); });
    PsiCovariance out;
    out.mc = estimate_mean(products);
    out.correlation = sim.space().measure(intersect(a, b)) * na * nb;
    out.prediction = bracket_transform(psi)(out.correlation);
    return out;
}

double rkhs_kernel_eval(const MeasureSpace& space, const MeasurableSet& a, const MeasurableSet& b) {
    const double dist = space.measure(a) + space.measure(b) - 2.0 * space.measure(intersect(a, b));
    return std::exp(-0.5 * dist);
}

std::vector<double> RkhsKernel::gram(std::span<const MeasurableSet> sets) const {
    const std::size_t n = sets.size();
    std::vector<double> g(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) g[i * n + j] = g[j * n + i] = (*this)(sets[i], sets[j]);
    }
    return g;
}

double min_eigenvalue(std::span<const double> matrix, std::size_t n) {
    if (matrix.size() != n * n) throw InputError("matrix size does not match n");
    if (n == 0) return 0.0;
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = matrix[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

FieldFunctional constant_functional(std::complex<double> value) {
    return [value](const ReplicaState&) { return value; };
}

FieldFunctional exp_functional(const FieldSimulator& sim, const MeasurableSet& b, double s) {
    auto f = sim.functional(b);
    return [f = std::move(f), s](const ReplicaState& st) { return std::polar(1.0, s * st(f)); };
}

std::vector<ComplexEstimate> generalized_fourier(const FieldSimulator& sim, const FieldFunctional& f,
                                                 std::span<const MeasurableSet> sets) {
    std::vector<LeafFunctional> fs;
    for (const auto& a : sets) fs.push_back(sim.functional(a));
    auto rows = sim.map_replicas<std::vector<std::complex<double>>>([&](const ReplicaState& s) {
        const auto fv = f(s);
        std::vector<std::complex<double>> row(fs.size());
        for (std::size_t q = 0; q < fs.size(); ++q) row[q] = fv * std::polar(1.0, s(fs[q]));
        return row;
    });
    std::vector<ComplexEstimate> out;
    std::vector<std::complex<double>> col(rows.size());
    for (std::size_t q = 0; q < fs.size(); ++q) {
        for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][q];
        out.push_back(estimate_mean(col));
    }
    return out;
}

double rk_sigma_kernel(const MeasureSpace& space, double t, double s) {
    if (t < 0.0 || s < 0.0) throw InputError("rk_sigma_kernel needs t, s >= 0");
    return space.measure(0.0, std::min(t, s));
}

ShiftCheck cameron_martin_shift_check(const FieldSimulator& sim, const CoordinateFunctional& f_of_x,
                                      std::span<const double> shift) {
    if (shift.size() > sim.basis().size()) throw InputError("shift has more coordinates than the basis");
    const std::vector<double> c(shift.begin(), shift.end());
    double norm_sq = 0.0;
    for (double v : c) norm_sq += v * v;

    struct Row {
        std::complex<double> lhs, rhs;
        double weight;
    };
    auto rows = sim.map_replicas<Row>([&](const ReplicaState& s) {
        thread_local std::vector<double> shifted;
        shifted.assign(s.coordinates.begin(), s.coordinates.end());
        double dot = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            shifted[k] += c[k];
            dot += c[k] * s.coordinates[k];
        }
        const double w = std::exp(-0.5 * norm_sq + dot);
        return Row{f_of_x(shifted), f_of_x(s.coordinates) * w, w};
    });

    std::vector<std::complex<double>> lhs(rows.size()), rhs(rows.size()), diff(rows.size());
    double sw = 0.0, sw2 = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        lhs[r] = rows[r].lhs;
        rhs[r] = rows[r].rhs;
        diff[r] = lhs[r] - rhs[r];
        sw += rows[r].weight;
        sw2 += rows[r].weight * rows[r].weight;
    }
    ShiftCheck out;
    out.lhs = estimate_mean(lhs);
    out.rhs = estimate_mean(rhs);
    out.combined_se = estimate_mean(diff).se;
    out.norm_sq = norm_sq;
    out.effective_sample_size = sw2 > 0.0 ? sw * sw / sw2 : 0.0;
    out.degenerate_weights = out.effective_sample_size < 0.1 * static_cast<double>(rows.size());
    if (out.degenerate_weights) {
        out.warning = "importance weights are degenerate: effective sample size " +
                      std::to_string(out.effective_sample_size) + " of " + std::to_string(rows.size()) +
                      " replicas; ||f||^2 = " + std::to_string(norm_sq);
    }
    return out;
}

ShiftCheck cameron_martin_shift_check(const FieldSimulator& sim, const CoordinateFunctional& f_of_x,
                                      const StepFunction& shift) {
    for (const auto& cell : shift.cells()) {
        if (!sim.basis().domain().contains(cell.set)) throw DomainError("shift leaves the simulation domain");
    }
    const auto c = project(sim.space(), shift, sim.basis());
    return cameron_martin_shift_check(sim, f_of_x, std::span<const double>(c));
}

void write_identity_csv(std::ostream& os, std::span<const IdentityRow> rows) {
    os << "identity,lhs,rhs,se,pass\n";
    os.precision(17);
    for (const auto& row : rows) {
        os << '"' << row.identity << "\"," << row.lhs << ',' << row.rhs << ',' << row.se << ','
           << (row.pass ? "true" : "false") << '\n';
    }
}

}  // namespace sigfield
