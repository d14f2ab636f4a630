#include "sigfield/spectral_process.hpp"

#include "sigfield/error.hpp"
#include "sigfield/rng.hpp"
#include "sigfield/stats.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace sigfield {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(x)/x with a series near 0.
double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

// Integral of an even integrand g against the density over [a, b] u [-b, -a], 0 <= a < b.
double both_sides(const MeasureSpace& space, const std::function<double(double)>& g, double a, double b) {
    return space.integrate_density(g, a, b) + space.integrate_density(g, -b, -a);
}

}  // namespace

// ---------------------------------------------------------------------------

SpectralMeasure::SpectralMeasure(MeasureSpace space, std::string name, unsigned order, double symmetry_tol)
    : space_(std::move(space)), name_(std::move(name)), order_(order) {
    static const double probes[] = {0.0, 0.25, 0.5, 1.0, 2.0, 3.5, 5.0, 10.0, 50.0};
    for (double a : probes) {
        for (double b : probes) {
            if (b <= a) continue;
            const double right = space_.measure(MeasurableSet::interval(a, b));
            // The exact mirror of [a, b) is (-b, -a]: move atom mass across the endpoints.
            double left = space_.measure(MeasurableSet::interval(-b, -a));
            for (const auto& atom : space_.atoms()) {
                if (atom.location == -b) left -= atom.mass;
                if (atom.location == -a) left += atom.mass;
            }
            const double defect = std::abs(right - left);
            symmetry_defect_ = std::max(symmetry_defect_, defect);
            if (defect > symmetry_tol * std::max(1.0, std::max(right, left))) {
                std::ostringstream os;
                os << "spectral measure '" << name_ << "' is not symmetric: sigma([" << a << ", " << b
                   << ")) = " << right << " but sigma([" << -b << ", " << -a << ")) = " << left;
                throw SpectralError(os.str());
            }
        }
    }
    // Atoms away from the probe grid: compare the atom lists directly as well.
    for (const auto& atom : space_.atoms()) {
        if (atom.location == 0.0 || atom.mass == 0.0) continue;
        double mirror = 0.0;
        for (const auto& other : space_.atoms()) {
            if (other.location == -atom.location) mirror += other.mass;
        }
        if (std::abs(mirror - atom.mass) > symmetry_tol * std::max(1.0, atom.mass)) {
            throw SpectralError("spectral measure '" + name_ + "' has an atom without a mirror image");
        }
    }
    const auto sweep = temperedness_sweep(space_, order_);
    if (!sweep.converged) {
        throw SpectralError("spectral measure '" + name_ + "' is not tempered of order " + std::to_string(order_));
    }
}

// ---------------------------------------------------------------------------

VarianceFunction::VarianceFunction(const SpectralMeasure& spec) : VarianceFunction(spec, Options{}) {}

VarianceFunction::VarianceFunction(const SpectralMeasure& spec, Options options)
    : spec_(std::make_shared<SpectralMeasure>(spec)), options_(options), cache_(std::make_shared<Cache>()) {}

VarianceValue VarianceFunction::evaluate(double t) const {
    t = std::abs(t);
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->values.find(t);
        if (it != cache_->values.end()) return it->second;
    }
    const VarianceValue v = compute(t);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->values.emplace(t, v);
    return v;
}

VarianceValue VarianceFunction::compute(double t) const {
    VarianceValue out;
    if (t == 0.0) return out;
    const MeasureSpace& space = spec_->space();

    double atoms = 0.0;
    for (const auto& atom : space.atoms()) {
        const double u = atom.location;
        atoms += atom.mass * t * t * std::pow(sinc(0.5 * u * t), 2);
    }
    if (space.density().is_zero()) {
        out.value = atoms;
        return out;
    }

    // |u| < U0: 4 sin^2(ut/2)/u^2 = t^2 sinc^2(ut/2), no cancellation near 0.
    const double u0 = std::max(1.0, 2.0 * kPi / t);
    const double inner =
        both_sides(space, [t](double u) { return t * t * std::pow(sinc(0.5 * u * t), 2); }, 0.0, u0);

    // |u| >= U0: 2/u^2 - 2 cos(ut)/u^2. The first part is integrated to infinity
    // after u = 1/s; the second by a doubling sweep with half-period panels.
    const Density& m = space.density();
    std::vector<double> cuts{0.0, 1.0 / u0};
    for (double bp : m.breakpoints()) {
        if (std::abs(bp) > u0 && std::isfinite(bp)) cuts.push_back(1.0 / std::abs(bp));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double smooth_tail = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        smooth_tail += integrate([&m](double s) { return m(1.0 / s) + m(-1.0 / s); }, cuts[i], cuts[i + 1],
                                 space.quadrature());
    }
    smooth_tail *= 2.0;

    const auto osc = [t](double u) { return -2.0 * std::cos(u * t) / (u * u); };
    const double panel = kPi / t;
    double osc_total = 0.0;
    double lo = u0;
    int quiet = 0;
    out.converged = false;
    while (lo < options_.cutoff_cap) {
        const double hi = std::min(2.0 * lo, options_.cutoff_cap);
        double shell = 0.0;
        const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / panel));
        const double width = (hi - lo) / static_cast<double>(panels);
        for (std::size_t k = 0; k < panels; ++k) {
            const double a = lo + static_cast<double>(k) * width;
            shell += both_sides(space, osc, a, k + 1 == panels ? hi : a + width);
        }
        osc_total += shell;
        out.cutoff = hi;
        out.last_shell = shell;
        const double scale = std::abs(inner + smooth_tail + osc_total + atoms);
        quiet = std::abs(shell) <= options_.rel_tol * scale ? quiet + 1 : 0;
        lo = hi;
        if (quiet >= 2) {
            out.converged = true;
            break;
        }
    }
    out.value = inner + smooth_tail + osc_total + atoms;
    out.achieved_rel_tol = out.value != 0.0 ? std::abs(out.last_shell) / std::abs(out.value) : 0.0;
    if (!std::isfinite(out.value)) throw QuadratureError("r(t) is not finite");
    return out;
}

double VarianceFunction::covariance(double t, double s) const {
    return 0.5 * ((*this)(t) + (*this)(s) - (*this)(s - t));
}

bool VarianceFunction::is_additive(double tol) const {
    const double r1 = (*this)(1.0);
    for (double t : {0.25, 0.5, 2.0, 3.0}) {
        if (std::abs((*this)(t) - t * r1) > tol * std::max(1.0, t * r1)) return false;
    }
    return true;
}

double variance_r(const VarianceFunction& r, double t) { return r(t); }

double covariance(const VarianceFunction& r, double t, double s) { return r.covariance(t, s); }

std::vector<double> covariance_matrix(const VarianceFunction& r, std::span<const double> times) {
    const std::size_t n = times.size();
    std::vector<double> c(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) c[i * n + j] = c[j * n + i] = r.covariance(times[i], times[j]);
    }
    return c;
}

// ---------------------------------------------------------------------------

std::vector<double> PathEnsemble::column(std::size_t k) const {
    std::vector<double> out(replicas);
    for (std::size_t r = 0; r < replicas; ++r) out[r] = (*this)(r, k);
    return out;
}

std::string construction_name(PathEnsemble::Construction c) {
    return c == PathEnsemble::Construction::KolmogorovMarkov ? "kolmogorov-markov" : "covariance-cholesky";
}

namespace {

void check_grid(std::span<const double> grid) {
    if (grid.empty() || grid.front() != 0.0) throw InputError("path grid must start at 0");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1]) || !std::isfinite(grid[k])) {
            throw InputError("path grid must be strictly increasing and finite");
        }
    }
}

PathEnsemble assemble(std::span<const double> grid, std::size_t replicas, PathEnsemble::Construction c,
                      const std::vector<std::vector<double>>& rows) {
    PathEnsemble out;
    out.grid.assign(grid.begin(), grid.end());
    out.replicas = replicas;
    out.construction = c;
    out.values.reserve(replicas * grid.size());
    for (const auto& row : rows) out.values.insert(out.values.end(), row.begin(), row.end());
    return out;
}

}  // namespace

PathEnsemble sample_paths_kolmogorov(const VarianceFunction& r, std::span<const double> grid, std::size_t replicas,
                                     std::uint64_t seed, unsigned workers) {
    check_grid(grid);
    if (replicas == 0) throw InputError("replica count must be positive");
    std::vector<double> sd(grid.size(), 0.0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double v = r(grid[k] - grid[k - 1]);
        if (!(v > 1e-14)) {
            std::ostringstream os;
            os << "r(" << grid[k] - grid[k - 1] << ") = " << v << " on a positive step";
            throw DegenerateStepError(os.str());
        }
        sd[k] = std::sqrt(v);
    }
    const auto key = stream_key("kolmogorov");
    auto rows = parallel_map<std::vector<double>>(replicas, workers, [&](std::size_t rep) {
        auto gen = make_stream(seed, key, rep);
        std::normal_distribution<double> normal;
        std::vector<double> path(grid.size(), 0.0);
        for (std::size_t k = 1; k < grid.size(); ++k) path[k] = path[k - 1] + sd[k] * normal(gen);
        return path;
    });
    return assemble(grid, replicas, PathEnsemble::Construction::KolmogorovMarkov, rows);
}

PathEnsemble sample_paths_covariance(const VarianceFunction& r, std::span<const double> grid, std::size_t replicas,
                                     std::uint64_t seed, unsigned workers) {
    check_grid(grid);
    if (replicas == 0) throw InputError("replica count must be positive");
    const std::size_t n = grid.size() - 1;
    const auto cov = covariance_matrix(r, grid.subspan(1));
    Eigen::MatrixXd c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) = cov[i * n + j];
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
        const double eps = 1e-12 * c.trace();
        llt.compute(c + eps * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() != Eigen::Success) {
            throw SpectralError("covariance matrix on the grid is not positive semidefinite within 1e-12 * trace");
        }
    }
    const Eigen::MatrixXd l = llt.matrixL();
    const auto key = stream_key("cholesky");
    auto rows = parallel_map<std::vector<double>>(replicas, workers, [&](std::size_t rep) {
        auto gen = make_stream(seed, key, rep);
        std::normal_distribution<double> normal;
        std::vector<double> z(n);
        for (double& v : z) v = normal(gen);
        std::vector<double> path(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += l(i, j) * z[j];
            path[i + 1] = acc;
        }
        return path;
    });
    return assemble(grid, replicas, PathEnsemble::Construction::CovarianceCholesky, rows);
}

std::vector<double> empirical_covariance(const PathEnsemble& paths) {
    const std::size_t n = paths.grid.size();
    std::vector<std::vector<double>> cols(n);
    for (std::size_t k = 0; k < n; ++k) cols[k] = paths.column(k);
    std::vector<double> out(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) out[i * n + j] = out[j * n + i] = sample_covariance(cols[i], cols[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------

FourierTestFunction indicator_transform(double t) {
    FourierTestFunction out;
    std::ostringstream os;
    os << "chi[0," << t << "]";
    out.label = os.str();
    // (1 - e^{-iut}) / (iu) = t e^{-iut/2} sinc(ut/2)
    out.transform = [t](double u) { return t * sinc(0.5 * u * t) * std::polar(1.0, -0.5 * u * t); };
    out.indicator_time = t;
    return out;
}

FourierTestFunction band_transform(double a) {
    if (!(a > 0.0)) throw InputError("band half-width must be positive");
    FourierTestFunction out;
    std::ostringstream os;
    os << "band[" << -a << "," << a << "]";
    out.label = os.str();
    out.transform = [a](double u) { return std::complex<double>(std::abs(u) < a ? 1.0 : 0.0, 0.0); };
    out.breakpoints = {-a, a};
    return out;
}

FourierTestFunction transform_from_derivative(std::string label, std::function<double(double)> dphi, double lo,
                                              double hi, std::size_t panels) {
    if (!(hi > lo) || panels == 0) throw InputError("test function support must be a non-empty interval");
    const auto rule = gauss_legendre_rule(8);
    std::vector<double> x, w;
    const double width = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = lo + (static_cast<double>(p) + 0.5) * width;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double xi = mid + 0.5 * width * rule.nodes[i];
            x.push_back(xi);
            w.push_back(0.5 * width * rule.weights[i] * dphi(xi));
        }
    }
    FourierTestFunction out;
    out.label = std::move(label);
    // phi^(u) = sum_i w_i (e^{-iux_i} - 1)/(iu) = -sum_i w_i x_i e^{-iux_i/2} sinc(ux_i/2); the
    // dropped term (1/iu) int phi' vanishes because phi is compactly supported.
    out.transform = [x = std::move(x), w = std::move(w)](double u) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double th = 0.5 * u * x[i];
            acc -= w[i] * x[i] * sinc(th) * std::polar(1.0, -th);
        }
        return acc;
    };
    return out;
}

FourierTestFunction zero_transform() {
    FourierTestFunction out;
    out.label = "zero";
    out.transform = [](double) { return std::complex<double>(0.0, 0.0); };
    return out;
}

double spectral_norm_sq(const SpectralMeasure& spec, const FourierTestFunction& phi) {
    if (phi.indicator_time) return VarianceFunction(spec)(*phi.indicator_time);
    const MeasureSpace& space = spec.space();
    const auto g = [&phi](double u) { return std::norm(phi.transform(u)); };
    double total = 0.0;
    for (const auto& atom : space.atoms()) total += atom.mass * g(atom.location);
    if (space.density().is_zero()) return total;

    // Panels of width <= 1 split at the transform's breakpoints.
    const auto add_range = [&](double a, double b) {
        std::vector<double> cuts{a, b};
        for (double bp : phi.breakpoints) {
            if (bp > a && bp < b) cuts.push_back(bp);
        }
        std::sort(cuts.begin(), cuts.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double span = cuts[i + 1] - cuts[i];
            const auto panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span)));
            for (std::size_t k = 0; k < panels; ++k) {
                const double x0 = cuts[i] + span * static_cast<double>(k) / static_cast<double>(panels);
                const double x1 = k + 1 == panels ? cuts[i + 1]
                                                  : cuts[i] + span * static_cast<double>(k + 1) / static_cast<double>(panels);
                acc += space.integrate_density(g, x0, x1);
            }
        }
        return acc;
    };
    total += add_range(-1.0, 1.0);
    int quiet = 0;
    for (double lo = 1.0; lo < 65536.0 && quiet < 2; lo *= 2.0) {
        const double shell = add_range(lo, 2.0 * lo) + add_range(-2.0 * lo, -lo);
        total += shell;
        quiet = std::abs(shell) <= 1e-10 * std::abs(total) ? quiet + 1 : 0;
    }
    return total;
}

// ---------------------------------------------------------------------------

namespace {

OrthoBasis frequency_basis(const MeasureSpace& space, const SpectralField::Options& options) {
    if (!(options.half_width > 0.0)) throw InputError("spectral field half-width must be positive");
    const auto domain = MeasurableSet::interval(-options.half_width, options.half_width);
    if (space.atom_in(domain)) {
        return build_indicator_basis(space, equal_length_partition(space, domain, std::size_t{1} << options.depth));
    }
    return build_haar_basis(space, domain, options.depth);
}

}  // namespace

SpectralField::SpectralField(const SpectralMeasure& spec, std::uint64_t seed, std::size_t replicas, unsigned workers)
    : SpectralField(spec, seed, replicas, workers, Options{}) {}

SpectralField::SpectralField(const SpectralMeasure& spec, std::uint64_t seed, std::size_t replicas, unsigned workers,
                             Options options)
    : spec_(std::make_shared<SpectralMeasure>(spec)),
      options_(options),
      sim_(spec.space(), frequency_basis(spec.space(), options), seed, replicas, workers, stream_key("gelfand")) {}

LeafFunctional SpectralField::functional(const FourierTestFunction& phi) const {
    const auto hartley = [&phi](double u) {
        const auto v = phi.transform(u);
        return v.real() - v.imag();
    };
    return sim_.functional(std::function<double(double)>(hartley));
}

double SpectralField::realized_variance(const LeafFunctional& f) const {
    const auto& m = sim_.basis().leaf_measures();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.leaves.size(); ++i) acc += f.weights[i] * f.weights[i] * m[f.leaves[i]];
    return acc;
}

std::vector<std::vector<double>> SpectralField::sample(std::span<const FourierTestFunction> phis) const {
    std::vector<LeafFunctional> fs;
    for (const auto& phi : phis) fs.push_back(functional(phi));
    auto rows = sim_.map_replicas<std::vector<double>>([&](const ReplicaState& s) {
        std::vector<double> row(fs.size());
        for (std::size_t q = 0; q < fs.size(); ++q) row[q] = s(fs[q]);
        return row;
    });
    std::vector<std::vector<double>> out(fs.size(), std::vector<double>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t q = 0; q < fs.size(); ++q) out[q][r] = rows[r][q];
    return out;
}

FourierIntegralResult fourier_wiener_integral(const SpectralField& field, const FourierTestFunction& phi) {
    const auto f = field.functional(phi);
    FourierIntegralResult out;
    out.values = field.simulator().map_replicas<double>([&](const ReplicaState& s) { return s(f); });
    out.exact_variance = spectral_norm_sq(field.spec(), phi);
    out.realized_variance = field.realized_variance(f);
    return out;
}

std::function<std::complex<double>(double)> spectral_factor_map(const SpectralMeasure& spec,
                                                                const FourierTestFunction& phi) {
    if (!spec.absolutely_continuous()) {
        throw SpectralError("spectral factorization needs an absolutely continuous measure; '" + spec.name() +
                            "' has atoms");
    }
    const Density density = spec.space().density();
    return [density, transform = phi.transform](double u) { return transform(u) * std::sqrt(density(u)); };
}

FactorIsometry spectral_factor_isometry(const SpectralMeasure& spec, const FourierTestFunction& phi) {
    const auto factor = spectral_factor_map(spec, phi);
    FourierTestFunction image{phi.label, factor, phi.breakpoints, std::nullopt};
    for (double bp : spec.space().density().breakpoints()) image.breakpoints.push_back(bp);
    const SpectralMeasure lebesgue(MeasureSpace(Density::lebesgue()), "lebesgue");
    FourierTestFunction plain = phi;
    plain.indicator_time.reset();
    return {spectral_norm_sq(lebesgue, image), spectral_norm_sq(spec, plain)};
}

// ---------------------------------------------------------------------------

void write_variance_csv(std::ostream& os, const VarianceFunction& r, std::span<const double> times) {
    os << "t,r,cutoff,achieved_rel_tol\n";
    os.precision(17);
    for (double t : times) {
        const auto v = r.evaluate(t);
        os << t << ',' << v.value << ',' << v.cutoff << ',' << v.achieved_rel_tol << '\n';
    }
}

void write_covariance_csv(std::ostream& os, const VarianceFunction& r, const PathEnsemble& paths) {
    const auto emp = empirical_covariance(paths);
    const std::size_t n = paths.grid.size();
    os << "i,j,t_i,t_j,exact,empirical\n";
    os.precision(17);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            os << i << ',' << j << ',' << paths.grid[i] << ',' << paths.grid[j] << ','
               << r.covariance(paths.grid[i], paths.grid[j]) << ',' << emp[i * n + j] << '\n';
        }
    }
}

}  // namespace sigfield
