#pragma once

#include "sigfield/gaussian_field.hpp"
#include "sigfield/measure_space.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigfield {

/// Symmetric tempered measure on the frequency line. Construction verifies symmetry
/// on a probe grid and temperedness of order p; either failure throws SpectralError.
class SpectralMeasure {
public:
    explicit SpectralMeasure(MeasureSpace space, std::string name = "spectral", unsigned order = 1,
                             double symmetry_tol = 1e-9);

    const MeasureSpace& space() const noexcept { return space_; }
    const std::string& name() const noexcept { return name_; }
    unsigned tempered_order() const noexcept { return order_; }
    /// Largest |sigma([a,b)) - sigma([-b,-a))| seen on the probe grid.
    double symmetry_defect() const noexcept { return symmetry_defect_; }
    bool absolutely_continuous() const noexcept { return !space_.has_atoms(); }

private:
    MeasureSpace space_;
    std::string name_;
    unsigned order_;
    double symmetry_defect_ = 0.0;
};

/// r(t) with the truncation metadata of the tail sweep.
struct VarianceValue {
    double value = 0.0;
    double cutoff = 0.0;          // frequency where the oscillatory sweep stopped
    double last_shell = 0.0;      // size of the last oscillatory shell added
    double achieved_rel_tol = 0.0;
    bool converged = true;
};

/// t -> r(t) = 4 int sin^2(ut/2)/u^2 dsigma(u), cached. Thread-safe.
class VarianceFunction {
public:
    struct Options {
        double rel_tol = 1e-8;                // sweep stop criterion
        double cutoff_cap = 1048576.0;        // 2^20
    };

    explicit VarianceFunction(const SpectralMeasure& spec);
    VarianceFunction(const SpectralMeasure& spec, Options options);

    double operator()(double t) const { return evaluate(t).value; }
    VarianceValue evaluate(double t) const;
    /// (r(t) + r(s) - r(s - t)) / 2
    double covariance(double t, double s) const;
    /// True when r(t) = |t| r(1) on probe points, i.e. sigma is a multiple of Lebesgue
    /// as far as r can tell. This is the regime where both path samplers agree.
    bool is_additive(double tol = 1e-7) const;

    const SpectralMeasure& spec() const noexcept { return *spec_; }

private:
    VarianceValue compute(double t) const;

    struct Cache {
        std::mutex mutex;
        std::map<double, VarianceValue> values;
    };

    std::shared_ptr<const SpectralMeasure> spec_;
    Options options_;
    std::shared_ptr<Cache> cache_;  // shared by copies
};

double variance_r(const VarianceFunction& r, double t);
double covariance(const VarianceFunction& r, double t, double s);

/// Covariance matrix (t_i, t_j) from r.
std::vector<double> covariance_matrix(const VarianceFunction& r, std::span<const double> times);

/// Paths on a grid 0 = t_0 < t_1 < ... < t_n; value(r, 0) == 0 for every replica.
struct PathEnsemble {
    enum class Construction { KolmogorovMarkov, CovarianceCholesky };

    std::vector<double> grid;
    std::size_t replicas = 0;
    std::vector<double> values;  // row-major replicas x grid.size()
    Construction construction = Construction::KolmogorovMarkov;

    double operator()(std::size_t replica, std::size_t k) const { return values[replica * grid.size() + k]; }
    std::span<const double> path(std::size_t replica) const {
        return {values.data() + replica * grid.size(), grid.size()};
    }
    std::vector<double> column(std::size_t k) const;
};

std::string construction_name(PathEnsemble::Construction c);

/// Independent Gaussian increments with variance r(t_k - t_{k-1}). Throws
/// DegenerateStepError when r of a positive step is numerically zero.
PathEnsemble sample_paths_kolmogorov(const VarianceFunction& r, std::span<const double> grid, std::size_t replicas,
                                     std::uint64_t seed, unsigned workers = 0);

/// Exact Gaussian law with the stationary-increment covariance on the grid, via
/// Cholesky of the covariance matrix (regularized by 1e-12 trace when needed).
PathEnsemble sample_paths_covariance(const VarianceFunction& r, std::span<const double> grid, std::size_t replicas,
                                     std::uint64_t seed, unsigned workers = 0);

/// Unbiased sample covariance of all grid columns, row-major.
std::vector<double> empirical_covariance(const PathEnsemble& paths);

/// Fourier transform phi^(u) = int e^{-iux} phi(x) dx of a real test function.
struct FourierTestFunction {
    std::string label;
    std::function<std::complex<double>(double)> transform;
    std::vector<double> breakpoints;  // kinks of |phi^|, for quadrature
    std::optional<double> indicator_time;  // set for chi_[0,t]; its norm is r(t)
};

/// phi = chi_[0,t]: phi^(u) = (1 - e^{-iut}) / (iu).
FourierTestFunction indicator_transform(double t);
/// phi^ = chi_[-a,a] (phi(x) = sin(ax)/(pi x)).
FourierTestFunction band_transform(double a);
/// Transform of a smooth phi supported in [lo, hi] from its derivative:
/// phi^(u) = (1/(iu)) int e^{-iux} phi'(x) dx, phi^(0) = -int x phi'(x) dx.
FourierTestFunction transform_from_derivative(std::string label, std::function<double(double)> dphi, double lo,
                                              double hi, std::size_t panels = 256);
FourierTestFunction zero_transform();

/// int |phi^|^2 dsigma over the whole line: r(t) for indicators, otherwise a
/// doubling sweep on the cutoff (relative shell change < 1e-10, cutoff cap 2^16).
double spectral_norm_sq(const SpectralMeasure& spec, const FourierTestFunction& phi);

/// Gaussian field on the frequency side, used to realize X_phi = int phi^ dW.
/// Each phi^ enters through its real Hartley form h = Re phi^ - Im phi^; for a
/// symmetric sigma, int h_phi h_psi dsigma = Re int phi^ conj(psi^) dsigma, so the
/// realized family has the covariance of X. The basis is Haar on [-L, L).
class SpectralField {
public:
    struct Options {
        double half_width = 128.0;
        unsigned depth = 12;
    };

    SpectralField(const SpectralMeasure& spec, std::uint64_t seed, std::size_t replicas, unsigned workers = 0);
    SpectralField(const SpectralMeasure& spec, std::uint64_t seed, std::size_t replicas, unsigned workers,
                  Options options);

    const FieldSimulator& simulator() const noexcept { return sim_; }
    const Options& options() const noexcept { return options_; }

    LeafFunctional functional(const FourierTestFunction& phi) const;
    /// Variance of the truncated realization, sum_j m_j^2 / sigma_j.
    double realized_variance(const LeafFunctional& f) const;
    /// values[q][replica]
    std::vector<std::vector<double>> sample(std::span<const FourierTestFunction> phis) const;

    const SpectralMeasure& spec() const noexcept { return *spec_; }

private:
    std::shared_ptr<const SpectralMeasure> spec_;
    Options options_;
    FieldSimulator sim_;
};

struct FourierIntegralResult {
    std::vector<double> values;
    double exact_variance = 0.0;     // int |phi^|^2 dsigma
    double realized_variance = 0.0;  // of the truncated realization
};

FourierIntegralResult fourier_wiener_integral(const SpectralField& field, const FourierTestFunction& phi);

/// u -> phi^(u) sqrt(m(u)) for an absolutely continuous sigma with density m.
/// Throws SpectralError when sigma has atoms.
std::function<std::complex<double>(double)> spectral_factor_map(const SpectralMeasure& spec,
                                                                const FourierTestFunction& phi);

struct FactorIsometry {
    double factor_norm_sq = 0.0;  // int |phi^ sqrt(m)|^2 du
    double sigma_norm_sq = 0.0;   // int |phi^|^2 dsigma
};
FactorIsometry spectral_factor_isometry(const SpectralMeasure& spec, const FourierTestFunction& phi);

/// Rows {t, r, cutoff, achieved_rel_tol}.
void write_variance_csv(std::ostream& os, const VarianceFunction& r, std::span<const double> times);
/// Rows {i, j, t_i, t_j, exact, empirical}.
void write_covariance_csv(std::ostream& os, const VarianceFunction& r, const PathEnsemble& paths);

}  // namespace sigfield
