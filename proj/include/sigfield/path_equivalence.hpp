#pragma once

#include "sigfield/spectral_process.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigfield {

/// omega(t) by linear interpolation on the path grid. Throws DomainError outside the grid.
double kolm_process_value(std::span<const double> grid, std::span<const double> path, double t);
double kolm_process_value(const PathEnsemble& paths, std::size_t replica, double t);

/// Compactly supported C^1 test function given with its derivative.
struct SmoothTestFunction {
    std::string label;
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
    double support_lo = 0.0;
    double support_hi = 0.0;
    std::vector<double> breakpoints;  // where dphi is not smooth
};

/// Mollified chi_[0,t]: cubic smoothstep ramp up on [0, h], ramp down on
/// [t - h/2, t + h/2]. Requires t >= 1.5 h > 0.
SmoothTestFunction mollified_indicator(double t, double h);

/// <omega', phi> := -int omega phi' dx on a sampled path with linear interpolation.
/// Each piece between grid points and phi breakpoints uses 3-point Gauss-Legendre,
/// which is exact when phi' is quadratic there.
class PairingEvaluator {
public:
    PairingEvaluator(std::span<const double> grid, std::span<const double> path);

    /// Throws DomainError when supp phi' leaves the grid.
    double pair(const SmoothTestFunction& phi) const;

private:
    std::span<const double> grid_;
    std::span<const double> path_;
};

double gelfand_pairing(const PairingEvaluator& evaluator, const SmoothTestFunction& phi);

/// Open interval bound; infinities mark unbounded sides.
struct Bound {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const noexcept { return x > lo && x < hi; }
};

/// One coordinate of a cylinder: either chi_[0,t] or a smooth test function.
struct CylinderFunctional {
    std::optional<double> time;
    std::optional<SmoothTestFunction> smooth;

    static CylinderFunctional at(double t);
    static CylinderFunctional of(SmoothTestFunction phi);
    std::string label() const;
};

/// {xi : (<xi, phi_1>, ..., <xi, phi_n>) in region}, region a product of open intervals.
struct CylinderSpec {
    std::string label;
    std::vector<CylinderFunctional> functionals;
    std::vector<Bound> region;

    /// Throws InputError when n == 0 or the region dimension differs.
    void validate() const;
    bool contains(std::span<const double> values) const;
};

struct PushforwardOptions {
    double grid_step = 1.0 / 64.0;       // Kolmogorov grid for smooth functionals
    bool allow_non_additive = false;     // run outside the sampler-agreement regime
    SpectralField::Options field{};
    unsigned workers = 0;
};

struct CylinderComparison {
    std::string cylinder;
    double p_kolm = 0.0;
    double p_gelfand = 0.0;
    double z = 0.0;
    bool informative = true;  // false when both frequencies are 0 or both are 1
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
};

/// Estimates the probability of each cylinder from Kolmogorov paths and from the
/// frequency-side field, sharing one ensemble of each across the suite. Throws
/// ContractError outside the agreement regime unless allow_non_additive is set.
std::vector<CylinderComparison> pushforward_suite(const SpectralMeasure& spec, std::span<const CylinderSpec> cylinders,
                                                  std::size_t replicas, std::uint64_t seed,
                                                  const PushforwardOptions& options = {});
CylinderComparison pushforward_test(const SpectralMeasure& spec, const CylinderSpec& cylinder, std::size_t replicas,
                                    std::uint64_t seed, const PushforwardOptions& options = {});

/// Five cylinders with bounds scaled by sqrt(r(1)).
std::vector<CylinderSpec> standard_cylinder_suite(const VarianceFunction& r);

struct PairingCheck {
    double t = 0.0;
    double h = 0.0;
    double grid_step = 0.0;
    double tolerance = 0.0;           // 3 sqrt(r(h + grid_step))
    double fraction_within = 0.0;
    double max_error = 0.0;
    std::size_t replicas = 0;
};

/// Replica-wise |<omega', mollified chi_[0,t]> - omega(t)| on Kolmogorov paths.
PairingCheck pairing_check(const VarianceFunction& r, double t, double h, double grid_step, std::size_t replicas,
                           std::uint64_t seed, unsigned workers = 0);

/// JSON array of {cylinder, p_kolm, p_gelfand, z, replicas, seed}.
std::string pushforward_to_json(std::span<const CylinderComparison> rows);

}  // namespace sigfield
