#include "sigfield/path_equivalence.hpp"

#include "sigfield/error.hpp"
#include "sigfield/stats.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sigfield {

double kolm_process_value(std::span<const double> grid, std::span<const double> path, double t) {
    if (grid.empty() || grid.size() != path.size()) throw InputError("path and grid sizes differ");
    if (t < grid.front() || t > grid.back()) {
        std::ostringstream os;
        os << "t = " << t << " is outside the path grid [" << grid.front() << ", " << grid.back() << "]";
        throw DomainError(os.str());
    }
    const auto it = std::lower_bound(grid.begin(), grid.end(), t);
    const auto k = static_cast<std::size_t>(it - grid.begin());
    if (grid[k] == t) return path[k];
    const double w = (t - grid[k - 1]) / (grid[k] - grid[k - 1]);
    return (1.0 - w) * path[k - 1] + w * path[k];
}

double kolm_process_value(const PathEnsemble& paths, std::size_t replica, double t) {
    return kolm_process_value(paths.grid, paths.path(replica), t);
}

SmoothTestFunction mollified_indicator(double t, double h) {
    if (!(h > 0.0) || t < 1.5 * h) throw InputError("mollified indicator needs t >= 1.5 h > 0");
    const double down = t - 0.5 * h;
    const auto step = [](double y) { return y * y * (3.0 - 2.0 * y); };
    const auto dstep = [](double y) { return 6.0 * y * (1.0 - y); };
    SmoothTestFunction out;
    std::ostringstream os;
    os << "molly[0," << t << "]h" << h;
    out.label = os.str();
    out.phi = [=](double x) {
        if (x <= 0.0 || x >= t + 0.5 * h) return 0.0;
        if (x < h) return step(x / h);
        if (x <= down) return 1.0;
        return 1.0 - step((x - down) / h);
    };
    out.dphi = [=](double x) {
        if (x <= 0.0 || x >= t + 0.5 * h) return 0.0;
        if (x < h) return dstep(x / h) / h;
        if (x <= down) return 0.0;
        return -dstep((x - down) / h) / h;
    };
    out.support_lo = 0.0;
    out.support_hi = t + 0.5 * h;
    out.breakpoints = {0.0, h, down, t + 0.5 * h};
    return out;
}

PairingEvaluator::PairingEvaluator(std::span<const double> grid, std::span<const double> path)
    : grid_(grid), path_(path) {
    if (grid.size() < 2 || grid.size() != path.size()) throw InputError("pairing needs a path on at least two points");
}

double PairingEvaluator::pair(const SmoothTestFunction& phi) const {
    const double lo = phi.support_lo, hi = phi.support_hi;
    if (lo < grid_.front() || hi > grid_.back()) {
        std::ostringstream os;
        os << "support [" << lo << ", " << hi << "] of " << phi.label << " escapes the path grid";
        throw DomainError(os.str());
    }
    std::vector<double> cuts{lo, hi};
    for (double x : grid_) {
        if (x > lo && x < hi) cuts.push_back(x);
    }
    for (double x : phi.breakpoints) {
        if (x > lo && x < hi) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    static const double node = std::sqrt(0.6);
    static const double nodes[3] = {-node, 0.0, node};
    static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b <= a) continue;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int q = 0; q < 3; ++q) {
            const double x = mid + half * nodes[q];
            acc += half * weights[q] * kolm_process_value(grid_, path_, x) * phi.dphi(x);
        }
    }
    return -acc;
}

double gelfand_pairing(const PairingEvaluator& evaluator, const SmoothTestFunction& phi) {
    return evaluator.pair(phi);
}

// ---------------------------------------------------------------------------

CylinderFunctional CylinderFunctional::at(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("cylinder times must be positive");
    return {t, std::nullopt};
}

CylinderFunctional CylinderFunctional::of(SmoothTestFunction phi) {
    if (!phi.dphi) throw InputError("smooth cylinder functional needs a derivative");
    return {std::nullopt, std::move(phi)};
}

std::string CylinderFunctional::label() const {
    if (time) {
        std::ostringstream os;
        os << "w(" << *time << ")";
        return os.str();
    }
    return smooth->label;
}

void CylinderSpec::validate() const {
    if (functionals.empty()) throw InputError("cylinder needs at least one functional");
    if (region.size() != functionals.size()) throw InputError("cylinder region dimension differs from n");
    for (const auto& b : region) {
        if (std::isnan(b.lo) || std::isnan(b.hi) || !(b.lo < b.hi)) throw InputError("cylinder bound is empty");
    }
    for (const auto& f : functionals) {
        if (f.time.has_value() == f.smooth.has_value()) throw InputError("cylinder functional must be exactly one kind");
    }
}

bool CylinderSpec::contains(std::span<const double> values) const {
    for (std::size_t k = 0; k < region.size(); ++k) {
        if (!region[k].contains(values[k])) return false;
    }
    return true;
}

namespace {

FourierTestFunction to_fourier(const CylinderFunctional& f) {
    if (f.time) return indicator_transform(*f.time);
    return transform_from_derivative(f.smooth->label, f.smooth->dphi, f.smooth->support_lo, f.smooth->support_hi);
}

}  // namespace

std::vector<CylinderComparison> pushforward_suite(const SpectralMeasure& spec, std::span<const CylinderSpec> cylinders,
                                                  std::size_t replicas, std::uint64_t seed,
                                                  const PushforwardOptions& options) {
    for (const auto& c : cylinders) c.validate();
    const VarianceFunction r(spec);
    if (!options.allow_non_additive && !r.is_additive()) {
        throw ContractError("spectral measure '" + spec.name() +
                            "' is outside the regime where the Kolmogorov and Gelfand laws agree; set the override "
                            "flag to run anyway");
    }

    // Distinct functionals across the suite, evaluated once per replica on each side.
    std::vector<const CylinderFunctional*> distinct;
    std::vector<std::vector<std::size_t>> slot(cylinders.size());
    for (std::size_t c = 0; c < cylinders.size(); ++c) {
        for (const auto& f : cylinders[c].functionals) {
            const auto label = f.label();
            auto it = std::find_if(distinct.begin(), distinct.end(), [&](const auto* g) { return g->label() == label; });
            if (it == distinct.end()) {
                distinct.push_back(&f);
                it = distinct.end() - 1;
            }
            slot[c].push_back(static_cast<std::size_t>(it - distinct.begin()));
        }
    }

    // Kolmogorov side.
    std::vector<double> grid{0.0};
    double reach = 0.0;
    bool smooth = false;
    for (const auto* f : distinct) {
        if (f->time) {
            grid.push_back(*f->time);
        } else {
            smooth = true;
            if (f->smooth->support_lo < 0.0) throw InputError("smooth cylinder functionals must live on [0, inf)");
            reach = std::max(reach, f->smooth->support_hi);
        }
    }
    if (smooth) {
        for (std::size_t k = 1; (k - 1) * options.grid_step < reach; ++k) grid.push_back(k * options.grid_step);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const auto paths = sample_paths_kolmogorov(r, grid, replicas, seed, options.workers);
    std::vector<std::vector<double>> kolm(distinct.size(), std::vector<double>(replicas));
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        const PairingEvaluator eval(paths.grid, paths.path(rep));
        for (std::size_t q = 0; q < distinct.size(); ++q) {
            kolm[q][rep] = distinct[q]->time ? kolm_process_value(paths, rep, *distinct[q]->time)
                                             : eval.pair(*distinct[q]->smooth);
        }
    }

    // Gelfand side.
    std::vector<FourierTestFunction> phis;
    for (const auto* f : distinct) phis.push_back(to_fourier(*f));
    const SpectralField field(spec, seed, replicas, options.workers, options.field);
    const auto gel = field.sample(phis);

    std::vector<CylinderComparison> out;
    for (std::size_t c = 0; c < cylinders.size(); ++c) {
        std::size_t hits_k = 0, hits_g = 0;
        std::vector<double> vk(slot[c].size()), vg(slot[c].size());
        for (std::size_t rep = 0; rep < replicas; ++rep) {
            for (std::size_t i = 0; i < slot[c].size(); ++i) {
                vk[i] = kolm[slot[c][i]][rep];
                vg[i] = gel[slot[c][i]][rep];
            }
            hits_k += cylinders[c].contains(vk);
            hits_g += cylinders[c].contains(vg);
        }
        CylinderComparison row;
        row.cylinder = cylinders[c].label;
        row.replicas = replicas;
        row.seed = seed;
        row.p_kolm = static_cast<double>(hits_k) / static_cast<double>(replicas);
        row.p_gelfand = static_cast<double>(hits_g) / static_cast<double>(replicas);
        row.informative = !((hits_k == 0 && hits_g == 0) || (hits_k == replicas && hits_g == replicas));
        row.z = two_proportion_z(row.p_kolm, replicas, row.p_gelfand, replicas);
        out.push_back(row);
    }
    return out;
}

CylinderComparison pushforward_test(const SpectralMeasure& spec, const CylinderSpec& cylinder, std::size_t replicas,
                                    std::uint64_t seed, const PushforwardOptions& options) {
    return pushforward_suite(spec, std::span<const CylinderSpec>(&cylinder, 1), replicas, seed, options).front();
}

std::vector<CylinderSpec> standard_cylinder_suite(const VarianceFunction& r) {
    const double s = std::sqrt(r(1.0));
    const auto at = CylinderFunctional::at;
    const double inf = std::numeric_limits<double>::infinity();
    return {
        {"w(1) in (-1.96,1.96)", {at(1.0)}, {{-1.96 * s, 1.96 * s}}},
        {"w(0.5) > 0", {at(0.5)}, {{0.0, inf}}},
        {"w(1) in (-1,1), w(2) in (-1,2)", {at(1.0), at(2.0)}, {{-s, s}, {-s, 2.0 * s}}},
        {"w(0.25) > 0, w(0.75) < 0.5, w(1.5) in (-1,1)",
         {at(0.25), at(0.75), at(1.5)},
         {{0.0, inf}, {-inf, 0.5 * s}, {-s, s}}},
        {"w(2) > 1", {at(2.0)}, {{s, inf}}},
    };
}

PairingCheck pairing_check(const VarianceFunction& r, double t, double h, double grid_step, std::size_t replicas,
                           std::uint64_t seed, unsigned workers) {
    const auto phi = mollified_indicator(t, h);
    std::vector<double> grid{0.0};
    for (std::size_t k = 1; (k - 1) * grid_step < phi.support_hi; ++k) grid.push_back(k * grid_step);
    if (std::find(grid.begin(), grid.end(), t) == grid.end()) {
        grid.push_back(t);
        std::sort(grid.begin(), grid.end());
    }
    const auto paths = sample_paths_kolmogorov(r, grid, replicas, seed, workers);
    PairingCheck out;
    out.t = t;
    out.h = h;
    out.grid_step = grid_step;
    out.replicas = replicas;
    out.tolerance = 3.0 * std::sqrt(r(h + grid_step));
    std::size_t within = 0;
    for (std::size_t rep = 0; rep < replicas; ++rep) {
        const PairingEvaluator eval(paths.grid, paths.path(rep));
        const double err = std::abs(eval.pair(phi) - kolm_process_value(paths, rep, t));
        out.max_error = std::max(out.max_error, err);
        within += err <= out.tolerance;
    }
    out.fraction_within = static_cast<double>(within) / static_cast<double>(replicas);
    return out;
}

std::string pushforward_to_json(std::span<const CylinderComparison> rows) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        out.push_back({{"cylinder", row.cylinder},
                       {"p_kolm", row.p_kolm},
                       {"p_gelfand", row.p_gelfand},
                       {"z", row.z},
                       {"informative", row.informative},
                       {"replicas", row.replicas},
                       {"seed", row.seed}});
    }
    return out.dump(2);
}

}  // namespace sigfield
