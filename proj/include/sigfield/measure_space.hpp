#pragma once

#include "sigfield/quadrature.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sigfield {

/// Half-open interval [lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite disjoint union of bounded half-open intervals, kept in canonical form:
/// sorted, non-empty pieces, touching pieces merged.
class MeasurableSet {
public:
    MeasurableSet() = default;

    /// [a, b); empty when a >= b. Throws InputError on non-finite endpoints.
    static MeasurableSet interval(double a, double b);
    static MeasurableSet from_intervals(std::vector<Interval> pieces);

    const std::vector<Interval>& intervals() const noexcept { return pieces_; }
    bool empty() const noexcept { return pieces_.empty(); }
    double length() const noexcept;
    /// Convex hull endpoints; only meaningful when non-empty.
    double lower() const { return pieces_.front().lo; }
    double upper() const { return pieces_.back().hi; }

    bool contains(double x) const noexcept;
    /// True when `other` is a subset of *this.
    bool contains(const MeasurableSet& other) const;
    /// -A, with the half-open convention kept (differs from the exact mirror by a null set).
    MeasurableSet reflected() const;
    std::string to_string() const;

    friend bool operator==(const MeasurableSet&, const MeasurableSet&) = default;

private:
    std::vector<Interval> pieces_;
};

MeasurableSet intersect(const MeasurableSet& a, const MeasurableSet& b);
MeasurableSet unite(const MeasurableSet& a, const MeasurableSet& b);
MeasurableSet difference(const MeasurableSet& a, const MeasurableSet& b);
bool disjoint(const MeasurableSet& a, const MeasurableSet& b);

/// Nonnegative density of the absolutely continuous part of a measure on the line.
class Density {
public:
    struct PolynomialPiece {
        double lo = 0.0;
        double hi = 0.0;
        std::vector<double> coefficients;  // c0 + c1 u + c2 u^2 + ...
    };

    /// Arbitrary callable; `breakpoints` marks kinks the quadrature should not straddle.
    static Density from_function(std::string name, std::function<double(double)> fn,
                                 std::vector<double> breakpoints = {});
    /// Constant density `scale` (Lebesgue when scale == 1).
    static Density lebesgue(double scale = 1.0);
    /// |u|^alpha, alpha > -1.
    static Density power(double alpha);
    /// (1 + u^2)^(-p).
    static Density cauchy_like(double p);
    /// Zero outside the pieces.
    static Density piecewise_polynomial(std::vector<PolynomialPiece> pieces);
    static Density zero();

    double operator()(double u) const { return fn_(u); }
    const std::string& name() const noexcept { return name_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    /// Closed-form mass of [a, b) when known.
    std::optional<double> exact_mass(double a, double b) const;
    bool is_zero() const noexcept { return zero_; }

private:
    std::string name_;
    std::function<double(double)> fn_;
    std::function<double(double)> primitive_;  // empty when unknown
    std::vector<double> breakpoints_;
    bool zero_ = false;
};

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

/// Sigma-finite measure on the real line: density plus finitely many atoms.
/// Immutable after construction.
class MeasureSpace {
public:
    explicit MeasureSpace(Density density, std::vector<Atom> atoms = {}, QuadratureConfig quadrature = {});

    const Density& density() const noexcept { return density_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    const QuadratureConfig& quadrature() const noexcept { return quadrature_; }

    /// sigma(A).
    double measure(const MeasurableSet& a) const;
    /// sigma([lo, hi)) for any lo <= hi, including unbounded shells used by truncation sweeps.
    double measure(double lo, double hi) const;
    /// Integral of g over [lo, hi) against sigma, atoms included.
    double integrate(const std::function<double(double)>& g, double lo, double hi) const;
    double integrate(const std::function<double(double)>& g, const MeasurableSet& a) const;
    /// Density-only integral of g over [lo, hi), split at density breakpoints.
    double integrate_density(const std::function<double(double)>& g, double lo, double hi) const;

    /// First atom of positive mass inside A, if any.
    std::optional<Atom> atom_in(const MeasurableSet& a) const;
    bool has_atoms() const noexcept;

private:
    Density density_;
    std::vector<Atom> atoms_;
    QuadratureConfig quadrature_;
};

double measure_of(const MeasureSpace& space, const MeasurableSet& a);

/// Integral over [-truncation, truncation] of d sigma(u) / (u^2 + 1)^p.
double temperedness_check(const MeasureSpace& space, unsigned p, double truncation);

struct TemperednessSweep {
    double value = 0.0;        // integral over the last truncation reached
    double truncation = 0.0;
    double last_increment = 0.0;
    bool converged = false;    // false flags divergence
};

/// Doubles the truncation from `start` until the added shell changes the value by
/// less than rel_tol (Cauchy criterion) or `cap` is reached.
TemperednessSweep temperedness_sweep(const MeasureSpace& space, unsigned p, double start = 1.0,
                                     double cap = 1099511627776.0 /* 2^40 */, double rel_tol = 1e-9);

/// Partition of a parent set into disjoint cells, with cached cell measures.
struct Partition {
    MeasurableSet parent;
    std::vector<MeasurableSet> cells;
    std::vector<double> cell_measures;

    std::size_t size() const noexcept { return cells.size(); }
    /// max sigma(cell)
    double mesh() const;
};

/// n cells of equal sigma-measure, cut points found by bisection on the cumulative
/// measure. Throws NotRefinableError when A carries an atom.
Partition equal_measure_partition(const MeasureSpace& space, const MeasurableSet& a, std::size_t n);

/// Equal-measure partition with mesh < eps.
Partition refine_to_mesh(const MeasureSpace& space, const MeasurableSet& a, double eps);

/// n cells of equal length over the hull of A (cells intersected with A). Works for
/// atomic measures; used by the non-refinable negative control.
Partition equal_length_partition(const MeasureSpace& space, const MeasurableSet& a, std::size_t n);

/// Sum over cells of sigma(cell)^2.
double lower_variation(const Partition& partition);

}  // namespace sigfield
