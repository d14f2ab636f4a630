#include "sigfield/measure_space.hpp"

#include "sigfield/error.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sigfield {

// ---------------------------------------------------------------------------
// MeasurableSet

MeasurableSet MeasurableSet::interval(double a, double b) { return from_intervals({{a, b}}); }

MeasurableSet MeasurableSet::from_intervals(std::vector<Interval> pieces) {
    for (const auto& p : pieces) {
        if (!std::isfinite(p.lo) || !std::isfinite(p.hi)) {
            throw InputError("measurable sets must have finite endpoints");
        }
    }
    std::erase_if(pieces, [](const Interval& p) { return !(p.lo < p.hi); });
    std::sort(pieces.begin(), pieces.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    MeasurableSet out;
    for (const auto& p : pieces) {
        if (!out.pieces_.empty() && p.lo <= out.pieces_.back().hi) {
            out.pieces_.back().hi = std::max(out.pieces_.back().hi, p.hi);
        } else {
            out.pieces_.push_back(p);
        }
    }
    return out;
}

double MeasurableSet::length() const noexcept {
    double total = 0.0;
    for (const auto& p : pieces_) total += p.length();
    return total;
}

bool MeasurableSet::contains(double x) const noexcept {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Interval& p) { return v < p.lo; });
    if (it == pieces_.begin()) return false;
    --it;
    return x < it->hi;
}

bool MeasurableSet::contains(const MeasurableSet& other) const {
    return intersect(*this, other) == other;
}

MeasurableSet MeasurableSet::reflected() const {
    std::vector<Interval> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) out.push_back({-p.hi, -p.lo});
    return from_intervals(std::move(out));
}

std::string MeasurableSet::to_string() const {
    if (pieces_.empty()) return "{}";
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (i) os << " u ";
        os << '[' << pieces_[i].lo << ',' << pieces_[i].hi << ')';
    }
    return os.str();
}

MeasurableSet intersect(const MeasurableSet& a, const MeasurableSet& b) {
    std::vector<Interval> out;
    const auto& x = a.intervals();
    const auto& y = b.intervals();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < x.size() && j < y.size()) {
        const double lo = std::max(x[i].lo, y[j].lo);
        const double hi = std::min(x[i].hi, y[j].hi);
        if (lo < hi) out.push_back({lo, hi});
        if (x[i].hi < y[j].hi) {
            ++i;
        } else {
            ++j;
        }
    }
    return MeasurableSet::from_intervals(std::move(out));
}

MeasurableSet unite(const MeasurableSet& a, const MeasurableSet& b) {
    std::vector<Interval> all = a.intervals();
    all.insert(all.end(), b.intervals().begin(), b.intervals().end());
    return MeasurableSet::from_intervals(std::move(all));
}

MeasurableSet difference(const MeasurableSet& a, const MeasurableSet& b) {
    std::vector<Interval> out;
    for (const auto& p : a.intervals()) {
        double cursor = p.lo;
        for (const auto& q : b.intervals()) {
            if (q.hi <= cursor) continue;
            if (q.lo >= p.hi) break;
            if (q.lo > cursor) out.push_back({cursor, q.lo});
            cursor = std::max(cursor, q.hi);
            if (cursor >= p.hi) break;
        }
        if (cursor < p.hi) out.push_back({cursor, p.hi});
    }
    return MeasurableSet::from_intervals(std::move(out));
}

bool disjoint(const MeasurableSet& a, const MeasurableSet& b) { return intersect(a, b).empty(); }

// ---------------------------------------------------------------------------
// Density

Density Density::from_function(std::string name, std::function<double(double)> fn,
                               std::vector<double> breakpoints) {
    Density d;
    d.name_ = std::move(name);
    d.fn_ = std::move(fn);
    std::sort(breakpoints.begin(), breakpoints.end());
    d.breakpoints_ = std::move(breakpoints);
    return d;
}

Density Density::lebesgue(double scale) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw InputError("density scale must be finite and >= 0");
    Density d;
    d.name_ = scale == 1.0 ? "lebesgue" : "lebesgue*" + std::to_string(scale);
    d.fn_ = [scale](double) { return scale; };
    d.primitive_ = [scale](double u) { return scale * u; };
    d.zero_ = scale == 0.0;
    return d;
}

Density Density::power(double alpha) {
    if (!(alpha > -1.0)) throw InputError("power density needs alpha > -1 to be locally integrable");
    Density d;
    d.name_ = "power:" + std::to_string(alpha);
    d.fn_ = [alpha](double u) { return u == 0.0 ? (alpha == 0.0 ? 1.0 : (alpha > 0.0 ? 0.0 : INFINITY)) : std::pow(std::abs(u), alpha); };
    d.primitive_ = [alpha](double u) { return std::copysign(std::pow(std::abs(u), alpha + 1.0) / (alpha + 1.0), u); };
    d.breakpoints_ = {0.0};
    return d;
}

Density Density::cauchy_like(double p) {
    if (!(p >= 0.0)) throw InputError("cauchy-like density needs p >= 0");
    Density d;
    d.name_ = "cauchy-like:" + std::to_string(p);
    d.fn_ = [p](double u) { return std::pow(1.0 + u * u, -p); };
    if (p == 1.0) {
        d.primitive_ = [](double u) { return std::atan(u); };
    } else if (p == 0.0) {
        d.primitive_ = [](double u) { return u; };
    }
    return d;
}

Density Density::piecewise_polynomial(std::vector<PolynomialPiece> pieces) {
    for (const auto& piece : pieces) {
        if (!(piece.lo < piece.hi)) throw InputError("piecewise-polynomial piece with lo >= hi");
    }
    std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        if (pieces[i].lo < pieces[i - 1].hi) throw InputError("piecewise-polynomial pieces overlap");
    }
    Density d;
    d.name_ = "piecewise-polynomial";
    auto eval_poly = [](const std::vector<double>& c, double u) {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
        return acc;
    };
    auto antiderivative = [](const std::vector<double>& c, double u) {
        double acc = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * u + c[k] / static_cast<double>(k + 1);
        return acc * u;
    };
    d.fn_ = [pieces, eval_poly](double u) {
        for (const auto& piece : pieces) {
            if (u >= piece.lo && u < piece.hi) return eval_poly(piece.coefficients, u);
        }
        return 0.0;
    };
    d.primitive_ = [pieces, antiderivative](double u) {
        double total = 0.0;
        for (const auto& piece : pieces) {
            if (u <= piece.lo) break;
            const double top = std::min(u, piece.hi);
            total += antiderivative(piece.coefficients, top) - antiderivative(piece.coefficients, piece.lo);
        }
        return total;
    };
    for (const auto& piece : pieces) {
        d.breakpoints_.push_back(piece.lo);
        d.breakpoints_.push_back(piece.hi);
    }
    return d;
}

Density Density::zero() {
    Density d = lebesgue(0.0);
    d.name_ = "zero";
    return d;
}

std::optional<double> Density::exact_mass(double a, double b) const {
    if (zero_) return 0.0;
    if (!primitive_) return std::nullopt;
    return primitive_(b) - primitive_(a);
}

// ---------------------------------------------------------------------------
// MeasureSpace

MeasureSpace::MeasureSpace(Density density, std::vector<Atom> atoms, QuadratureConfig quadrature)
    : density_(std::move(density)), atoms_(std::move(atoms)), quadrature_(quadrature) {
    for (const auto& atom : atoms_) {
        if (!std::isfinite(atom.location) || !(atom.mass >= 0.0) || !std::isfinite(atom.mass)) {
            throw InputError("atoms need a finite location and a finite mass >= 0");
        }
    }
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& x, const Atom& y) { return x.location < y.location; });
}

double MeasureSpace::integrate_density(const std::function<double(double)>& g, double lo, double hi) const {
    if (!(lo < hi) || density_.is_zero()) return 0.0;
    double total = 0.0;
    double cursor = lo;
    auto integrand = [&](double u) {
        const double w = density_(u);
        return w == 0.0 ? 0.0 : g(u) * w;
    };
    for (double bp : density_.breakpoints()) {
        if (bp <= cursor) continue;
        if (bp >= hi) break;
        total += sigfield::integrate(integrand, cursor, bp, quadrature_);
        cursor = bp;
    }
    total += sigfield::integrate(integrand, cursor, hi, quadrature_);
    return total;
}

double MeasureSpace::integrate(const std::function<double(double)>& g, double lo, double hi) const {
    if (!(lo < hi)) return 0.0;
    double total = integrate_density(g, lo, hi);
    for (const auto& atom : atoms_) {
        if (atom.location >= lo && atom.location < hi && atom.mass > 0.0) total += atom.mass * g(atom.location);
    }
    return total;
}

double MeasureSpace::integrate(const std::function<double(double)>& g, const MeasurableSet& a) const {
    double total = 0.0;
    for (const auto& p : a.intervals()) total += integrate(g, p.lo, p.hi);
    return total;
}

double MeasureSpace::measure(double lo, double hi) const {
    if (!(lo < hi)) return 0.0;
    double total = 0.0;
    if (auto exact = density_.exact_mass(lo, hi)) {
        total = *exact;
    } else {
        total = integrate_density([](double) { return 1.0; }, lo, hi);
    }
    for (const auto& atom : atoms_) {
        if (atom.location >= lo && atom.location < hi) total += atom.mass;
    }
    if (!std::isfinite(total)) throw QuadratureError("measure of [" + std::to_string(lo) + ", " + std::to_string(hi) + ") is not finite");
    return std::max(total, 0.0);
}

double MeasureSpace::measure(const MeasurableSet& a) const {
    double total = 0.0;
    for (const auto& p : a.intervals()) total += measure(p.lo, p.hi);
    return total;
}

std::optional<Atom> MeasureSpace::atom_in(const MeasurableSet& a) const {
    for (const auto& atom : atoms_) {
        if (atom.mass > 0.0 && a.contains(atom.location)) return atom;
    }
    return std::nullopt;
}

bool MeasureSpace::has_atoms() const noexcept {
    return std::any_of(atoms_.begin(), atoms_.end(), [](const Atom& x) { return x.mass > 0.0; });
}

double measure_of(const MeasureSpace& space, const MeasurableSet& a) { return space.measure(a); }

// ---------------------------------------------------------------------------
// Temperedness

double temperedness_check(const MeasureSpace& space, unsigned p, double truncation) {
    if (!(truncation > 0.0)) throw InputError("truncation must be positive");
    auto weight = [p](double u) { return std::pow(u * u + 1.0, -static_cast<double>(p)); };
    // closed interval: include an atom sitting exactly at +truncation
    return space.integrate(weight, -truncation, std::nextafter(truncation, INFINITY));
}

TemperednessSweep temperedness_sweep(const MeasureSpace& space, unsigned p, double start, double cap,
                                     double rel_tol) {
    if (!(start > 0.0) || !(cap >= start)) throw InputError("temperedness sweep needs 0 < start <= cap");
    auto weight = [p](double u) { return std::pow(u * u + 1.0, -static_cast<double>(p)); };
    TemperednessSweep out;
    out.truncation = start;
    out.value = temperedness_check(space, p, start);
    while (out.truncation < cap) {
        const double t = out.truncation;
        const double lo_shell = space.integrate(weight, -2.0 * t, -t);
        const double hi_shell = space.integrate(weight, std::nextafter(t, INFINITY), std::nextafter(2.0 * t, INFINITY));
        out.last_increment = lo_shell + hi_shell;
        out.value += out.last_increment;
        out.truncation = 2.0 * t;
        if (std::abs(out.last_increment) <= rel_tol * std::abs(out.value)) {
            out.converged = true;
            return out;
        }
    }
    out.converged = false;
    return out;
}

// ---------------------------------------------------------------------------
// Partitions

double Partition::mesh() const {
    double m = 0.0;
    for (double v : cell_measures) m = std::max(m, v);
    return m;
}

namespace {

void reject_atoms(const MeasureSpace& space, const MeasurableSet& a) {
    if (auto atom = space.atom_in(a)) {
        std::ostringstream os;
        os << "measure is not refinable on " << a.to_string() << ": atom of mass " << atom->mass << " at "
           << atom->location;
        throw NotRefinableError(os.str(), atom->location);
    }
}

Partition make_partition(const MeasureSpace& space, const MeasurableSet& a, const std::vector<double>& cuts) {
    Partition part;
    part.parent = a;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        MeasurableSet cell = intersect(a, MeasurableSet::interval(cuts[j], cuts[j + 1]));
        part.cell_measures.push_back(space.measure(cell));
        part.cells.push_back(std::move(cell));
    }
    return part;
}

}  // namespace

Partition equal_measure_partition(const MeasureSpace& space, const MeasurableSet& a, std::size_t n) {
    if (n == 0) throw InputError("partition needs at least one cell");
    reject_atoms(space, a);
    const double total = space.measure(a);
    if (!(total > 0.0) || !std::isfinite(total)) throw InputError("equal-measure partition needs 0 < sigma(A) < inf");

    const auto& pieces = a.intervals();
    std::vector<double> piece_mass;
    for (const auto& p : pieces) piece_mass.push_back(space.measure(p.lo, p.hi));

    std::vector<double> cuts{a.lower()};
    std::size_t piece = 0;
    double mass_before_piece = 0.0;  // sigma of pieces[0..piece)
    double cursor = pieces.front().lo;
    double mass_before_cursor = 0.0;
    const auto tolerance = [](double x, double y) { return std::abs(y - x) <= 1e-12; };

    for (std::size_t j = 1; j < n; ++j) {
        const double target = total * static_cast<double>(j) / static_cast<double>(n);
        while (piece + 1 < pieces.size() && mass_before_piece + piece_mass[piece] <= target) {
            mass_before_piece += piece_mass[piece];
            ++piece;
            cursor = pieces[piece].lo;
            mass_before_cursor = mass_before_piece;
        }
        const double hi = pieces[piece].hi;
        const double base = mass_before_cursor;
        const double lo = cursor;
        auto excess = [&](double x) { return base + space.measure(lo, x) - target; };
        double cut;
        if (excess(lo) >= 0.0) {
            cut = lo;
        } else if (excess(hi) <= 0.0) {
            cut = hi;
        } else {
            auto bracket = boost::math::tools::bisect(excess, lo, hi, tolerance);
            cut = 0.5 * (bracket.first + bracket.second);
        }
        cuts.push_back(cut);
        cursor = cut;
        mass_before_cursor = target;
    }
    cuts.push_back(a.upper());
    return make_partition(space, a, cuts);
}

Partition refine_to_mesh(const MeasureSpace& space, const MeasurableSet& a, double eps) {
    if (!(eps > 0.0)) throw InputError("mesh bound must be positive");
    reject_atoms(space, a);
    const double total = space.measure(a);
    if (eps >= total) return equal_measure_partition(space, a, 1);
    auto n = static_cast<std::size_t>(std::ceil(total / eps));
    Partition part = equal_measure_partition(space, a, n);
    // ceil() lands exactly on eps when total/eps is an integer
    while (part.mesh() >= eps) part = equal_measure_partition(space, a, ++n);
    return part;
}

Partition equal_length_partition(const MeasureSpace& space, const MeasurableSet& a, std::size_t n) {
    if (n == 0) throw InputError("partition needs at least one cell");
    if (a.empty()) throw InputError("cannot partition the empty set");
    const double lo = a.lower();
    const double hi = a.upper();
    std::vector<double> cuts;
    for (std::size_t j = 0; j < n; ++j) cuts.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n));
    cuts.push_back(hi);
    return make_partition(space, a, cuts);
}

double lower_variation(const Partition& partition) {
    double total = 0.0;
    for (double m : partition.cell_measures) total += m * m;
    return total;
}

}  // namespace sigfield
