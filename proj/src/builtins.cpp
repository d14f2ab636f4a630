#include "sigfield/builtins.hpp"

#include "sigfield/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sigfield {

std::vector<BuiltinMeasure> builtin_measures() {
    return {
        {"lebesgue", "Lebesgue measure du", true},
        {"lebesgue:<scale>", "scale * du", true},
        {"normalized-lebesgue", "du / (2 pi); its variance function is r(t) = |t|", true},
        {"power:<alpha>", "|u|^alpha du, alpha > -1 (tempered of order 1 when alpha < 1)", true},
        {"cauchy-like:<p>", "(1 + u^2)^(-p) du", true},
        {"dirac-demo", "unit atom at 0.5, no density; not refinable", false},
    };
}

namespace {

double parse_parameter(const std::string& ref, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !std::isfinite(v)) throw ConfigError("bad parameter in measure reference '" + ref + "'");
    return v;
}

}  // namespace

MeasureSpace make_measure(const std::string& ref) {
    const auto colon = ref.find(':');
    const std::string head = ref.substr(0, colon);
    const bool has_arg = colon != std::string::npos;
    const auto arg = [&] {
        if (!has_arg) throw ConfigError("measure '" + head + "' needs a parameter, e.g. '" + head + ":1'");
        return parse_parameter(ref, ref.substr(colon + 1));
    };
    try {
        if (head == "lebesgue") return MeasureSpace(Density::lebesgue(has_arg ? arg() : 1.0));
        if (head == "normalized-lebesgue" && !has_arg) {
            return MeasureSpace(Density::lebesgue(1.0 / (2.0 * std::numbers::pi)));
        }
        if (head == "power") return MeasureSpace(Density::power(arg()));
        if (head == "cauchy-like") return MeasureSpace(Density::cauchy_like(arg()));
        if (head == "dirac-demo" && !has_arg) return MeasureSpace(Density::zero(), {Atom{0.5, 1.0}});
    } catch (const InputError& e) {
        throw ConfigError("measure '" + ref + "': " + e.what());
    }
    throw ConfigError("unknown measure reference '" + ref + "' (see list-builtins)");
}

std::vector<PsiPreset> psi_presets() {
    return {
        {"h1", HermiteSeries{{0.0, 1.0}}},
        {"h2", HermiteSeries{{0.0, 0.0, 1.0}}},
        {"h0+h1", HermiteSeries{{1.0, 1.0}}},
        {"quartic-mix", HermiteSeries{{0.3, -0.5, 0.25, 0.1, -0.05}}},
    };
}

HermiteSeries psi_preset(const std::string& name) {
    for (const auto& p : psi_presets()) {
        if (p.name == name) return p.psi;
    }
    throw ConfigError("unknown psi preset '" + name + "'");
}

std::vector<std::string> cylinder_suites() { return {"standard"}; }

std::vector<CylinderSpec> cylinder_suite(const std::string& name, const VarianceFunction& r) {
    if (name == "standard") return standard_cylinder_suite(r);
    throw ConfigError("unknown cylinder suite '" + name + "'");
}

std::string builtins_catalog() {
    std::ostringstream os;
    os << "measures:\n";
    for (const auto& m : builtin_measures()) {
        os << "  " << m.name << "  -- " << m.description << (m.refinable ? "" : " [non-refinable]") << '\n';
    }
    os << "psi presets (Hermite coefficients c_0..c_D):\n";
    for (const auto& p : psi_presets()) {
        os << "  " << p.name << "  [";
        for (std::size_t i = 0; i < p.psi.coefficients.size(); ++i) os << (i ? ", " : "") << p.psi.coefficients[i];
        os << "]\n";
    }
    os << "cylinder suites:\n";
    const SpectralMeasure unit(make_measure("normalized-lebesgue"), "normalized-lebesgue");
    const VarianceFunction r(unit);
    for (const auto& name : cylinder_suites()) {
        os << "  " << name << ":\n";
        for (const auto& c : cylinder_suite(name, r)) os << "    " << c.label << '\n';
    }
    return os.str();
}

}  // namespace sigfield
