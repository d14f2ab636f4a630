#pragma once

#include "sigfield/hermite_rkhs.hpp"
#include "sigfield/measure_space.hpp"
#include "sigfield/path_equivalence.hpp"

#include <string>
#include <vector>

namespace sigfield {

struct BuiltinMeasure {
    std::string name;         // reference syntax, e.g. "power:<alpha>"
    std::string description;
    bool refinable = true;
};

/// Catalog of measure references understood by make_measure().
std::vector<BuiltinMeasure> builtin_measures();

/// Builds a measure from a reference: "lebesgue", "lebesgue:<scale>", "normalized-lebesgue"
/// (du / 2 pi), "power:<alpha>", "cauchy-like:<p>", "dirac-demo" (unit atom at 0.5).
/// Throws ConfigError for unknown references or bad parameters.
MeasureSpace make_measure(const std::string& ref);

struct PsiPreset {
    std::string name;
    HermiteSeries psi;
};
std::vector<PsiPreset> psi_presets();
/// Throws ConfigError for unknown names.
HermiteSeries psi_preset(const std::string& name);

/// Named cylinder suites; "standard" is the five-cylinder suite.
std::vector<std::string> cylinder_suites();
std::vector<CylinderSpec> cylinder_suite(const std::string& name, const VarianceFunction& r);

/// Human-readable catalog of the above.
std::string builtins_catalog();

}  // namespace sigfield
