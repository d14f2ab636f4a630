#pragma once

#include <stdexcept>
#include <string>

namespace sigfield {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature produced a non-finite value.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// An operation that needs a non-atomic measure met an atom.
class NotRefinableError : public Error {
public:
    NotRefinableError(const std::string& what, double atom_location)
        : Error(what), atom_location_(atom_location) {}

    double atom_location() const noexcept { return atom_location_; }

private:
    double atom_location_;
};

/// A query set or evaluation point lies outside the working domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed input (overlapping cells, bad parameters).
class InputError : public Error {
public:
    using Error::Error;
};

/// An adapted integrand tried to read the current or a future cell.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Spectral measure problems: asymmetry, covariance not PSD, atoms where a density is required.
class SpectralError : public Error {
public:
    using Error::Error;
};

/// Kolmogorov sampler hit r(dt) == 0 for a positive step.
class DegenerateStepError : public SpectralError {
public:
    using SpectralError::SpectralError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace sigfield
