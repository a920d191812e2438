#pragma once

#include <stdexcept>
#include <string>

namespace varorb {

/// Invalid construction parameters (potential family, discretization, options).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Caller passed data of the wrong shape, e.g. a point of the wrong dimension.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// |q(0)| vanished, so the endpoint direction is undefined.
class DegenerateEndpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The mean of H - V along the loop is not positive; no period can be assigned.
class EnergyConditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The orbit never enters the ball of the requested marker radius.
class MarkerUndefinedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A comparison window extends past the domain of one of the orbits.
class DomainError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A sweep produced fewer than two converged runs.
class SweepFailedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace varorb
