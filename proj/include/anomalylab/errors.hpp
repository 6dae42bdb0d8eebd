#pragma once

#include <stdexcept>
#include <string>

namespace anomalylab {

// Invalid input that no computation can recover from (negative grid size,
// hopping ratio outside its range, unknown enum string, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Malformed scenario configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Two independent routes to the same quantity disagree beyond tolerance.
class ConsistencyError : public std::runtime_error {
public:
    explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

// A band overlap vanished; the lower band is (nearly) degenerate with the
// upper one and the gauge-invariant plaquette is ill defined.
class NearDegeneracyError : public std::runtime_error {
public:
    explicit NearDegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

// Fixed-step integrator lost norm beyond tolerance; reduce dt.
class StepSizeError : public std::runtime_error {
public:
    explicit StepSizeError(const std::string& what) : std::runtime_error(what) {}
};

// File could not be opened or written; exit code 4 in the CLI.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace anomalylab
