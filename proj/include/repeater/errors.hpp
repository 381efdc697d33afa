#pragma once

#include <stdexcept>
#include <string>

namespace repeater {

// Bad user input: malformed config files, invalid parameter ranges,
// unsupported backend/strategy combinations.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failure of the numerics themselves, e.g. a singular Fourier division or a
// distribution entry that cannot be repaired by clamping.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace repeater
