#pragma once

#include <stdexcept>
#include <string>

namespace declab {

// Domain error with a stable message prefix; the CLI maps these to exit code 2
// when they originate from configuration, otherwise they surface as run errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / usage problem (bad field, missing file, out-of-range knob).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace declab
