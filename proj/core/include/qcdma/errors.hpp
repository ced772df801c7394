#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcdma {

/// Invalid parameters, malformed configuration, mismatched shapes.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A trajectory left the configured bounding box. Carries the step index
/// at which the state first escaped.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace qcdma
