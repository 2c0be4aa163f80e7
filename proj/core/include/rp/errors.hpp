#pragma once

#include <stdexcept>
#include <string>

namespace rp {

// Invalid or inconsistent run configuration (bad JSON, unknown keys,
// out-of-range values). CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite parameter, value estimate or TD error during training.
// CLI maps this to exit code 3.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / format failures (missing files, bad IDX magic, short reads).
// CLI maps this to exit code 4.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rp
