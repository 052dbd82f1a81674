#pragma once

#include <stdexcept>
#include <string>

namespace modalctl {

/// Invalid configuration or structurally bad input (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown: singular Gramian, non-finite values (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace modalctl
