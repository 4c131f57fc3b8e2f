#pragma once

#include <stdexcept>
#include <string>

namespace levsim {

// Invalid or inconsistent user input (config files, CLI arguments).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: instability, non-convergence, out-of-domain request.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace levsim
