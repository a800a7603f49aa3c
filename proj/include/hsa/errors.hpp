#pragma once

#include <stdexcept>
#include <string>

namespace hsa {

/// Raised when user-supplied configuration (CLI flags, config files,
/// solver parameters) is invalid. Maps to exit code 2 in the CLI.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when data violates a structural requirement that the algorithms
/// rely on (inconsistent energies, negative radicands beyond rounding,
/// non-matching tails in norms). Maps to exit code 3 in the CLI.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hsa
