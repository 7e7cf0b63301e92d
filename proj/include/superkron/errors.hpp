#pragma once

#include <stdexcept>
#include <string>

namespace superkron {

/// An argument lies within the pole-exclusion radius of a singular set.
class PoleError : public std::domain_error {
 public:
  explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

/// A symbolic operator requested a derivative outside the closed catalog.
class CatalogError : public std::out_of_range {
 public:
  explicit CatalogError(const std::string& what) : std::out_of_range(what) {}
};

/// Theta series could not reach the requested tolerance within k_max terms.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Operands built over different generator sets.
class AlgebraMismatch : public std::invalid_argument {
 public:
  explicit AlgebraMismatch(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace superkron
