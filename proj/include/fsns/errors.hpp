#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fsns {

/// Two fields (or a field and an operator) were built on different grids.
class GridMismatch : public std::invalid_argument {
 public:
  explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A parameter lies outside the range an operation is defined on.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// (alpha, eta) outside the range where the bilinear estimates are known.
class InadmissibleParameters : public DomainError {
 public:
  explicit InadmissibleParameters(const std::string& what) : DomainError(what) {}
};

/// Invalid or incomplete run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed snapshot, report or manifest bytes.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// A non-finite coefficient or an H^1 norm above the blow-up threshold.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(std::size_t step, double time, const std::string& what)
      : std::runtime_error(what), step_(step), time_(time) {}

  std::size_t step() const { return step_; }
  double time() const { return time_; }

 private:
  std::size_t step_;
  double time_;
};

}  // namespace fsns
