#pragma once

#include <stdexcept>
#include <string>

namespace caustica {

/// Argument outside the mathematical domain of an operation (non-finite, negative, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Index outside the supported range (zero indices are 1-based).
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// An iterative method failed to reach its tolerance. `diagnostic` carries the
/// state at the point of failure in a human-readable form.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::string diagnostic)
      : std::runtime_error(what), diagnostic_(std::move(diagnostic)) {}
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}

  const std::string& diagnostic() const noexcept { return diagnostic_; }

 private:
  std::string diagnostic_;
};

/// Grid too coarse for the requested frequency window.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not available for the given spectrum source.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few samples for a fit.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)), detail_(what) {}

  const std::string& field() const noexcept { return field_; }
  /// The message without the field prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string field_;
  std::string detail_;
};

}  // namespace caustica
