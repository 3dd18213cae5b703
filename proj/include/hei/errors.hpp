#pragma once

#include <stdexcept>
#include <string>

namespace hei {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch or an out-of-range parameter.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Correlation matrix could not be factored, even after nugget escalation.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double nugget)
      : Error(what), nugget_(nugget) {}

  /// Last nugget that was tried.
  [[nodiscard]] double nugget() const noexcept { return nugget_; }

 private:
  double nugget_;
};

/// Fewer observations than trend coefficients (n <= q).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Student-t degrees of freedom too small for the requested quantity.
class DegreesOfFreedomError : public Error {
 public:
  using Error::Error;
};

/// Residual sum of squares is zero (constant data), so scale estimates collapse.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

/// The black-box objective failed to produce a finite value.
class ObjectiveError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (CLI or RunConfig).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hei
