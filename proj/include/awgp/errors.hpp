#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace awgp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (bad Hurst index,
/// non-positive Gamma argument, |rho| > 1, ...). Maps to CLI exit status 2.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files, inconsistent dimensions or horizons.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Kernel requested at a point where it is not defined (s = 0 for the
/// Molchan-Golosov kernel).
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Failure of a numerical method. Maps to CLI exit status 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Series or quadrature failed its convergence criterion.
class NonConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotPositiveDefinite : public NumericalError {
 public:
  NotPositiveDefinite(std::size_t pivot, double value)
      : NumericalError("matrix is not positive definite: pivot " + std::to_string(pivot) +
                       " = " + std::to_string(value)),
        pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// A simulated path left the admissible state range.
class PathExplosion : public NumericalError {
 public:
  PathExplosion(std::size_t path, std::size_t step, double value)
      : NumericalError("path " + std::to_string(path) + " exploded at step " +
                       std::to_string(step) + " (|X| = " + std::to_string(value) + ")"),
        path_(path) {}
  std::size_t path() const noexcept { return path_; }

 private:
  std::size_t path_;
};

}  // namespace awgp
