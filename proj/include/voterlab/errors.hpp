#ifndef VOTERLAB_ERRORS_HPP
#define VOTERLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace voterlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char *kind() const noexcept { return "error"; }
};

/// Invalid parameters, malformed specs, failed preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "validation"; }
};

/// Coordinate outside [0,1].
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char *kind() const noexcept override { return "domain"; }
};

/// Dense storage above the configured vertex limit.
class SizeLimitError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "size_limit"; }
};

/// A numerical procedure ran out of its refinement budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "non_convergence"; }
};

/// Operation requested on a kernel family it does not cover.
class UnsupportedError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "unsupported"; }
};

}  // namespace voterlab

#endif  // VOTERLAB_ERRORS_HPP
