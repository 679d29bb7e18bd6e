#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hetnetcov {

// Base for all library failures.  `kind()` is a stable machine-readable tag
// that ends up in run manifests; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Invalid user input: bad config values, out-of-range arguments.  The CLI
// maps this family to exit code 2.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
  ValidationError(std::string kind, const std::string& what) : Error(std::move(kind), what) {}
};

// A numerical routine could not meet its accuracy contract.  Exit code 3.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error("convergence", what) {}
  ConvergenceError(std::string kind, const std::string& what) : Error(std::move(kind), what) {}
};

// Filesystem trouble while reading configs or writing artifacts.  Exit code 4.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

// A sampling window held fewer points than the caller asked for; the caller
// is expected to resample with a larger window.
class InsufficientPointsError : public Error {
 public:
  explicit InsufficientPointsError(const std::string& what)
      : Error("insufficient_points", what) {}
};

// Conditioning on P <= t left no representable probability mass.
class ZeroMassError : public Error {
 public:
  explicit ZeroMassError(const std::string& what) : Error("zero_mass", what) {}
};

// A density evaluation was requested where the law has a point mass
// (a zero shadowing spread), so no density exists.
class DegenerateSigmaError : public Error {
 public:
  explicit DegenerateSigmaError(const std::string& what)
      : Error("degenerate_sigma", what) {}
};

// The truncation radius needed to bound the far-field tail could not be
// established (for example a radial exponent too close to 2).
class TailNotConvergedError : public ConvergenceError {
 public:
  explicit TailNotConvergedError(const std::string& what)
      : ConvergenceError("tail_not_converged", what) {}
};

// A transform inversion produced terms so large relative to the result that
// the value cannot be trusted.
class InversionUnstableError : public ConvergenceError {
 public:
  explicit InversionUnstableError(const std::string& what)
      : ConvergenceError("inversion_unstable", what) {}
};

// A quadrature self-check disagreed with its refinement beyond tolerance.
class QuadratureNotConvergedError : public ConvergenceError {
 public:
  explicit QuadratureNotConvergedError(const std::string& what)
      : ConvergenceError("quadrature_not_converged", what) {}
};

// An empirical conditioning bin collected fewer accepted samples than the
// minimum needed for a usable estimate.
class InsufficientConditionalSamplesError : public Error {
 public:
  explicit InsufficientConditionalSamplesError(const std::string& what)
      : Error("insufficient_conditional_samples", what) {}
};

}  // namespace hetnetcov
