#pragma once

#include <stdexcept>
#include <string>

namespace zenophase {

/// Precondition or argument-domain violation (non-unit axis, dimension
/// mismatch, non-Hermitian generator, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The surviving amplitude of a projective sequence vanished, so its phase is
/// undefined.
class ExtinguishedTrajectory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Consecutive states in a discretized loop are (nearly) orthogonal.
class IllConditionedDiscretization : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No closed-loop switching schedule was found.
class NoClosure : public std::runtime_error {
 public:
  NoClosure(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Fringe fitting failures: exhausted search window, unfittable contrast,
/// flat model at the optimum.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace zenophase
