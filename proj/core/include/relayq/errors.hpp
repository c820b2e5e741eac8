#pragma once

#include <stdexcept>
#include <string>

namespace relayq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The analytic engine needs identically distributed hop service times.
class AsymmetricLinks : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// An LST argument left its domain (negative real part).
class DomainError : public Error {
 public:
  using Error::Error;
};

class StabilityViolation : public Error {
 public:
  StabilityViolation(const std::string& what, double margin) : Error(what), margin_(margin) {}
  double margin() const { return margin_; }

 private:
  double margin_;
};

// Delay constraint cannot be met even at N = 1.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// Any numerical procedure that failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class QuadratureNonConvergence : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

class RecursionNonConvergence : public ConvergenceError {
 public:
  RecursionNonConvergence(const std::string& what, int depth, double gap)
      : ConvergenceError(what), depth_(depth), gap_(gap) {}
  int depth() const { return depth_; }
  double gap() const { return gap_; }

 private:
  int depth_;
  double gap_;
};

class NoRootBracketed : public ConvergenceError {
 public:
  NoRootBracketed(const std::string& what, double residual_lo, double residual_hi)
      : ConvergenceError(what), residual_lo_(residual_lo), residual_hi_(residual_hi) {}
  double residual_lo() const { return residual_lo_; }
  double residual_hi() const { return residual_hi_; }

 private:
  double residual_lo_;
  double residual_hi_;
};

class Pi0NonConvergence : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

// Upstream waiting time shorter than the first-stage service time.
class InvalidDelay : public Error {
 public:
  using Error::Error;
};

// Simulation results pooled from different configurations.
class ConfigMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace relayq
