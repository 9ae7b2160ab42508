#pragma once

#include <stdexcept>
#include <string>

namespace lf {

// A probability carried together with its complement so that both tails
// keep full relative precision: near p = 1 the complement c is stored
// directly instead of being recovered as 1 - p.
struct Prob {
  double p = 0.5;
  double c = 0.5;

  static Prob lower(double p) { return {p, 1.0 - p}; }
  static Prob upper(double c) { return {1.0 - c, c}; }
  // Picks the representation that keeps the smaller side exact.
  static Prob of(double p) { return p <= 0.5 ? lower(p) : upper(1.0 - p); }

  Prob mirror() const { return {c, p}; }
};

// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or data; maps to CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical failure; maps to CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DivergentTail : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroDenominator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SupportOutsideGrid : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace lf
