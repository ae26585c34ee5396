#pragma once

#include <stdexcept>
#include <string>

namespace boussctl {

// Inputs violate a documented precondition (mean constraints, ranges,
// mismatched truncation). Maps to CLI exit status 2.
class ConstraintViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public ConstraintViolation {
 public:
  using ConstraintViolation::ConstraintViolation;
};

// A computation could not be completed numerically: blow-up, singular or
// ill-conditioned systems, non-convergence. Maps to CLI exit status 3.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystem : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class BlowUp : public NumericalFailure {
 public:
  BlowUp(const std::string& what, double time) : NumericalFailure(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class NonConvergence : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// A computed result failed its own a-posteriori check (terminal error of a
// synthesized control). Carries the achieved value.
class VerificationFailure : public NumericalFailure {
 public:
  VerificationFailure(const std::string& what, double achieved)
      : NumericalFailure(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace boussctl
