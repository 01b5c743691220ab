#pragma once

#include <stdexcept>
#include <string>

namespace dmglue {

// Base for every typed failure in this library. Callers that only want
// "did it work" can catch this; tests catch the concrete types.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- cross ratio ---
class DegenerateQuadruple : public Error {
 public:
  using Error::Error;
};
class NumericalCancellation : public Error {
 public:
  using Error::Error;
};
class DegenerateRecursion : public Error {
 public:
  using Error::Error;
};
class DegenerateMobius : public Error {
 public:
  using Error::Error;
};
class InfinityValue : public Error {  // value() called on the point at infinity
 public:
  using Error::Error;
};

// --- moduli atlas ---
class ChartDomainViolation : public Error {
 public:
  using Error::Error;
};
class InvalidChartChoice : public Error {
 public:
  using Error::Error;
};
class AmbiguousStratum : public Error {
 public:
  using Error::Error;
};

// --- gluing profile ---
class InvalidProfile : public Error {
 public:
  using Error::Error;
};
class PoleInNeighborhood : public Error {
 public:
  using Error::Error;
};

// --- stratified spaces ---
class AmbiguousCoordinate : public Error {
 public:
  using Error::Error;
};
class MismatchedAmbient : public Error {
 public:
  using Error::Error;
};

// --- quantitative Newton ---
class HypothesisViolation : public Error {
 public:
  HypothesisViolation(const std::string& condition, double measured,
                      double required)
      : Error("hypothesis violated: " + condition +
              " (measured " + std::to_string(measured) + ", required " +
              std::to_string(required) + ")"),
        condition_(condition),
        measured_(measured),
        required_(required) {}

  const std::string& condition() const { return condition_; }
  double measured() const { return measured_; }
  double required() const { return required_; }

 private:
  std::string condition_;
  double measured_;
  double required_;
};
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// --- neck simulator ---
class BadParameters : public Error {
 public:
  using Error::Error;
};
class ResolutionInsufficient : public Error {
 public:
  using Error::Error;
};
class RangeViolation : public Error {
 public:
  using Error::Error;
};

// --- reports / CLI ---
class ReportError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dmglue
