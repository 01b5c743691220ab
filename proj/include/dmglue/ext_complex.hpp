#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "dmglue/errors.hpp"

namespace dmglue {

using Complex = std::complex<double>;

// A point of the Riemann sphere: either a finite complex number or the tagged
// point at infinity. NaN/Inf payloads are rejected at construction; infinity
// exists only as the tag, so arithmetic can treat it symbolically.
class ExtComplex {
 public:
  ExtComplex() : value_(0.0, 0.0), infinite_(false) {}

  ExtComplex(Complex v) : value_(v), infinite_(false) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error("ExtComplex: non-finite payload; use ExtComplex::infinity()");
  }
  ExtComplex(double re) : ExtComplex(Complex(re, 0.0)) {}

  static ExtComplex infinity() {
    ExtComplex p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  Complex value() const {
    if (infinite_) throw InfinityValue("value() on the point at infinity");
    return value_;
  }

  std::string str() const;

 private:
  Complex value_;
  bool infinite_;
};

// Sphere equality: finite points within an absolute tolerance, infinity only
// equal to infinity.
inline bool approx_equal(const ExtComplex& a, const ExtComplex& b,
                         double tol = 1e-12) {
  if (a.is_infinite() || b.is_infinite())
    return a.is_infinite() && b.is_infinite();
  return std::abs(a.value() - b.value()) <= tol;
}

inline std::string ExtComplex::str() const {
  if (infinite_) return "inf";
  return "(" + std::to_string(value_.real()) + "," +
         std::to_string(value_.imag()) + ")";
}

}  // namespace dmglue
