#pragma once

#include <array>

#include "dmglue/ext_complex.hpp"
#include "dmglue/mobius.hpp"

namespace dmglue {

// Ordered 4-tuple of sphere points. Admissible tuples have at most one
// coincident pair: a triple collision, or two coincident pairs at once, has
// no well-defined cross ratio.
struct Quadruple {
  std::array<ExtComplex, 4> z;

  Quadruple(ExtComplex z0, ExtComplex z1, ExtComplex z2, ExtComplex z3)
      : z{z0, z1, z2, z3} {}

  bool admissible(double tol = 1e-12) const;
};

// w(z0,z1,z2,z3) = (z1-z2)(z3-z0) / ((z0-z1)(z2-z3)), normalized so that
// w(0,1,inf,l) = l. Coincident pairs give the exact nodal value:
//   z0=z1 or z2=z3 -> inf,  z1=z2 or z0=z3 -> 0,  z0=z2 or z1=z3 -> 1.
// A single point at infinity is evaluated by its symbolic limit, never by
// dividing large floats. Throws DegenerateQuadruple for inadmissible input
// and NumericalCancellation when a difference of nearly equal large values
// would destroy more than `cancellation_threshold` of relative precision.
ExtComplex cross_ratio(const Quadruple& q,
                       double cancellation_threshold = 1e8);

inline ExtComplex cross_ratio(ExtComplex z0, ExtComplex z1, ExtComplex z2,
                              ExtComplex z3,
                              double cancellation_threshold = 1e8) {
  return cross_ratio(Quadruple(z0, z1, z2, z3), cancellation_threshold);
}

// Index swaps acting on the value of the cross ratio:
//   swapping the first or the last pair sends w to 1-w,
//   swapping the middle pair sends w to w/(w-1).
enum class SymmetryOp { swap_first_pair, swap_middle_pair, swap_last_pair };

ExtComplex apply_symmetry(const ExtComplex& w, SymmetryOp op);

// Given w0123 and w0124 for five points, returns w1234:
//   w1234 = (w0124 - 1) / (w0124 - w0123).
// Throws DegenerateRecursion when the denominator vanishes below
// 1e-14 * scale (the five points were not in general position).
ExtComplex recursion_1234(const ExtComplex& w0123, const ExtComplex& w0124);

}  // namespace dmglue
