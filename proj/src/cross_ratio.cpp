#include "dmglue/cross_ratio.hpp"

#include <cmath>

namespace dmglue {
namespace {

// difference with a guard against catastrophic cancellation of finite values
Complex guarded_diff(const ExtComplex& a, const ExtComplex& b,
                     double threshold) {
  Complex d = a.value() - b.value();
  double scale = std::abs(a.value()) + std::abs(b.value());
  if (scale > 0.0 && std::abs(d) * threshold < scale)
    throw NumericalCancellation(
        "cross_ratio: relative cancellation beyond threshold in a difference");
  return d;
}

// indices of the coincident pairs among the six unordered pairs
struct Coincidences {
  bool p01 = false, p23 = false, p12 = false, p03 = false, p02 = false,
       p13 = false;
  int count() const {
    return int(p01) + int(p23) + int(p12) + int(p03) + int(p02) + int(p13);
  }
};

Coincidences find_coincidences(const Quadruple& q, double tol) {
  Coincidences c;
  c.p01 = approx_equal(q.z[0], q.z[1], tol);
  c.p23 = approx_equal(q.z[2], q.z[3], tol);
  c.p12 = approx_equal(q.z[1], q.z[2], tol);
  c.p03 = approx_equal(q.z[0], q.z[3], tol);
  c.p02 = approx_equal(q.z[0], q.z[2], tol);
  c.p13 = approx_equal(q.z[1], q.z[3], tol);
  return c;
}

}  // namespace

bool Quadruple::admissible(double tol) const {
  return find_coincidences(*this, tol).count() <= 1;
}

ExtComplex cross_ratio(const Quadruple& q, double cancellation_threshold) {
  const Coincidences c = find_coincidences(q, 1e-12);
  if (c.count() > 1)
    throw DegenerateQuadruple(
        "cross_ratio: three points coincide or two pairs coincide");
  if (c.p01 || c.p23) return ExtComplex::infinity();
  if (c.p12 || c.p03) return ExtComplex(0.0);
  if (c.p02 || c.p13) return ExtComplex(1.0);

  // general position; at most one point can be infinite
  const ExtComplex &z0 = q.z[0], &z1 = q.z[1], &z2 = q.z[2], &z3 = q.z[3];
  const double thr = cancellation_threshold;
  if (z0.is_infinite())
    return ExtComplex(-guarded_diff(z1, z2, thr) / guarded_diff(z2, z3, thr));
  if (z1.is_infinite())
    return ExtComplex(-guarded_diff(z3, z0, thr) / guarded_diff(z2, z3, thr));
  if (z2.is_infinite())
    return ExtComplex(-guarded_diff(z3, z0, thr) / guarded_diff(z0, z1, thr));
  if (z3.is_infinite())
    return ExtComplex(-guarded_diff(z1, z2, thr) / guarded_diff(z0, z1, thr));

  Complex num = guarded_diff(z1, z2, thr) * guarded_diff(z3, z0, thr);
  Complex den = guarded_diff(z0, z1, thr) * guarded_diff(z2, z3, thr);
  return ExtComplex(num / den);
}

ExtComplex apply_symmetry(const ExtComplex& w, SymmetryOp op) {
  if (op == SymmetryOp::swap_middle_pair) {
    if (w.is_infinite()) return ExtComplex(1.0);  // inf/(inf-1)
    Complex v = w.value();
    if (std::abs(v - 1.0) == 0.0) return ExtComplex::infinity();
    return ExtComplex(v / (v - 1.0));
  }
  // first or last pair: w -> 1-w
  if (w.is_infinite()) return ExtComplex::infinity();
  return ExtComplex(1.0 - w.value());
}

ExtComplex recursion_1234(const ExtComplex& w0123, const ExtComplex& w0124) {
  if (w0123.is_infinite() && w0124.is_infinite())
    throw DegenerateRecursion("recursion_1234: both inputs infinite");
  if (w0124.is_infinite()) return ExtComplex(1.0);
  if (w0123.is_infinite()) return ExtComplex(0.0);
  Complex a = w0123.value(), b = w0124.value();
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(b - a) < 1e-14 * scale)
    throw DegenerateRecursion("recursion_1234: w0124 - w0123 vanishes");
  return ExtComplex((b - 1.0) / (b - a));
}

}  // namespace dmglue
