#pragma once

#include "dmglue/ext_complex.hpp"

namespace dmglue {

// z -> (a z + b) / (c z + d), as a sphere automorphism. The determinant must
// be nonzero relative to the coefficient scale or the map collapses the
// sphere to a point.
struct MobiusMap {
  Complex a, b, c, d;

  MobiusMap(Complex a_, Complex b_, Complex c_, Complex d_)
      : a(a_), b(b_), c(c_), d(d_) {
    double scale = std::abs(a) * std::abs(d) + std::abs(b) * std::abs(c);
    double det = std::abs(a * d - b * c);
    if (scale == 0.0 || det <= 1e-12 * scale)
      throw DegenerateMobius("MobiusMap: |ad-bc| <= 1e-12 * coefficient scale");
  }

  static MobiusMap identity() { return MobiusMap(1.0, 0.0, 0.0, 1.0); }
};

// Sphere action, with the pole and the point at infinity handled exactly.
inline ExtComplex mobius_apply(const MobiusMap& m, const ExtComplex& z) {
  if (z.is_infinite()) {
    if (std::abs(m.c) == 0.0) return ExtComplex::infinity();
    return ExtComplex(m.a / m.c);
  }
  Complex num = m.a * z.value() + m.b;
  Complex den = m.c * z.value() + m.d;
  if (std::abs(den) == 0.0) return ExtComplex::infinity();
  return ExtComplex(num / den);
}

}  // namespace dmglue
