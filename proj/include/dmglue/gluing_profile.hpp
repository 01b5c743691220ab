#pragma once

#include <functional>
#include <vector>

#include "dmglue/errors.hpp"
#include "dmglue/ext_complex.hpp"
#include "dmglue/mobius.hpp"

namespace dmglue {

// Radial power map (r, theta) -> (r^p, theta). Multiplicative on C,
// C^1 at the origin; the inverse is not.
class GluingProfile {
 public:
  explicit GluingProfile(double p);

  double exponent() const { return p_; }

  Complex apply(Complex z) const;    // z |z|^{p-1}
  Complex inverse(Complex w) const;  // w |w|^{1/p-1}

 private:
  double p_;
};

// z -> z / psi^{-1}(b psi(z) + d), the profile conjugate of w -> w/(bw+d).
// Requires the source map to fix 0.
class ConjugatedTransition {
 public:
  ConjugatedTransition(const GluingProfile& profile, const MobiusMap& t);

  Complex operator()(Complex z) const;
  Complex derivative_at_zero() const;  // 1 / psi^{-1}(d)

  Complex b() const { return b_; }
  Complex d() const { return d_; }

 private:
  GluingProfile profile_;
  Complex b_, d_;
};

struct Config1Reparam {
  Complex y_tilde, u_tilde, v_tilde;
};

struct Config2Reparam {
  Complex y_tilde, u_tilde;
};

// One-node chart (x_tilde generic, z_tilde small):
//   y~ = x~ - x~ psi(z~)
//   u~ = z~ / psi^{-1}(psi(z~) x~ - x~ + 1)
//   v~ = psi^{-1}(x~) z~ / psi^{-1}(psi(z~) x~ - x~ + 1)
Config1Reparam reparam_config1(const GluingProfile& profile, Complex x_tilde,
                               Complex z_tilde);

// Two-node chart (both inputs small):
//   y~ = x~ psi^{-1}(1 - psi(z~))
//   u~ = z~ / psi^{-1}(psi(z~) psi(x~) - psi(x~) + 1)
Config2Reparam reparam_config2(const GluingProfile& profile, Complex x_tilde,
                               Complex z_tilde);

// Point split into gluing coordinates (zero pattern fixes the stratum)
// and the rest.
struct ReparamPoint {
  std::vector<Complex> a_tilde;
  std::vector<Complex> b;
};

using ReparamMap = std::function<std::vector<Complex>(const ReparamPoint&)>;

// Central difference quotients along one input coordinate and one real
// direction, over a decreasing step ladder.
struct DifferenceTrace {
  std::size_t input_index = 0;  // position in (a_tilde..., b...)
  char direction = 'r';         // 'r' real offset, 'i' imaginary offset
  std::vector<double> steps;
  std::vector<double> first_quotients;   // max output norm of (f(+h)-f(-h))/2h
  std::vector<double> second_quotients;  // same for (f(+h)-2f(0)+f(-h))/h^2
  std::vector<Complex> limit;            // Richardson limit per output coord
  double rate = 0.0;  // log-log slope of the first quotients
  bool diverging = false;
};

struct C1CheckReport {
  std::vector<DifferenceTrace> traces;
  bool c1_evidence = true;      // no first-order divergence
  bool smooth_evidence = true;  // second-order quotients stay bounded too
};

// Diagnostic only: divergence means monotone growth by >= 10x across the
// ladder. Rates are least-squares slopes, usable when the quotients decay
// to 0 (slope > 0) or blow up (slope < 0).
C1CheckReport c1ss_finite_difference_check(
    const ReparamMap& map, const ReparamPoint& point,
    const std::vector<double>& steps = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7});

}  // namespace dmglue
