#include "dmglue/gluing_profile.hpp"

#include <cmath>
#include <limits>

namespace dmglue {

namespace {

constexpr double kDenTol = 1e-12;

}  // namespace

GluingProfile::GluingProfile(double p) : p_(p) {
  if (!std::isfinite(p) || !(p > 2.0))
    throw InvalidProfile("profile exponent must satisfy p > 2, got " +
                         std::to_string(p));
}

Complex GluingProfile::apply(Complex z) const {
  double r = std::abs(z);
  if (r == 0.0) return Complex(0.0, 0.0);
  return z * std::pow(r, p_ - 1.0);
}

Complex GluingProfile::inverse(Complex w) const {
  double r = std::abs(w);
  if (r == 0.0) return Complex(0.0, 0.0);
  return w * std::pow(r, 1.0 / p_ - 1.0);
}

ConjugatedTransition::ConjugatedTransition(const GluingProfile& profile,
                                           const MobiusMap& t)
    : profile_(profile) {
  double scale = std::abs(t.a) + std::abs(t.b) + std::abs(t.c) + std::abs(t.d);
  if (std::abs(t.b) > kDenTol * scale)
    throw BadParameters("transition must fix 0");
  if (std::abs(t.a) <= kDenTol * scale)
    throw DegenerateMobius("transition must be invertible at 0");
  // normalize (az)/(cz+d) to z/(b'z+d')
  b_ = t.c / t.a;
  d_ = t.d / t.a;
  if (std::abs(d_) <= kDenTol)
    throw PoleInNeighborhood("pole at the origin: d = 0");
}

Complex ConjugatedTransition::operator()(Complex z) const {
  Complex den_arg = b_ * profile_.apply(z) + d_;
  double scale = std::abs(b_ * profile_.apply(z)) + std::abs(d_);
  if (std::abs(den_arg) <= kDenTol * std::max(1.0, scale))
    throw PoleInNeighborhood("b psi(z) + d vanishes at the evaluation point");
  if (std::abs(z) == 0.0) return Complex(0.0, 0.0);
  return z / profile_.inverse(den_arg);
}

Complex ConjugatedTransition::derivative_at_zero() const {
  return Complex(1.0, 0.0) / profile_.inverse(d_);
}

Config1Reparam reparam_config1(const GluingProfile& profile, Complex x_tilde,
                               Complex z_tilde) {
  if (std::abs(x_tilde) <= 0.05 || std::abs(x_tilde - 1.0) <= 0.05)
    throw ChartDomainViolation("x must stay 0.05 away from {0, 1}");
  if (std::abs(z_tilde) >= 0.5)
    throw ChartDomainViolation("gluing coordinate must satisfy |z| < 0.5");
  Complex pz = profile.apply(z_tilde);
  Complex den_arg = pz * x_tilde - x_tilde + 1.0;
  if (std::abs(den_arg) <= kDenTol)
    throw ChartDomainViolation("psi(z) x - x + 1 vanishes");
  Complex den = profile.inverse(den_arg);
  Config1Reparam out;
  out.y_tilde = x_tilde - x_tilde * pz;
  out.u_tilde = z_tilde / den;
  out.v_tilde = profile.inverse(x_tilde) * z_tilde / den;
  return out;
}

Config2Reparam reparam_config2(const GluingProfile& profile, Complex x_tilde,
                               Complex z_tilde) {
  if (std::abs(x_tilde) >= 0.5 || std::abs(z_tilde) >= 0.5)
    throw ChartDomainViolation("gluing coordinates must satisfy |.| < 0.5");
  Complex px = profile.apply(x_tilde);
  Complex pz = profile.apply(z_tilde);
  Complex den_arg = pz * px - px + 1.0;
  if (std::abs(den_arg) <= kDenTol)
    throw ChartDomainViolation("psi(z) psi(x) - psi(x) + 1 vanishes");
  Config2Reparam out;
  out.y_tilde = x_tilde * profile.inverse(1.0 - pz);
  out.u_tilde = z_tilde / profile.inverse(den_arg);
  return out;
}

namespace {

ReparamPoint shifted(const ReparamPoint& point, std::size_t index,
                     Complex offset) {
  ReparamPoint moved = point;
  if (index < moved.a_tilde.size())
    moved.a_tilde[index] += offset;
  else
    moved.b[index - moved.a_tilde.size()] += offset;
  return moved;
}

double max_norm(const std::vector<Complex>& v) {
  double m = 0.0;
  for (Complex w : v) m = std::max(m, std::abs(w));
  return m;
}

// least-squares slope of log(q) vs log(h) over the positive entries
double loglog_slope(const std::vector<double>& steps,
                    const std::vector<double>& quotients) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(quotients[k] > 0.0) || !std::isfinite(quotients[k])) continue;
    double lx = std::log(steps[k]), ly = std::log(quotients[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

bool grows_tenfold(const std::vector<double>& q) {
  if (q.size() < 2) return false;
  for (std::size_t k = 0; k + 1 < q.size(); ++k)
    if (!(q[k + 1] > q[k])) return false;
  return q.back() >= 10.0 * q.front();
}

}  // namespace

C1CheckReport c1ss_finite_difference_check(const ReparamMap& map,
                                           const ReparamPoint& point,
                                           const std::vector<double>& steps) {
  if (steps.size() < 2) throw BadParameters("need at least two steps");
  for (std::size_t k = 0; k + 1 < steps.size(); ++k)
    if (!(steps[k] > steps[k + 1]) || !(steps[k + 1] > 0.0))
      throw BadParameters("steps must decrease and stay positive");

  const std::size_t dim = point.a_tilde.size() + point.b.size();
  const std::vector<Complex> at_point = map(point);

  C1CheckReport report;
  for (std::size_t index = 0; index < dim; ++index) {
    for (char direction : {'r', 'i'}) {
      Complex dir = direction == 'r' ? Complex(1, 0) : Complex(0, 1);
      DifferenceTrace trace;
      trace.input_index = index;
      trace.direction = direction;
      trace.steps = steps;

      std::vector<std::vector<Complex>> first_per_step;
      for (double h : steps) {
        std::vector<Complex> plus = map(shifted(point, index, h * dir));
        std::vector<Complex> minus = map(shifted(point, index, -h * dir));
        std::vector<Complex> first(plus.size()), second(plus.size());
        for (std::size_t j = 0; j < plus.size(); ++j) {
          first[j] = (plus[j] - minus[j]) / (2.0 * h);
          second[j] = (plus[j] - 2.0 * at_point[j] + minus[j]) / (h * h);
        }
        trace.first_quotients.push_back(max_norm(first));
        trace.second_quotients.push_back(max_norm(second));
        first_per_step.push_back(std::move(first));
      }

      // one Richardson step on the two finest quotients, assuming O(h^2)
      const auto& coarse = first_per_step[first_per_step.size() - 2];
      const auto& fine = first_per_step.back();
      double ratio = steps[steps.size() - 2] / steps.back();
      double r2 = ratio * ratio;
      trace.limit.resize(fine.size());
      for (std::size_t j = 0; j < fine.size(); ++j)
        trace.limit[j] = (r2 * fine[j] - coarse[j]) / (r2 - 1.0);

      trace.rate = loglog_slope(steps, trace.first_quotients);
      trace.diverging = grows_tenfold(trace.first_quotients);
      if (trace.diverging) report.c1_evidence = false;
      if (grows_tenfold(trace.second_quotients)) report.smooth_evidence = false;
      report.traces.push_back(std::move(trace));
    }
  }
  return report;
}

}  // namespace dmglue
