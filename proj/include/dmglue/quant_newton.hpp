#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "dmglue/errors.hpp"

namespace dmglue {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorFn = std::function<Vector(const Vector&)>;

// Largest singular value by power iteration on L^T L, 1e-8 relative.
double estimate_operator_norm(const Matrix& L);

// Zero-finding problem with a quantified right inverse:
//   d0f Q = id,  ||Q|| <= c,
//   ||d_x f - d0f|| <= 1/(2c)  for ||x|| < delta,
//   ||f(0)|| <= delta / (4c).
// All four conditions are measured before iterating, the Lipschitz one by
// sampling Jacobians at lip_check_samples points in the ball.
struct NewtonProblem {
  VectorFn f;
  Matrix d0f;  // q x m
  Matrix Q;    // m x q
  double c = 1.0;
  double delta = 1.0;
  int lip_check_samples = 64;
  // analytic Jacobian; when absent central differences with
  // step 1e-6 (1 + ||x||) are used
  std::function<Matrix(const Vector&)> jacobian_at;
  std::uint64_t seed = 12345;
};

struct NewtonResult {
  Vector x_star;
  double residual = 0.0;
  int iterations = 0;
  double norm_bound = 0.0;           // 2 c ||f(0)||
  double measured_contraction = 0.0;  // max displacement ratio seen
};

// Iterates x <- -Q f(x) + Q d0f x from 0, carried in y-space so that the
// solution lies in Im Q by construction.
NewtonResult newton_solve(const NewtonProblem& prob, double tol = 1e-12,
                          int max_iter = 200);

// Family of uniform 1/2-contractions phi_t with phi drift bounded by K t.
// K = 0 means "measure it from the supplied t values".
struct FixedPointFamily {
  std::function<Vector(double, const Vector&)> phi;
  double K = 0.0;
  double sample_radius = 0.3;  // window around x0* for the contraction check
  int contraction_samples = 64;
  std::uint64_t seed = 999;
};

struct FamilyPoint {
  double t = 0.0;
  Vector x_star;
  double displacement = 0.0;  // ||x_t* - x_0*||
  double bound = 0.0;         // 2 K t + 1e-12
  bool bound_holds = false;
};

struct FamilyResult {
  std::vector<FamilyPoint> points;
  double k_measured = 0.0;
  bool all_bounds_hold = true;
};

FamilyResult family_fixed_points(const FixedPointFamily& fam,
                                 const std::vector<double>& t_values,
                                 const Vector& x0_star);

}  // namespace dmglue
