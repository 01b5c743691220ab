#include "dmglue/quant_newton.hpp"

#include <cmath>

#include "dmglue/rng.hpp"

namespace dmglue {

double estimate_operator_norm(const Matrix& L) {
  if (L.size() == 0) return 0.0;
  Matrix gram = L.transpose() * L;
  Vector v(gram.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = 1.0 + static_cast<double>(i) / (static_cast<double>(v.size()) + 1);
  v.normalize();
  double sigma2 = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    Vector w = gram * v;
    double norm = w.norm();
    if (norm == 0.0) return 0.0;
    double next = v.dot(w);
    v = w / norm;
    if (iter > 0 && std::abs(next - sigma2) <= 1e-16 + 1e-9 * std::abs(next)) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(std::max(0.0, sigma2));
}

namespace {

Matrix fd_jacobian(const VectorFn& f, const Vector& x, Eigen::Index q) {
  double h = 1e-6 * (1.0 + x.norm());
  Matrix jac(q, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector plus = x, minus = x;
    plus(j) += h;
    minus(j) -= h;
    jac.col(j) = (f(plus) - f(minus)) / (2.0 * h);
  }
  return jac;
}

Vector random_in_ball(Rng& rng, Eigen::Index dim, double radius) {
  Vector dir(dim);
  for (Eigen::Index i = 0; i < dim; ++i) dir(i) = rng.normal();
  double norm = dir.norm();
  if (norm == 0.0) return Vector::Zero(dim);
  double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
  return dir * (r / norm);
}

void check_hypotheses(const NewtonProblem& prob, const Vector& f0) {
  const Eigen::Index q = prob.d0f.rows(), m = prob.d0f.cols();
  if (prob.Q.rows() != m || prob.Q.cols() != q)
    throw BadParameters("Q must have the transposed shape of d0f");
  if (f0.size() != q) throw BadParameters("f(0) does not match d0f rows");
  if (!(prob.c > 0.0) || !(prob.delta > 0.0))
    throw BadParameters("c and delta must be positive");

  double id_err =
      (prob.d0f * prob.Q - Matrix::Identity(q, q)).cwiseAbs().maxCoeff();
  if (id_err > 1e-10)
    throw HypothesisViolation("d0f composed with Q is the identity", id_err,
                              1e-10);

  double q_norm = estimate_operator_norm(prob.Q);
  if (q_norm > prob.c * (1.0 + 1e-9))
    throw HypothesisViolation("right inverse norm bounded by c", q_norm,
                              prob.c);

  Rng rng(prob.seed);
  double lip_limit = 1.0 / (2.0 * prob.c);
  double worst = 0.0;
  for (int s = 0; s < prob.lip_check_samples; ++s) {
    Vector x = random_in_ball(rng, m, prob.delta * 0.999);
    Matrix jac = prob.jacobian_at ? prob.jacobian_at(x)
                                  : fd_jacobian(prob.f, x, q);
    worst = std::max(worst, estimate_operator_norm(jac - prob.d0f));
  }
  // FD Jacobians carry O(h) noise; allow it in the comparison
  if (worst > lip_limit + 1e-4)
    throw HypothesisViolation("derivative stays within 1/(2c) of d0f", worst,
                              lip_limit);

  double f0_limit = prob.delta / (4.0 * prob.c);
  if (f0.norm() > f0_limit)
    throw HypothesisViolation("initial residual bounded by delta/(4c)",
                              f0.norm(), f0_limit);
}

}  // namespace

NewtonResult newton_solve(const NewtonProblem& prob, double tol,
                          int max_iter) {
  Vector f0 = prob.f(Vector::Zero(prob.d0f.cols()));
  check_hypotheses(prob, f0);

  NewtonResult result;
  result.norm_bound = 2.0 * prob.c * f0.norm();

  Vector y = Vector::Zero(prob.d0f.rows());
  Vector x = prob.Q * y;
  Vector fx = f0;
  double prev_step = -1.0;
  for (int iter = 0; iter <= max_iter; ++iter) {
    double residual = fx.norm();
    if (residual <= tol) {
      result.x_star = x;
      result.residual = residual;
      result.iterations = iter;
      if (x.norm() > result.norm_bound + 1e-12)
        throw HypothesisViolation("solution norm bounded by 2c||f(0)||",
                                  x.norm(), result.norm_bound);
      return result;
    }
    if (iter == max_iter) break;
    Vector y_next = prob.d0f * x - fx;
    Vector x_next = prob.Q * y_next;
    double step = (x_next - x).norm();
    if (prev_step > 0.0 && step > 0.0)
      result.measured_contraction =
          std::max(result.measured_contraction, step / prev_step);
    prev_step = step;
    y = y_next;
    x = x_next;
    fx = prob.f(x);
  }
  throw NoConvergence("residual " + std::to_string(fx.norm()) + " above " +
                      std::to_string(tol) + " after " +
                      std::to_string(max_iter) + " iterations");
}

FamilyResult family_fixed_points(const FixedPointFamily& fam,
                                 const std::vector<double>& t_values,
                                 const Vector& x0_star) {
  for (double t : t_values)
    if (t < 0.0) throw BadParameters("family parameters must be >= 0");

  Vector phi0 = fam.phi(0.0, x0_star);

  // drift constant from the fixed point of the t = 0 member
  double k_measured = 0.0;
  for (double t : t_values) {
    if (t == 0.0) continue;
    k_measured =
        std::max(k_measured, (fam.phi(t, x0_star) - phi0).norm() / t);
  }
  double k = fam.K > 0.0 ? fam.K : k_measured;
  if (fam.K > 0.0 && k_measured > fam.K * (1.0 + 1e-9))
    throw HypothesisViolation("drift bounded by K t", k_measured, fam.K);

  // sampled uniform contraction near x0*
  Rng rng(fam.seed);
  for (double t : t_values) {
    double worst = 0.0;
    for (int s = 0; s < fam.contraction_samples; ++s) {
      Vector a =
          x0_star + random_in_ball(rng, x0_star.size(), fam.sample_radius);
      Vector b =
          x0_star + random_in_ball(rng, x0_star.size(), fam.sample_radius);
      double gap = (a - b).norm();
      if (gap == 0.0) continue;
      worst = std::max(worst, (fam.phi(t, a) - fam.phi(t, b)).norm() / gap);
    }
    // factor exactly 1/2 is admitted; the allowance only absorbs rounding
    if (worst > 0.5 + 1e-12)
      throw HypothesisViolation("uniform 1/2-contraction at t = " +
                                    std::to_string(t),
                                worst, 0.5);
  }

  FamilyResult result;
  result.k_measured = k_measured;
  for (double t : t_values) {
    Vector x = x0_star;
    bool converged = false;
    int iter = 0;
    for (; iter < 200; ++iter) {
      Vector next = fam.phi(t, x);
      double move = (next - x).norm();
      x = next;
      if (move <= 1e-12) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NoConvergence("fixed point at t = " + std::to_string(t) +
                          " not reached in 200 iterations");
    FamilyPoint pt;
    pt.t = t;
    pt.x_star = x;
    pt.displacement = (x - x0_star).norm();
    pt.bound = 2.0 * k * t + 1e-12;
    pt.bound_holds = pt.displacement <= pt.bound;
    if (!pt.bound_holds) result.all_bounds_hold = false;
    result.points.push_back(std::move(pt));
  }
  return result;
}

}  // namespace dmglue
