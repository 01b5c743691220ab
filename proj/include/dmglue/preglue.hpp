#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "dmglue/ext_complex.hpp"
#include "dmglue/neck.hpp"

namespace dmglue {

struct Polynomial {
    std::vector<Complex> coeffs;  // coeffs[k] multiplies z^k

    Complex operator()(Complex z) const;
    Complex derivative(Complex z) const;
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Two holomorphic discs meeting at a node: u0(0) = u_inf(0) = x0 exactly.
// k_bound dominates both derivatives on the closed unit disc.
struct CurvePair {
    Polynomial u0;
    Polynomial u_inf;
    Complex x0{0.0, 0.0};
    double k_bound = 0.0;
};

CurvePair make_curve_pair(Polynomial u0, Polynomial u_inf);

enum class FieldKind { function, form01 };

// Grid samples of a map (or form coefficient) on one chart of a NeckDomain.
// ds/dt, when present, hold the Cartesian derivative samples.
struct SampledMap {
    int chart = 0;
    FieldKind kind = FieldKind::function;
    std::vector<Complex> values;
    std::vector<Complex> ds;
    std::vector<Complex> dt;

    bool has_derivatives() const { return !ds.empty(); }
};

struct SurfaceField {
    std::array<SampledMap, 2> chart;
};

// Almost complex structure J(x) = projection of J_std + epsilon * bump * S,
// with the bump supported in |x - center| <= 2 * radius.  J(x)^2 = -Id holds
// up to rounding for every x; epsilon = 0 gives J_std exactly.
class PerturbedJ {
  public:
    PerturbedJ() = default;
    PerturbedJ(double epsilon, Complex center, double radius);

    double epsilon() const { return epsilon_; }
    Eigen::Matrix2d at(Complex x) const;
    Complex apply(Complex x, Complex v) const;

  private:
    double epsilon_ = 0.0;
    Complex center_{0.0, 0.0};
    double radius_ = 0.5;
};

// Interpolated family u^R: equals u^i beyond |z| = 2/(delta R), equals x0
// on the inner neck, cutoff-blended in between.  Derivative samples are
// evaluated from the closed-form expressions, not from stencils.
SurfaceField preglue(const CurvePair& pair, const NeckDomain& dom);

// Same construction at gluing parameter R_param evaluated on dom's grid;
// used for parameter-derivative quotients.
SurfaceField preglue_at_parameter(const CurvePair& pair, const NeckDomain& dom,
                                  double R_param);

// del-bar operator 1/2 (d_s + J(u) d_t) applied to sampled maps with
// derivative samples; the result is a form01 field.
SampledMap dbar_field(const SampledMap& map, const PerturbedJ& J,
                      const NeckDomain& dom);
SurfaceField dbar_field(const SurfaceField& field, const PerturbedJ& J,
                        const NeckDomain& dom);

// Fills ds/dt from the value samples: eighth-order finite differences in
// tau, same in the periodic theta direction.
void stencil_derivatives(SampledMap& map, const NeckDomain& dom);

// Finite-difference weights for the m-th derivative at x0 from arbitrary
// nodes (Fornberg's recurrence).
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes,
                               int m);

// L^p norms against the round area form.  form01 fields and derivative
// samples carry the conformal weight (1 + r^2).  Surface-level norms blend
// the two charts through the partition of unity; chart_lp_norm with
// apply_pou = false integrates one chart on its own.
double chart_lp_norm(const SampledMap& f, const NeckDomain& dom, double p,
                     bool apply_pou);
double lp_norm(const SurfaceField& f, const NeckDomain& dom, double p);
double w1p_norm(const SurfaceField& f, const NeckDomain& dom, double p);

// W^{1,p} norm of a chart-0 field restricted to r >= r_lo (no partition
// weight; the restriction is meant for the exterior region).
double annulus_w1p(const SampledMap& f, const NeckDomain& dom, double p,
                   double r_lo);

// Largest value mismatch between chart 0 and chart 1 across the inner-neck
// identification, with chart 1 sampled by bilinear interpolation.
double overlap_mismatch(const SurfaceField& f, const NeckDomain& dom);

struct RDerivative {
    SurfaceField fd;
    SurfaceField analytic;
    double fd_w1p = 0.0;
    double analytic_w1p = 0.0;
};

// d/dR of the pregluing at fixed chart coordinates: one-sided difference
// quotient at step h against the closed form delta r rho'(delta R r) zeta.
// p sets the exponent of the reported W^{1,p} norms.
RDerivative preglue_r_derivative(const CurvePair& pair, const NeckDomain& dom,
                                 double h, double p = 3.0);

}  // namespace dmglue
