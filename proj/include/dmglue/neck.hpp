#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "dmglue/ext_complex.hpp"

namespace dmglue {

// exp(-1/t) for t > 0, identically 0 for t <= 0, and its first two
// derivatives.  All three underflow cleanly instead of producing 0 * inf.
double bump_g(double t);
double bump_g1(double t);
double bump_g2(double t);

// Smooth step: 0 on (-inf, 0], 1 on [1, inf), strictly increasing between.
// smoothstep(s) + smoothstep(1 - s) = 1 up to one rounding of the quotient.
double smoothstep(double s);
double smoothstep1(double s);
double smoothstep2(double s);

// Radial cutoff: 0 for |z| <= 1, 1 for |z| >= 2, smooth in between.
Complex cutoff_rho(Complex z);
double cutoff_rho_radial(double r);
double cutoff_rho_radial1(double r);
double cutoff_rho_radial2(double r);

enum class Region { inner_neck, outer_neck, exterior };

// Two polar-log charts covering a neck of conformal modulus ~ 2 log(R).
// Each chart is the annulus 2*delta/R <= |z| <= e^{tau_max} sampled on a
// uniform (tau = log|z|, theta) grid; the charts are identified along the
// inner neck by z -> 1/(R^2 z).  Row weights implement Simpson quadrature
// in tau, columns are uniform periodic in theta.
class NeckDomain {
  public:
    NeckDomain(double delta, double R, int n_tau, int n_theta,
               double tau_max = 0.0);

    double delta() const { return delta_; }
    double R() const { return R_; }
    double tau_min() const { return tau_min_; }
    double tau_max() const { return tau_max_; }
    int n_tau() const { return n_tau_; }
    int n_theta() const { return n_theta_; }

    int rows() const { return n_tau_ + 1; }
    int cols() const { return n_theta_; }
    std::size_t num_nodes() const;
    std::size_t index(int i, int j) const;

    double tau(int i) const { return tau_[static_cast<std::size_t>(i)]; }
    double theta(int j) const { return dtheta_ * j; }
    double radius(int i) const { return r_[static_cast<std::size_t>(i)]; }
    Complex z_at(int i, int j) const;

    Region region(int i) const;

    // Chart-symmetric partition of unity: 1 outside the inner neck,
    // pou_at_radius(r) + pou_at_radius(|phi_R(r e^{i t})|) = 1 inside it.
    double pou(int i) const { return pou_[static_cast<std::size_t>(i)]; }
    double pou_at_radius(double r) const;

    // Gluing identification between the two charts.
    Complex involution(Complex z) const;

    // Quadrature weight d(tau) d(theta) at node (i, j).
    double quad_weight(int i, int j) const;
    // Round area density (1 + r^2)^{-2} e^{2 tau} relative to d(tau) d(theta).
    double area_factor(int i) const;
    // Conformal weight 1 + r^2 carried by (0,1)-forms and derivatives.
    double conformal(int i) const;

    // Radii separating the regions and the pregluing plateaus.
    double inner_edge() const { return 2.0 * delta_ / R_; }
    double inner_outer() const { return 1.0 / (2.0 * delta_ * R_); }
    double outer_exterior() const { return 1.0 / (delta_ * R_); }
    double plateau_edge() const { return 2.0 / (delta_ * R_); }

  private:
    double delta_;
    double R_;
    double tau_min_;
    double tau_max_;
    int n_tau_;
    int n_theta_;
    double dtau_;
    double dtheta_;
    std::vector<double> tau_;
    std::vector<double> r_;
    std::vector<double> pou_;
    std::vector<double> simpson_;
};

}  // namespace dmglue
