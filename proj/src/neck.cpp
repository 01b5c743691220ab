#include "dmglue/neck.hpp"

#include <cmath>

#include "dmglue/errors.hpp"

namespace dmglue {

double bump_g(double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-1.0 / t);
}

double bump_g1(double t) {
    // g'(t) = exp(-1/t) / t^2, written as a single exp to avoid 0 * inf.
    if (t <= 0.0) return 0.0;
    return std::exp(-1.0 / t - 2.0 * std::log(t));
}

double bump_g2(double t) {
    // g''(t) = exp(-1/t) (1 - 2t) / t^4.
    if (t <= 0.0) return 0.0;
    return std::exp(-1.0 / t - 4.0 * std::log(t)) * (1.0 - 2.0 * t);
}

double smoothstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = bump_g(s);
    const double b = bump_g(1.0 - s);
    return a / (a + b);
}

double smoothstep1(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double a = bump_g(s);
    const double b = bump_g(1.0 - s);
    const double a1 = bump_g1(s);
    const double b1 = bump_g1(1.0 - s);
    const double den = a + b;
    return (a1 * b + a * b1) / (den * den);
}

double smoothstep2(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double a = bump_g(s);
    const double b = bump_g(1.0 - s);
    const double a1 = bump_g1(s);
    const double b1 = -bump_g1(1.0 - s);
    const double a2 = bump_g2(s);
    const double b2 = bump_g2(1.0 - s);
    const double den = a + b;
    const double num1 = a1 * b - a * b1;
    const double num2 = a2 * b - a * b2;
    return (num2 * den - 2.0 * num1 * (a1 + b1)) / (den * den * den);
}

Complex cutoff_rho(Complex z) { return {cutoff_rho_radial(std::abs(z)), 0.0}; }

double cutoff_rho_radial(double r) { return smoothstep(r - 1.0); }

double cutoff_rho_radial1(double r) { return smoothstep1(r - 1.0); }

double cutoff_rho_radial2(double r) { return smoothstep2(r - 1.0); }

NeckDomain::NeckDomain(double delta, double R, int n_tau, int n_theta,
                       double tau_max)
    : delta_(delta), R_(R), tau_max_(tau_max), n_tau_(n_tau), n_theta_(n_theta) {
    if (!(std::isfinite(delta) && delta > 0.0 && delta <= 0.25))
        throw BadParameters("neck domain needs delta in (0, 0.25]");
    if (!(std::isfinite(R) && R >= 4.0 / delta))
        throw BadParameters("neck domain needs R >= 4/delta");
    if (n_tau < 16 || n_theta < 16)
        throw BadParameters("neck domain needs n_tau, n_theta >= 16");
    if (n_tau % 2 != 0)
        throw BadParameters("Simpson rows need an even n_tau");
    tau_min_ = std::log(2.0 * delta_ / R_);
    if (!(std::isfinite(tau_max_) && tau_max_ > tau_min_))
        throw BadParameters("neck domain needs tau_max > log(2 delta / R)");

    dtau_ = (tau_max_ - tau_min_) / n_tau_;
    dtheta_ = 2.0 * std::acos(-1.0) / n_theta_;

    tau_.resize(static_cast<std::size_t>(rows()));
    r_.resize(tau_.size());
    pou_.resize(tau_.size());
    simpson_.resize(tau_.size());
    for (int i = 0; i <= n_tau_; ++i) {
        const auto k = static_cast<std::size_t>(i);
        tau_[k] = tau_min_ + dtau_ * i;
        r_[k] = std::exp(tau_[k]);
        pou_[k] = pou_at_radius(r_[k]);
        double w = (i == 0 || i == n_tau_) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        simpson_[k] = w * dtau_ / 3.0;
    }
}

std::size_t NeckDomain::num_nodes() const {
    return static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols());
}

std::size_t NeckDomain::index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols()) +
           static_cast<std::size_t>(j);
}

Complex NeckDomain::z_at(int i, int j) const {
    const double r = radius(i);
    const double th = theta(j);
    return {r * std::cos(th), r * std::sin(th)};
}

Region NeckDomain::region(int i) const {
    const double r = radius(i);
    if (r < inner_outer()) return Region::inner_neck;
    if (r < outer_exterior()) return Region::outer_neck;
    return Region::exterior;
}

double NeckDomain::pou_at_radius(double r) const {
    // t = log(2 delta R |z|) / log(1/(4 delta^2)) runs from -1 to 0 across
    // the inner neck and transforms as t -> -1 - t under the involution;
    // both charts share this profile, so the two weights sum to 1.
    const double scale = std::log(1.0 / (4.0 * delta_ * delta_));
    const double t = std::log(r * 2.0 * delta_ * R_) / scale;
    return smoothstep(t + 1.0);
}

Complex NeckDomain::involution(Complex z) const {
    return 1.0 / (R_ * R_ * z);
}

double NeckDomain::quad_weight(int i, int j) const {
    (void)j;
    return simpson_[static_cast<std::size_t>(i)] * dtheta_;
}

double NeckDomain::area_factor(int i) const {
    const double r2 = radius(i) * radius(i);
    return r2 / ((1.0 + r2) * (1.0 + r2));
}

double NeckDomain::conformal(int i) const {
    const double r = radius(i);
    return 1.0 + r * r;
}

}  // namespace dmglue
