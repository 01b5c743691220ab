#include "dmglue/preglue.hpp"

#include <algorithm>
#include <cmath>

#include "dmglue/errors.hpp"

namespace dmglue {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Matrix2d standard_structure() {
    Eigen::Matrix2d j;
    j << 0.0, -1.0, 1.0, 0.0;
    return j;
}

Eigen::Matrix2d perturbation_shape() {
    Eigen::Matrix2d s;
    s << 0.9, 0.4, 0.3, -0.6;
    return s;
}

}  // namespace

Complex Polynomial::operator()(Complex z) const {
    Complex acc{0.0, 0.0};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

Complex Polynomial::derivative(Complex z) const {
    Complex acc{0.0, 0.0};
    for (int k = degree(); k >= 1; --k)
        acc = acc * z + static_cast<double>(k) * coeffs[static_cast<std::size_t>(k)];
    return acc;
}

CurvePair make_curve_pair(Polynomial u0, Polynomial u_inf) {
    if (u0.coeffs.empty() || u_inf.coeffs.empty())
        throw BadParameters("curve pair needs nonempty coefficient lists");
    if (u0.coeffs[0] != u_inf.coeffs[0])
        throw BadParameters("curve pair must take the same value at the node");
    CurvePair pair;
    pair.x0 = u0.coeffs[0];
    pair.u0 = std::move(u0);
    pair.u_inf = std::move(u_inf);
    const int samples = 720;
    double k = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double phi = 2.0 * std::acos(-1.0) * s / samples;
        const Complex z{std::cos(phi), std::sin(phi)};
        k = std::max(k, std::abs(pair.u0.derivative(z)));
        k = std::max(k, std::abs(pair.u_inf.derivative(z)));
    }
    pair.k_bound = k;
    return pair;
}

PerturbedJ::PerturbedJ(double epsilon, Complex center, double radius)
    : epsilon_(epsilon), center_(center), radius_(radius) {
    if (!(std::isfinite(epsilon) && epsilon >= 0.0))
        throw BadParameters("perturbation size must be finite and >= 0");
    if (!(std::isfinite(radius) && radius > 0.0))
        throw BadParameters("perturbation radius must be positive");
}

Eigen::Matrix2d PerturbedJ::at(Complex x) const {
    const Eigen::Matrix2d jstd = standard_structure();
    if (epsilon_ == 0.0) return jstd;
    const double d = std::abs(x - center_) / radius_;
    const double strength = 1.0 - smoothstep(d - 1.0);
    if (strength == 0.0) return jstd;
    const Eigen::Matrix2d a = jstd + (epsilon_ * strength) * perturbation_shape();
    // Project back onto J^2 = -Id: J = A (-A^2)^{-1/2}, with the 2x2 square
    // root (B + sqrt(det B) I) / sqrt(tr B + 2 sqrt(det B)).
    const Eigen::Matrix2d b = -(a * a);
    const double det = b.determinant();
    if (!(det > 0.0))
        throw BadParameters("perturbation too large to renormalize");
    const double s = std::sqrt(det);
    const double den2 = b.trace() + 2.0 * s;
    if (!(den2 > 0.0))
        throw BadParameters("perturbation too large to renormalize");
    const Eigen::Matrix2d sqrt_b =
        (b + s * Eigen::Matrix2d::Identity()) / std::sqrt(den2);
    return a * sqrt_b.inverse();
}

Complex PerturbedJ::apply(Complex x, Complex v) const {
    if (epsilon_ == 0.0) return kI * v;
    const Eigen::Matrix2d j = at(x);
    const Eigen::Vector2d w = j * Eigen::Vector2d(v.real(), v.imag());
    return {w(0), w(1)};
}

SurfaceField preglue_at_parameter(const CurvePair& pair, const NeckDomain& dom,
                                  double R_param) {
    if (!(std::isfinite(R_param) && R_param >= 4.0 / dom.delta()))
        throw BadParameters("pregluing parameter must satisfy R >= 4/delta");
    const double scale = dom.delta() * R_param;
    const double plateau = 1.0 / scale;
    const double outer = 2.0 / scale;

    SurfaceField out;
    for (int c = 0; c < 2; ++c) {
        const Polynomial& u = (c == 0) ? pair.u0 : pair.u_inf;
        SampledMap& m = out.chart[static_cast<std::size_t>(c)];
        m.chart = c;
        m.kind = FieldKind::function;
        m.values.resize(dom.num_nodes());
        m.ds.resize(dom.num_nodes());
        m.dt.resize(dom.num_nodes());
        for (int i = 0; i < dom.rows(); ++i) {
            const double r = dom.radius(i);
            for (int j = 0; j < dom.cols(); ++j) {
                const std::size_t k = dom.index(i, j);
                const Complex z = dom.z_at(i, j);
                if (r >= outer) {
                    m.values[k] = u(z);
                    m.ds[k] = u.derivative(z);
                    m.dt[k] = kI * m.ds[k];
                } else if (r <= plateau) {
                    m.values[k] = pair.x0;
                    m.ds[k] = {0.0, 0.0};
                    m.dt[k] = {0.0, 0.0};
                } else {
                    const double rho = smoothstep(scale * r - 1.0);
                    const double rho1 = smoothstep1(scale * r - 1.0);
                    const Complex zeta = u(z) - pair.x0;
                    const Complex dzeta = u.derivative(z);
                    m.values[k] = pair.x0 + rho * zeta;
                    const double radial = scale * rho1 / r;
                    m.ds[k] = rho * dzeta + radial * z.real() * zeta;
                    m.dt[k] = kI * (rho * dzeta) + radial * z.imag() * zeta;
                }
            }
        }
    }
    return out;
}

SurfaceField preglue(const CurvePair& pair, const NeckDomain& dom) {
    return preglue_at_parameter(pair, dom, dom.R());
}

SampledMap dbar_field(const SampledMap& map, const PerturbedJ& J,
                      const NeckDomain& dom) {
    if (!map.has_derivatives())
        throw BadParameters("del-bar needs derivative samples");
    if (map.values.size() != dom.num_nodes())
        throw BadParameters("field does not match the grid");
    SampledMap out;
    out.chart = map.chart;
    out.kind = FieldKind::form01;
    out.values.resize(map.values.size());
    const bool standard = (J.epsilon() == 0.0);
    for (std::size_t k = 0; k < map.values.size(); ++k) {
        const Complex jt = standard ? kI * map.dt[k]
                                    : J.apply(map.values[k], map.dt[k]);
        out.values[k] = 0.5 * (map.ds[k] + jt);
    }
    return out;
}

SurfaceField dbar_field(const SurfaceField& field, const PerturbedJ& J,
                        const NeckDomain& dom) {
    SurfaceField out;
    out.chart[0] = dbar_field(field.chart[0], J, dom);
    out.chart[1] = dbar_field(field.chart[1], J, dom);
    return out;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes,
                               int m) {
    const int n = static_cast<int>(nodes.size());
    if (n <= m) throw BadParameters("not enough nodes for the derivative order");
    std::vector<std::vector<double>> c(
        static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
    c[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[static_cast<std::size_t>(i)] -
                              nodes[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                        c1 * (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
                              c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
                        c2;
                c[static_cast<std::size_t>(i)][0] =
                    -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                    (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                     k * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) /
                    c3;
            c[static_cast<std::size_t>(j)][0] =
                c4 * c[static_cast<std::size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
    return w;
}

void stencil_derivatives(SampledMap& map, const NeckDomain& dom) {
    if (map.values.size() != dom.num_nodes())
        throw BadParameters("field does not match the grid");
    const int rows = dom.rows();
    const int cols = dom.cols();
    const int width = std::min(11, rows);

    // tau direction: one weight row per grid row (shifted near the ends).
    std::vector<std::vector<double>> wt(static_cast<std::size_t>(rows));
    std::vector<int> lo(static_cast<std::size_t>(rows));
    for (int i = 0; i < rows; ++i) {
        int first = std::clamp(i - width / 2, 0, rows - width);
        lo[static_cast<std::size_t>(i)] = first;
        std::vector<double> nodes(static_cast<std::size_t>(width));
        for (int k = 0; k < width; ++k)
            nodes[static_cast<std::size_t>(k)] = dom.tau(first + k);
        wt[static_cast<std::size_t>(i)] = fd_weights(dom.tau(i), nodes, 1);
    }

    // theta direction: spectral differentiation, exact below Nyquist.
    const double pi = std::acos(-1.0);
    std::vector<double> wth(static_cast<std::size_t>(cols), 0.0);
    for (int m = 1; m < cols; ++m)
        wth[static_cast<std::size_t>(m)] =
            0.5 * ((m % 2 == 0) ? -1.0 : 1.0) / std::tan(m * pi / cols);

    map.ds.assign(map.values.size(), Complex{0.0, 0.0});
    map.dt.assign(map.values.size(), Complex{0.0, 0.0});
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            Complex f_tau{0.0, 0.0};
            for (int k = 0; k < width; ++k)
                f_tau += wt[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                         map.values[dom.index(lo[static_cast<std::size_t>(i)] + k, j)];
            Complex f_theta{0.0, 0.0};
            for (int m = 1; m <= cols / 2; ++m) {
                const int jp = (j + m) % cols;
                const int jm = (j - m + cols) % cols;
                f_theta += wth[static_cast<std::size_t>(m)] *
                           (map.values[dom.index(i, jp)] -
                            map.values[dom.index(i, jm)]);
            }
            const Complex z = dom.z_at(i, j);
            const double r2 = std::norm(z);
            const std::size_t idx = dom.index(i, j);
            map.ds[idx] = (z.real() * f_tau - z.imag() * f_theta) / r2;
            map.dt[idx] = (z.imag() * f_tau + z.real() * f_theta) / r2;
        }
    }
}

namespace {

double value_weight(const NeckDomain& dom, int i, FieldKind kind, double p) {
    const double area = dom.area_factor(i);
    if (kind == FieldKind::function) return area;
    return area * std::pow(dom.conformal(i), p);
}

double chart_lp_power(const SampledMap& f, const NeckDomain& dom, double p,
                      bool apply_pou) {
    if (f.values.size() != dom.num_nodes())
        throw BadParameters("field does not match the grid");
    double acc = 0.0;
    for (int i = 0; i < dom.rows(); ++i) {
        const double w_row = value_weight(dom, i, f.kind, p) *
                             (apply_pou ? dom.pou(i) : 1.0);
        if (w_row == 0.0) continue;
        double row = 0.0;
        for (int j = 0; j < dom.cols(); ++j)
            row += dom.quad_weight(i, j) *
                   std::pow(std::abs(f.values[dom.index(i, j)]), p);
        acc += w_row * row;
    }
    return acc;
}

double chart_deriv_power(const SampledMap& f, const NeckDomain& dom, double p,
                         bool apply_pou) {
    if (!f.has_derivatives())
        throw BadParameters("norm of first derivatives needs derivative samples");
    double acc = 0.0;
    for (int i = 0; i < dom.rows(); ++i) {
        const double w_row = dom.area_factor(i) * std::pow(dom.conformal(i), p) *
                             (apply_pou ? dom.pou(i) : 1.0);
        if (w_row == 0.0) continue;
        double row = 0.0;
        for (int j = 0; j < dom.cols(); ++j) {
            const std::size_t k = dom.index(i, j);
            const double g =
                std::sqrt(std::norm(f.ds[k]) + std::norm(f.dt[k]));
            row += dom.quad_weight(i, j) * std::pow(g, p);
        }
        acc += w_row * row;
    }
    return acc;
}

}  // namespace

double chart_lp_norm(const SampledMap& f, const NeckDomain& dom, double p,
                     bool apply_pou) {
    if (!(p >= 1.0)) throw BadParameters("norm exponent must be at least 1");
    return std::pow(chart_lp_power(f, dom, p, apply_pou), 1.0 / p);
}

double lp_norm(const SurfaceField& f, const NeckDomain& dom, double p) {
    if (!(p >= 1.0)) throw BadParameters("norm exponent must be at least 1");
    return std::pow(chart_lp_power(f.chart[0], dom, p, true) +
                        chart_lp_power(f.chart[1], dom, p, true),
                    1.0 / p);
}

double w1p_norm(const SurfaceField& f, const NeckDomain& dom, double p) {
    if (!(p >= 1.0)) throw BadParameters("norm exponent must be at least 1");
    double acc = 0.0;
    for (int c = 0; c < 2; ++c) {
        const SampledMap& m = f.chart[static_cast<std::size_t>(c)];
        acc += chart_lp_power(m, dom, p, true);
        acc += chart_deriv_power(m, dom, p, true);
    }
    return std::pow(acc, 1.0 / p);
}

double annulus_w1p(const SampledMap& f, const NeckDomain& dom, double p,
                   double r_lo) {
    if (!(p >= 1.0)) throw BadParameters("norm exponent must be at least 1");
    if (!f.has_derivatives())
        throw BadParameters("annulus norm needs derivative samples");
    double acc = 0.0;
    for (int i = 0; i < dom.rows(); ++i) {
        if (dom.radius(i) < r_lo * (1.0 - 1e-12)) continue;
        const double wf = value_weight(dom, i, f.kind, p);
        const double wd = dom.area_factor(i) * std::pow(dom.conformal(i), p);
        for (int j = 0; j < dom.cols(); ++j) {
            const std::size_t k = dom.index(i, j);
            const double q = dom.quad_weight(i, j);
            acc += q * wf * std::pow(std::abs(f.values[k]), p);
            const double g =
                std::sqrt(std::norm(f.ds[k]) + std::norm(f.dt[k]));
            acc += q * wd * std::pow(g, p);
        }
    }
    return std::pow(acc, 1.0 / p);
}

double overlap_mismatch(const SurfaceField& f, const NeckDomain& dom) {
    const double dtau = dom.tau(1) - dom.tau(0);
    const double dtheta = dom.theta(1) - dom.theta(0);
    const double two_pi = 2.0 * std::acos(-1.0);
    double worst = 0.0;
    for (int i = 0; i < dom.rows(); ++i) {
        if (dom.region(i) != Region::inner_neck) continue;
        for (int j = 0; j < dom.cols(); ++j) {
            const Complex w = dom.involution(dom.z_at(i, j));
            const double tw = std::log(std::abs(w));
            if (tw < dom.tau_min() || tw > dom.tau_max()) continue;
            double thw = std::atan2(w.imag(), w.real());
            if (thw < 0.0) thw += two_pi;
            const double fi = (tw - dom.tau_min()) / dtau;
            const double fj = thw / dtheta;
            const int i0 = std::clamp(static_cast<int>(std::floor(fi)), 0,
                                      dom.rows() - 2);
            const int j0 = static_cast<int>(std::floor(fj)) % dom.cols();
            const int j1 = (j0 + 1) % dom.cols();
            const double a = fi - i0;
            const double b = fj - std::floor(fj);
            const Complex interp =
                (1.0 - a) * (1.0 - b) * f.chart[1].values[dom.index(i0, j0)] +
                (1.0 - a) * b * f.chart[1].values[dom.index(i0, j1)] +
                a * (1.0 - b) * f.chart[1].values[dom.index(i0 + 1, j0)] +
                a * b * f.chart[1].values[dom.index(i0 + 1, j1)];
            worst = std::max(worst,
                             std::abs(f.chart[0].values[dom.index(i, j)] - interp));
        }
    }
    return worst;
}

RDerivative preglue_r_derivative(const CurvePair& pair, const NeckDomain& dom,
                                 double h, double p) {
    if (!(std::isfinite(h) && h > 0.0 && h <= dom.R() * 1e-4))
        throw BadParameters("parameter step must satisfy 0 < h <= R * 1e-4");
    RDerivative out;
    const SurfaceField base = preglue(pair, dom);
    const SurfaceField bumped = preglue_at_parameter(pair, dom, dom.R() + h);

    const double delta = dom.delta();
    const double scale = delta * dom.R();
    for (int c = 0; c < 2; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        const Polynomial& u = (c == 0) ? pair.u0 : pair.u_inf;
        SampledMap fd;
        SampledMap an;
        fd.chart = an.chart = c;
        fd.kind = an.kind = FieldKind::function;
        fd.values.resize(dom.num_nodes());
        fd.ds.resize(dom.num_nodes());
        fd.dt.resize(dom.num_nodes());
        an.values.resize(dom.num_nodes());
        an.ds.resize(dom.num_nodes());
        an.dt.resize(dom.num_nodes());
        for (int i = 0; i < dom.rows(); ++i) {
            const double r = dom.radius(i);
            const double rho1 = smoothstep1(scale * r - 1.0);
            const double rho2 = smoothstep2(scale * r - 1.0);
            for (int j = 0; j < dom.cols(); ++j) {
                const std::size_t k = dom.index(i, j);
                fd.values[k] = (bumped.chart[cc].values[k] - base.chart[cc].values[k]) / h;
                fd.ds[k] = (bumped.chart[cc].ds[k] - base.chart[cc].ds[k]) / h;
                fd.dt[k] = (bumped.chart[cc].dt[k] - base.chart[cc].dt[k]) / h;

                const Complex z = dom.z_at(i, j);
                const Complex zeta = u(z) - pair.x0;
                const Complex dzeta = u.derivative(z);
                an.values[k] = delta * r * rho1 * zeta;
                const double radial = delta * (rho1 + scale * r * rho2) / r;
                an.ds[k] = radial * z.real() * zeta + delta * r * rho1 * dzeta;
                an.dt[k] = radial * z.imag() * zeta + delta * r * rho1 * (kI * dzeta);
            }
        }
        out.fd.chart[cc] = std::move(fd);
        out.analytic.chart[cc] = std::move(an);
    }
    out.fd_w1p = w1p_norm(out.fd, dom, p);
    out.analytic_w1p = w1p_norm(out.analytic, dom, p);
    return out;
}

}  // namespace dmglue
