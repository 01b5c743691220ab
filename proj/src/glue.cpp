#include "dmglue/glue.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <string>
#include <utility>

#include "dmglue/errors.hpp"
#include "dmglue/quant_newton.hpp"
#include "dmglue/rng.hpp"

namespace dmglue {

CubicSplineBasis::CubicSplineBasis(double lo, double hi, int segments)
    : lo_(lo), hi_(hi), size_(segments + 3) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo))
        throw BadParameters("spline interval is empty");
    if (segments < 1) throw BadParameters("spline basis needs >= 1 segment");
    const double h = (hi - lo) / segments;
    knots_.assign(3, lo);
    for (int k = 0; k <= segments; ++k) knots_.push_back(lo + h * k);
    knots_.back() = hi;
    knots_.insert(knots_.end(), 3, hi);
}

CubicSplineBasis::CubicSplineBasis(std::vector<double> breakpoints) {
    if (breakpoints.size() < 2)
        throw BadParameters("spline basis needs >= 1 segment");
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
        if (!(std::isfinite(breakpoints[k]) &&
              breakpoints[k] < breakpoints[k + 1]))
            throw BadParameters("spline breakpoints must increase strictly");
    lo_ = breakpoints.front();
    hi_ = breakpoints.back();
    size_ = static_cast<int>(breakpoints.size()) + 2;
    knots_.assign(3, lo_);
    knots_.insert(knots_.end(), breakpoints.begin(), breakpoints.end());
    knots_.insert(knots_.end(), 3, hi_);
}

double CubicSplineBasis::basis(int j, int k, double x) const {
    const auto u = [this](int idx) { return knots_[static_cast<std::size_t>(idx)]; };
    if (k == 0) {
        if (u(j) <= x && x < u(j + 1)) return 1.0;
        // the last nonempty span is closed on the right
        if (x == hi_ && u(j + 1) == hi_ && u(j) < u(j + 1)) return 1.0;
        return 0.0;
    }
    double acc = 0.0;
    const double d1 = u(j + k) - u(j);
    if (d1 > 0.0) acc += (x - u(j)) / d1 * basis(j, k - 1, x);
    const double d2 = u(j + k + 1) - u(j + 1);
    if (d2 > 0.0) acc += (u(j + k + 1) - x) / d2 * basis(j + 1, k - 1, x);
    return acc;
}

double CubicSplineBasis::value(int j, double x) const {
    if (j < 0 || j >= size_) throw BadParameters("spline index out of range");
    if (x < lo_ || x > hi_) return 0.0;
    return basis(j, 3, x);
}

double CubicSplineBasis::deriv(int j, double x) const {
    if (j < 0 || j >= size_) throw BadParameters("spline index out of range");
    if (x < lo_ || x > hi_) return 0.0;
    const auto u = [this](int idx) { return knots_[static_cast<std::size_t>(idx)]; };
    double acc = 0.0;
    const double d1 = u(j + 3) - u(j);
    if (d1 > 0.0) acc += basis(j, 2, x) / d1;
    const double d2 = u(j + 4) - u(j + 1);
    if (d2 > 0.0) acc -= basis(j + 1, 2, x) / d2;
    return 3.0 * acc;
}

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr Complex kI{0.0, 1.0};

// Breakpoints refined around the two cutoff annuli, where the correction
// has its only sharp features.  In the surface coordinate both annuli sit
// within log(4/delta) of the neck midpoint -log R.
std::vector<double> graded_breakpoints(const NeckDomain& dom, double h_fine,
                                       double h_coarse) {
    if (!(h_fine > 0.0 && h_coarse >= h_fine))
        throw BadParameters("knot spacings need 0 < fine <= coarse");
    const double lo = -2.0 * std::log(dom.R()) - dom.tau_max();
    const double hi = dom.tau_max();
    const double center = -std::log(dom.R());
    const double half_width = std::log(4.0 / dom.delta()) + 2.0 * h_fine;
    const auto local_h = [&](double x) {
        const double d = std::abs(x - center) - half_width;
        return d <= 0.0 ? h_fine : std::min(h_coarse, h_fine + 0.4 * d);
    };
    // march outward from the center so neither boundary ends in a sliver
    // segment (thin clamped end splines make the projection rows nearly
    // dependent)
    std::vector<double> pts{center};
    for (double x = center;;) {
        const double h = local_h(x);
        if (x + h >= hi - 0.5 * local_h(hi)) break;
        x += h;
        pts.push_back(x);
    }
    pts.push_back(hi);
    for (double x = center;;) {
        const double h = local_h(x);
        if (x - h <= lo + 0.5 * local_h(lo)) break;
        x -= h;
        pts.push_back(x);
    }
    pts.push_back(lo);
    std::sort(pts.begin(), pts.end());
    return pts;
}

CubicSplineBasis pick_trial(const NeckDomain& dom, const GlueOptions& opt) {
    const double lo = -2.0 * std::log(dom.R()) - dom.tau_max();
    const double hi = dom.tau_max();
    if (opt.spline_segments > 0)
        return CubicSplineBasis(lo, hi, opt.spline_segments);
    return CubicSplineBasis(
        graded_breakpoints(dom, opt.fine_spacing, opt.coarse_spacing));
}

CubicSplineBasis pick_test(const NeckDomain& dom, const GlueOptions& opt) {
    const double lo = -2.0 * std::log(dom.R()) - dom.tau_max();
    const double hi = dom.tau_max();
    if (opt.test_segments > 0)
        return CubicSplineBasis(lo, hi, opt.test_segments);
    if (opt.spline_segments > 0)
        return CubicSplineBasis(lo, hi, std::max(4, opt.spline_segments / 2));
    // every other trial breakpoint: a nested coarsening keeps the pairing
    // between the two spaces uniformly well conditioned, where independently
    // placed test knots can land nearly dependent at unlucky neck lengths
    const std::vector<double> fine =
        graded_breakpoints(dom, opt.fine_spacing, opt.coarse_spacing);
    std::vector<double> coarse;
    for (std::size_t k = 0; k < fine.size(); k += 2) coarse.push_back(fine[k]);
    if (coarse.back() != fine.back()) coarse.push_back(fine.back());
    return CubicSplineBasis(std::move(coarse));
}

struct ChartEval {
    MatrixXcd v;
    MatrixXcd ds;
    MatrixXcd dt;
};

struct GlueWorkspace {
    const NeckDomain* dom;
    PerturbedJ J;
    bool standard;
    double p;
    SurfaceField pre;
    CubicSplineBasis trial;
    CubicSplineBasis test;
    int M;
    int n_modes;
    int n_trial;
    int n_test;
    int K;
    int K_test;
    std::array<MatrixXcd, 2> SV, SD, TV;
    std::array<MatrixXcd, 2> E, Em;
    std::array<double, 2> tau_sign{1.0, -1.0};
    std::array<double, 2> h_sign{1.0, -1.0};
    std::array<std::vector<Complex>, 2> zc;
    VectorXd wrow;
    VectorXd equil;
    VectorXd colw;

    GlueWorkspace(const SurfaceField& preglued, const PerturbedJ& j,
                  const NeckDomain& d, double pp, const GlueOptions& opt)
        : dom(&d),
          J(j),
          standard(j.epsilon() == 0.0),
          p(pp),
          pre(preglued),
          trial(pick_trial(d, opt)),
          test(pick_test(d, opt)),
          M(opt.fourier_modes) {
        if (M < 1) throw BadParameters("corrector needs at least one mode");
        n_modes = 2 * M + 1;
        n_trial = trial.size();
        n_test = test.size();
        K = n_trial * n_modes;
        K_test = n_test * n_modes;
        if (K_test >= K)
            throw BadParameters("test space must be strictly coarser than trial");

        const int rows = d.rows();
        const int cols = d.cols();
        const double shift = -2.0 * std::log(d.R());
        wrow.resize(rows);
        for (int c = 0; c < 2; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            SV[cc].resize(rows, n_trial);
            SD[cc].resize(rows, n_trial);
            TV[cc].resize(rows, n_test);
            for (int i = 0; i < rows; ++i) {
                const double tg = (c == 0) ? d.tau(i) : shift - d.tau(i);
                for (int b = 0; b < n_trial; ++b) {
                    SV[cc](i, b) = trial.value(b, tg);
                    SD[cc](i, b) = trial.deriv(b, tg);
                }
                for (int b = 0; b < n_test; ++b) TV[cc](i, b) = test.value(b, tg);
            }
            E[cc].resize(n_modes, cols);
            Em[cc].resize(n_modes, cols);
            for (int mi = 0; mi < n_modes; ++mi) {
                const int m = mi - M;
                for (int jcol = 0; jcol < cols; ++jcol) {
                    const double tg = (c == 0) ? d.theta(jcol) : -d.theta(jcol);
                    const Complex ph{std::cos(m * tg), std::sin(m * tg)};
                    E[cc](mi, jcol) = ph;
                    Em[cc](mi, jcol) =
                        ((c == 0) ? 1.0 : -1.0) * Complex(0.0, m) * ph;
                }
            }
            zc[cc].resize(d.num_nodes());
            for (int i = 0; i < rows; ++i)
                for (int jcol = 0; jcol < cols; ++jcol)
                    zc[cc][d.index(i, jcol)] = d.z_at(i, jcol);
        }
        for (int i = 0; i < rows; ++i)
            wrow(i) = d.quad_weight(i, 0) * d.pou(i);

        // Sobolev weight of each trial function.  The pseudoinverse below
        // minimizes the scaled coefficient norm, so this makes it pick the
        // correction of least W^{1,2} size rather than favoring whichever
        // splines happen to have the narrowest support.
        colw.resize(2 * K);
        for (int b = 0; b < n_trial; ++b)
            for (int mi = 0; mi < n_modes; ++mi) {
                const double m2 = double(mi - M) * double(mi - M);
                double s = 0.0;
                for (int c = 0; c < 2; ++c) {
                    const auto cc = static_cast<std::size_t>(c);
                    for (int i = 0; i < rows; ++i) {
                        const double wq = d.quad_weight(i, 0) * cols;
                        const double v2 = std::norm(SV[cc](i, b));
                        const double dv2 = std::norm(SD[cc](i, b));
                        s += wq * (v2 * d.area_factor(i) + dv2 + m2 * v2);
                    }
                }
                const int k = 2 * (b * n_modes + mi);
                colw(k) = colw(k + 1) = std::sqrt(std::max(s, 1e-300));
            }
    }

    MatrixXcd unflatten(const VectorXd& x) const {
        MatrixXcd c(n_trial, n_modes);
        for (int b = 0; b < n_trial; ++b)
            for (int mi = 0; mi < n_modes; ++mi) {
                const int k = 2 * (b * n_modes + mi);
                c(b, mi) = Complex(x(k), x(k + 1));
            }
        return c;
    }

    VectorXd flatten(const MatrixXcd& y) const {
        VectorXd out(2 * K_test);
        for (int b = 0; b < n_test; ++b)
            for (int mi = 0; mi < n_modes; ++mi) {
                const int k = 2 * (b * n_modes + mi);
                out(k) = y(b, mi).real();
                out(k + 1) = y(b, mi).imag();
            }
        return out;
    }

    ChartEval eval_chart(const MatrixXcd& coef, int c) const {
        const auto cc = static_cast<std::size_t>(c);
        const MatrixXcd a = SV[cc] * coef;
        const MatrixXcd ad = SD[cc] * coef;
        ChartEval out;
        out.v = a * E[cc];
        const MatrixXcd xt = tau_sign[cc] * (ad * E[cc]);
        const MatrixXcd xq = a * Em[cc];
        const int rows = dom->rows();
        const int cols = dom->cols();
        out.ds.resize(rows, cols);
        out.dt.resize(rows, cols);
        for (int i = 0; i < rows; ++i) {
            for (int jcol = 0; jcol < cols; ++jcol) {
                const Complex z = zc[cc][dom->index(i, jcol)];
                const double r2 = std::norm(z);
                out.ds(i, jcol) =
                    (z.real() * xt(i, jcol) - z.imag() * xq(i, jcol)) / r2;
                out.dt(i, jcol) =
                    (z.imag() * xt(i, jcol) + z.real() * xq(i, jcol)) / r2;
            }
        }
        return out;
    }

    std::array<MatrixXcd, 2> residual_hhat(const MatrixXcd& coef) const {
        std::array<MatrixXcd, 2> out;
        const int rows = dom->rows();
        const int cols = dom->cols();
        for (int c = 0; c < 2; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            const ChartEval xi = eval_chart(coef, c);
            MatrixXcd h(rows, cols);
            const SampledMap& base = pre.chart[cc];
            for (int i = 0; i < rows; ++i) {
                for (int jcol = 0; jcol < cols; ++jcol) {
                    const std::size_t idx = dom->index(i, jcol);
                    const Complex u = base.values[idx] + xi.v(i, jcol);
                    const Complex us = base.ds[idx] + xi.ds(i, jcol);
                    const Complex ut = base.dt[idx] + xi.dt(i, jcol);
                    const Complex jt = standard ? kI * ut : J.apply(u, ut);
                    const Complex eta = 0.5 * (us + jt);
                    h(i, jcol) = h_sign[cc] * 2.0 * std::conj(zc[cc][idx]) * eta;
                }
            }
            out[cc] = std::move(h);
        }
        return out;
    }

    VectorXd project(const std::array<MatrixXcd, 2>& hhat) const {
        MatrixXcd y = MatrixXcd::Zero(n_test, n_modes);
        for (int c = 0; c < 2; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            const MatrixXcd g = hhat[cc] * E[cc].adjoint();
            y.noalias() += TV[cc].transpose() * (wrow.asDiagonal() * g);
        }
        return flatten(y);
    }

    VectorXd residual_raw(const VectorXd& x) const {
        return project(residual_hhat(unflatten(x)));
    }

    SampledMap synth_chart(const MatrixXcd& coef, int c) const {
        const ChartEval e = eval_chart(coef, c);
        SampledMap m;
        m.chart = c;
        m.kind = FieldKind::function;
        m.values.resize(dom->num_nodes());
        m.ds.resize(dom->num_nodes());
        m.dt.resize(dom->num_nodes());
        for (int i = 0; i < dom->rows(); ++i)
            for (int jcol = 0; jcol < dom->cols(); ++jcol) {
                const std::size_t idx = dom->index(i, jcol);
                m.values[idx] = e.v(i, jcol);
                m.ds[idx] = e.ds(i, jcol);
                m.dt[idx] = e.dt(i, jcol);
            }
        return m;
    }
};

SurfaceField form_field_from(const std::array<MatrixXcd, 2>& eta,
                             const NeckDomain& dom) {
    SurfaceField f;
    for (int c = 0; c < 2; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        SampledMap m;
        m.chart = c;
        m.kind = FieldKind::form01;
        m.values.resize(dom.num_nodes());
        for (int i = 0; i < dom.rows(); ++i)
            for (int j = 0; j < dom.cols(); ++j)
                m.values[dom.index(i, j)] = eta[cc](i, j);
        f.chart[cc] = std::move(m);
    }
    return f;
}

// ||trial-synthesized correction||_{W^{1,p}} over ||probe||_{L^p}: one
// sample of the right-inverse bound in the function-space norms.
double probe_ratio(const GlueWorkspace& ws, const MatrixXd& q,
                   const std::array<MatrixXcd, 2>& eta) {
    const NeckDomain& dom = *ws.dom;
    const double eta_lp = lp_norm(form_field_from(eta, dom), dom, ws.p);
    if (!(eta_lp > 1e-300)) return 0.0;
    std::array<MatrixXcd, 2> hhat;
    for (int c = 0; c < 2; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        hhat[cc].resize(dom.rows(), dom.cols());
        for (int i = 0; i < dom.rows(); ++i)
            for (int j = 0; j < dom.cols(); ++j)
                hhat[cc](i, j) = ws.h_sign[cc] * 2.0 *
                                 std::conj(ws.zc[cc][dom.index(i, j)]) *
                                 eta[cc](i, j);
    }
    const VectorXd y = ws.equil.cwiseProduct(ws.project(hhat));
    const VectorXd x = q * y;
    const MatrixXcd coef = ws.unflatten(x);
    SurfaceField xi;
    xi.chart[0] = ws.synth_chart(coef, 0);
    xi.chart[1] = ws.synth_chart(coef, 1);
    return w1p_norm(xi, dom, ws.p) / eta_lp;
}

double fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys,
                  double& residual) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double lx = std::log(xs[k]);
        const double ly = std::log(ys[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double rss = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double d = std::log(ys[k]) - (slope * std::log(xs[k]) + icpt);
        rss += d * d;
    }
    residual = std::sqrt(rss / n);
    return slope;
}

}  // namespace

GlueResult glue_correct(const SurfaceField& preglued, const PerturbedJ& J,
                        const NeckDomain& dom, double p,
                        const GlueOptions& opt) {
    if (!(p > 2.0)) throw BadParameters("corrector needs p > 2");
    if (!preglued.chart[0].has_derivatives() ||
        !preglued.chart[1].has_derivatives())
        throw BadParameters("corrector needs derivative samples");

    auto ws = std::make_shared<GlueWorkspace>(preglued, J, dom, p, opt);
    ws->equil = VectorXd::Ones(2 * ws->K_test);

    const VectorXd f0_raw = ws->residual_raw(VectorXd::Zero(2 * ws->K));
    MatrixXd a_raw(2 * ws->K_test, 2 * ws->K);
    for (int k = 0; k < 2 * ws->K; ++k) {
        VectorXd e = VectorXd::Zero(2 * ws->K);
        if (ws->standard) {
            e(k) = 1.0;
            a_raw.col(k) = ws->residual_raw(e) - f0_raw;
        } else {
            e(k) = opt.fd_step;
            const VectorXd plus = ws->residual_raw(e);
            e(k) = -opt.fd_step;
            const VectorXd minus = ws->residual_raw(e);
            a_raw.col(k) = (plus - minus) / (2.0 * opt.fd_step);
        }
    }

    double max_row = 0.0;
    for (int r = 0; r < a_raw.rows(); ++r)
        max_row = std::max(max_row, a_raw.row(r).norm());
    if (!(max_row > 0.0))
        throw BadParameters("projected linearization vanished");
    for (int r = 0; r < a_raw.rows(); ++r)
        ws->equil(r) = 1.0 / std::max(a_raw.row(r).norm(), 1e-12 * max_row);

    const MatrixXd a = ws->equil.asDiagonal() * a_raw;
    const MatrixXd a_sc = a * ws->colw.cwiseInverse().asDiagonal();
    MatrixXd q = a_sc.completeOrthogonalDecomposition().pseudoInverse();
    // one refinement step tightens a_sc*q toward the identity
    q += q * (MatrixXd::Identity(a_sc.rows(), a_sc.rows()) - a_sc * q);
    q = ws->colw.cwiseInverse().asDiagonal() * q;

    NewtonProblem prob;
    prob.f = [ws](const Vector& x) {
        return Vector(ws->equil.cwiseProduct(ws->residual_raw(x)));
    };
    prob.d0f = a;
    prob.Q = q;
    prob.c = std::max(estimate_operator_norm(q) * (1.0 + 1e-6), 1e-12);
    const double f0n = ws->equil.cwiseProduct(f0_raw).norm();
    prob.delta = std::max(8.0 * prob.c * f0n, 1e-8);
    prob.lip_check_samples = opt.lip_samples;
    prob.seed = opt.seed;
    if (ws->standard) {
        const MatrixXd a_copy = a;
        prob.jacobian_at = [a_copy](const Vector&) { return a_copy; };
    }

    const NewtonResult res = newton_solve(prob, opt.newton_tol, opt.max_iter);

    GlueResult out;
    const MatrixXcd coef = ws->unflatten(res.x_star);
    out.xi.chart[0] = ws->synth_chart(coef, 0);
    out.xi.chart[1] = ws->synth_chart(coef, 1);
    out.xi_w1p = w1p_norm(out.xi, dom, p);
    out.projected_residual = res.residual;
    out.iterations = res.iterations;

    const SurfaceField eta0 = dbar_field(ws->pre, J, dom);
    out.eta0_lp = lp_norm(eta0, dom, p);

    std::array<MatrixXcd, 2> eta0m;
    for (int c = 0; c < 2; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        eta0m[cc].resize(dom.rows(), dom.cols());
        for (int i = 0; i < dom.rows(); ++i)
            for (int j = 0; j < dom.cols(); ++j)
                eta0m[cc](i, j) = eta0.chart[cc].values[dom.index(i, j)];
    }
    double bound = probe_ratio(*ws, q, eta0m);

    // independent probe forms: global smooth coefficient fields pushed to
    // the charts with the (0,1) transition factor
    Rng rng(opt.seed);
    const double r2 = dom.R() * dom.R();
    for (int n = 0; n < opt.probes; ++n) {
        MatrixXcd g(ws->n_trial, ws->n_modes);
        for (int b = 0; b < ws->n_trial; ++b)
            for (int mi = 0; mi < ws->n_modes; ++mi)
                g(b, mi) = rng.complex_in_box(1.0);
        std::array<MatrixXcd, 2> eta;
        for (int c = 0; c < 2; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            eta[cc] = (ws->SV[cc] * g) * ws->E[cc];
        }
        for (int i = 0; i < dom.rows(); ++i)
            for (int j = 0; j < dom.cols(); ++j) {
                const Complex w = ws->zc[1][dom.index(i, j)];
                eta[1](i, j) *= -1.0 / (r2 * std::conj(w) * std::conj(w));
            }
        bound = std::max(bound, probe_ratio(*ws, q, eta));
    }
    out.c_certified = bound;
    out.certificate_holds =
        out.xi_w1p <= 2.0 * out.c_certified * out.eta0_lp + 1e-12;
    return out;
}

namespace {

double measure_quantity(const CurvePair& pair, double delta, double p, double R,
                        DecayQuantity quantity, const DecayOptions& opt,
                        int n_tau, int n_theta) {
    const NeckDomain dom(delta, R, n_tau, n_theta);
    switch (quantity) {
        case DecayQuantity::dbar_lp: {
            const SurfaceField u = preglue(pair, dom);
            return lp_norm(dbar_field(u, PerturbedJ{}, dom), dom, p);
        }
        case DecayQuantity::r_derivative_w1p:
            return preglue_r_derivative(pair, dom, R * 1e-6, p).analytic_w1p;
        case DecayQuantity::xi_w1p: {
            const PerturbedJ J = (opt.epsilon == 0.0)
                                     ? PerturbedJ{}
                                     : PerturbedJ(opt.epsilon, pair.x0,
                                                  opt.j_radius);
            return glue_correct(preglue(pair, dom), J, dom, p, opt.glue).xi_w1p;
        }
    }
    throw BadParameters("unknown decay quantity");
}

const char* quantity_name(DecayQuantity q) {
    switch (q) {
        case DecayQuantity::dbar_lp: return "dbar_lp";
        case DecayQuantity::r_derivative_w1p: return "r_derivative_w1p";
        case DecayQuantity::xi_w1p: return "xi_w1p";
    }
    return "unknown";
}

}  // namespace

namespace {

// the sharper the integrand, the finer the default row count must be for
// the doubling self-check to stay under 1%
int default_rows(DecayQuantity q) {
    switch (q) {
        case DecayQuantity::dbar_lp: return 128;
        case DecayQuantity::r_derivative_w1p: return 384;
        case DecayQuantity::xi_w1p: return 256;
    }
    return 128;
}

}  // namespace

ConvergenceReport decay_study(const CurvePair& pair, double delta, double p,
                              const std::vector<double>& R_values,
                              DecayQuantity quantity, const DecayOptions& opt_in) {
    if (R_values.size() < 5)
        throw BadParameters("decay study needs at least five R values");
    for (std::size_t k = 0; k + 1 < R_values.size(); ++k)
        if (!(R_values[k] < R_values[k + 1]))
            throw BadParameters("R ladder must increase strictly");
    if (!(R_values.back() >= 10.0 * R_values.front()))
        throw BadParameters("R ladder must span at least one decade");

    DecayOptions opt = opt_in;
    if (opt.n_tau <= 0) opt.n_tau = default_rows(quantity);
    if (opt.n_theta <= 0) opt.n_theta = 32;

    ConvergenceReport rep;
    rep.quantity = quantity_name(quantity);
    rep.meta.seed = opt.seed;
    rep.meta.grid =
        std::to_string(opt.n_tau) + "x" + std::to_string(opt.n_theta);
    rep.meta.p = p;
    rep.meta.delta = delta;
    rep.tolerance = opt.slope_tolerance;

    // ladder points are independent; evaluate them concurrently and
    // collect in index order so the report is deterministic
    std::vector<std::future<std::pair<double, double>>> tasks;
    tasks.reserve(R_values.size());
    for (const double R : R_values)
        tasks.push_back(std::async(std::launch::async, [&, R] {
            const double coarse = measure_quantity(pair, delta, p, R, quantity,
                                                   opt, opt.n_tau, opt.n_theta);
            const double fine =
                measure_quantity(pair, delta, p, R, quantity, opt,
                                 2 * opt.n_tau, 2 * opt.n_theta);
            return std::make_pair(coarse, fine);
        }));
    std::vector<double> values;
    for (std::size_t k = 0; k < R_values.size(); ++k) {
        const auto [coarse, fine] = tasks[k].get();
        if (std::max(std::abs(coarse), std::abs(fine)) > 1e-13 &&
            std::abs(fine - coarse) > 0.01 * std::abs(fine))
            throw ResolutionInsufficient(
                std::string("grid doubling moves ") + rep.quantity +
                " by more than 1% at R = " + std::to_string(R_values[k]));
        values.push_back(fine);
        rep.points.push_back({R_values[k], fine});
    }

    switch (quantity) {
        case DecayQuantity::dbar_lp:
            rep.expected_slope = -2.0 / p;
            break;
        case DecayQuantity::r_derivative_w1p:
            rep.expected_slope = -(1.0 + 2.0 / p);
            break;
        case DecayQuantity::xi_w1p:
            rep.expected_slope = -2.0 / p;
            rep.one_sided = true;
            break;
    }

    bool all_zero = true;
    for (const double v : values)
        if (std::abs(v) > 1e-13) all_zero = false;
    if (all_zero) {
        rep.slope = 0.0;
        rep.residual = 0.0;
        rep.pass = true;
        rep.meta.note = "all-zero";
        return rep;
    }
    for (const double v : values)
        if (!(v > 0.0))
            throw ResolutionInsufficient(
                "decay values must be positive for a log-log fit");

    rep.slope = fit_loglog(R_values, values, rep.residual);
    rep.pass = rep.one_sided
                   ? (rep.slope <= rep.expected_slope + rep.tolerance)
                   : (std::abs(rep.slope - rep.expected_slope) <= rep.tolerance);
    return rep;
}

C1ReparamReport c1_reparam_check(const CurvePair& pair, double delta, double p,
                                 const std::vector<double>& lambda_tilde,
                                 const C1ReparamOptions& opt) {
    if (lambda_tilde.empty())
        throw RangeViolation("quotient check needs a nonempty ladder");
    if (!(p > 2.0)) throw BadParameters("corrector needs p > 2");
    for (std::size_t k = 0; k < lambda_tilde.size(); ++k) {
        const double lt = lambda_tilde[k];
        if (!(std::isfinite(lt) && lt > 0.0 && lt < 1.0))
            throw RangeViolation("reparametrized scale must lie in (0, 1)");
        if (k > 0 && !(lt < lambda_tilde[k - 1]))
            throw RangeViolation("ladder must decrease strictly");
        const double R = std::pow(lt, -p / 2.0);
        if (!(std::isfinite(R) && R >= 4.0 / delta && R <= 1e8))
            throw RangeViolation("implied gluing parameter out of range");
        if (2.0 / (delta * R) > opt.epsilon0)
            throw RangeViolation(
                "comparison annulus overlaps the pregluing transition");
    }

    C1ReparamReport rep;
    std::vector<std::future<double>> tasks;
    tasks.reserve(lambda_tilde.size());
    for (const double lt : lambda_tilde)
        tasks.push_back(std::async(std::launch::async, [&, lt] {
            const double lambda = std::pow(lt, p);
            const double R = 1.0 / std::sqrt(lambda);
            int n_tau = opt.n_tau;
            if (n_tau <= 0) {
                // rows must outresolve the finest correction knots
                n_tau = std::max(
                    128, static_cast<int>(std::ceil(2.0 * std::log(R) / 0.05)));
                n_tau += n_tau % 2;
            }
            const NeckDomain dom(delta, R, n_tau, opt.n_theta);
            const PerturbedJ J =
                (opt.epsilon == 0.0)
                    ? PerturbedJ{}
                    : PerturbedJ(opt.epsilon, pair.x0, opt.j_radius);
            const GlueResult g =
                glue_correct(preglue(pair, dom), J, dom, p, opt.glue);
            // glued(0) equals u0 on the annulus, so the difference is xi alone
            return annulus_w1p(g.xi.chart[0], dom, p, opt.epsilon0);
        }));
    for (std::size_t k = 0; k < lambda_tilde.size(); ++k) {
        const double lt = lambda_tilde[k];
        const double a = tasks[k].get();
        rep.lambda_tilde.push_back(lt);
        rep.annulus_norm.push_back(a);
        rep.quotient.push_back(a / lt);
        rep.raw_quotient.push_back(a / std::pow(lt, p));
    }

    const auto converges = [&opt](const std::vector<double>& q) {
        double peak = 0.0;
        for (const double v : q) peak = std::max(peak, std::abs(v));
        if (peak <= 1e-13) return true;
        for (std::size_t k = 0; k + 1 < q.size(); ++k)
            if (q[k + 1] > q[k] * (1.0 + opt.noise)) return false;
        return q.back() <= 0.5 * q.front();
    };
    rep.reparam_converges = converges(rep.quotient);
    rep.raw_control_converges = converges(rep.raw_quotient);
    return rep;
}

}  // namespace dmglue
