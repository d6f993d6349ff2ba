//
// sommerfeld.cpp: spectral-line quadrature and the reflected/transmitted
// Green-function parts it evaluates.
//

#include "lmscat/sommerfeld.hpp"

#include <algorithm>
#include <cmath>

#include "lmscat/errors.hpp"

namespace lmscat {

Complex spectral_beta(double k, double xi) {
    if (xi <= k) return Complex(std::sqrt((k - xi) * (k + xi)), 0.0);
    return Complex(0.0, std::sqrt((xi - k) * (xi + k)));
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev initial guess, Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

namespace {

struct PanelMap {
    // xi = origin + sign * s^2 (substituted) or xi = s (identity)
    double origin = 0.0;
    double sign = 1.0;
    bool substituted = false;
    double s_lo = 0.0, s_hi = 0.0;

    double xi(double s) const { return substituted ? origin + sign * s * s : s; }
    double jac(double s) const { return substituted ? 2.0 * s : 1.0; }
};

double abs_beta(double k, double xi) { return std::abs(spectral_beta(k, xi)); }

// exact span bound on a branch-free interval: |beta| monotone there
double phase_span(const RuleEnvelope& env, double kp, double km, double x1, double x2) {
    return env.u_max * std::abs(x2 - x1) +
           std::max(std::abs(env.a_max), std::abs(env.a_min)) *
               std::abs(abs_beta(kp, x2) - abs_beta(kp, x1)) +
           std::max(std::abs(env.b_max), std::abs(env.b_min)) *
               std::abs(abs_beta(km, x2) - abs_beta(km, x1));
}

}  // namespace

SpectralRule build_spectral_rule(const Medium& medium, const RuleEnvelope& env,
                                 const SommerfeldOptions& opts) {
    const double kp = medium.k_plus(), km = medium.k_minus();
    const double k_lo = std::min(kp, km), k_hi = std::max(kp, km);
    const double budget = opts.phase_budget / std::max(1.0, opts.refinement);

    // truncation: march until the net evanescent decay reaches the tail target
    const double depth_floor = 1e-3 / km;
    double a_min = env.a_min, b_min = env.b_min;
    if (a_min >= 0.0 && b_min >= 0.0 && a_min + b_min < depth_floor) b_min = depth_floor;
    if (a_min + b_min <= 0.0)
        throw InvalidParamError("build_spectral_rule: no net decay, envelope depths invalid");
    auto net_decay = [&](double xi) {
        return a_min * spectral_beta(kp, xi).imag() + b_min * spectral_beta(km, xi).imag();
    };
    double xi_max = k_lo;
    {
        const double step = std::max(0.25 * k_hi, 0.5 * opts.tail_exponent /
                                                      std::max(a_min + b_min, depth_floor));
        double xi = k_lo;
        while (net_decay(xi) < opts.tail_exponent || net_decay(xi + step) < opts.tail_exponent) {
            xi += step;
            if (xi > 1e9 * k_hi)
                throw AccuracyError("build_spectral_rule: truncation point not found");
        }
        xi_max = xi;
    }

    // master panels split at the branch points, midpoint split between them
    std::vector<double> brk{0.0};
    auto push = [&](double v) {
        if (v > brk.back() + 1e-14 * std::max(1.0, k_hi) && v < xi_max - 1e-14) brk.push_back(v);
    };
    push(k_lo);
    if (k_hi > k_lo * (1.0 + 1e-14)) {
        push(0.5 * (k_lo + k_hi));
        push(k_hi);
    }
    brk.push_back(xi_max);

    auto is_branch = [&](double v) {
        return std::abs(v - k_lo) < 1e-12 * k_hi || std::abs(v - k_hi) < 1e-12 * k_hi;
    };

    std::vector<double> gl_x, gl_w;
    gauss_legendre(opts.gl_points, gl_x, gl_w);

    SpectralRule rule;
    rule.xi_max = xi_max;

    const double u_amp = env.u_max;
    const double a_amp = std::max(std::abs(env.a_max), std::abs(env.a_min));
    const double b_amp = std::max(std::abs(env.b_max), std::abs(env.b_min));

    for (size_t p = 0; p + 1 < brk.size(); ++p) {
        const double a = brk[p], b = brk[p + 1];
        if (b - a < 1e-14) continue;
        PanelMap map;
        if (is_branch(a)) {
            map = {a, +1.0, true, 0.0, std::sqrt(b - a)};
        } else if (is_branch(b)) {
            map = {b, -1.0, true, 0.0, std::sqrt(b - a)};
        } else {
            map = {0.0, 1.0, false, a, b};
        }

        // rate of phase accumulation in the panel coordinate
        auto rate = [&](double s) {
            const double xi = map.xi(s);
            const double j = map.jac(s);
            double r = u_amp * j;
            for (auto [k, amp] : {std::pair{kp, a_amp}, std::pair{km, b_amp}}) {
                if (amp == 0.0) continue;
                const double bk = std::abs(spectral_beta(k, xi));
                if (map.substituted && std::abs(map.origin - k) < 1e-12 * k_hi) {
                    // beta = s sqrt(|k + xi|) near its own branch point
                    const double q = std::sqrt(std::abs(k + xi));
                    r += amp * std::abs(q - (q > 0.0 ? s * s / q : 0.0));
                } else {
                    r += amp * (bk > 1e-12 * k_hi ? std::abs(xi) / bk * j : 1e12);
                }
            }
            return r;
        };

        double s = map.s_lo;
        while (s < map.s_hi - 1e-15 * std::max(1.0, map.s_hi)) {
            double ds = budget / std::max(rate(s), 1e-12);
            ds = std::min(ds, map.s_hi - s);
            // shrink until the exact endpoint span bound fits
            for (int guard = 0; guard < 200; ++guard) {
                const double span = phase_span(env, kp, km, map.xi(s), map.xi(s + ds));
                if (span <= 1.3 * budget || ds < 1e-13 * (map.s_hi - map.s_lo + 1.0)) break;
                ds *= 0.6;
            }
            const double s0 = s, s1 = s + ds;
            for (int q = 0; q < opts.gl_points; ++q) {
                const double sq = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * gl_x[q];
                rule.xi.push_back(map.xi(sq));
                rule.w.push_back(gl_w[q] * 0.5 * (s1 - s0) * map.jac(sq));
            }
            ++rule.subpanels;
            if (rule.subpanels > opts.max_subpanels)
                throw AccuracyError("build_spectral_rule: subpanel cap exceeded (achieved span " +
                                    std::to_string(budget) + " rad)");
            s = s1;
        }
    }
    return rule;
}

namespace {

inline Complex coeff_reflected(double kp, double km, double xi) {
    const Complex bm = spectral_beta(km, xi), bp = spectral_beta(kp, xi);
    return (bm - bp) / ((bm + bp) * bm);
}

inline Complex coeff_transmitted(double kp, double km, double xi) {
    const Complex bm = spectral_beta(km, xi), bp = spectral_beta(kp, xi);
    return 2.0 / (bm + bp);
}

}  // namespace

GreenEval eval_reflected_H(Vec2 x, Vec2 y, const Medium& medium,
                           const SommerfeldOptions& opts) {
    GreenEval out;
    if (medium.matched()) return out;
    const double u = x.x - y.x, v = x.y + y.y;
    RuleEnvelope env;
    env.u_max = std::abs(u);
    env.b_max = env.b_min = std::abs(v);
    const SpectralRule rule = build_spectral_rule(medium, env, opts);

    const Complex I(0.0, 1.0);
    Complex val(0.0), du(0.0), dv(0.0);
    const double kp = medium.k_plus(), km = medium.k_minus();
    for (size_t q = 0; q < rule.xi.size(); ++q) {
        const double xi = rule.xi[q];
        const Complex bm = spectral_beta(km, xi);
        const Complex f = rule.w[q] * coeff_reflected(kp, km, xi) * std::exp(-I * bm * v);
        const double c = std::cos(xi * u), s = std::sin(xi * u);
        val += f * c;
        du += f * (-xi * s);
        dv += f * (-I * bm) * c;
    }
    const Complex scale = I / (2.0 * M_PI);
    val *= scale;
    du *= scale;
    dv *= scale;
    out.value = val;
    out.grad_y = {-du, dv};
    out.grad_x = {du, dv};
    return out;
}

GreenEval eval_transmitted_G(Vec2 x, Vec2 y, const Medium& medium,
                             const SommerfeldOptions& opts) {
    const double u = x.x - y.x;
    RuleEnvelope env;
    env.u_max = std::abs(u);
    env.a_max = env.a_min = x.y;
    env.b_max = env.b_min = std::abs(y.y);
    const SpectralRule rule = build_spectral_rule(medium, env, opts);

    const Complex I(0.0, 1.0);
    Complex val(0.0), du(0.0), dy2(0.0), dx2(0.0);
    const double kp = medium.k_plus(), km = medium.k_minus();
    for (size_t q = 0; q < rule.xi.size(); ++q) {
        const double xi = rule.xi[q];
        const Complex bm = spectral_beta(km, xi), bp = spectral_beta(kp, xi);
        const Complex f = rule.w[q] * coeff_transmitted(kp, km, xi) *
                          std::exp(I * (bp * x.y - bm * y.y));
        const double c = std::cos(xi * u), s = std::sin(xi * u);
        val += f * c;
        du += f * (-xi * s);
        dy2 += f * (-I * bm) * c;
        dx2 += f * (I * bp) * c;
    }
    const Complex scale = I / (2.0 * M_PI);
    GreenEval out;
    out.value = scale * val;
    out.grad_y = {-scale * du, scale * dy2};
    out.grad_x = {scale * du, scale * dx2};
    return out;
}

HBlock eval_H_block(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                    const Medium& medium, const SommerfeldOptions& opts) {
    const int nx = static_cast<int>(x.size()), ny = static_cast<int>(y.size());
    HBlock blk;
    blk.val = Eigen::MatrixXcd::Zero(nx, ny);
    blk.du = Eigen::MatrixXcd::Zero(nx, ny);
    blk.dv = Eigen::MatrixXcd::Zero(nx, ny);
    blk.duu = Eigen::MatrixXcd::Zero(nx, ny);
    blk.duv = Eigen::MatrixXcd::Zero(nx, ny);
    blk.dvv = Eigen::MatrixXcd::Zero(nx, ny);
    if (medium.matched() || nx == 0 || ny == 0) return blk;

    RuleEnvelope env;
    double x2max = -1e300, y2max = -1e300;
    for (const auto& p : x) x2max = std::max(x2max, p.y);
    for (const auto& p : y) y2max = std::max(y2max, p.y);
    double ux_min = 1e300, ux_max = -1e300, uy_min = 1e300, uy_max = -1e300;
    for (const auto& p : x) { ux_min = std::min(ux_min, p.x); ux_max = std::max(ux_max, p.x); }
    for (const auto& p : y) { uy_min = std::min(uy_min, p.x); uy_max = std::max(uy_max, p.x); }
    env.u_max = std::max(std::abs(ux_max - uy_min), std::abs(ux_min - uy_max));
    const double vmin = -(x2max + y2max);  // smallest |v| over all pairs
    double x2min = 1e300, y2min = 1e300;
    for (const auto& p : x) x2min = std::min(x2min, p.y);
    for (const auto& p : y) y2min = std::min(y2min, p.y);
    const double vmax = -(x2min + y2min);
    if (vmin <= 0.0)
        throw InvalidParamError("eval_H_block: points must lie strictly below the interface");
    env.b_min = vmin;
    env.b_max = vmax;

    const SpectralRule rule = build_spectral_rule(medium, env, opts);
    const int nq = static_cast<int>(rule.xi.size());
    const double kp = medium.k_plus(), km = medium.k_minus();
    const Complex I(0.0, 1.0);

    // factored fill: cos(xi (a - b)) = cos cos + sin sin, the exponential
    // splits per point, so each output is a pair of (nq x nx)^T (nq x ny) GEMMs
    Eigen::MatrixXcd Px(nq, nx), Qx(nq, nx), Py(nq, ny), Qy(nq, ny);
    Eigen::VectorXcd wv(nq), wdu(nq), wdv(nq), wduu(nq), wduv(nq), wdvv(nq);
    for (int q = 0; q < nq; ++q) {
        const double xi = rule.xi[q];
        const Complex bm = spectral_beta(km, xi);
        const Complex w = rule.w[q] * coeff_reflected(kp, km, xi) * (I / (2.0 * M_PI));
        wv(q) = w;
        wdu(q) = w * xi;
        wdv(q) = w * (-I * bm);
        wduu(q) = w * (-xi * xi);
        wduv(q) = w * xi * (-I * bm);
        wdvv(q) = w * (-bm * bm);
        for (int i = 0; i < nx; ++i) {
            const Complex e = std::exp(-I * bm * x[i].y);
            Px(q, i) = std::cos(xi * x[i].x) * e;
            Qx(q, i) = std::sin(xi * x[i].x) * e;
        }
        for (int j = 0; j < ny; ++j) {
            const Complex e = std::exp(-I * bm * y[j].y);
            Py(q, j) = std::cos(xi * y[j].x) * e;
            Qy(q, j) = std::sin(xi * y[j].x) * e;
        }
    }
    // cos-type planes carry cos(xi u), sin-type planes carry sin(xi u)
    auto cos_plane = [&](const Eigen::VectorXcd& w) {
        return (Px.transpose() * (w.asDiagonal() * Py) +
                Qx.transpose() * (w.asDiagonal() * Qy))
            .eval();
    };
    auto sin_plane = [&](const Eigen::VectorXcd& w) {
        // sin(a-b) = sin a cos b - cos a sin b
        return (Qx.transpose() * (w.asDiagonal() * Py) -
                Px.transpose() * (w.asDiagonal() * Qy))
            .eval();
    };
    blk.val = cos_plane(wv);
    blk.du = -sin_plane(wdu);   // d/du cos(xi u) = -xi sin(xi u)
    blk.dv = cos_plane(wdv);
    blk.duu = cos_plane(wduu);
    blk.duv = -sin_plane(wduv);
    blk.dvv = cos_plane(wdvv);
    return blk;
}

}  // namespace lmscat
