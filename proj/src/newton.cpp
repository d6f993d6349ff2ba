//
// newton.cpp: forward pass, shape derivative, LM step and the recursive
// multi-frequency driver.
//

#include "lmscat/newton.hpp"

#include <algorithm>
#include <cmath>

#include "lmscat/errors.hpp"

namespace lmscat {

ForwardContext make_forward(std::vector<StarlikeCurve> curves, const Medium& medium,
                            int n_nodes, const std::vector<std::pair<double, double>>& pairs,
                            const std::vector<double>& observation_thetas,
                            const BieOptions& opts) {
    ForwardContext ctx;
    ctx.curves = std::move(curves);
    ctx.obs = observation_thetas;
    ctx.pairs = pairs;

    std::vector<BoundaryGrid> grids;
    grids.reserve(ctx.curves.size());
    for (const auto& c : ctx.curves) grids.push_back(sample_boundary(c, n_nodes));
    ctx.panel = std::make_unique<BiePanel>(std::move(grids), medium, opts);

    // distinct single directions, one solve each
    std::vector<double> dirs;
    auto dir_index = [&](double th) {
        for (size_t i = 0; i < dirs.size(); ++i)
            if (std::abs(dirs[i] - th) < 1e-14) return static_cast<int>(i);
        dirs.push_back(th);
        return static_cast<int>(dirs.size() - 1);
    };
    std::vector<std::pair<int, int>> pair_idx;
    pair_idx.reserve(pairs.size());
    for (const auto& [a, b] : pairs) pair_idx.emplace_back(dir_index(a), dir_index(b));

    const int n = ctx.panel->size();
    Eigen::MatrixXcd rhs(n, dirs.size());
    for (size_t d = 0; d < dirs.size(); ++d) rhs.col(d) = ctx.panel->dirichlet_data({dirs[d]});
    const Eigen::MatrixXcd densities = ctx.panel->solve(rhs);
    ctx.farfield_map = ctx.panel->farfield_matrix(ctx.obs);
    const Eigen::MatrixXcd u_inf_dir = ctx.farfield_map * densities;

    // d(u^s)/dnu per direction, then per pair: d(v0 + u^s)/dnu
    Eigen::MatrixXcd dn_dir(n, dirs.size());
    for (size_t d = 0; d < dirs.size(); ++d) {
        dn_dir.col(d) = ctx.panel->scattered_normal_derivative(densities.col(d)) +
                        ctx.panel->background_normal_derivative({dirs[d]});
    }

    const int np = static_cast<int>(pairs.size());
    ctx.u_inf_pair.resize(ctx.obs.size(), np);
    ctx.total_normal_deriv.resize(n, np);
    for (int q = 0; q < np; ++q) {
        ctx.u_inf_pair.col(q) =
            u_inf_dir.col(pair_idx[q].first) + u_inf_dir.col(pair_idx[q].second);
        ctx.total_normal_deriv.col(q) =
            dn_dir.col(pair_idx[q].first) + dn_dir.col(pair_idx[q].second);
    }
    ctx.phaseless = ctx.u_inf_pair.cwiseAbs2();
    return ctx;
}

Eigen::MatrixXd frechet_apply(const ForwardContext& ctx, int component, Vec2 da,
                              const std::vector<double>& dr_coeffs) {
    const auto& curve = ctx.curves.at(component);
    const int nc = ctx.panel->component(component).size();
    const int off = ctx.panel->component_offset(component);
    const std::vector<double> hn = perturbation_normal_component(curve, nc, da, dr_coeffs);

    const int np = static_cast<int>(ctx.pairs.size());
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(ctx.panel->size(), np);
    for (int q = 0; q < np; ++q)
        for (int i = 0; i < nc; ++i)
            rhs(off + i, q) = -ctx.total_normal_deriv(off + i, q) * hn[i];
    const Eigen::MatrixXcd du_inf = ctx.farfield_map * ctx.panel->solve(rhs);
    return 2.0 * ctx.u_inf_pair.conjugate().cwiseProduct(du_inf).real();
}

Eigen::MatrixXd assemble_jacobian(const ForwardContext& ctx, int fourier_order) {
    const int m = fourier_order;
    const int cols_per = 2 * m + 3;
    const int ncomp = static_cast<int>(ctx.curves.size());
    const int np = static_cast<int>(ctx.pairs.size());
    const int n_obs = static_cast<int>(ctx.obs.size());
    const int n = ctx.panel->size();

    // all shape-basis right-hand sides batched through one factorization
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, ncomp * cols_per * np);
    for (int c = 0; c < ncomp; ++c) {
        const int nc = ctx.panel->component(c).size();
        const int off = ctx.panel->component_offset(c);
        Eigen::MatrixXd hbasis(nc, cols_per);
        std::vector<double> dr(2 * m + 1, 0.0);
        for (int col = 0; col < cols_per; ++col) {
            Vec2 da{0.0, 0.0};
            std::fill(dr.begin(), dr.end(), 0.0);
            if (col == 0)
                da = {1.0, 0.0};
            else if (col == 1)
                da = {0.0, 1.0};
            else
                dr[col - 2] = 1.0;
            const auto hn = perturbation_normal_component(ctx.curves[c], nc, da, dr);
            for (int i = 0; i < nc; ++i) hbasis(i, col) = hn[i];
        }
        for (int col = 0; col < cols_per; ++col)
            for (int q = 0; q < np; ++q) {
                const int rcol = (c * cols_per + col) * np + q;
                for (int i = 0; i < nc; ++i)
                    rhs(off + i, rcol) = -ctx.total_normal_deriv(off + i, q) * hbasis(i, col);
            }
    }
    const Eigen::MatrixXcd du_all = ctx.farfield_map * ctx.panel->solve(rhs);

    Eigen::MatrixXd jac(np * n_obs, ncomp * cols_per);
    for (int c = 0; c < ncomp; ++c)
        for (int col = 0; col < cols_per; ++col)
            for (int q = 0; q < np; ++q) {
                const int rcol = (c * cols_per + col) * np + q;
                jac.block(q * n_obs, c * cols_per + col, n_obs, 1) =
                    2.0 *
                    ctx.u_inf_pair.col(q).conjugate().cwiseProduct(du_all.col(rcol)).real();
            }
    return jac;
}

Eigen::VectorXd penalty_diagonal(int components, int fourier_order, double s) {
    const int m = fourier_order;
    const int cols_per = 2 * m + 3;
    Eigen::VectorXd p(components * cols_per);
    for (int c = 0; c < components; ++c) {
        p(c * cols_per + 0) = 1.0;
        p(c * cols_per + 1) = 1.0;
        p(c * cols_per + 2) = 2.0 * M_PI;
        for (int l = 1; l <= m; ++l) {
            const double w = M_PI * std::pow(1.0 + l * l, s);
            p(c * cols_per + 2 + l) = w;
            p(c * cols_per + 2 + m + l) = w;
        }
    }
    return p;
}

LmStep lm_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& residual,
               const Eigen::VectorXd& penalty_diag, double weight, double rho,
               double ratio_tol) {
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidParamError("lm_step: need 0 < rho < 1");
    const double sw = std::sqrt(weight);
    const Eigen::VectorXd pinv_sqrt = penalty_diag.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd m = sw * jac * pinv_sqrt.asDiagonal();
    const Eigen::VectorXd rt = sw * residual;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sig = svd.singularValues();
    const Eigen::VectorXd c = svd.matrixU().transpose() * rt;
    const double r2 = rt.squaredNorm();
    const double orth = r2 - c.squaredNorm();  // component outside the range of J

    auto lin_res_sq = [&](double beta) {
        double v = orth;
        for (int i = 0; i < sig.size(); ++i) {
            const double f = beta / (sig(i) * sig(i) + beta);
            v += f * f * c(i) * c(i);
        }
        return v;
    };

    const double target = rho * rho * r2;
    const double smax2 = sig.size() ? sig(0) * sig(0) : 1.0;
    double lo = 1e-12 * smax2, hi = 1e12 * smax2;
    LmStep step;
    if (lin_res_sq(lo) > target) {
        // expand downward a few decades; if the linearization still cannot
        // reach the target fraction, take the bracket edge and flag it
        double lo2 = lo;
        int rounds = 0;
        while (lin_res_sq(lo2) > target && rounds++ < 8) lo2 *= 1e-3;
        if (lin_res_sq(lo2) > target) {
            step.fallback = true;
            step.beta = lo;
        } else {
            lo = lo2;
        }
    }
    if (!step.fallback) {
        while (lin_res_sq(hi) < target) hi *= 1e3;
        for (int it = 0; it < 400; ++it) {
            const double mid = std::sqrt(lo * hi);
            if (lin_res_sq(mid) < target)
                lo = mid;
            else
                hi = mid;
            if (std::abs(lin_res_sq(mid) - target) <= ratio_tol * target) {
                step.beta = mid;
                break;
            }
            step.beta = mid;
        }
    }
    step.ratio = lin_res_sq(step.beta) / r2;
    Eigen::VectorXd z(sig.size());
    for (int i = 0; i < sig.size(); ++i)
        z(i) = sig(i) / (sig(i) * sig(i) + step.beta) * c(i);
    step.delta = pinv_sqrt.asDiagonal() * (svd.matrixV() * z);
    return step;
}

double relative_error(const Eigen::MatrixXd& model, const Eigen::MatrixXd& data) {
    if (model.rows() != data.rows() || model.cols() != data.cols())
        throw InvalidParamError("relative_error: shape mismatch");
    double e = 0.0;
    for (int q = 0; q < data.cols(); ++q) {
        const double dn = data.col(q).norm();
        if (dn == 0.0) throw InvalidParamError("relative_error: zero data norm");
        e += (model.col(q) - data.col(q)).norm() / dn;
    }
    return e / data.cols();
}

InversionResult run_recursive(const PhaselessDataset& data,
                              const std::vector<Vec2>& init_centers, const NewtonConfig& cfg,
                              const BieOptions& opts) {
    if (init_centers.empty()) throw InvalidParamError("run_recursive: no initial centers");
    std::vector<StarlikeCurve> curves;
    for (const Vec2& c : init_centers)
        curves.push_back(StarlikeCurve::circle(c, cfg.r0, cfg.fourier_order));
    return run_recursive(data, std::move(curves), cfg, opts);
}

InversionResult run_recursive(const PhaselessDataset& data,
                              std::vector<StarlikeCurve> initial_curves,
                              const NewtonConfig& cfg, const BieOptions& opts) {
    if (data.layout.kind != DatasetLayout::Kind::PairList)
        throw InvalidParamError("run_recursive: dataset must carry an explicit pair list");
    if (initial_curves.empty()) throw InvalidParamError("run_recursive: no initial curves");
    for (size_t i = 1; i < data.layout.k_plus.size(); ++i)
        if (!(data.layout.k_plus[i] > data.layout.k_plus[i - 1]))
            throw InvalidParamError("run_recursive: frequencies must be strictly increasing");
    if (!(cfg.tau > 1.0)) throw InvalidParamError("run_recursive: need tau > 1");
    for (const auto& c : initial_curves)
        if (c.order() != cfg.fourier_order)
            throw InvalidParamError("run_recursive: curve order must match the config");

    const double delta_eff = data.delta > 0.0 ? data.delta : cfg.delta_floor;
    const int m = cfg.fourier_order;
    const int cols_per = 2 * m + 3;

    InversionResult out;
    out.curves = std::move(initial_curves);

    const int n_freq = static_cast<int>(data.layout.k_plus.size());
    const int n_obs = data.layout.n_f;
    const int np = data.layout.pair_count();

    for (int fi = 0; fi < n_freq; ++fi) {
        const Medium medium = data.medium_at(fi);
        const std::vector<double> obs = observation_angles(n_obs, medium);
        const double weight = medium.aperture_length() / n_obs;

        // data block as (n_obs x n_pairs)
        Eigen::MatrixXd y(n_obs, np);
        for (int q = 0; q < np; ++q)
            for (int j = 0; j < n_obs; ++j) y(j, q) = data.blocks[fi](q, j);

        ForwardContext ctx =
            make_forward(out.curves, medium, cfg.n_inversion, data.layout.pairs, obs, opts);
        double err = relative_error(ctx.phaseless, y);
        int iter = 0;
        bool capped = false;
        while (err >= cfg.tau * delta_eff) {
            if (iter >= cfg.max_iters_per_freq) {
                capped = true;
                break;
            }
            const Eigen::MatrixXd jac = assemble_jacobian(ctx, m);
            Eigen::VectorXd res(np * n_obs);
            for (int q = 0; q < np; ++q)
                res.segment(q * n_obs, n_obs) = y.col(q) - ctx.phaseless.col(q);
            const Eigen::VectorXd pen =
                penalty_diagonal(static_cast<int>(out.curves.size()), m, cfg.s);
            const LmStep step = lm_step(jac, res, pen, weight, cfg.rho, cfg.ratio_tol);

            bool projected = false;
            for (size_t c = 0; c < out.curves.size(); ++c) {
                const auto seg = step.delta.segment(c * cols_per, cols_per);
                const Vec2 center = out.curves[c].center();
                std::vector<double> coef = out.curves[c].coeffs();
                for (int i = 0; i < 2 * m + 1; ++i) coef[i] += seg(2 + i);
                bool proj = false;
                out.curves[c] = make_positive_starlike({center.x + seg(0), center.y + seg(1)},
                                                       coef, m, cfg.r_min, &proj);
                projected |= proj;
            }

            ctx = make_forward(out.curves, medium, cfg.n_inversion, data.layout.pairs, obs, opts);
            err = relative_error(ctx.phaseless, y);
            ++iter;

            IterationRecord rec;
            rec.freq_index = fi;
            rec.k_plus = data.layout.k_plus[fi];
            rec.iter = iter;
            rec.error = err;
            rec.beta = step.beta;
            rec.ratio = step.ratio;
            rec.fallback = step.fallback;
            rec.projected = projected;
            rec.curves = out.curves;
            out.trajectory.push_back(rec);
        }
        out.final_error_per_freq.push_back(err);
        out.cap_reached.push_back(capped);
    }
    return out;
}

}  // namespace lmscat
