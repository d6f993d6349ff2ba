//
// bie.cpp: assembly of the combined-layer system, its far-field map and the
// exterior normal-derivative operator.
//

#include "lmscat/bie.hpp"

#include <cmath>

#include "lmscat/errors.hpp"

namespace lmscat {

namespace {

constexpr double kEuler = 0.57721566490153286060651209008240243;

// Kussmaul-Martensen weights R_m for N = 2n nodes, m = (i - j) mod N:
// quadrature of ln(4 sin^2((t-tau)/2)) against trigonometric interpolants
std::vector<double> km_log_weights(int n_nodes) {
    const int n = n_nodes / 2;
    std::vector<double> r(n_nodes);
    for (int m = 0; m < n_nodes; ++m) {
        double s = 0.0;
        for (int p = 1; p < n; ++p) s += std::cos(p * M_PI * m / n) / p;
        r[m] = -(2.0 * M_PI / n) * s - (M_PI / (n * n)) * std::cos(M_PI * m);
    }
    return r;
}

inline double bj0(double x) { return std::cyl_bessel_j(0, x); }
inline double bj1(double x) { return std::cyl_bessel_j(1, x); }
inline double by0(double x) { return std::cyl_neumann(0, x); }
inline double by1(double x) { return std::cyl_neumann(1, x); }

// H part of a block via the interpolation table when provided and in range,
// otherwise through the factored direct fill
HBlock h_block(const std::vector<Vec2>& x, const std::vector<Vec2>& y, const Medium& medium,
               const BieOptions& opts) {
    if (medium.matched()) {
        HBlock b;
        const int nx = static_cast<int>(x.size()), ny = static_cast<int>(y.size());
        b.val = Eigen::MatrixXcd::Zero(nx, ny);
        b.du = Eigen::MatrixXcd::Zero(nx, ny);
        b.dv = Eigen::MatrixXcd::Zero(nx, ny);
        b.duu = Eigen::MatrixXcd::Zero(nx, ny);
        b.duv = Eigen::MatrixXcd::Zero(nx, ny);
        b.dvv = Eigen::MatrixXcd::Zero(nx, ny);
        return b;
    }
    if (opts.h_table != nullptr) {
        bool ok = true;
        for (const auto& a : x) {
            for (const auto& b2 : y)
                if (!opts.h_table->covers(a.x - b2.x, a.y + b2.y)) {
                    ok = false;
                    break;
                }
            if (!ok) break;
        }
        if (ok) {
            HBlock b;
            const int nx = static_cast<int>(x.size()), ny = static_cast<int>(y.size());
            b.val.resize(nx, ny);
            b.du.resize(nx, ny);
            b.dv.resize(nx, ny);
            b.duu.resize(nx, ny);
            b.duv.resize(nx, ny);
            b.dvv.resize(nx, ny);
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j) {
                    const HJet jet = opts.h_table->eval_jet(x[i].x - y[j].x, x[i].y + y[j].y);
                    b.val(i, j) = jet.val;
                    b.du(i, j) = jet.du;
                    b.dv(i, j) = jet.dv;
                    b.duu(i, j) = jet.duu;
                    b.duv(i, j) = jet.duv;
                    b.dvv(i, j) = jet.dvv;
                }
            return b;
        }
    }
    return eval_H_block(x, y, medium, opts.sommerfeld);
}

}  // namespace

Eigen::MatrixXd trig_diff_matrix(int n) {
    if (n % 2 != 0) throw InvalidParamError("trig_diff_matrix: node count must be even");
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double t = M_PI * (i - j) / n;
            d(i, j) = 0.5 * std::pow(-1.0, i - j) / std::tan(t);
        }
    return d;
}

BiePanel::BiePanel(std::vector<BoundaryGrid> components, const Medium& medium,
                   const BieOptions& opts)
    : components_(std::move(components)), medium_(medium) {
    if (components_.empty()) throw InvalidParamError("BiePanel: no components");
    offsets_.resize(components_.size());
    for (size_t c = 0; c < components_.size(); ++c) {
        const int n = components_[c].size();
        if (n < 8 || n % 2 != 0)
            throw InvalidParamError("BiePanel: component node count must be even and >= 8");
        if (components_[c].max_y() > -opts.interface_margin)
            throw InvalidParamError("BiePanel: curve touches or crosses the interface");
        offsets_[c] = total_;
        total_ += n;
        for (const auto& f : components_[c].frames) flat_.push_back(f);
    }
    assemble(opts);
    lu_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXcd>>(system_);
}

void BiePanel::assemble(const BieOptions& opts) {
    const double k = medium_.k_minus();
    const Complex I(0.0, 1.0);
    system_ = Eigen::MatrixXcd::Zero(total_, total_);
    // free-space and reflected contributions are kept apart: the Maue form of
    // the hypersingular operator needs translation invariance and therefore
    // applies to the Phi parts only; the H parts are smooth and their second
    // derivatives are integrated directly
    Eigen::MatrixXcd sphi = Eigen::MatrixXcd::Zero(total_, total_);
    Eigen::MatrixXcd sh = Eigen::MatrixXcd::Zero(total_, total_);
    Eigen::MatrixXcd kmat = Eigen::MatrixXcd::Zero(total_, total_);   // K, both parts
    Eigen::MatrixXcd kpmat = Eigen::MatrixXcd::Zero(total_, total_);  // K', both parts
    Eigen::MatrixXcd th = Eigen::MatrixXcd::Zero(total_, total_);     // T, H part

    for (size_t cx = 0; cx < components_.size(); ++cx) {
        const auto& gx = components_[cx];
        const int nx = gx.size(), ox = offsets_[cx];
        std::vector<Vec2> px(nx);
        for (int i = 0; i < nx; ++i) px[i] = gx.frames[i].point;

        for (size_t cy = 0; cy < components_.size(); ++cy) {
            const auto& gy = components_[cy];
            const int ny = gy.size(), oy = offsets_[cy];
            std::vector<Vec2> py(ny);
            for (int j = 0; j < ny; ++j) py[j] = gy.frames[j].point;

            const HBlock hb = h_block(px, py, medium_, opts);
            const double tw = 2.0 * M_PI / ny;  // trapezoid weight

            if (cx == cy) {
                // same component: logarithmic splitting for the Phi parts
                const std::vector<double> rlog = km_log_weights(ny);
                for (int i = 0; i < ny; ++i) {
                    const auto& fi = gy.frames[i];
                    for (int j = 0; j < ny; ++j) {
                        const auto& fj = gy.frames[j];
                        const double sp = fj.speed;
                        const Vec2 nus{fj.normal.x * sp, fj.normal.y * sp};
                        const Vec2 nui{fi.normal.x, fi.normal.y};
                        const double rw = rlog[((i - j) % ny + ny) % ny];
                        Complex sv, kv, kpv;
                        if (i == j) {
                            const Complex m2d =
                                (I / 4.0 - kEuler / (2.0 * M_PI) -
                                 std::log(k * fi.speed / 2.0) / (2.0 * M_PI)) *
                                fi.speed;
                            const double m1d = -(1.0 / (4.0 * M_PI)) * fi.speed;
                            sv = rw * m1d + tw * m2d;
                            const double curv = dot(fi.d2, fi.normal) / (4.0 * M_PI * fi.speed);
                            kv = tw * curv;   // L1 diagonal vanishes
                            kpv = tw * curv;  // adjoint shares the curvature limit
                        } else {
                            const Vec2 dxy = fi.point - fj.point;
                            const double r = norm(dxy);
                            const double z = k * r;
                            const double lg =
                                std::log(4.0 * std::pow(std::sin((M_PI * (i - j)) / ny), 2));
                            // single layer
                            const Complex m = (I / 4.0) * Complex(bj0(z), by0(z)) * sp;
                            const double m1 = -(1.0 / (4.0 * M_PI)) * bj0(z) * sp;
                            sv = rw * m1 + tw * (m - m1 * lg);
                            // double layer: (ik/4) H1(kr) ((x_i-x_j).nu_s_j)/r
                            const double gdot = dot(dxy, nus) / r;
                            const Complex l = (I * k / 4.0) * Complex(bj1(z), by1(z)) * gdot;
                            const double l1 = -(k / (4.0 * M_PI)) * bj1(z) * gdot;
                            kv = rw * l1 + tw * (l - l1 * lg);
                            // adjoint double layer: direction flipped, normal at x_i
                            const double gdot2 = -dot(dxy, nui) / r * sp;
                            const Complex lp = (I * k / 4.0) * Complex(bj1(z), by1(z)) * gdot2;
                            const double lp1 = -(k / (4.0 * M_PI)) * bj1(z) * gdot2;
                            kpv = rw * lp1 + tw * (lp - lp1 * lg);
                        }
                        // smooth reflected parts
                        const Complex hval = hb.val(i, j);
                        const Complex hky =
                            (-hb.du(i, j)) * fj.normal.x + hb.dv(i, j) * fj.normal.y;
                        const Complex hkx = hb.du(i, j) * fi.normal.x + hb.dv(i, j) * fi.normal.y;
                        // nu(x)^T [grad_x grad_y H] nu(y)
                        const Complex hxy = fi.normal.x * (-hb.duu(i, j)) * fj.normal.x +
                                            fi.normal.x * hb.duv(i, j) * fj.normal.y +
                                            fi.normal.y * (-hb.duv(i, j)) * fj.normal.x +
                                            fi.normal.y * hb.dvv(i, j) * fj.normal.y;
                        sphi(ox + i, oy + j) = sv;
                        sh(ox + i, oy + j) = tw * hval * sp;
                        kmat(ox + i, oy + j) = kv + tw * hky * sp;
                        kpmat(ox + i, oy + j) = kpv + tw * hkx * sp;
                        th(ox + i, oy + j) = tw * hxy * sp;
                    }
                }
            } else {
                // distinct components: all kernels smooth
                for (int i = 0; i < nx; ++i) {
                    const auto& fi = gx.frames[i];
                    for (int j = 0; j < ny; ++j) {
                        const auto& fj = gy.frames[j];
                        const double sp = fj.speed;
                        const Vec2 dxy = fi.point - fj.point;
                        const double r = norm(dxy);
                        const double z = k * r;
                        const Complex h0(bj0(z), by0(z));
                        const Complex h1(bj1(z), by1(z));
                        const Complex phi = (I / 4.0) * h0;
                        const Complex radial = -(I * k / 4.0) * h1 / r;
                        const Complex dphidnuy =
                            radial * (-(dxy.x * fj.normal.x + dxy.y * fj.normal.y));
                        const Complex dphidnux =
                            radial * (dxy.x * fi.normal.x + dxy.y * fi.normal.y);
                        const Complex hval = hb.val(i, j);
                        const Complex hky =
                            (-hb.du(i, j)) * fj.normal.x + hb.dv(i, j) * fj.normal.y;
                        const Complex hkx = hb.du(i, j) * fi.normal.x + hb.dv(i, j) * fi.normal.y;
                        const Complex hxy = fi.normal.x * (-hb.duu(i, j)) * fj.normal.x +
                                            fi.normal.x * hb.duv(i, j) * fj.normal.y +
                                            fi.normal.y * (-hb.duv(i, j)) * fj.normal.x +
                                            fi.normal.y * hb.dvv(i, j) * fj.normal.y;
                        sphi(ox + i, oy + j) = tw * phi * sp;
                        sh(ox + i, oy + j) = tw * hval * sp;
                        kmat(ox + i, oy + j) = tw * (dphidnuy + hky) * sp;
                        kpmat(ox + i, oy + j) = tw * (dphidnux + hkx) * sp;
                        th(ox + i, oy + j) = tw * hxy * sp;
                    }
                }
            }
        }
    }

    system_ = kmat - I * (sphi + sh);
    for (int i = 0; i < total_; ++i) system_(i, i) += 0.5;

    // Maue form of the hypersingular operator for the free-space part:
    // T_phi f = (1/|x'|) d/dt S_pm (df/dt) + k^2 nu . S(nu f)
    Eigen::MatrixXd dblk = Eigen::MatrixXd::Zero(total_, total_);
    for (size_t c = 0; c < components_.size(); ++c) {
        const int n = components_[c].size(), o = offsets_[c];
        dblk.block(o, o, n, n) = trig_diff_matrix(n);
    }
    Eigen::VectorXd invsp(total_), nx(total_), nyv(total_);
    for (int i = 0; i < total_; ++i) {
        invsp(i) = 1.0 / flat_[i].speed;
        nx(i) = flat_[i].normal.x;
        nyv(i) = flat_[i].normal.y;
    }
    const Eigen::MatrixXcd s_pm = sphi * invsp.asDiagonal();
    Eigen::MatrixXcd tmat = invsp.asDiagonal() * (dblk * (s_pm * dblk));
    tmat += (k * k) * (nx.asDiagonal() * (sphi * nx.asDiagonal()).eval() +
                       nyv.asDiagonal() * (sphi * nyv.asDiagonal()).eval());
    normal_op_ = tmat + th - I * kpmat;
    for (int i = 0; i < total_; ++i) normal_op_(i, i) += I * 0.5;
}

Eigen::VectorXcd BiePanel::solve(const Eigen::VectorXcd& f) const {
    Eigen::VectorXcd phi = lu_->solve(f);
    if (!phi.allFinite()) throw AccuracyError("BiePanel::solve: singular system");
    return phi;
}

Eigen::MatrixXcd BiePanel::solve(const Eigen::MatrixXcd& f) const {
    Eigen::MatrixXcd phi = lu_->solve(f);
    if (!phi.allFinite()) throw AccuracyError("BiePanel::solve: singular system");
    return phi;
}

Eigen::MatrixXcd BiePanel::farfield_matrix(const std::vector<double>& theta_obs) const {
    const int n_obs = static_cast<int>(theta_obs.size());
    Eigen::MatrixXcd ff(n_obs, total_);
    const Complex I(0.0, 1.0);
    const double km = medium_.k_minus();
    for (int j = 0; j < n_obs; ++j) {
        const double tt = transmitted_direction(theta_obs[j], DirectionMode::Observation, medium_);
        const Vec2 xt = unit_vector(tt);
        for (size_t c = 0; c < components_.size(); ++c) {
            const auto& g = components_[c];
            const double tw = 2.0 * M_PI / g.size();
            for (int i = 0; i < g.size(); ++i) {
                const auto& f = g.frames[i];
                const FarKernel ker = farfield_kernel(theta_obs[j], f.point, medium_);
                const Complex dker = ker.value * (-I * km * dot(xt, f.normal));
                ff(j, offsets_[c] + i) = tw * f.speed * (dker - I * ker.value);
            }
        }
    }
    return ff;
}

Eigen::VectorXcd BiePanel::scattered_normal_derivative(const Eigen::VectorXcd& phi) const {
    return normal_op_ * phi;
}

Eigen::VectorXcd layer_potential(const std::vector<BoundaryGrid>& components,
                                 const Medium& medium, const Eigen::VectorXcd& phi,
                                 const std::vector<Vec2>& points,
                                 const SommerfeldOptions& opts) {
    const Complex I(0.0, 1.0);
    const double k = medium.k_minus();
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(points.size());
    int offset = 0;
    for (const auto& g : components) {
        std::vector<Vec2> nodes(g.size());
        for (int j = 0; j < g.size(); ++j) nodes[j] = g.frames[j].point;
        HBlock hb;
        if (!medium.matched()) hb = eval_H_block(points, nodes, medium, opts);
        const double tw = 2.0 * M_PI / g.size();
        for (size_t p = 0; p < points.size(); ++p) {
            Complex acc(0.0, 0.0);
            for (int j = 0; j < g.size(); ++j) {
                const auto& f = g.frames[j];
                GreenEval gr = free_space_phi(points[p], f.point, k);
                if (!medium.matched()) {
                    gr.value += hb.val(p, j);
                    gr.grad_y.x += -hb.du(p, j);
                    gr.grad_y.y += hb.dv(p, j);
                }
                const Complex dn = gr.grad_y.x * f.normal.x + gr.grad_y.y * f.normal.y;
                acc += tw * f.speed * (dn - I * gr.value) * phi(offset + j);
            }
            u(p) += acc;
        }
        offset += g.size();
    }
    return u;
}

Eigen::VectorXcd BiePanel::dirichlet_data(const std::vector<double>& incident_thetas) const {
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(total_);
    for (const double th : incident_thetas)
        for (int i = 0; i < total_; ++i)
            f(i) -= background_field(flat_[i].point, th, medium_).value;
    return f;
}

Eigen::VectorXcd BiePanel::background_normal_derivative(
    const std::vector<double>& incident_thetas) const {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(total_);
    for (const double th : incident_thetas)
        for (int i = 0; i < total_; ++i) {
            const FieldEval u0 = background_field(flat_[i].point, th, medium_);
            g(i) += u0.grad.x * flat_[i].normal.x + u0.grad.y * flat_[i].normal.y;
        }
    return g;
}

FarFieldSweep simulate(const BiePanel& panel, const std::vector<double>& incident_thetas,
                       const std::vector<double>& observation_thetas) {
    const int nd = static_cast<int>(incident_thetas.size());
    Eigen::MatrixXcd rhs(panel.size(), nd);
    for (int d = 0; d < nd; ++d) rhs.col(d) = panel.dirichlet_data({incident_thetas[d]});
    FarFieldSweep sweep;
    sweep.densities = panel.solve(rhs);
    sweep.u_inf = panel.farfield_matrix(observation_thetas) * sweep.densities;
    return sweep;
}

}  // namespace lmscat
