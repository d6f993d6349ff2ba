//
// layered_green.cpp: free-space part, total Green function, far-field kernel,
// the aperture integral B0, and the H interpolation table with its cache file.
//

#include "lmscat/layered_green.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace lmscat {

GreenEval free_space_phi(Vec2 x, Vec2 y, double k) {
    const double r = norm(x - y);
    if (!(r > 0.0)) throw InvalidParamError("free_space_phi: singular point x = y");
    const Complex I(0.0, 1.0);
    const Complex h0(std::cyl_bessel_j(0, k * r), std::cyl_neumann(0, k * r));
    const Complex h1(std::cyl_bessel_j(1, k * r), std::cyl_neumann(1, k * r));
    GreenEval g;
    g.value = (I / 4.0) * h0;
    const Complex radial = -(I * k / 4.0) * h1 / r;  // d/dr (i/4)H0 = -(ik/4)H1
    g.grad_y = {radial * (y.x - x.x), radial * (y.y - x.y)};
    g.grad_x = {radial * (x.x - y.x), radial * (x.y - y.y)};
    return g;
}

GreenEval green_total(Vec2 x, Vec2 y, const Medium& medium, const SommerfeldOptions& opts) {
    if (!(y.y < 0.0)) throw InvalidParamError("green_total: source must be below the interface");
    if (x.y < 0.0) {
        GreenEval g = free_space_phi(x, y, medium.k_minus());
        if (!medium.matched()) {
            const GreenEval h = eval_reflected_H(x, y, medium, opts);
            g.value += h.value;
            g.grad_y.x += h.grad_y.x;
            g.grad_y.y += h.grad_y.y;
            g.grad_x.x += h.grad_x.x;
            g.grad_x.y += h.grad_x.y;
        }
        return g;
    }
    if (medium.matched()) return free_space_phi(x, y, medium.k_minus());
    return eval_transmitted_G(x, y, medium, opts);
}

FarKernel farfield_kernel(double theta_obs, Vec2 y, const Medium& medium) {
    const double T = transmission_obs(theta_obs, medium);
    const double tt = transmitted_direction(theta_obs, DirectionMode::Observation, medium);
    const Vec2 xt = unit_vector(tt);
    const double km = medium.k_minus();
    const Complex I(0.0, 1.0);
    const Complex amp = std::exp(I * M_PI / 4.0) / std::sqrt(8.0 * M_PI * medium.k_plus());
    FarKernel k;
    k.value = amp * T * std::exp(-I * km * dot(y, xt));
    k.grad_y = {k.value * (-I * km * xt.x), k.value * (-I * km * xt.y)};
    return k;
}

Complex eval_B0(Vec2 y, const Medium& medium, int order) {
    if (order < 8) throw InvalidParamError("eval_B0: order too small");
    const double kp = medium.k_plus(), km = medium.k_minus();
    const Complex I(0.0, 1.0);

    // integrand g(theta) in the smooth parametrization variable
    const bool by_tt = kp > km;
    const double lo = by_tt ? M_PI : medium.incident_lo();
    const double hi = by_tt ? 2.0 * M_PI : medium.incident_hi();

    auto integrand = [&](double th) -> Complex {
        if (by_tt) {
            // variable is theta^t in [pi, 2pi]; theta_d recovered from Snell.
            // sin(theta_d) is bounded away from zero here, so the direct
            // square-root form is stable
            const double ct = std::cos(th), st = std::sin(th);
            const double sd = -std::sqrt(std::max(0.0, 1.0 - (km / kp) * (km / kp) * ct * ct));
            const double T = 2.0 * kp * sd / (kp * sd + km * st);
            const double jac = (km * st) / (kp * sd);
            const double phase = km * (y.x * ct + y.y * st);
            return T * T * std::exp(I * phase) * jac;
        }
        if (medium.matched()) {
            const double phase = km * (y.x * std::cos(th) + y.y * std::sin(th));
            return std::exp(I * phase);
        }
        // k+ < k-: integrate in theta_d; sin(theta^t) bounded away from zero
        const double cd = std::cos(th), sd = std::sin(th);
        const double ct = (kp / km) * cd;
        const double st = -std::sqrt(std::max(0.0, 1.0 - ct * ct));
        const double T = 2.0 * kp * sd / (kp * sd + km * st);
        const double phase = km * (y.x * ct + y.y * st);
        return T * T * std::exp(I * phase);
    };

    // trapezoid after the cosine endpoint map w(s) = s - sin(2 pi s)/(2 pi)
    Complex sum(0.0, 0.0);
    const double len = hi - lo;
    for (int i = 1; i < order; ++i) {
        const double s = static_cast<double>(i) / order;
        const double w = s - std::sin(2.0 * M_PI * s) / (2.0 * M_PI);
        const double dw = 1.0 - std::cos(2.0 * M_PI * s);
        sum += integrand(lo + len * w) * (len * dw / order);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// HTable
// ---------------------------------------------------------------------------

HTable::HTable(const Medium& medium, double u0, double u1, double v0, double v1,
               double target_rel_err, const SommerfeldOptions& opts) {
    if (medium.matched())
        throw InvalidParamError("HTable: H vanishes identically for matched media");
    if (!(v1 < 0.0)) throw InvalidParamError("HTable: v range must be negative (below interface)");
    if (!(u1 > u0) || !(v1 > v0)) throw InvalidParamError("HTable: empty range");
    k_plus_ = medium.k_plus();
    k_minus_ = medium.k_minus();

    // spacing from the cubic-interpolation budget: err ~ 0.024 (h xi_eff)^4;
    // the effective bandwidth grows when the table gets close to the interface
    const double km = medium.k_minus();
    const double depth_min = -v1;
    const double xi_eff = std::sqrt(km * km + std::pow(6.0 / depth_min, 2));
    const double h = std::pow(target_rel_err / 0.024, 0.25) / xi_eff;

    // pad by two stencil cells so interior queries always have 4x4 support
    u0_ = u0 - 2.0 * h;
    v0_ = v0 - 2.0 * h;
    nu_ = static_cast<int>(std::ceil((u1 + 2.0 * h - u0_) / h)) + 1;
    nv_ = static_cast<int>(std::ceil((v1 + 2.0 * h - v0_) / h)) + 1;
    hu_ = hv_ = h;

    RuleEnvelope env;
    env.u_max = std::max(std::abs(u0_), std::abs(u0_ + hu_ * (nu_ - 1)));
    env.b_min = depth_min;
    env.b_max = -v0_;
    const SpectralRule rule = build_spectral_rule(medium, env, opts);
    const int nq = static_cast<int>(rule.xi.size());

    // row-shared spectral sum: each plane is one (nv x nq)(nq x nu) product
    const Complex I(0.0, 1.0);
    Eigen::MatrixXcd A(nv_, nq), Adu(nv_, nq), Adv(nv_, nq);
    Eigen::MatrixXcd Aduu(nv_, nq), Aduv(nv_, nq), Advv(nv_, nq);
    Eigen::MatrixXd C(nq, nu_), S(nq, nu_);
    const double kp = medium.k_plus();
    for (int q = 0; q < nq; ++q) {
        const double xi = rule.xi[q];
        const Complex bm = spectral_beta(km, xi);
        const Complex w = rule.w[q] * (bm - spectral_beta(kp, xi)) /
                          ((bm + spectral_beta(kp, xi)) * bm) * (I / (2.0 * M_PI));
        for (int iv = 0; iv < nv_; ++iv) {
            const double v = v0_ + hv_ * iv;
            const Complex e = w * std::exp(-I * bm * v);
            A(iv, q) = e;
            Adu(iv, q) = e * xi;
            Adv(iv, q) = e * (-I * bm);
            Aduu(iv, q) = e * (-xi * xi);
            Aduv(iv, q) = e * xi * (-I * bm);
            Advv(iv, q) = e * (-bm * bm);
        }
        for (int iu = 0; iu < nu_; ++iu) {
            const double u = u0_ + hu_ * iu;
            C(q, iu) = std::cos(xi * u);
            S(q, iu) = std::sin(xi * u);
        }
    }
    val_ = A * C;
    du_ = -(Adu * S);
    dv_ = Adv * C;
    duu_ = Aduu * C;
    duv_ = -(Aduv * S);
    dvv_ = Advv * C;
}

bool HTable::covers(double u, double v) const {
    if (nu_ < 4 || nv_ < 4) return false;
    const double iu = (u - u0_) / hu_, iv = (v - v0_) / hv_;
    return iu >= 1.0 && iu <= nu_ - 2.0 && iv >= 1.0 && iv <= nv_ - 2.0;
}

namespace {
// cubic Lagrange weights for the 4-point stencil {-1,0,1,2} at offset t in [0,1]
inline void cubic_weights(double t, double w[4]) {
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}
}  // namespace

HJet HTable::eval_jet(double u, double v) const {
    if (!covers(u, v)) throw InvalidParamError("HTable::eval: query outside table range");
    const double fu = (u - u0_) / hu_, fv = (v - v0_) / hv_;
    int ju = static_cast<int>(std::floor(fu)), jv = static_cast<int>(std::floor(fv));
    ju = std::min(std::max(ju, 1), nu_ - 3);
    jv = std::min(std::max(jv, 1), nv_ - 3);
    double wu[4], wv[4];
    cubic_weights(fu - ju, wu);
    cubic_weights(fv - jv, wv);
    HJet jet{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const double w = wv[a] * wu[b];
            jet.val += w * val_(jv - 1 + a, ju - 1 + b);
            jet.du += w * du_(jv - 1 + a, ju - 1 + b);
            jet.dv += w * dv_(jv - 1 + a, ju - 1 + b);
            jet.duu += w * duu_(jv - 1 + a, ju - 1 + b);
            jet.duv += w * duv_(jv - 1 + a, ju - 1 + b);
            jet.dvv += w * dvv_(jv - 1 + a, ju - 1 + b);
        }
    return jet;
}

GreenEval HTable::eval(double u, double v) const {
    const HJet jet = eval_jet(u, v);
    GreenEval g;
    g.value = jet.val;
    g.grad_y = {-jet.du, jet.dv};
    g.grad_x = {jet.du, jet.dv};
    return g;
}

void HTable::write(const std::string& path_prefix) const {
    nlohmann::json hdr;
    hdr["format"] = "lmscat-htable";
    hdr["version"] = 1;
    hdr["k_plus"] = k_plus_;
    hdr["k_minus"] = k_minus_;
    hdr["u0"] = u0_;
    hdr["hu"] = hu_;
    hdr["nu"] = nu_;
    hdr["v0"] = v0_;
    hdr["hv"] = hv_;
    hdr["nv"] = nv_;
    hdr["payload"] = path_prefix.substr(path_prefix.find_last_of('/') + 1) + ".csv";
    std::ofstream jf(path_prefix + ".json");
    if (!jf) throw IoError("HTable::write: cannot open " + path_prefix + ".json");
    jf << hdr.dump(2) << "\n";

    std::FILE* cf = std::fopen((path_prefix + ".csv").c_str(), "w");
    if (!cf) throw IoError("HTable::write: cannot open " + path_prefix + ".csv");
    std::fprintf(cf, "iv,iu,val_re,val_im,du_re,du_im,dv_re,dv_im,duu_re,duu_im,duv_re,duv_im,"
                     "dvv_re,dvv_im\n");
    for (int iv = 0; iv < nv_; ++iv)
        for (int iu = 0; iu < nu_; ++iu)
            std::fprintf(cf,
                         "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                         "%.17g,%.17g\n",
                         iv, iu, val_(iv, iu).real(), val_(iv, iu).imag(), du_(iv, iu).real(),
                         du_(iv, iu).imag(), dv_(iv, iu).real(), dv_(iv, iu).imag(),
                         duu_(iv, iu).real(), duu_(iv, iu).imag(), duv_(iv, iu).real(),
                         duv_(iv, iu).imag(), dvv_(iv, iu).real(), dvv_(iv, iu).imag());
    std::fclose(cf);
}

HTable HTable::read(const std::string& path_prefix) {
    std::ifstream jf(path_prefix + ".json");
    if (!jf) throw IoError("HTable::read: cannot open " + path_prefix + ".json");
    nlohmann::json hdr;
    jf >> hdr;
    if (hdr.value("format", "") != "lmscat-htable" || hdr.value("version", 0) != 1)
        throw FormatError("HTable::read: unrecognized header");
    HTable t;
    t.k_plus_ = hdr.at("k_plus");
    t.k_minus_ = hdr.at("k_minus");
    t.u0_ = hdr.at("u0");
    t.hu_ = hdr.at("hu");
    t.nu_ = hdr.at("nu");
    t.v0_ = hdr.at("v0");
    t.hv_ = hdr.at("hv");
    t.nv_ = hdr.at("nv");
    t.val_.resize(t.nv_, t.nu_);
    t.du_.resize(t.nv_, t.nu_);
    t.dv_.resize(t.nv_, t.nu_);
    t.duu_.resize(t.nv_, t.nu_);
    t.duv_.resize(t.nv_, t.nu_);
    t.dvv_.resize(t.nv_, t.nu_);
    std::ifstream cf(path_prefix + ".csv");
    if (!cf) throw IoError("HTable::read: cannot open " + path_prefix + ".csv");
    std::string line;
    std::getline(cf, line);  // header
    int count = 0;
    while (std::getline(cf, line)) {
        int iv, iu;
        double d[12];
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf",
                        &iv, &iu, &d[0], &d[1], &d[2], &d[3], &d[4], &d[5], &d[6], &d[7], &d[8],
                        &d[9], &d[10], &d[11]) != 14)
            throw FormatError("HTable::read: malformed payload row");
        if (iv < 0 || iv >= t.nv_ || iu < 0 || iu >= t.nu_)
            throw FormatError("HTable::read: index out of range");
        t.val_(iv, iu) = Complex(d[0], d[1]);
        t.du_(iv, iu) = Complex(d[2], d[3]);
        t.dv_(iv, iu) = Complex(d[4], d[5]);
        t.duu_(iv, iu) = Complex(d[6], d[7]);
        t.duv_(iv, iu) = Complex(d[8], d[9]);
        t.dvv_(iv, iu) = Complex(d[10], d[11]);
        ++count;
    }
    if (count != t.nu_ * t.nv_) throw FormatError("HTable::read: payload size mismatch");
    return t;
}

}  // namespace lmscat
