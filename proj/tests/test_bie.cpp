#include <doctest.h>

#include <cmath>

#include "lmscat/bie.hpp"
#include "lmscat/reference.hpp"
#include "lmscat/rng.hpp"

using namespace lmscat;

namespace {

double linf_rel(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a(i) - b(i)));
        den = std::max(den, std::abs(b(i)));
    }
    return num / den;
}

}  // namespace

TEST_CASE("matched-media disk reproduces the series far field") {
    const Medium m(2.0, 1.0);
    const BiePanel panel({sample_boundary(StarlikeCurve::circle({0.0, -3.0}, 1.0), 64)}, m);
    const std::vector<double> obs = observation_angles(24, m);
    const double inc = 1.5 * M_PI + 0.37;
    const FarFieldSweep sweep = simulate(panel, {inc}, obs);
    Eigen::VectorXcd ref(obs.size());
    for (size_t j = 0; j < obs.size(); ++j)
        ref(j) = disk_farfield_series(1.0, {0.0, -3.0}, 2.0, obs[j], inc);
    CHECK(linf_rel(sweep.u_inf.col(0), ref) < 1e-8);
}

TEST_CASE("spectral self-convergence on analytic curves") {
    const Medium m(2.0, 0.25);
    const std::vector<double> obs = observation_angles(16, m);
    const double inc = 1.5 * M_PI - 0.2;
    // the rounded triangle resolves fully between 32 and 64 nodes
    std::vector<Eigen::VectorXcd> u;
    for (const int n : {32, 64, 512}) {
        const BiePanel panel({sample_boundary(builtin_curve("rounded_triangle"), n)}, m);
        u.push_back(simulate(panel, {inc}, obs).u_inf.col(0));
    }
    const double e32 = (u[0] - u[2]).norm() / u[2].norm();
    const double e64 = (u[1] - u[2]).norm() / u[2].norm();
    CHECK(e32 / e64 > 1e2);
    CHECK(e64 < 1e-8);
    // the apple needs more nodes for its steep flank but converges as fast
    std::vector<Eigen::VectorXcd> v;
    for (const int n : {64, 128, 512}) {
        const BiePanel panel({sample_boundary(builtin_curve("apple"), n)}, m);
        v.push_back(simulate(panel, {inc}, obs).u_inf.col(0));
    }
    const double e64a = (v[0] - v[2]).norm() / v[2].norm();
    const double e128a = (v[1] - v[2]).norm() / v[2].norm();
    MESSAGE("apple forward error: N=64 ", e64a, ", N=128 ", e128a);
    CHECK(e64a / e128a > 10.0);
    CHECK(e128a < 1e-6);
}

TEST_CASE("doubling the node count leaves the far field unchanged") {
    const Medium m(2.0, 0.25);
    const std::vector<double> obs = observation_angles(16, m);
    const double inc = 1.5 * M_PI + 0.1;
    const BiePanel p1({sample_boundary(StarlikeCurve::circle({0.3, -2.5}, 0.7), 128)}, m);
    const BiePanel p2({sample_boundary(StarlikeCurve::circle({0.3, -2.5}, 0.7), 256)}, m);
    const Eigen::VectorXcd u1 = simulate(p1, {inc}, obs).u_inf.col(0);
    const Eigen::VectorXcd u2 = simulate(p2, {inc}, obs).u_inf.col(0);
    CHECK((u1 - u2).norm() / u2.norm() < 1e-10);
}

TEST_CASE("operator applied to a constant density matches direct quadrature") {
    const Medium m(1.5, 0.25);
    const auto grid = sample_boundary(StarlikeCurve::circle({0.0, -2.0}, 0.8), 64);
    const BiePanel panel({grid}, m);
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(panel.size());
    const Eigen::VectorXcd av = panel.apply(ones);
    // reference: 1/2 + oint (dG/dnu(y) - iG)(x_i, y) ds(y) by a fine trapezoid
    // on a staggered grid (integrable singularity, slow but convergent)
    const int fine = 16384;
    const auto fgrid = sample_boundary(StarlikeCurve::circle({0.0, -2.0}, 0.8), fine);
    const Complex I(0.0, 1.0);
    for (int i = 0; i < 8; ++i) {
        const Vec2 x = grid.frames[i * 8].point;
        Complex acc(0.5, 0.0);
        for (int j = 0; j < fine; ++j) {
            const auto& f = fgrid.frames[j];
            if (norm(f.point - x) < 1e-12) continue;
            GreenEval g = free_space_phi(x, f.point, m.k_minus());
            const GreenEval h = eval_reflected_H(x, f.point, m);
            g.value += h.value;
            g.grad_y.x += h.grad_y.x;
            g.grad_y.y += h.grad_y.y;
            const Complex dn = g.grad_y.x * f.normal.x + g.grad_y.y * f.normal.y;
            acc += (2.0 * M_PI / fine) * f.speed * (dn - I * g.value);
        }
        CHECK(std::abs(av(i * 8) - acc) < 2e-3 * std::abs(acc));
    }
}

TEST_CASE("solver basics") {
    const Medium m(2.0, 0.25);
    const BiePanel panel({sample_boundary(StarlikeCurve::circle({0.0, -2.0}, 0.5), 64)}, m);
    // zero data -> zero density -> zero far field
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(panel.size());
    CHECK(panel.solve(zero).norm() == 0.0);
    const auto ff = panel.farfield_matrix(observation_angles(8, m));
    CHECK((ff * zero).norm() == 0.0);

    // linearity and backward error
    NormalRng rng(2);
    Eigen::VectorXcd f1(panel.size()), f2(panel.size());
    for (int i = 0; i < panel.size(); ++i) {
        f1(i) = Complex(rng.normal(), rng.normal());
        f2(i) = Complex(rng.normal(), rng.normal());
    }
    const auto p1 = panel.solve(f1), p2 = panel.solve(f2);
    const Eigen::VectorXcd p12 = panel.solve((f1 + f2).eval());
    CHECK((p12 - p1 - p2).norm() <= 1e-12 * (p1.norm() + p2.norm()));
    CHECK((panel.apply(p1) - f1).norm() <= 1e-12 * f1.norm());

    // empirical stability constant ||phi||_inf <= C ||f||_inf
    const double c = p1.lpNorm<Eigen::Infinity>() / f1.lpNorm<Eigen::Infinity>();
    CHECK(c < 1e3);
}

TEST_CASE("translation invariance of the far-field modulus") {
    const Medium m(2.0, 0.25);
    const std::vector<double> obs = observation_angles(32, m);
    const double inc = 1.5 * M_PI + 0.25;
    const BiePanel p0({sample_boundary(StarlikeCurve::circle({0.0, -2.0}, 0.3), 64)}, m);
    const BiePanel pz({sample_boundary(StarlikeCurve::circle({2.5, -2.0}, 0.3), 64)}, m);
    const Eigen::VectorXcd u0 = simulate(p0, {inc}, obs).u_inf.col(0);
    const Eigen::VectorXcd uz = simulate(pz, {inc}, obs).u_inf.col(0);
    double worst = 0.0, den = 0.0;
    for (size_t j = 0; j < obs.size(); ++j) {
        worst = std::max(worst, std::abs(std::abs(uz(j)) - std::abs(u0(j))));
        den = std::max(den, std::abs(u0(j)));
    }
    CHECK(worst / den < 1e-8);

    // full phase relation u_inf(D_z) = e^{i k- z.(d^t - xhat^t)} u_inf(D)
    const Vec2 z{2.5, 0.0};
    const double dt = transmitted_direction(inc, DirectionMode::Incident, m);
    for (size_t j = 0; j < obs.size(); ++j) {
        const double xt = transmitted_direction(obs[j], DirectionMode::Observation, m);
        const Complex phase = std::exp(Complex(
            0.0, m.k_minus() * (dot(z, unit_vector(dt)) - dot(z, unit_vector(xt)))));
        CHECK(std::abs(uz(j) - phase * u0(j)) <= 1e-8 * den);
    }
}

TEST_CASE("superposition: pair data equals the sum of single solves") {
    const Medium m(2.0, 0.25);
    const std::vector<double> obs = observation_angles(8, m);
    const double d1 = 1.5 * M_PI - 0.3, d2 = 1.5 * M_PI + 0.41;
    const BiePanel panel({sample_boundary(StarlikeCurve::circle({0.4, -2.2}, 0.5), 64)}, m);
    const FarFieldSweep s = simulate(panel, {d1, d2}, obs);
    // direct pair solve with f = -(u0(d1) + u0(d2))
    const Eigen::VectorXcd fpair = panel.dirichlet_data({d1, d2});
    const Eigen::VectorXcd upair = panel.farfield_matrix(obs) * panel.solve(fpair);
    CHECK((upair - s.u_inf.col(0) - s.u_inf.col(1)).norm() <= 1e-12 * upair.norm());
    // u_inf(x, d, d) = 2 u_inf(x, d)
    const Eigen::VectorXcd fdd = panel.dirichlet_data({d1, d1});
    const Eigen::VectorXcd udd = panel.farfield_matrix(obs) * panel.solve(fdd);
    CHECK((udd - 2.0 * s.u_inf.col(0)).norm() <= 1e-12 * udd.norm());
}

TEST_CASE("two-component solve: series sanity and self-convergence") {
    const Medium m(2.0, 1.0);
    const std::vector<double> obs = observation_angles(16, m);
    const double inc = 1.5 * M_PI + 0.2;
    const BiePanel panel({sample_boundary(StarlikeCurve::circle({-6.0, -3.0}, 0.1), 64),
                          sample_boundary(StarlikeCurve::circle({6.0, -4.0}, 0.1), 64)},
                         m);
    const Eigen::VectorXcd u = simulate(panel, {inc}, obs).u_inf.col(0);
    // single-scattering superposition is only accurate to the inter-disk
    // coupling (~10% here), so this is a loose anchor
    double den = 0.0;
    for (size_t j = 0; j < obs.size(); ++j) den = std::max(den, std::abs(u(j)));
    for (size_t j = 0; j < obs.size(); ++j) {
        const Complex ref = disk_farfield_series(0.1, {-6.0, -3.0}, 2.0, obs[j], inc) +
                            disk_farfield_series(0.1, {6.0, -4.0}, 2.0, obs[j], inc);
        CHECK(std::abs(u(j) - ref) <= 0.15 * den);
    }
    // the block system itself converges spectrally
    const BiePanel panel2({sample_boundary(StarlikeCurve::circle({-6.0, -3.0}, 0.1), 128),
                           sample_boundary(StarlikeCurve::circle({6.0, -4.0}, 0.1), 128)},
                          m);
    const Eigen::VectorXcd u2 = simulate(panel2, {inc}, obs).u_inf.col(0);
    CHECK((u - u2).norm() / u2.norm() < 1e-10);
}

TEST_CASE("curve must stay below the interface") {
    const Medium m(2.0, 0.25);
    CHECK_THROWS_AS(BiePanel({sample_boundary(StarlikeCurve::circle({0.0, -0.5}, 0.7), 32)}, m),
                    InvalidParamError);
}

TEST_CASE("far field responds at first order to boundary perturbations") {
    const Medium m(2.0, 0.25);
    const std::vector<double> obs = observation_angles(8, m);
    const double inc = 1.5 * M_PI;
    std::vector<double> coef{0.8, 0.1, 0.0, -0.05, 0.02};
    const StarlikeCurve base({0.0, -3.0}, coef, 2);
    const BiePanel p0({sample_boundary(base, 64)}, m);
    const Eigen::VectorXcd u0 = simulate(p0, {inc}, obs).u_inf.col(0);
    double prev = 0.0;
    double order = 1e9;
    for (const double eps : {1e-2, 1e-3, 1e-4}) {
        std::vector<double> c2 = coef;
        c2[0] += eps;
        c2[2] += 0.5 * eps;
        const BiePanel pe({sample_boundary(StarlikeCurve({0.0, -3.0}, c2, 2), 64)}, m);
        const Eigen::VectorXcd ue = simulate(pe, {inc}, obs).u_inf.col(0);
        const double diff = (ue - u0).norm();
        if (prev > 0.0) order = std::min(order, std::log10(prev / diff));
        prev = diff;
    }
    CHECK(order >= 0.99);
}

namespace {

// trigonometric upsampling of nodal values on the 2 pi j / n grid
Eigen::VectorXcd trig_upsample(const Eigen::VectorXcd& v, int m) {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXcd coef(n);
    const Complex I(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
        Complex c(0.0, 0.0);
        const int mode = k - n / 2;
        for (int j = 0; j < n; ++j)
            c += v(j) * std::exp(-I * (2.0 * M_PI * mode * j / n));
        coef(k) = c / static_cast<double>(n);
    }
    Eigen::VectorXcd out(m);
    for (int p = 0; p < m; ++p) {
        const double t = 2.0 * M_PI * p / m;
        Complex s(0.0, 0.0);
        for (int k = 0; k < n; ++k) s += coef(k) * std::exp(I * ((k - n / 2) * t));
        out(p) = s;
    }
    return out;
}

}  // namespace

TEST_CASE("normal-derivative operator against off-boundary differences") {
    const Medium m(1.5, 0.25);
    const int n = 128;
    const StarlikeCurve curve({0.0, -3.0}, {0.9, 0.12, 0.0, 0.0, 0.08}, 2);
    const auto grid = sample_boundary(curve, n);
    const BiePanel panel({grid}, m);
    const double inc = 1.5 * M_PI + 0.2;
    const Eigen::VectorXcd phi = panel.solve(panel.dirichlet_data({inc}));
    const Eigen::VectorXcd dn = panel.scattered_normal_derivative(phi);

    // the potential at distance 1e-3 needs a node spacing well below that, so
    // the smooth periodic density is trig-upsampled onto a very fine grid
    const int nf = 32768;
    const auto fgrid = sample_boundary(curve, nf);
    const Eigen::VectorXcd phif = trig_upsample(phi, nf);
    const double d = 1e-3;
    std::vector<Vec2> pts;
    for (int i = 0; i < n; i += 16) {
        const auto& f = grid.frames[i];
        pts.push_back({f.point.x + d * f.normal.x, f.point.y + d * f.normal.y});
        pts.push_back({f.point.x + 2.0 * d * f.normal.x, f.point.y + 2.0 * d * f.normal.y});
    }
    const Eigen::VectorXcd us = layer_potential({fgrid}, m, phif, pts);
    int p = 0;
    for (int i = 0; i < n; i += 16, p += 2) {
        const auto& f = grid.frames[i];
        // one-sided second-order difference anchored at u^s = f on the boundary
        const Complex ub = -background_field(f.point, inc, m).value;
        const Complex fd = (-1.5 * ub + 2.0 * us(p) - 0.5 * us(p + 1)) / d;
        CHECK(std::abs(fd - dn(i)) <= 1e-4 * std::abs(dn(i)) + 1e-8);
    }
}

TEST_CASE("h-table assembly path agrees with the direct fill") {
    const Medium m(2.0, 0.25);
    const StarlikeCurve c({0.2, -2.5}, {0.6, 0.05, 0.0, 0.02, 0.0}, 2);
    const auto grid = sample_boundary(c, 64);
    const Vec2 lo = grid.bbox_lo(), hi = grid.bbox_hi();
    const HTable table(m, -(hi.x - lo.x) - 0.1, (hi.x - lo.x) + 0.1, 2.0 * lo.y - 0.1,
                       2.0 * hi.y + 0.1, 1e-9);
    BieOptions with_table;
    with_table.h_table = &table;
    const BiePanel pa({grid}, m);
    const BiePanel pb({grid}, m, with_table);
    const std::vector<double> obs = observation_angles(8, m);
    const double inc = 1.5 * M_PI + 0.15;
    const Eigen::VectorXcd ua = simulate(pa, {inc}, obs).u_inf.col(0);
    const Eigen::VectorXcd ub = simulate(pb, {inc}, obs).u_inf.col(0);
    CHECK((ua - ub).norm() / ua.norm() < 1e-7);
}

TEST_CASE("conditioning probe at the top frequency") {
    const Medium m(30.0, 0.25);
    const BiePanel panel({sample_boundary(builtin_curve("apple"), 128)}, m);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(panel.system());
    const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
    MESSAGE("combined-layer system condition number at k+=30: ", cond);
    CHECK(cond < 1e3);
}
