#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "lmscat/imaging.hpp"
#include "lmscat/scenario.hpp"

using namespace lmscat;

namespace {

// dataset whose pair tensor comes from a random complex single-incidence
// table by superposition: D(j,l,i) = |U(j,l) + U(j,i)|^2
struct SyntheticTensor {
    PhaselessDataset ds;
    Eigen::MatrixXcd u;  // (n_f x n_d)
};

SyntheticTensor make_tensor(int n_f, int n_d, double n_index, std::uint64_t seed) {
    SyntheticTensor out;
    out.ds.layout.kind = DatasetLayout::Kind::PairGrid;
    out.ds.layout.n_f = n_f;
    out.ds.layout.n_d = n_d;
    out.ds.layout.k_plus = {2.0};
    out.ds.layout.refractive_index = n_index;
    NormalRng rng(seed);
    out.u.resize(n_f, n_d);
    for (int j = 0; j < n_f; ++j)
        for (int l = 0; l < n_d; ++l) out.u(j, l) = Complex(rng.normal(), rng.normal());
    Eigen::MatrixXd blk(n_d * n_d, n_f);
    for (int l = 0; l < n_d; ++l)
        for (int i = 0; i < n_d; ++i)
            for (int j = 0; j < n_f; ++j)
                blk(l * n_d + i, j) = std::norm(out.u(j, l) + out.u(j, i));
    out.ds.blocks.push_back(blk);
    return out;
}

// independent evaluation of the decomposition I = sum_j w (|v_j|^2 + |w_j|^2)
double decomposition_oracle(Vec2 z, const SyntheticTensor& st) {
    const Medium m = st.ds.medium_at(0);
    const int n_f = st.ds.layout.n_f, n_d = st.ds.layout.n_d;
    const double P = m.aperture_length();
    const auto inc = incident_angles(n_d, m);
    Eigen::VectorXcd p(n_d);
    for (int l = 0; l < n_d; ++l) {
        const double tt = transmitted_direction(inc[l], DirectionMode::Incident, m);
        const double T = fresnel(inc[l], m).T;
        p(l) = T * std::exp(Complex(0.0, -m.k_minus() * dot(z, unit_vector(tt))));
    }
    double acc = 0.0;
    for (int j = 0; j < n_f; ++j) {
        Complex v(0.0, 0.0), w(0.0, 0.0);
        for (int l = 0; l < n_d; ++l) {
            v += st.u(j, l) * p(l) * (P / n_d);
            w += st.u(j, l) * std::conj(p(l)) * (P / n_d);
        }
        acc += (P / n_f) * (std::norm(v) + std::norm(w));
    }
    return acc;
}

}  // namespace

TEST_CASE("decomposition identity on random complex tensors") {
    for (const double n_index : {0.25, 1.0, 2.1025}) {
        const SyntheticTensor st = make_tensor(32, 32, n_index, 77);
        NormalRng rng(3);
        for (int t = 0; t < 12; ++t) {
            const Vec2 z{6.0 * (rng.uniform01() - 0.5), -4.0 * rng.uniform01()};
            const double a = imaging_value(z, st.ds);
            const double b = decomposition_oracle(z, st);
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
        }
    }
}

TEST_CASE("indicator is real and even") {
    const SyntheticTensor st = make_tensor(16, 12, 0.25, 5);
    // add asymmetric-looking (but symmetric in (l,i)) noise to the tensor
    PhaselessDataset noisy = st.ds;
    noisy.delta = 0.1;
    noisy.seed = 9;
    apply_noise(noisy);
    NormalRng rng(11);
    for (int t = 0; t < 10; ++t) {
        const Vec2 z{5.0 * (rng.uniform01() - 0.5), 5.0 * (rng.uniform01() - 0.5)};
        const double a = imaging_value(z, noisy);
        const double b = imaging_value({-z.x, -z.y}, noisy);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
}

TEST_CASE("zero data gives zero indicator") {
    PhaselessDataset ds;
    ds.layout.kind = DatasetLayout::Kind::PairGrid;
    ds.layout.n_f = 8;
    ds.layout.n_d = 4;
    ds.layout.k_plus = {1.5};
    ds.layout.refractive_index = 0.5;
    ds.blocks.push_back(Eigen::MatrixXd::Zero(16, 8));
    CHECK(imaging_value({0.3, -1.0}, ds) == 0.0);
}

TEST_CASE("grid sweep matches pointwise evaluation and guards the region") {
    const SyntheticTensor st = make_tensor(8, 6, 0.25, 21);
    const ImagingGrid g = imaging_grid(st.ds, -1.0, 1.0, -2.0, -0.5, 5, 4);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            CHECK(g.values(iy, ix) ==
                  doctest::Approx(imaging_value({g.node_x(ix), g.node_y(iy)}, st.ds))
                      .epsilon(1e-14));
    CHECK_THROWS_AS(imaging_grid(st.ds, -1.0, 1.0, 0.5, 1.0, 3, 3), InvalidParamError);
}

TEST_CASE("peak extraction") {
    ImagingGrid g;
    g.x0 = -2.0;
    g.x1 = 2.0;
    g.y0 = -2.0;
    g.y1 = 0.0;
    g.nx = 41;
    g.ny = 21;
    g.values.resize(g.ny, g.nx);
    auto gauss = [](double x, double y, Vec2 c) {
        return std::exp(-8.0 * ((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y)));
    };
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.node_x(ix), y = g.node_y(iy);
            g.values(iy, ix) = gauss(x, y, {-1.0, -1.0}) + 0.7 * gauss(x, y, {1.2, -0.6});
        }
    // single argmax when only one peak clears the threshold
    PeakSet one = find_peaks(g, 0.9, 0.5);
    CHECK(one.peaks.size() == 1);
    // both Gaussians clear the default threshold beyond the suppression radius
    PeakSet two = find_peaks(g, 0.5, 0.5);
    CHECK(two.peaks.size() == 2);
    CHECK(two.peaks[0].location.x == doctest::Approx(-1.0));
    CHECK(two.peaks[0].location.y == doctest::Approx(-1.0));
    CHECK(two.peaks[1].location.x == doctest::Approx(1.2));
    // suppression radius larger than the separation keeps only the top one
    PeakSet sup = find_peaks(g, 0.5, 5.0);
    CHECK(sup.peaks.size() == 1);
    // all-equal grid: degenerate
    g.values.setConstant(1.0);
    PeakSet deg = find_peaks(g, 0.5, 0.5);
    CHECK(deg.degenerate);
    CHECK(deg.peaks.empty());
}

TEST_CASE("artifact writers round-trip") {
    const SyntheticTensor st = make_tensor(6, 4, 0.25, 33);
    const ImagingGrid g = imaging_grid(st.ds, -1.0, 1.0, -2.0, -0.5, 7, 5);
    write_grid_csv(g, "imtest_grid.csv");
    write_grid_pgm(g, "imtest");
    PeakSet ps = find_peaks(g, 0.5, 0.1);
    write_peaks_json(ps, "imtest_peaks.json", "cafe");
    const PeakSet back = read_peaks_json("imtest_peaks.json");
    REQUIRE(back.peaks.size() == ps.peaks.size());
    for (size_t i = 0; i < ps.peaks.size(); ++i) {
        CHECK(back.peaks[i].location.x == ps.peaks[i].location.x);
        CHECK(back.peaks[i].value == ps.peaks[i].value);
    }
    std::remove("imtest_grid.csv");
    std::remove("imtest.pgm");
    std::remove("imtest_scale.json");
    std::remove("imtest_peaks.json");
}

TEST_CASE("indicator decays away from the obstacle and its mirror") {
    // one small disk, noiseless, reduced direction count
    nlohmann::json j = nlohmann::json::parse(R"({"schema_version":1,"medium":{"n":2.1025},
        "truth":[{"type":"disk","center":[-3,-3],"radius":0.1}],
        "data":{"n_f":32,"n_data":64,"noise":{"delta":0.0,"seed":1},
                 "imaging":{"k1_plus_pi_multiple":10,"n_d1":32}}})");
    const PhaselessDataset ds = synth_imaging_dataset(parse_scenario(j));
    const ImagingGrid g = imaging_grid(ds, -4.5, 4.5, -4.5, 0.0, 46, 24);
    const double lambda = 2.0 * M_PI / ds.medium_at(0).k_minus();
    const Vec2 c1{-3.0, -3.0}, c2{3.0, 3.0};
    double peak = 0.0, far_sum = 0.0;
    int far_n = 0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const Vec2 z{g.node_x(ix), g.node_y(iy)};
            peak = std::max(peak, g.values(iy, ix));
            if (norm(z - c1) > 3.0 * lambda && norm(z - c2) > 3.0 * lambda) {
                far_sum += g.values(iy, ix);
                ++far_n;
            }
        }
    CHECK(far_sum / far_n < 0.25 * peak);
}
