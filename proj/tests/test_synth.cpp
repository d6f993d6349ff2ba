#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>

#include "lmscat/synth.hpp"

using namespace lmscat;

TEST_CASE("noise model: exact relative l2 perturbation") {
    NormalRng rng(7);
    std::vector<double> clean(64);
    for (auto& v : clean) v = 0.2 + rng.uniform01();
    for (const double delta : {0.01, 0.05, 0.1, 0.4}) {
        NormalRng nrng(99);
        const auto noisy = add_noise(clean, delta, nrng);
        double num = 0.0, den = 0.0;
        for (size_t j = 0; j < clean.size(); ++j) {
            num += (noisy[j] - clean[j]) * (noisy[j] - clean[j]);
            den += clean[j] * clean[j];
        }
        CHECK(std::sqrt(num / den) == doctest::Approx(delta).epsilon(1e-12));
    }
    // delta = 0 is the identity
    NormalRng zrng(1);
    CHECK(add_noise(clean, 0.0, zrng) == clean);
    NormalRng erng(1);
    CHECK_THROWS_AS(add_noise({}, 0.1, erng), InvalidParamError);
}

TEST_CASE("noise determinism and stream independence") {
    std::vector<double> ones(4, 1.0);
    NormalRng a(42), b(42);
    const auto n1 = add_noise(ones, 0.1, a);
    const auto n2 = add_noise(ones, 0.1, b);
    CHECK(n1 == n2);  // bit-for-bit

    // golden values frozen from the first run of this generator
    // (mt19937_64 seed 42, polar transform, n_f = 4, delta = 0.1)
    const double golden[4] = {1.1586897455289928, 1.0864682660645029,
                              1.0488127491193373, 0.92958608694899536};
    for (int j = 0; j < 4; ++j) CHECK(n1[j] == doctest::Approx(golden[j]).epsilon(1e-15));

    // different seeds decorrelate
    NormalRng s1(1), s2(2);
    double corr = 0.0, v1 = 0.0, v2 = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = s1.normal(), y = s2.normal();
        corr += x * y;
        v1 += x * x;
        v2 += y * y;
    }
    CHECK(std::abs(corr / std::sqrt(v1 * v2)) < 0.1);
}

namespace {

PhaselessDataset tiny_grid_dataset() {
    PhaselessDataset ds;
    ds.layout.kind = DatasetLayout::Kind::PairGrid;
    ds.layout.n_f = 5;
    ds.layout.n_d = 3;
    ds.layout.k_plus = {2.0};
    ds.layout.refractive_index = 0.25;
    ds.delta = 0.08;
    ds.seed = 1234;
    ds.config_hash = "deadbeef";
    Eigen::MatrixXd blk(9, 5);
    NormalRng rng(5);
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 5; ++j) {
                // symmetric in (l,i) like physical pair data
                if (i < l)
                    blk(l * 3 + i, j) = blk(i * 3 + l, j);
                else
                    blk(l * 3 + i, j) = 0.5 + rng.uniform01();
            }
    ds.blocks.push_back(blk);
    return ds;
}

}  // namespace

TEST_CASE("blockwise noise keeps the pair tensor symmetric") {
    PhaselessDataset ds = tiny_grid_dataset();
    apply_noise(ds);
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 5; ++j)
                CHECK(ds.blocks[0](l * 3 + i, j) == ds.blocks[0](i * 3 + l, j));
    // per-block perturbation is exactly delta
    for (int p : {0, 1, 4}) {
        PhaselessDataset clean = tiny_grid_dataset();
        double num = 0.0, den = 0.0;
        for (int j = 0; j < 5; ++j) {
            const double d = ds.blocks[0](p, j) - clean.blocks[0](p, j);
            num += d * d;
            den += clean.blocks[0](p, j) * clean.blocks[0](p, j);
        }
        CHECK(std::sqrt(num / den) == doctest::Approx(ds.delta).epsilon(1e-12));
    }
}

TEST_CASE("dataset file round-trip") {
    PhaselessDataset ds = tiny_grid_dataset();
    apply_noise(ds);
    const std::string prefix = "synth_roundtrip_test";
    write_dataset(ds, prefix);
    const PhaselessDataset back = read_dataset(prefix);
    CHECK(back.layout.n_f == ds.layout.n_f);
    CHECK(back.layout.n_d == ds.layout.n_d);
    CHECK(back.delta == ds.delta);
    CHECK(back.seed == ds.seed);
    CHECK(back.rng_id == ds.rng_id);
    CHECK(back.config_hash == ds.config_hash);
    CHECK(back.layout.k_plus == ds.layout.k_plus);
    // bit-exact payload round-trip through the 17-digit encoding
    for (int p = 0; p < 9; ++p)
        for (int j = 0; j < 5; ++j) CHECK(back.blocks[0](p, j) == ds.blocks[0](p, j));
    std::remove((prefix + ".json").c_str());
    std::remove((prefix + ".csv").c_str());
}

TEST_CASE("re-synthesis from the header reproduces the payload") {
    PhaselessDataset a = tiny_grid_dataset();
    apply_noise(a);
    // a consumer that re-runs the pipeline from the recorded (seed, layout)
    PhaselessDataset b = tiny_grid_dataset();
    b.seed = a.seed;
    apply_noise(b);
    for (int p = 0; p < 9; ++p)
        for (int j = 0; j < 5; ++j) CHECK(a.blocks[0](p, j) == b.blocks[0](p, j));
}

TEST_CASE("malformed dataset files are rejected") {
    PhaselessDataset ds = tiny_grid_dataset();
    const std::string prefix = "synth_badfile_test";
    write_dataset(ds, prefix);
    // truncate the payload: row count mismatch
    {
        std::FILE* f = std::fopen((prefix + ".csv").c_str(), "r");
        std::fseek(f, 0, SEEK_END);
        const long sz = std::ftell(f);
        std::fclose(f);
        if (truncate((prefix + ".csv").c_str(), sz / 2) != 0)
            FAIL("could not truncate the payload fixture");
    }
    CHECK_THROWS_AS(read_dataset(prefix), FormatError);
    CHECK_THROWS_AS(read_dataset("does_not_exist"), IoError);
    std::remove((prefix + ".json").c_str());
    std::remove((prefix + ".csv").c_str());
}

TEST_CASE("pair grid angles follow the layout") {
    PhaselessDataset ds = tiny_grid_dataset();
    const Medium m = ds.medium_at(0);
    const auto [a, b] = ds.layout.pair_angles(1 * 3 + 2);
    const auto inc = incident_angles(3, m);
    CHECK(a == inc[1]);
    CHECK(b == inc[2]);
}
