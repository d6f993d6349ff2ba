//
// synth.cpp: dataset containers, the noise model and dataset files.
//

#include "lmscat/synth.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lmscat/errors.hpp"

namespace lmscat {

int DatasetLayout::pair_count() const {
    return kind == Kind::PairGrid ? n_d * n_d : static_cast<int>(pairs.size());
}

std::pair<double, double> DatasetLayout::pair_angles(int p) const {
    if (kind == Kind::PairList) return pairs.at(p);
    const Medium m(k_plus.at(0), refractive_index);
    const auto inc = incident_angles(n_d, m);
    return {inc[p / n_d], inc[p % n_d]};
}

Medium PhaselessDataset::medium_at(int freq_index) const {
    return Medium(layout.k_plus.at(freq_index), layout.refractive_index);
}

std::vector<double> PhaselessDataset::observation_thetas() const {
    return observation_angles(layout.n_f, medium_at(0));
}

std::vector<double> PhaselessDataset::incident_thetas() const {
    if (layout.kind != DatasetLayout::Kind::PairGrid)
        throw InvalidParamError("incident_thetas: dataset has an explicit pair list");
    return incident_angles(layout.n_d, medium_at(0));
}

std::vector<double> add_noise(const std::vector<double>& values, double delta, NormalRng& rng) {
    if (values.empty()) throw InvalidParamError("add_noise: empty value vector");
    if (delta < 0.0) throw InvalidParamError("add_noise: negative noise level");
    std::vector<double> xi(values.size());
    for (auto& x : xi) x = rng.normal();
    if (delta == 0.0) return values;
    double xin = 0.0, vn = 0.0;
    for (size_t j = 0; j < values.size(); ++j) {
        xin += xi[j] * xi[j];
        vn += values[j] * values[j];
    }
    xin = std::sqrt(xin);
    vn = std::sqrt(vn);
    std::vector<double> noisy(values.size());
    for (size_t j = 0; j < values.size(); ++j)
        noisy[j] = values[j] + delta * (xi[j] / xin) * vn;
    return noisy;
}

void apply_noise(PhaselessDataset& ds) {
    if (ds.delta == 0.0) return;
    const int np = ds.layout.pair_count();
    for (size_t f = 0; f < ds.blocks.size(); ++f) {
        for (int p = 0; p < np; ++p) {
            std::uint64_t key = static_cast<std::uint64_t>(p);
            int mirror = -1;
            if (ds.layout.kind == DatasetLayout::Kind::PairGrid) {
                const int l = p / ds.layout.n_d, i = p % ds.layout.n_d;
                if (l > i) continue;  // filled by the mirror write below
                key = static_cast<std::uint64_t>(l) * ds.layout.n_d + i;
                if (i != l) mirror = i * ds.layout.n_d + l;
            }
            NormalRng rng(block_seed(ds.seed, f, key));
            std::vector<double> row(ds.layout.n_f);
            for (int j = 0; j < ds.layout.n_f; ++j) row[j] = ds.blocks[f](p, j);
            const std::vector<double> noisy = add_noise(row, ds.delta, rng);
            for (int j = 0; j < ds.layout.n_f; ++j) {
                ds.blocks[f](p, j) = noisy[j];
                if (mirror >= 0) ds.blocks[f](mirror, j) = noisy[j];
            }
        }
    }
}

void write_dataset(const PhaselessDataset& ds, const std::string& path_prefix) {
    nlohmann::json hdr;
    hdr["format"] = "lmscat-phaseless";
    hdr["version"] = 1;
    hdr["kind"] = ds.layout.kind == DatasetLayout::Kind::PairGrid ? "pair_grid" : "pair_list";
    hdr["n_f"] = ds.layout.n_f;
    hdr["n_d"] = ds.layout.n_d;
    if (ds.layout.kind == DatasetLayout::Kind::PairList) {
        nlohmann::json pl = nlohmann::json::array();
        for (const auto& [a, b] : ds.layout.pairs) pl.push_back({a, b});
        hdr["pairs"] = pl;
    }
    hdr["k_plus"] = ds.layout.k_plus;
    hdr["refractive_index"] = ds.layout.refractive_index;
    hdr["delta"] = ds.delta;
    hdr["seed"] = ds.seed;
    hdr["rng"] = ds.rng_id;
    hdr["config_hash"] = ds.config_hash;
    hdr["payload"] = path_prefix.substr(path_prefix.find_last_of('/') + 1) + ".csv";
    std::ofstream jf(path_prefix + ".json");
    if (!jf) throw IoError("write_dataset: cannot open " + path_prefix + ".json");
    jf << hdr.dump(2) << "\n";

    std::FILE* cf = std::fopen((path_prefix + ".csv").c_str(), "w");
    if (!cf) throw IoError("write_dataset: cannot open " + path_prefix + ".csv");
    std::fprintf(cf, "freq,pair");
    for (int j = 0; j < ds.layout.n_f; ++j) std::fprintf(cf, ",obs%d", j);
    std::fprintf(cf, "\n");
    for (size_t f = 0; f < ds.blocks.size(); ++f)
        for (int p = 0; p < ds.layout.pair_count(); ++p) {
            std::fprintf(cf, "%zu,%d", f, p);
            for (int j = 0; j < ds.layout.n_f; ++j)
                std::fprintf(cf, ",%.17g", ds.blocks[f](p, j));
            std::fprintf(cf, "\n");
        }
    std::fclose(cf);
}

PhaselessDataset read_dataset(const std::string& path_prefix) {
    std::ifstream jf(path_prefix + ".json");
    if (!jf) throw IoError("read_dataset: cannot open " + path_prefix + ".json");
    nlohmann::json hdr;
    try {
        jf >> hdr;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("read_dataset: bad header JSON: ") + e.what());
    }
    if (hdr.value("format", "") != "lmscat-phaseless")
        throw FormatError("read_dataset: not a phaseless dataset header");
    if (hdr.value("version", 0) != 1) throw FormatError("read_dataset: unsupported version");

    PhaselessDataset ds;
    const std::string kind = hdr.at("kind");
    ds.layout.kind =
        kind == "pair_grid" ? DatasetLayout::Kind::PairGrid : DatasetLayout::Kind::PairList;
    ds.layout.n_f = hdr.at("n_f");
    ds.layout.n_d = hdr.at("n_d");
    if (ds.layout.kind == DatasetLayout::Kind::PairList)
        for (const auto& pr : hdr.at("pairs"))
            ds.layout.pairs.emplace_back(pr.at(0).get<double>(), pr.at(1).get<double>());
    ds.layout.k_plus = hdr.at("k_plus").get<std::vector<double>>();
    ds.layout.refractive_index = hdr.at("refractive_index");
    ds.delta = hdr.at("delta");
    ds.seed = hdr.at("seed");
    ds.rng_id = hdr.at("rng");
    ds.config_hash = hdr.value("config_hash", "");

    const int np = ds.layout.pair_count();
    const int nf = static_cast<int>(ds.layout.k_plus.size());
    ds.blocks.assign(nf, Eigen::MatrixXd::Zero(np, ds.layout.n_f));

    std::ifstream cf(path_prefix + ".csv");
    if (!cf) throw IoError("read_dataset: cannot open " + path_prefix + ".csv");
    std::string line;
    std::getline(cf, line);
    {
        // header sanity: column count must match n_f
        int commas = 0;
        for (char ch : line)
            if (ch == ',') ++commas;
        if (commas != ds.layout.n_f + 1)
            throw FormatError("read_dataset: payload column count does not match n_f");
    }
    int rows = 0;
    while (std::getline(cf, line)) {
        const char* s = line.c_str();
        char* end = nullptr;
        const long f = std::strtol(s, &end, 10);
        if (end == s || *end != ',') throw FormatError("read_dataset: malformed row");
        s = end + 1;
        const long p = std::strtol(s, &end, 10);
        if (end == s) throw FormatError("read_dataset: malformed row");
        s = end;
        if (f < 0 || f >= nf || p < 0 || p >= np)
            throw FormatError("read_dataset: row indices out of range");
        for (int j = 0; j < ds.layout.n_f; ++j) {
            if (*s != ',') throw FormatError("read_dataset: short row");
            ++s;
            ds.blocks[f](p, j) = std::strtod(s, &end);
            if (end == s) throw FormatError("read_dataset: bad value");
            s = end;
        }
        if (*s != '\0') throw FormatError("read_dataset: trailing data in row");
        ++rows;
    }
    if (rows != nf * np) throw FormatError("read_dataset: payload row count mismatch");
    return ds;
}

}  // namespace lmscat
