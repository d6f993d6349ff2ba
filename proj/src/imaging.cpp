//
// imaging.cpp: discrete imaging functional, grid sweep, peak extraction and
// the CSV/PGM/JSON artifact writers.
//

#include "lmscat/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lmscat/errors.hpp"

namespace lmscat {

namespace {

struct PairPhases {
    // p_l = T(theta_l) e^{-i k- z . d_l^t} evaluated per incident grid node
    Eigen::VectorXd t_factor;     // T(theta_l)
    std::vector<Vec2> dt;         // transmitted directions
};

PairPhases pair_phase_setup(const PhaselessDataset& ds, int freq_index) {
    const Medium m = ds.medium_at(freq_index);
    const auto inc = ds.incident_thetas();
    PairPhases pp;
    pp.t_factor.resize(inc.size());
    pp.dt.resize(inc.size());
    for (size_t l = 0; l < inc.size(); ++l) {
        pp.t_factor(l) = fresnel(inc[l], m).T;
        pp.dt[l] = unit_vector(transmitted_direction(inc[l], DirectionMode::Incident, m));
    }
    return pp;
}

double imaging_value_impl(Vec2 z, const PhaselessDataset& ds, int freq_index,
                          const PairPhases& pp) {
    const int n_d = ds.layout.n_d, n_f = ds.layout.n_f;
    const Medium m = ds.medium_at(freq_index);
    const double km = m.k_minus();
    const double P = m.aperture_length();
    const Complex I(0.0, 1.0);

    Eigen::VectorXd pre(n_d), pim(n_d);
    for (int l = 0; l < n_d; ++l) {
        const double phase = -km * dot(z, pp.dt[l]);
        pre(l) = pp.t_factor(l) * std::cos(phase);
        pim(l) = pp.t_factor(l) * std::sin(phase);
    }
    const Complex s(pre.sum(), pim.sum());

    const Eigen::MatrixXd& blk = ds.blocks.at(freq_index);
    Complex t1(0.0, 0.0), m2(0.0, 0.0);
    for (int j = 0; j < n_f; ++j) {
        // column j reshaped as D(i,l) with pair index p = l n_d + i
        Eigen::Map<const Eigen::MatrixXd> D(blk.col(j).data(), n_d, n_d);
        const Eigen::VectorXd qre = D.transpose() * pre;   // sums over i of D p*_i
        const Eigen::VectorXd qim = D.transpose() * pim;
        // q_l = sum_i D(i,l) conj(p)_i ; t1 += sum_l p_l q_l
        double t1re = 0.0, t1im = 0.0, m2re = 0.0, m2im = 0.0;
        for (int l = 0; l < n_d; ++l) {
            const double qr = qre(l), qi = -qim(l);
            t1re += pre(l) * qr - pim(l) * qi;
            t1im += pre(l) * qi + pim(l) * qr;
            const double dll = D(l, l);
            m2re += dll * pre(l);
            m2im += dll * pim(l);
        }
        t1 += Complex(t1re, t1im);
        m2 += Complex(m2re, m2im);
    }

    const double w = (P / n_f) * (P / n_d) * (P / n_d);
    const Complex total = w * t1 - (w / 4.0) * 2.0 * std::real(std::conj(s) * m2);
    const double scale = std::abs(w * t1) + std::abs(w * m2 * std::conj(s)) + 1e-300;
    if (std::abs(total.imag()) > 1e-10 * scale)
        throw AccuracyError("imaging_value: imaginary residue exceeds tolerance");
    return total.real();
}

}  // namespace

double imaging_value(Vec2 z, const PhaselessDataset& ds, int freq_index) {
    if (ds.layout.kind != DatasetLayout::Kind::PairGrid)
        throw InvalidParamError("imaging_value: dataset must carry the full pair grid");
    const PairPhases pp = pair_phase_setup(ds, freq_index);
    return imaging_value_impl(z, ds, freq_index, pp);
}

ImagingGrid imaging_grid(const PhaselessDataset& ds, double x0, double x1, double y0, double y1,
                         int nx, int ny, int freq_index) {
    if (ds.layout.kind != DatasetLayout::Kind::PairGrid)
        throw InvalidParamError("imaging_grid: dataset must carry the full pair grid");
    if (nx < 1 || ny < 1) throw InvalidParamError("imaging_grid: empty grid");
    if (y0 > 0.0 || y1 > 0.0)
        throw InvalidParamError("imaging_grid: sampling region must lie in the lower half-plane");
    ImagingGrid g;
    g.x0 = x0;
    g.x1 = x1;
    g.y0 = y0;
    g.y1 = y1;
    g.nx = nx;
    g.ny = ny;
    g.values.resize(ny, nx);
    const PairPhases pp = pair_phase_setup(ds, freq_index);
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            g.values(iy, ix) =
                imaging_value_impl({g.node_x(ix), g.node_y(iy)}, ds, freq_index, pp);
    return g;
}

PeakSet find_peaks(const ImagingGrid& grid, double threshold_frac, double suppression_radius) {
    PeakSet out;
    const double gmax = grid.values.maxCoeff(), gmin = grid.values.minCoeff();
    if (gmax == gmin) {
        out.degenerate = true;
        return out;
    }
    // sub-node refinement: parabola through the three samples per axis; the
    // offset is half a cell when two neighboring nodes straddle the true peak
    auto refine = [&](int i, int n, double h, double vm, double v0, double vp) {
        if (i <= 0 || i >= n - 1) return 0.0;
        const double den = vm - 2.0 * v0 + vp;
        if (den >= 0.0) return 0.0;
        const double off = 0.5 * (vm - vp) / den * h;
        return std::clamp(off, -h, h);
    };
    const double hx = grid.nx > 1 ? (grid.x1 - grid.x0) / (grid.nx - 1) : 0.0;
    const double hy = grid.ny > 1 ? (grid.y1 - grid.y0) / (grid.ny - 1) : 0.0;

    std::vector<Peak> candidates;
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double v = grid.values(iy, ix);
            bool ismax = true;
            for (int dy = -1; dy <= 1 && ismax; ++dy)
                for (int dx = -1; dx <= 1 && ismax; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int jy = iy + dy, jx = ix + dx;
                    if (jy < 0 || jy >= grid.ny || jx < 0 || jx >= grid.nx) continue;
                    if (grid.values(jy, jx) > v) ismax = false;
                }
            if (ismax && v >= threshold_frac * gmax) {
                double x = grid.node_x(ix), y = grid.node_y(iy);
                if (grid.nx > 2 && ix > 0 && ix < grid.nx - 1)
                    x += refine(ix, grid.nx, hx, grid.values(iy, ix - 1), v,
                                grid.values(iy, ix + 1));
                if (grid.ny > 2 && iy > 0 && iy < grid.ny - 1)
                    y += refine(iy, grid.ny, hy, grid.values(iy - 1, ix), v,
                                grid.values(iy + 1, ix));
                candidates.push_back({{x, y}, v});
            }
        }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Peak& a, const Peak& b) { return a.value > b.value; });
    for (const Peak& c : candidates) {
        bool keep = true;
        for (const Peak& p : out.peaks)
            if (norm(c.location - p.location) < suppression_radius) {
                keep = false;
                break;
            }
        if (keep) out.peaks.push_back(c);
    }
    return out;
}

void write_grid_csv(const ImagingGrid& grid, const std::string& path,
                    const std::string& config_hash) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("write_grid_csv: cannot open " + path);
    std::fprintf(f, "# config_hash=%s\n", config_hash.c_str());
    std::fprintf(f, "x,y,value\n");
    for (int iy = 0; iy < grid.ny; ++iy)
        for (int ix = 0; ix < grid.nx; ++ix)
            std::fprintf(f, "%.17g,%.17g,%.17g\n", grid.node_x(ix), grid.node_y(iy),
                         grid.values(iy, ix));
    std::fclose(f);
}

void write_grid_pgm(const ImagingGrid& grid, const std::string& path_prefix,
                    const std::string& config_hash) {
    const double gmax = grid.values.maxCoeff(), gmin = grid.values.minCoeff();
    const double span = gmax > gmin ? gmax - gmin : 1.0;
    std::FILE* f = std::fopen((path_prefix + ".pgm").c_str(), "wb");
    if (!f) throw IoError("write_grid_pgm: cannot open " + path_prefix + ".pgm");
    std::fprintf(f, "P5\n# config_hash=%s\n%d %d\n255\n", config_hash.c_str(), grid.nx,
                 grid.ny);
    // top row = largest y so the image reads like the physical plane
    for (int iy = grid.ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double t = (grid.values(iy, ix) - gmin) / span;
            const unsigned char b = static_cast<unsigned char>(std::lround(255.0 * t));
            std::fwrite(&b, 1, 1, f);
        }
    std::fclose(f);
    nlohmann::json scale;
    scale["config_hash"] = config_hash;
    scale["min"] = gmin;
    scale["max"] = gmax;
    scale["rows_top_to_bottom"] = "y descending";
    std::ofstream jf(path_prefix + "_scale.json");
    jf << scale.dump(2) << "\n";
}

void write_peaks_json(const PeakSet& peaks, const std::string& path,
                      const std::string& config_hash) {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["degenerate"] = peaks.degenerate;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : peaks.peaks)
        arr.push_back({{"x", p.location.x}, {"y", p.location.y}, {"value", p.value}});
    j["peaks"] = arr;
    std::ofstream f(path);
    if (!f) throw IoError("write_peaks_json: cannot open " + path);
    f << j.dump(2) << "\n";
}

PeakSet read_peaks_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("read_peaks_json: cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("read_peaks_json: ") + e.what());
    }
    PeakSet out;
    out.degenerate = j.value("degenerate", false);
    for (const auto& p : j.at("peaks"))
        out.peaks.push_back({{p.at("x").get<double>(), p.at("y").get<double>()},
                             p.at("value").get<double>()});
    return out;
}

}  // namespace lmscat
