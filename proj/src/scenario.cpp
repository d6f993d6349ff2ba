//
// scenario.cpp: config parsing, pair presets, data synthesis and the verify
// suites.
//

#include "lmscat/scenario.hpp"

#include <cmath>
#include <fstream>

#include "lmscat/errors.hpp"
#include "lmscat/reference.hpp"

namespace lmscat {

BoundaryGrid TruthShape::sample(int n) const {
    if (std::holds_alternative<StarlikeCurve>(shape))
        return sample_boundary(std::get<StarlikeCurve>(shape), n);
    return sample_boundary(builtin_curve(std::get<std::string>(shape)), n);
}

std::string fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

double angle_of(double x, double y) {
    double a = std::atan2(y, x);
    if (a < 0.0) a += 2.0 * M_PI;
    return a;
}

double read_k(const nlohmann::json& j, const std::string& base) {
    if (j.contains(base + "_pi_multiple")) return j.at(base + "_pi_multiple").get<double>() * M_PI;
    return j.at(base).get<double>();
}

}  // namespace

std::vector<std::pair<double, double>> pair_preset(const std::string& name,
                                                   const Medium& medium) {
    const double tc = medium.theta_c();
    if (name == "case_a") {
        if (!(medium.k_plus() > medium.k_minus()))
            throw ConfigError("pair_preset case_a expects k+ > k-");
        return {
            {angle_of(std::cos(tc), -std::sin(tc)), angle_of(-std::cos(tc), -std::sin(tc))},
            {angle_of(std::cos(tc), -std::sin(tc)),
             angle_of(std::cos(-3.0 * M_PI / 4.0 + tc / 2.0), std::sin(-3.0 * M_PI / 4.0 + tc / 2.0))},
            {1.5 * M_PI,
             angle_of(std::cos(-M_PI / 4.0 - tc / 2.0), std::sin(-M_PI / 4.0 - tc / 2.0))},
        };
    }
    if (name == "case_b") {
        if (!(medium.k_plus() < medium.k_minus()))
            throw ConfigError("pair_preset case_b expects k+ < k-");
        const double s2 = std::sqrt(2.0) / 2.0;
        return {
            {angle_of(std::cos(M_PI / 300.0), -std::sin(M_PI / 300.0)), angle_of(-s2, -s2)},
            {1.5 * M_PI, angle_of(s2, -s2)},
            {angle_of(std::cos(M_PI / 400.0), -std::sin(M_PI / 400.0)), angle_of(s2, -s2)},
            {1.5 * M_PI, angle_of(-s2, -s2)},
        };
    }
    throw ConfigError("pair_preset: unknown preset '" + name + "'");
}

ScenarioConfig parse_scenario(const nlohmann::json& j) {
    ScenarioConfig cfg;
    try {
        cfg.schema_version = j.at("schema_version");
        if (cfg.schema_version != 1) throw ConfigError("scenario: unsupported schema_version");
        cfg.name = j.value("name", "");
        cfg.refractive_index = j.at("medium").at("n");

        for (const auto& t : j.at("truth")) {
            const std::string type = t.at("type");
            if (type == "disk") {
                const auto c = t.at("center");
                cfg.truths.push_back(TruthShape{StarlikeCurve::circle(
                    {c.at(0).get<double>(), c.at(1).get<double>()}, t.at("radius").get<double>())});
            } else if (type == "builtin") {
                const std::string name = t.at("name");
                if (!is_builtin_curve(name))
                    throw ConfigError("scenario: unknown builtin curve '" + name + "'");
                cfg.truths.push_back(TruthShape{name});
            } else if (type == "starlike") {
                const auto c = t.at("center");
                cfg.truths.push_back(TruthShape{StarlikeCurve(
                    {c.at(0).get<double>(), c.at(1).get<double>()},
                    t.at("coeffs").get<std::vector<double>>(), t.at("M").get<int>())});
            } else {
                throw ConfigError("scenario: unknown truth type '" + type + "'");
            }
        }
        if (cfg.truths.empty()) throw ConfigError("scenario: no truth shapes");

        const auto& d = j.at("data");
        cfg.n_f = d.at("n_f");
        cfg.n_data = d.value("n_data", 256);
        if (d.contains("noise")) {
            cfg.delta = d.at("noise").value("delta", 0.0);
            cfg.seed = d.at("noise").value("seed", 0ULL);
        }
        if (d.contains("imaging")) {
            cfg.imaging_k1 = read_k(d.at("imaging"), "k1_plus");
            cfg.n_d1 = d.at("imaging").at("n_d1");
        }
        if (d.contains("inversion")) {
            const auto& inv = d.at("inversion");
            if (inv.contains("schedule_k_plus_pi_multiple")) {
                for (const double v :
                     inv.at("schedule_k_plus_pi_multiple").get<std::vector<double>>())
                    cfg.schedule_k_plus.push_back(v * M_PI);
            } else {
                cfg.schedule_k_plus = inv.at("schedule_k_plus").get<std::vector<double>>();
            }
            const Medium m(cfg.schedule_k_plus.at(0), cfg.refractive_index);
            if (inv.at("pairs").is_string()) {
                cfg.pairs = pair_preset(inv.at("pairs").get<std::string>(), m);
            } else {
                for (const auto& pr : inv.at("pairs"))
                    cfg.pairs.emplace_back(pr.at(0).get<double>(), pr.at(1).get<double>());
            }
            for (const auto& [a, b] : cfg.pairs) {
                if (!m.in_incident_aperture(a) || !m.in_incident_aperture(b))
                    throw ConfigError("scenario: incidence pair outside the aperture");
            }
        }

        if (j.contains("imaging")) {
            const auto& im = j.at("imaging");
            const auto reg = im.at("region");
            cfg.imaging.x0 = reg.at(0);
            cfg.imaging.x1 = reg.at(1);
            cfg.imaging.y0 = reg.at(2);
            cfg.imaging.y1 = reg.at(3);
            cfg.imaging.nx = im.at("nx");
            cfg.imaging.ny = im.at("ny");
            cfg.imaging.threshold = im.value("threshold", 0.5);
            cfg.imaging.suppression_wavelengths = im.value("suppression_wavelengths", 1.0);
        }

        if (j.contains("inversion")) {
            const auto& nw = j.at("inversion");
            cfg.newton.s = nw.value("s", 1.6);
            cfg.newton.fourier_order = nw.value("M", 25);
            cfg.newton.rho = nw.value("rho", 0.935);
            cfg.newton.tau = nw.value("tau", 1.45);
            cfg.newton.r0 = nw.value("r0", 0.35);
            cfg.newton.max_iters_per_freq = nw.value("max_iters_per_freq", 20);
            cfg.newton.n_inversion = nw.value("n_inversion", 128);
            cfg.newton.delta_floor = nw.value("delta_floor", 1e-4);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    cfg.hash = fnv1a_hash(j.dump());
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("load_scenario: cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("load_scenario: bad JSON in ") + path + ": " + e.what());
    }
    return parse_scenario(j);
}

PhaselessDataset synth_imaging_dataset(const ScenarioConfig& cfg) {
    if (!cfg.imaging_k1.has_value() || cfg.n_d1 <= 0)
        throw ConfigError("synth_imaging_dataset: config has no imaging data block");
    const Medium medium(*cfg.imaging_k1, cfg.refractive_index);

    PhaselessDataset ds;
    ds.layout.kind = DatasetLayout::Kind::PairGrid;
    ds.layout.n_f = cfg.n_f;
    ds.layout.n_d = cfg.n_d1;
    ds.layout.k_plus = {*cfg.imaging_k1};
    ds.layout.refractive_index = cfg.refractive_index;
    ds.delta = cfg.delta;
    ds.seed = cfg.seed;
    ds.config_hash = cfg.hash;

    std::vector<BoundaryGrid> grids;
    for (const auto& t : cfg.truths) grids.push_back(t.sample(cfg.n_data));
    const BiePanel panel(std::move(grids), medium);
    const FarFieldSweep sweep =
        simulate(panel, incident_angles(cfg.n_d1, medium), observation_angles(cfg.n_f, medium));

    Eigen::MatrixXd blk(cfg.n_d1 * cfg.n_d1, cfg.n_f);
    for (int l = 0; l < cfg.n_d1; ++l)
        for (int i = 0; i < cfg.n_d1; ++i)
            blk.row(l * cfg.n_d1 + i) =
                (sweep.u_inf.col(l) + sweep.u_inf.col(i)).cwiseAbs2().transpose();
    ds.blocks.push_back(std::move(blk));
    apply_noise(ds);
    return ds;
}

PhaselessDataset synth_inversion_dataset(const ScenarioConfig& cfg) {
    if (cfg.schedule_k_plus.empty())
        throw ConfigError("synth_inversion_dataset: config has no inversion data block");
    PhaselessDataset ds;
    ds.layout.kind = DatasetLayout::Kind::PairList;
    ds.layout.n_f = cfg.n_f;
    ds.layout.pairs = cfg.pairs;
    ds.layout.k_plus = cfg.schedule_k_plus;
    ds.layout.refractive_index = cfg.refractive_index;
    ds.delta = cfg.delta;
    ds.seed = cfg.seed;
    ds.config_hash = cfg.hash;

    const int np = static_cast<int>(cfg.pairs.size());
    for (const double kp : cfg.schedule_k_plus) {
        const Medium medium(kp, cfg.refractive_index);
        std::vector<BoundaryGrid> grids;
        for (const auto& t : cfg.truths) grids.push_back(t.sample(cfg.n_data));
        const BiePanel panel(std::move(grids), medium);

        std::vector<double> dirs;
        std::vector<std::pair<int, int>> pidx;
        auto dir_index = [&](double th) {
            for (size_t i = 0; i < dirs.size(); ++i)
                if (std::abs(dirs[i] - th) < 1e-14) return static_cast<int>(i);
            dirs.push_back(th);
            return static_cast<int>(dirs.size() - 1);
        };
        for (const auto& [a, b] : cfg.pairs) pidx.emplace_back(dir_index(a), dir_index(b));

        const FarFieldSweep sweep = simulate(panel, dirs, observation_angles(cfg.n_f, medium));
        Eigen::MatrixXd blk(np, cfg.n_f);
        for (int q = 0; q < np; ++q)
            blk.row(q) = (sweep.u_inf.col(pidx[q].first) + sweep.u_inf.col(pidx[q].second))
                             .cwiseAbs2()
                             .transpose();
        ds.blocks.push_back(std::move(blk));
    }
    apply_noise(ds);
    return ds;
}

void write_curve_json(const StarlikeCurve& c, const std::string& path) {
    nlohmann::json j;
    j["center"] = {c.center().x, c.center().y};
    j["coeffs"] = c.coeffs();
    j["M"] = c.order();
    std::ofstream f(path);
    if (!f) throw IoError("write_curve_json: cannot open " + path);
    f << j.dump(2) << "\n";
}

StarlikeCurve read_curve_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("read_curve_json: cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("read_curve_json: ") + e.what());
    }
    return StarlikeCurve({j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()},
                         j.at("coeffs").get<std::vector<double>>(), j.at("M").get<int>());
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

namespace {

struct CheckList {
    nlohmann::json checks = nlohmann::json::array();
    bool pass = true;
    void add(const std::string& name, double value, double tol) {
        const bool ok = value <= tol;
        checks.push_back({{"name", name}, {"value", value}, {"tol", tol}, {"pass", ok}});
        pass = pass && ok;
    }
};

nlohmann::json suite_greens() {
    CheckList cl;
    const Medium m(2.0, 0.25);  // k+ = 2, k- = 1
    NormalRng rng(7);
    double worst_val = 0.0, worst_grad = 0.0;
    for (int t = 0; t < 12; ++t) {
        const double x1 = 4.0 * (rng.uniform01() - 0.5);
        const Vec2 y{2.0 * (rng.uniform01() - 0.5), -1.2 - 2.0 * rng.uniform01()};
        const GreenEval lo = green_total({x1, -1e-9}, y, m);
        const GreenEval hi = eval_transmitted_G({x1, 0.0}, y, m);
        worst_val = std::max(worst_val, std::abs(lo.value - hi.value) / std::abs(hi.value));
        worst_grad = std::max(worst_grad,
                              std::abs(lo.grad_x.y - hi.grad_x.y) / std::abs(hi.grad_x.y));
    }
    cl.add("interface_value_continuity", worst_val, 1e-6);
    cl.add("interface_normal_derivative_continuity", worst_grad, 1e-6);

    double worst_rec = 0.0;
    for (int t = 0; t < 8; ++t) {
        const Vec2 x{3.0 * (rng.uniform01() - 0.5), -0.5 - 2.0 * rng.uniform01()};
        const Vec2 y{3.0 * (rng.uniform01() - 0.5), -0.5 - 2.0 * rng.uniform01()};
        if (norm(x - y) < 0.3) continue;
        const Complex a = green_total(x, y, m).value;
        const Complex b = green_total(y, x, m).value;
        worst_rec = std::max(worst_rec, std::abs(a - b) / std::abs(a));
    }
    cl.add("reciprocity", worst_rec, 1e-10);

    nlohmann::json out;
    out["suite"] = "greens";
    out["checks"] = cl.checks;
    out["pass"] = cl.pass;
    return out;
}

nlohmann::json suite_mie() {
    CheckList cl;
    const Medium m(2.0, 1.0);
    const auto grid = sample_boundary(StarlikeCurve::circle({0.0, -3.0}, 1.0), 64);
    const BiePanel panel({grid}, m);
    const std::vector<double> obs = observation_angles(32, m);
    const double inc = 1.5 * M_PI + 0.3;
    const FarFieldSweep sweep = simulate(panel, {inc}, obs);
    double worst = 0.0, scale = 0.0;
    for (size_t j = 0; j < obs.size(); ++j)
        scale = std::max(scale, std::abs(sweep.u_inf(j, 0)));
    for (size_t j = 0; j < obs.size(); ++j) {
        const Complex ref = disk_farfield_series(1.0, {0.0, -3.0}, 2.0, obs[j], inc);
        worst = std::max(worst, std::abs(sweep.u_inf(j, 0) - ref) / scale);
    }
    cl.add("disk_series_rel_linf", worst, 1e-8);
    nlohmann::json out;
    out["suite"] = "mie";
    out["checks"] = cl.checks;
    out["pass"] = cl.pass;
    return out;
}

nlohmann::json suite_b0() {
    CheckList cl;
    const Medium m(2.0, 0.25);
    // order-doubling stability
    double worst = 0.0;
    for (const Vec2 y : {Vec2{3.0, -2.0}, Vec2{40.0, -11.0}, Vec2{300.0, -120.0}}) {
        const Complex a = eval_B0(y, m, 2048);
        const Complex b = eval_B0(y, m, 4096);
        worst = std::max(worst, std::abs(a - b));
    }
    cl.add("order_doubling_abs_change", worst, 1e-8);
    // decay slope along one direction
    std::vector<double> lt, lb;
    for (int i = 0; i <= 40; ++i) {
        const double t = 10.0 * std::pow(100.0, i / 40.0);
        lt.push_back(std::log(t));
        lb.push_back(std::log(std::abs(eval_B0({t * std::cos(0.3), t * std::sin(0.3)}, m, 2048))));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(lt.size());
    for (int i = 0; i < n; ++i) {
        sx += lt[i];
        sy += lb[i];
        sxx += lt[i] * lt[i];
        sxy += lt[i] * lb[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    cl.add("decay_slope", slope, -0.35);
    nlohmann::json out;
    out["suite"] = "b0";
    out["checks"] = cl.checks;
    out["pass"] = cl.pass;
    return out;
}

nlohmann::json suite_gradient() {
    CheckList cl;
    const Medium m(1.5, 0.25);
    std::vector<double> dr(2 * 2 + 1, 0.0);
    dr[1] = 0.08;
    dr[4] = -0.05;
    const Vec2 da{0.05, -0.04};
    const auto pairs = pair_preset("case_a", m);
    std::vector<StarlikeCurve> curves{StarlikeCurve::circle({0.1, -4.0}, 0.8, 2)};
    const auto obs = observation_angles(16, m);
    const ForwardContext ctx = make_forward(curves, m, 64, pairs, obs);
    const Eigen::MatrixXd deriv = frechet_apply(ctx, 0, da, dr);

    double prev = 0.0, order = 0.0;
    for (int e = 0; e < 3; ++e) {
        const double eps = std::pow(10.0, -(2 + e));
        std::vector<double> c2 = curves[0].coeffs();
        for (int i = 0; i < 5; ++i) c2[i] += eps * dr[i];
        std::vector<StarlikeCurve> pert{StarlikeCurve(
            {curves[0].center().x + eps * da.x, curves[0].center().y + eps * da.y}, c2, 2)};
        const ForwardContext ctx2 = make_forward(pert, m, 64, pairs, obs);
        const double err =
            ((ctx2.phaseless - ctx.phaseless) / eps - deriv).norm() / deriv.norm();
        if (e > 0) order = std::log10(prev / err);
        prev = err;
    }
    cl.add("fd_convergence_order_deficit", std::max(0.0, 0.9 - order), 0.0);
    nlohmann::json out;
    out["suite"] = "gradient";
    out["checks"] = cl.checks;
    out["pass"] = cl.pass;
    return out;
}

nlohmann::json suite_lm() {
    CheckList cl;
    const double j = 1.7, r = 0.9, rho = 0.935;
    Eigen::MatrixXd jac(1, 1);
    jac(0, 0) = j;
    Eigen::VectorXd res(1);
    res(0) = r;
    Eigen::VectorXd pen = Eigen::VectorXd::Ones(1);
    const LmStep step = lm_step(jac, res, pen, 1.0, rho, 1e-12);
    const double beta_ref = scalar_lm_beta(j, rho);
    cl.add("scalar_beta_rel_err", std::abs(step.beta - beta_ref) / beta_ref, 1e-10);
    nlohmann::json out;
    out["suite"] = "lm";
    out["checks"] = cl.checks;
    out["pass"] = cl.pass;
    return out;
}

}  // namespace

nlohmann::json run_verify_suite(const std::string& suite) {
    if (suite == "greens") return suite_greens();
    if (suite == "mie") return suite_mie();
    if (suite == "b0") return suite_b0();
    if (suite == "gradient") return suite_gradient();
    if (suite == "lm") return suite_lm();
    throw ConfigError("run_verify_suite: unknown suite '" + suite + "'");
}

}  // namespace lmscat
