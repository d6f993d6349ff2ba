//
// lmscat: batch driver for the two-layer phaseless imaging pipeline.
// Subcommands: synth (scenario -> datasets), image (dataset -> indicator grid
// and peaks), invert (datasets + peaks -> reconstructed curves), verify
// (built-in numerical check suites).
//

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "lmscat/scenario.hpp"

using namespace lmscat;

namespace {

void set_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int cmd_synth(const std::string& config_path, const std::string& out_prefix,
              const std::string& which) {
    const ScenarioConfig cfg = load_scenario(config_path);
    bool wrote = false;
    if ((which == "both" || which == "imaging") && cfg.imaging_k1.has_value()) {
        const PhaselessDataset ds = synth_imaging_dataset(cfg);
        write_dataset(ds, out_prefix + "_imaging");
        std::printf("wrote %s_imaging.{json,csv}: %d freq, %d pairs, n_f=%d\n",
                    out_prefix.c_str(), static_cast<int>(ds.blocks.size()),
                    ds.layout.pair_count(), ds.layout.n_f);
        wrote = true;
    }
    if ((which == "both" || which == "inversion") && !cfg.schedule_k_plus.empty()) {
        const PhaselessDataset ds = synth_inversion_dataset(cfg);
        write_dataset(ds, out_prefix + "_inversion");
        std::printf("wrote %s_inversion.{json,csv}: %d freq, %d pairs, n_f=%d\n",
                    out_prefix.c_str(), static_cast<int>(ds.blocks.size()),
                    ds.layout.pair_count(), ds.layout.n_f);
        wrote = true;
    }
    if (!wrote) throw ConfigError("synth: config has no data block matching --which " + which);
    return exit_code::ok;
}

int cmd_image(const std::string& dataset_prefix, const std::string& out_prefix,
              std::vector<double> region, int nx, int ny, double threshold,
              double suppression_wavelengths) {
    const PhaselessDataset ds = read_dataset(dataset_prefix);
    if (region.size() != 4) throw ConfigError("image: --region needs x0 x1 y0 y1");
    if (nx < 1 || ny < 1) throw ConfigError("image: empty grid");
    const ImagingGrid grid =
        imaging_grid(ds, region[0], region[1], region[2], region[3], nx, ny);
    const double lambda = 2.0 * M_PI / ds.medium_at(0).k_minus();
    const PeakSet peaks = find_peaks(grid, threshold, suppression_wavelengths * lambda);
    if (peaks.degenerate)
        std::fprintf(stderr, "warning: indicator grid is constant, no peaks reported\n");

    write_grid_csv(grid, out_prefix + "_grid.csv", ds.config_hash);
    write_grid_pgm(grid, out_prefix, ds.config_hash);
    write_peaks_json(peaks, out_prefix + "_peaks.json", ds.config_hash);
    std::printf("grid %dx%d, %d peak(s)\n", grid.nx, grid.ny,
                static_cast<int>(peaks.peaks.size()));
    for (const auto& p : peaks.peaks)
        std::printf("peak (%.6g, %.6g) value %.6g\n", p.location.x, p.location.y, p.value);
    return exit_code::ok;
}

int cmd_invert(const std::string& dataset_prefix, const std::string& peaks_path,
               const std::string& config_path, const std::string& out_prefix, int components,
               const std::string& resume_curve) {
    const ScenarioConfig cfg = load_scenario(config_path);
    const PhaselessDataset ds = read_dataset(dataset_prefix);
    const PeakSet peaks = read_peaks_json(peaks_path);
    if (peaks.peaks.empty()) throw ConfigError("invert: peak list is empty");

    std::vector<Vec2> centers;
    const int ncomp = components > 0 ? components : static_cast<int>(peaks.peaks.size());
    for (int c = 0; c < ncomp && c < static_cast<int>(peaks.peaks.size()); ++c)
        centers.push_back(peaks.peaks[c].location);

    InversionResult result;
    if (!resume_curve.empty()) {
        // resume from a previously written curve instead of the r0 circle
        std::vector<StarlikeCurve> init{read_curve_json(resume_curve)};
        result = run_recursive(ds, std::move(init), cfg.newton);
    } else {
        result = run_recursive(ds, centers, cfg.newton);
    }

    std::ofstream log(out_prefix + "_trajectory.jsonl");
    if (!log) throw IoError("invert: cannot open trajectory log");
    {
        nlohmann::json head;
        head["record"] = "header";
        head["config_hash"] = cfg.hash;
        head["dataset_hash"] = ds.config_hash;
        log << head.dump() << "\n";
    }
    for (const auto& rec : result.trajectory) {
        nlohmann::json r;
        r["record"] = "iteration";
        r["freq_index"] = rec.freq_index;
        r["k_plus"] = rec.k_plus;
        r["iter"] = rec.iter;
        r["E"] = rec.error;
        r["beta"] = rec.beta;
        r["ratio"] = rec.ratio;
        r["fallback"] = rec.fallback;
        r["projected"] = rec.projected;
        nlohmann::json curves = nlohmann::json::array();
        for (const auto& c : rec.curves)
            curves.push_back({{"center", {c.center().x, c.center().y}},
                              {"coeffs", c.coeffs()},
                              {"M", c.order()}});
        r["curves"] = curves;
        log << r.dump() << "\n";
    }
    for (size_t c = 0; c < result.curves.size(); ++c)
        write_curve_json(result.curves[c],
                         out_prefix + "_curve_" + std::to_string(c) + ".json");
    for (size_t f = 0; f < result.final_error_per_freq.size(); ++f)
        std::printf("frequency %zu (k+=%.6g): final E = %.6g%s\n", f, ds.layout.k_plus[f],
                    result.final_error_per_freq[f],
                    result.cap_reached[f] ? " (iteration cap reached)" : "");
    return exit_code::ok;
}

int cmd_verify(const std::string& suite) {
    const nlohmann::json report = run_verify_suite(suite);
    std::cout << report.dump(2) << "\n";
    return report.at("pass").get<bool>() ? exit_code::ok : exit_code::accuracy;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-layer medium phaseless far-field imaging toolkit"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (default: all cores)");

    std::string config_path, out_prefix = "out", which = "both";
    auto* synth = app.add_subcommand("synth", "synthesize phaseless datasets from a scenario");
    synth->add_option("--config", config_path, "scenario JSON")->required();
    synth->add_option("--out", out_prefix, "output path prefix");
    synth->add_option("--which", which, "imaging|inversion|both")
        ->check(CLI::IsMember({"imaging", "inversion", "both"}));

    std::string dataset_prefix, image_out = "image";
    std::vector<double> region;
    int nx = 0, ny = 0;
    double threshold = 0.5, suppression = 1.0;
    auto* image = app.add_subcommand("image", "compute the imaging functional on a grid");
    image->add_option("--dataset", dataset_prefix, "dataset path prefix")->required();
    image->add_option("--out", image_out, "output path prefix");
    image->add_option("--region", region, "x0 x1 y0 y1")->expected(4)->required();
    image->add_option("--nx", nx, "grid nodes in x")->required();
    image->add_option("--ny", ny, "grid nodes in y")->required();
    image->add_option("--threshold", threshold, "peak threshold fraction of the max");
    image->add_option("--suppression-wavelengths", suppression,
                      "peak suppression radius in wavelengths");

    std::string peaks_path, invert_config, invert_out = "invert", resume_curve;
    int components = 0;
    auto* invert = app.add_subcommand("invert", "recursive multi-frequency reconstruction");
    invert->add_option("--dataset", dataset_prefix, "inversion dataset path prefix")->required();
    invert->add_option("--peaks", peaks_path, "peaks JSON from the image step")->required();
    invert->add_option("--config", invert_config, "scenario JSON (inversion settings)")
        ->required();
    invert->add_option("--out", invert_out, "output path prefix");
    invert->add_option("--components", components,
                       "number of components (default: one per peak)");
    invert->add_option("--resume-curve", resume_curve, "starlike curve JSON to resume from");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a built-in verification suite");
    verify->add_option("suite", suite, "greens|mie|b0|gradient|lm")->required();

    CLI11_PARSE(app, argc, argv);
    set_threads(threads);

    try {
        if (*synth) return cmd_synth(config_path, out_prefix, which);
        if (*image)
            return cmd_image(dataset_prefix, image_out, region, nx, ny, threshold, suppression);
        if (*invert)
            return cmd_invert(dataset_prefix, peaks_path, invert_config, invert_out, components,
                              resume_curve);
        if (*verify) return cmd_verify(suite);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_code::config;
    } catch (const InvalidParamError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_code::config;
    } catch (const AccuracyError& e) {
        std::fprintf(stderr, "accuracy error: %s\n", e.what());
        return exit_code::accuracy;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return exit_code::io;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return exit_code::ok;
}
