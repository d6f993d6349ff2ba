#ifndef LMSCAT_SCENARIO_HPP
#define LMSCAT_SCENARIO_HPP
//
// lmscat/scenario: experiment configuration files, the synthetic-data
// drivers built on the forward solver, and the verification suites exposed
// by the CLI.
//

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "lmscat/imaging.hpp"
#include "lmscat/newton.hpp"
#include "lmscat/synth.hpp"

namespace lmscat {

struct TruthShape {
    // either a starlike curve or a named benchmark curve
    std::variant<StarlikeCurve, std::string> shape;
    BoundaryGrid sample(int n) const;
};

struct ImagingSettings {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    int nx = 0, ny = 0;
    double threshold = 0.5;
    double suppression_wavelengths = 1.0;
};

struct ScenarioConfig {
    int schema_version = 1;
    std::string name;
    double refractive_index = 1.0;

    std::vector<TruthShape> truths;

    int n_f = 0;
    int n_data = 256;  // boundary nodes per component for data synthesis
    double delta = 0.0;
    std::uint64_t seed = 0;

    // imaging data block (single frequency, full pair grid)
    std::optional<double> imaging_k1;
    int n_d1 = 0;

    // inversion data block (multi frequency, explicit pair list)
    std::vector<double> schedule_k_plus;
    std::vector<std::pair<double, double>> pairs;

    ImagingSettings imaging;
    NewtonConfig newton;

    std::string hash;  // FNV-1a of the canonical JSON
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const nlohmann::json& j);

// the two incidence-pair presets; theta_c comes from the medium
std::vector<std::pair<double, double>> pair_preset(const std::string& name, const Medium& medium);

std::string fnv1a_hash(const std::string& bytes);

// data synthesis at data-grade resolution (n_data nodes per component)
PhaselessDataset synth_imaging_dataset(const ScenarioConfig& cfg);
PhaselessDataset synth_inversion_dataset(const ScenarioConfig& cfg);

// verification suites for the CLI: greens, mie, b0, gradient, lm.
// returns a machine-readable report; "pass" is the overall verdict
nlohmann::json run_verify_suite(const std::string& suite);

// starlike curve files: {"center":[a,b],"coeffs":[...],"M":m}
void write_curve_json(const StarlikeCurve& c, const std::string& path);
StarlikeCurve read_curve_json(const std::string& path);

}  // namespace lmscat

#endif  // LMSCAT_SCENARIO_HPP
