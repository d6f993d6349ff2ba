#ifndef LMSCAT_SYNTH_HPP
#define LMSCAT_SYNTH_HPP
//
// lmscat/synth: phaseless datasets |u_inf|^2, the additive noise model with
// exact relative l2 perturbation, and the JSON-header + CSV-payload file pair.
//

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lmscat/medium.hpp"
#include "lmscat/rng.hpp"

namespace lmscat {

// measurement layout shared by all frequency blocks (theta_c depends only on
// the wave-number ratio, so the angular grids are frequency independent)
struct DatasetLayout {
    enum class Kind { PairGrid, PairList };
    Kind kind = Kind::PairGrid;
    int n_f = 0;        // observation directions
    int n_d = 0;        // incident grid size (PairGrid)
    std::vector<std::pair<double, double>> pairs;  // explicit angles (PairList)
    std::vector<double> k_plus;                    // frequency schedule
    double refractive_index = 1.0;

    int pair_count() const;
    // angles of pair p (incident grid pairs are (l,i) with p = l*n_d + i)
    std::pair<double, double> pair_angles(int p) const;
};

struct PhaselessDataset {
    DatasetLayout layout;
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::string rng_id = kRngId;
    std::string config_hash;
    // one block per frequency, (pair_count x n_f), real |u_inf|^2 values
    std::vector<Eigen::MatrixXd> blocks;

    Medium medium_at(int freq_index) const;
    std::vector<double> observation_thetas() const;
    std::vector<double> incident_thetas() const;  // PairGrid only
};

// additive perturbation on |u_inf|^2 with exact relative l2 size delta:
// noisy_j = v_j + delta (xi_j / ||xi||) ||v||
std::vector<double> add_noise(const std::vector<double>& values, double delta, NormalRng& rng);

// applies add_noise blockwise with per-(freq, pair) sub-seeds; PairGrid blocks
// use the unordered pair key so the tensor stays symmetric under l <-> i
void apply_noise(PhaselessDataset& ds);

void write_dataset(const PhaselessDataset& ds, const std::string& path_prefix);
PhaselessDataset read_dataset(const std::string& path_prefix);

}  // namespace lmscat

#endif  // LMSCAT_SYNTH_HPP
