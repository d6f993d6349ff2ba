#ifndef LMSCAT_NEWTON_HPP
#define LMSCAT_NEWTON_HPP
//
// lmscat/newton: the phaseless far-field operator on starlike boundaries, its
// shape derivative, the Levenberg-Marquardt step with H^s penalty and the
// residual-ratio rule for the regularization parameter, and the recursive
// multi-frequency driver.
//

#include <vector>

#include "lmscat/bie.hpp"
#include "lmscat/synth.hpp"

namespace lmscat {

struct NewtonConfig {
    double s = 1.6;
    int fourier_order = 25;  // M
    double rho = 0.935;      // residual-ratio parameter
    double tau = 1.45;       // discrepancy factor
    double r0 = 0.35;        // initial circle radius
    int max_iters_per_freq = 20;
    int n_inversion = 128;   // boundary nodes per component inside the iteration
    double delta_floor = 1e-4;
    double ratio_tol = 0.02;  // relative tolerance on the ratio rule
    double r_min = 0.05;      // positivity floor for r(theta)
};

// one forward pass: factorized panel, per-pair far fields, phaseless values,
// and the total-field normal derivative needed by the shape derivative
struct ForwardContext {
    std::vector<StarlikeCurve> curves;
    std::unique_ptr<BiePanel> panel;
    std::vector<double> obs;
    std::vector<std::pair<double, double>> pairs;
    Eigen::MatrixXcd farfield_map;          // (n_obs x N)
    Eigen::MatrixXcd u_inf_pair;            // (n_obs x n_pairs)
    Eigen::MatrixXd phaseless;              // |u_inf_pair|^2
    Eigen::MatrixXcd total_normal_deriv;    // (N x n_pairs)
};

ForwardContext make_forward(std::vector<StarlikeCurve> curves, const Medium& medium,
                            int n_nodes, const std::vector<std::pair<double, double>>& pairs,
                            const std::vector<double>& observation_thetas,
                            const BieOptions& opts = {});

// derivative of |u_inf|^2 in the direction of the boundary field
// h = da + dr(theta)(cos,sin) applied to one component; returns (n_obs x n_pairs)
Eigen::MatrixXd frechet_apply(const ForwardContext& ctx, int component, Vec2 da,
                              const std::vector<double>& dr_coeffs);

// stacked Jacobian: rows pair-major (pair q block of n_obs rows), columns per
// component [da1, da2, a0, cos modes 1..M, sin modes 1..M]
Eigen::MatrixXd assemble_jacobian(const ForwardContext& ctx, int fourier_order);

// diagonal of the penalty quadratic form matching the jacobian columns
Eigen::VectorXd penalty_diagonal(int components, int fourier_order, double s);

struct LmStep {
    Eigen::VectorXd delta;
    double beta = 0.0;
    double ratio = 0.0;   // achieved ||linear residual||^2 / ||residual||^2
    bool fallback = false;
};

// solve (J^T W J + beta P) delta = J^T W r with beta from the bisection on
// the residual-ratio target rho^2; W = weight * I
LmStep lm_step(const Eigen::MatrixXd& jac, const Eigen::VectorXd& residual,
               const Eigen::VectorXd& penalty_diag, double weight, double rho,
               double ratio_tol = 0.02);

// mean over pairs of the weighted relative data misfit
double relative_error(const Eigen::MatrixXd& model, const Eigen::MatrixXd& data);

struct IterationRecord {
    int freq_index = 0;
    double k_plus = 0.0;
    int iter = 0;
    double error = 0.0;  // E after the update
    double beta = 0.0;
    double ratio = 0.0;
    bool fallback = false;
    bool projected = false;  // positivity floor fired
    std::vector<StarlikeCurve> curves;
};

struct InversionResult {
    std::vector<StarlikeCurve> curves;
    std::vector<IterationRecord> trajectory;
    std::vector<double> final_error_per_freq;
    std::vector<bool> cap_reached;
};

// the recursive driver: frequencies ascending, inner LM loop under the
// discrepancy rule E < tau delta; components evolve jointly
InversionResult run_recursive(const PhaselessDataset& data,
                              std::vector<StarlikeCurve> initial_curves,
                              const NewtonConfig& cfg, const BieOptions& opts = {});

// standard initialization: one circle of radius r0 per peak center
InversionResult run_recursive(const PhaselessDataset& data,
                              const std::vector<Vec2>& init_centers, const NewtonConfig& cfg,
                              const BieOptions& opts = {});

}  // namespace lmscat

#endif  // LMSCAT_NEWTON_HPP
