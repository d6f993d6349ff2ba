#ifndef LMSCAT_BIE_HPP
#define LMSCAT_BIE_HPP
//
// lmscat/bie: Nystrom discretization of the combined double/single-layer
// boundary integral equation (1/2 I + K - i S) phi = f for sound-soft
// obstacles buried in the lower half-plane. The free-space parts use the
// Kussmaul-Martensen logarithmic splitting, the reflected parts are smooth
// and go through the plain trapezoid rule. Multiple disjoint components are
// assembled as one block system.
//

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "lmscat/geometry.hpp"
#include "lmscat/layered_green.hpp"

namespace lmscat {

struct BieOptions {
    SommerfeldOptions sommerfeld;
    const HTable* h_table = nullptr;  // interpolate H instead of direct quadrature
    double interface_margin = 1e-6;   // curve must stay below x2 = -margin
};

class BiePanel {
public:
    BiePanel(std::vector<BoundaryGrid> components, const Medium& medium,
             const BieOptions& opts = {});

    int size() const { return total_; }
    int component_count() const { return static_cast<int>(components_.size()); }
    const BoundaryGrid& component(int c) const { return components_[c]; }
    int component_offset(int c) const { return offsets_[c]; }
    const Medium& medium() const { return medium_; }

    const Eigen::MatrixXcd& system() const { return system_; }

    Eigen::VectorXcd solve(const Eigen::VectorXcd& f) const;
    Eigen::MatrixXcd solve(const Eigen::MatrixXcd& f) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& phi) const { return system_ * phi; }

    // u_inf = farfield_matrix(obs) * phi
    Eigen::MatrixXcd farfield_matrix(const std::vector<double>& theta_obs) const;

    // normal derivative of the scattered potential from the exterior,
    // dnu u^s = T phi - i (K' - 1/2 I) phi, with T in Maue form
    Eigen::VectorXcd scattered_normal_derivative(const Eigen::VectorXcd& phi) const;

    // -sum_d u0(x_i, theta_d): Dirichlet data for the given incidence set
    Eigen::VectorXcd dirichlet_data(const std::vector<double>& incident_thetas) const;
    // nu . grad of the same background sum
    Eigen::VectorXcd background_normal_derivative(const std::vector<double>& incident_thetas) const;

    Vec2 node(int i) const { return flat_[i].point; }

private:
    void assemble(const BieOptions& opts);

    std::vector<BoundaryGrid> components_;
    std::vector<int> offsets_;
    int total_ = 0;
    Medium medium_;
    Eigen::MatrixXcd system_;       // 1/2 I + K - iS
    Eigen::MatrixXcd normal_op_;    // T - i(K' - 1/2 I)
    std::vector<CurveFrame> flat_;  // all nodes in block order
    std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
};

// scattered potential (D - iS)phi at points away from the boundary, plain
// trapezoid on the given sampling (valid once the evaluation distance clearly
// exceeds the node spacing); the density is nodal on the concatenated grids
Eigen::VectorXcd layer_potential(const std::vector<BoundaryGrid>& components,
                                 const Medium& medium, const Eigen::VectorXcd& phi,
                                 const std::vector<Vec2>& points,
                                 const SommerfeldOptions& opts = {});

// one solve per distinct incident direction, far field at the observation set
struct FarFieldSweep {
    Eigen::MatrixXcd u_inf;      // (n_obs x n_dir)
    Eigen::MatrixXcd densities;  // (N x n_dir)
};
FarFieldSweep simulate(const BiePanel& panel, const std::vector<double>& incident_thetas,
                       const std::vector<double>& observation_thetas);

// periodic spectral differentiation matrix on n equispaced nodes (n even)
Eigen::MatrixXd trig_diff_matrix(int n);

}  // namespace lmscat

#endif  // LMSCAT_BIE_HPP
