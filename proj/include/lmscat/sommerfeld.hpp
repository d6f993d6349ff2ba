#ifndef LMSCAT_SOMMERFELD_HPP
#define LMSCAT_SOMMERFELD_HPP
//
// lmscat/sommerfeld: panel quadrature on the spectral line for the two-layer
// Green function. The integrands carry branch points at k- and k+; panels are
// split there with inverse-square-root substitutions, subdivided by a phase
// budget, and truncated once the evanescent decay reaches machine scale.
//
// Conventions. beta(k,xi) = sqrt(k^2 - xi^2) with Im >= 0 (positive real for
// |xi| < k). All integrals are reduced to [0, inf) by evenness in xi:
//
//   H(x,y)      = (i/2pi) int_0^inf  (bm-bp)/((bm+bp) bm) cos(xi u) e^{-i bm v} dxi
//   G_tr(x,y)   = (i/2pi) int_0^inf  2/(bm+bp) cos(xi u) e^{i bp x2 - i bm y2} dxi
//
// with u = x1-y1, v = x2+y2 and bm = beta(k-), bp = beta(k+).
//

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "lmscat/medium.hpp"

namespace lmscat {

Complex spectral_beta(double k, double xi);

struct SommerfeldOptions {
    int gl_points = 16;           // Gauss-Legendre nodes per subpanel
    double phase_budget = 5.0;    // max phase span per subpanel (radians)
    double tail_exponent = 36.0;  // truncate when decay exceeds e^{-this}
    int max_subpanels = 200000;
    double refinement = 1.0;      // >1 halves the budget (self-convergence tests)
};

// quadrature nodes on [0, xi_max]; weights carry all substitution jacobians
struct SpectralRule {
    std::vector<double> xi;
    std::vector<double> w;
    double xi_max = 0.0;
    int subpanels = 0;
};

// Envelope of the integrand family the rule must integrate:
//   phase(xi) <= u_max xi + a_max |beta_plus| + b_max |beta_minus|
//   decay(xi) >= a_min Im(beta_plus) + b_min Im(beta_minus)  (a_min may be
//   slightly negative for interface diagnostics; the sum must grow).
struct RuleEnvelope {
    double u_max = 0.0;
    double a_max = 0.0, a_min = 0.0;  // upper-side depth factor (x2 for G_tr)
    double b_max = 0.0, b_min = 0.0;  // lower-side depth factor (|v| or |y2|)
};

SpectralRule build_spectral_rule(const Medium& medium, const RuleEnvelope& env,
                                 const SommerfeldOptions& opts = {});

// value together with both gradients of a Green-function part
struct GreenEval {
    Complex value{0.0, 0.0};
    Vec2c grad_y;
    Vec2c grad_x;
};

// reflected part H(x,y), both points in the lower half-plane
GreenEval eval_reflected_H(Vec2 x, Vec2 y, const Medium& medium,
                           const SommerfeldOptions& opts = {});

// transmitted-side Green function for x above (or marginally below) the
// interface and y strictly below
GreenEval eval_transmitted_G(Vec2 x, Vec2 y, const Medium& medium,
                             const SommerfeldOptions& opts = {});

// Batched fill of H and its (u,v)-derivatives over all pairs (x_i, y_j),
// u = x.x - y.x, v = x.y + y.y. The spectral sum factorizes through
// cos(xi(a-b)) = cos cos + sin sin, so each plane is a pair of matrix
// products sharing one rule. dH/dy1 = -du, dH/dy2 = dv, dH/dx1 = du,
// dH/dx2 = dv; second derivatives follow the same chain rule, e.g.
// d2H/dx dy needs duu, duv, dvv (H is not translation invariant in x2).
struct HBlock {
    Eigen::MatrixXcd val, du, dv, duu, duv, dvv;
};

HBlock eval_H_block(const std::vector<Vec2>& x, const std::vector<Vec2>& y,
                    const Medium& medium, const SommerfeldOptions& opts = {});

// Gauss-Legendre nodes/weights on [-1,1]
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace lmscat

#endif  // LMSCAT_SOMMERFELD_HPP
