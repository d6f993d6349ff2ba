#ifndef LMSCAT_LAYERED_GREEN_HPP
#define LMSCAT_LAYERED_GREEN_HPP
//
// lmscat/layered_green: the two-layer Green function G = Phi + H for source
// points in the lower half-plane, its far-field kernel, the aperture integral
// B0, and an interpolation table for H on a tensor grid in (x1-y1, x2+y2).
//

#include <string>

#include "lmscat/sommerfeld.hpp"

namespace lmscat {

// free-space part Phi(x,y) = (i/4) H0^1(k|x-y|)
GreenEval free_space_phi(Vec2 x, Vec2 y, double k);

// total Green function; x may be on either side of the interface, y below
GreenEval green_total(Vec2 x, Vec2 y, const Medium& medium,
                      const SommerfeldOptions& opts = {});

// far-field kernel of G for an observation angle theta in [theta_c, pi-theta_c]:
//   e^{i pi/4} / sqrt(8 pi k+) T(theta) e^{-i k- y . xhat_t}
// value together with its y-gradient (= value * (-i k- xhat_t))
struct FarKernel {
    Complex value;
    Vec2c grad_y;
};
FarKernel farfield_kernel(double theta_obs, Vec2 y, const Medium& medium);

// oscillatory aperture integral B0(y) = int_{S^-} T^2(theta_d) e^{i k- y.d^t} ds(d).
// Trapezoid rule of the given order applied in the variable in which the
// integrand is smooth (theta^t when k+ > k-, theta_d otherwise), composed with
// the cosine endpoint map w(s) = s - sin(2 pi s)/(2 pi).
Complex eval_B0(Vec2 y, const Medium& medium, int order = 2048);

// H and its (u,v) derivatives up to second order at one point
struct HJet {
    Complex val, du, dv, duu, duv, dvv;
};

// tabulated H on [u0,u1] x [v0,v1], cubic Lagrange interpolation per axis;
// value and all partials up to second order are tabulated so the BIE kernels
// (including the hypersingular one) interpolate directly
class HTable {
public:
    HTable() = default;
    HTable(const Medium& medium, double u0, double u1, double v0, double v1,
           double target_rel_err = 1e-8, const SommerfeldOptions& opts = {});

    bool covers(double u, double v) const;
    HJet eval_jet(double u, double v) const;
    GreenEval eval(double u, double v) const;  // value and first-order grads

    int nu() const { return nu_; }
    int nv() const { return nv_; }

    void write(const std::string& path_prefix) const;   // .json + .csv
    static HTable read(const std::string& path_prefix);

    double k_plus() const { return k_plus_; }
    double k_minus() const { return k_minus_; }

private:
    double u0_ = 0.0, hu_ = 1.0;
    double v0_ = 0.0, hv_ = 1.0;
    int nu_ = 0, nv_ = 0;
    double k_plus_ = 0.0, k_minus_ = 0.0;
    Eigen::MatrixXcd val_, du_, dv_, duu_, duv_, dvv_;  // (nv x nu)
};

}  // namespace lmscat

#endif  // LMSCAT_LAYERED_GREEN_HPP
