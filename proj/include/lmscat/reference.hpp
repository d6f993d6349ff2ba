#ifndef LMSCAT_REFERENCE_HPP
#define LMSCAT_REFERENCE_HPP
//
// lmscat/reference: closed-form reference solutions used by the verify
// command and by the test suites. These stay independent of the BIE path.
//

#include <cmath>
#include <complex>

#include "lmscat/medium.hpp"

namespace lmscat {

// far field of a sound-soft disk in a homogeneous medium (series solution);
// the far-field convention is u^s ~ e^{ikr}/sqrt(r) u_inf
inline Complex disk_farfield_series(double radius, Vec2 center, double k, double theta_obs,
                                    double theta_inc) {
    const Complex I(0.0, 1.0);
    const int mmax = static_cast<int>(std::ceil(k * radius + 8.0 * std::cbrt(k * radius) + 12.0));
    Complex sum(0.0, 0.0);
    for (int m = -mmax; m <= mmax; ++m) {
        const int am = std::abs(m);
        const double jm = std::cyl_bessel_j(am, k * radius);
        const Complex hm(jm, std::cyl_neumann(am, k * radius));
        // integer-order symmetry: J_{-m} = (-1)^m J_m carries through the ratio
        sum += (jm / hm) * std::exp(I * static_cast<double>(m) * (theta_obs - theta_inc));
    }
    const Complex amp = -std::sqrt(2.0 / (M_PI * k)) * std::exp(-I * M_PI / 4.0);
    const Vec2 d = unit_vector(theta_inc), xh = unit_vector(theta_obs);
    const Complex shift = std::exp(I * k * (dot(center, d) - dot(center, xh)));
    return shift * amp * sum;
}

// closed-form regularization parameter of the scalar ratio problem:
// J = j, P = 1, residual r; beta* = j^2 rho / (1 - rho)
inline double scalar_lm_beta(double j, double rho) { return j * j * rho / (1.0 - rho); }

}  // namespace lmscat

#endif  // LMSCAT_REFERENCE_HPP
