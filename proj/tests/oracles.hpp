#ifndef LMSCAT_TESTS_ORACLES_HPP
#define LMSCAT_TESTS_ORACLES_HPP
//
// Independent oracles for the test suites. Everything here is computed from
// first principles (series, bisection, asymptotics) without touching the
// library's evaluation paths.
//

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace oracles {

inline constexpr double kEuler = 0.57721566490153286060651209008240243;

// bisection root finder on a bracketing interval
inline double bisect(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-14) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::runtime_error("oracles::bisect: no bracket");
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0 || b - a < tol) return m;
        if (fa * fm < 0.0) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

// power series for J0 (moderate arguments)
inline double series_j0(double x) {
    const double q = -0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Y0 by the standard series Y0 = (2/pi)[(ln(x/2)+gamma) J0 + sum_k (-1)^{k+1} H_k (x/2)^{2k}/(k!)^2]
inline double series_y0(double x) {
    const double q = -0.25 * x * x;
    double term = 1.0, sum = 0.0, harm = 0.0;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * m);
        harm += 1.0 / m;
        sum -= term * harm;
        if (std::abs(term) < 1e-18) break;
    }
    return (2.0 / M_PI) * ((std::log(0.5 * x) + kEuler) * series_j0(x) + sum);
}

// large-argument J0/Y0 by the Hankel expansion (adequate past x ~ 20)
inline double asym_j0(double x) {
    const double chi = x - 0.25 * M_PI;
    const double p = 1.0 - 9.0 / (128.0 * x * x);
    const double q = -1.0 / (8.0 * x) + 75.0 / (1024.0 * x * x * x);
    return std::sqrt(2.0 / (M_PI * x)) * (std::cos(chi) * p - std::sin(chi) * q);
}

inline double asym_y0(double x) {
    const double chi = x - 0.25 * M_PI;
    const double p = 1.0 - 9.0 / (128.0 * x * x);
    const double q = -1.0 / (8.0 * x) + 75.0 / (1024.0 * x * x * x);
    return std::sqrt(2.0 / (M_PI * x)) * (std::sin(chi) * p + std::cos(chi) * q);
}

// Struve H0 at large argument: H0 = Y0 + (2/pi)[1/x - 1/x^3 + 9/x^5 - ...]
inline double struve_h0_large(double x) {
    double sum = 0.0, term = 1.0 / x;
    for (int m = 0; m < 40; ++m) {
        sum += term;
        const double next = -term * std::pow(2.0 * m + 1.0, 2) / (x * x);
        if (std::abs(next) >= std::abs(term)) break;  // asymptotic: stop at smallest term
        term = next;
    }
    return asym_y0(x) + (2.0 / M_PI) * sum;
}

// leading-order modulus of (i/4) H0^1(kr)
inline double hankel_asym_mod_phi(double k, double r) {
    return 0.25 * std::sqrt(2.0 / (M_PI * k * r));
}

}  // namespace oracles

#endif  // LMSCAT_TESTS_ORACLES_HPP
