#ifndef LMSCAT_MEDIUM_HPP
#define LMSCAT_MEDIUM_HPP
//
// lmscat/medium: two-layer medium bookkeeping. Wave numbers k+ (upper
// half-plane) and k- (lower half-plane) with k-^2 = n k+^2, the critical
// angle, Snell-type transmitted directions, Fresnel coefficients and
// the background field produced by a downward plane wave.
//

#include <cmath>
#include <complex>
#include <vector>

#include "lmscat/errors.hpp"

namespace lmscat {

using Complex = std::complex<double>;

struct Vec2 {
    double x = 0.0, y = 0.0;
};
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Vec2c {
    Complex x{0.0, 0.0}, y{0.0, 0.0};
};

inline Vec2 unit_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

// aperture cutoff: arccos(k-/k+) when k+ > k-, else 0
double critical_angle(double k_plus, double k_minus);

class Medium {
public:
    // k- derived as sqrt(n) k+
    Medium(double k_plus, double refractive_index);

    double k_plus() const { return k_plus_; }
    double k_minus() const { return k_minus_; }
    double refractive_index() const { return n_; }
    double theta_c() const { return theta_c_; }
    bool matched() const { return k_plus_ == k_minus_; }

    // measurement apertures; incident directions point downward
    double incident_lo() const { return M_PI + theta_c_; }
    double incident_hi() const { return 2.0 * M_PI - theta_c_; }
    double observation_lo() const { return theta_c_; }
    double observation_hi() const { return M_PI - theta_c_; }
    // common aperture length P = pi - 2 theta_c
    double aperture_length() const { return M_PI - 2.0 * theta_c_; }

    bool in_incident_aperture(double theta, double slack = 1e-12) const;
    bool in_observation_aperture(double theta, double slack = 1e-12) const;

private:
    double k_plus_, k_minus_, n_, theta_c_;
};

enum class DirectionMode { Incident, Observation };

// angle theta^t with k+ cos(theta) = k- cos(theta^t); branch [pi,2pi] for
// incident directions, [0,pi] for observation directions
double transmitted_direction(double theta, DirectionMode mode, const Medium& medium);

struct FresnelCoeffs {
    double R = 0.0;  // reflection
    double T = 1.0;  // transmission; 1 + R = T
};

FresnelCoeffs fresnel(double theta_d, const Medium& medium);

// transmission factor for an observation direction (same formula with the
// [0,pi] transmitted branch)
double transmission_obs(double theta_obs, const Medium& medium);

struct FieldEval {
    Complex value{0.0, 0.0};
    Vec2c grad;
};

enum class InterfaceBranch { Auto, Upper, Lower };

// background field u0 for a unit-amplitude incident plane wave of direction
// angle theta_d: incident+reflected above the interface, transmitted below
FieldEval background_field(Vec2 x, double theta_d, const Medium& medium,
                           InterfaceBranch branch = InterfaceBranch::Auto);

// uniform direction grids of the measurement layout:
// theta_j = lo + (j-1) (pi - 2 theta_c)/n, j = 1..n
std::vector<double> observation_angles(int n_f, const Medium& medium);
std::vector<double> incident_angles(int n_d, const Medium& medium);

}  // namespace lmscat

#endif  // LMSCAT_MEDIUM_HPP
