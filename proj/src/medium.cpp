//
// medium.cpp: Fresnel/Snell algebra for the two-layer background.
//

#include "lmscat/medium.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lmscat {

double critical_angle(double k_plus, double k_minus) {
    if (!(k_plus > 0.0) || !(k_minus > 0.0))
        throw InvalidParamError("critical_angle: wave numbers must be positive");
    if (k_plus > k_minus) return std::acos(k_minus / k_plus);
    return 0.0;
}

Medium::Medium(double k_plus, double refractive_index)
    : k_plus_(k_plus), n_(refractive_index) {
    if (!(k_plus > 0.0)) throw InvalidParamError("Medium: k_plus must be positive");
    if (!(refractive_index > 0.0))
        throw InvalidParamError("Medium: refractive index must be positive");
    k_minus_ = std::sqrt(refractive_index) * k_plus;
    theta_c_ = critical_angle(k_plus_, k_minus_);
}

bool Medium::in_incident_aperture(double theta, double slack) const {
    return theta >= incident_lo() - slack && theta <= incident_hi() + slack;
}

bool Medium::in_observation_aperture(double theta, double slack) const {
    return theta >= observation_lo() - slack && theta <= observation_hi() + slack;
}

double transmitted_direction(double theta, DirectionMode mode, const Medium& medium) {
    if (mode == DirectionMode::Incident) {
        if (!medium.in_incident_aperture(theta, 1e-9))
            throw InvalidParamError("transmitted_direction: angle outside incident aperture");
    } else if (!medium.in_observation_aperture(theta, 1e-9)) {
        throw InvalidParamError("transmitted_direction: angle outside observation aperture");
    }
    if (medium.matched()) {
        // identity refraction; bypasses the ill-conditioned acos(cos) roundtrip
        if (mode == DirectionMode::Incident)
            return std::clamp(theta, M_PI, 2.0 * M_PI);
        return std::clamp(theta, 0.0, M_PI);
    }
    const double c = (medium.k_plus() / medium.k_minus()) * std::cos(theta);
    if (std::abs(c) > 1.0 + 1e-12)
        throw InvalidParamError("transmitted_direction: evanescent direction, |k+/k- cos| > 1");
    const double cc = std::clamp(c, -1.0, 1.0);
    if (mode == DirectionMode::Incident) return 2.0 * M_PI - std::acos(cc);  // branch [pi, 2pi]
    return std::acos(cc);  // branch [0, pi]
}

FresnelCoeffs fresnel(double theta_d, const Medium& medium) {
    if (!medium.in_incident_aperture(theta_d, 1e-9))
        throw InvalidParamError("fresnel: angle outside incident aperture");
    if (medium.matched()) return {0.0, 1.0};  // 0/0 at grazing angles otherwise
    const double tt = transmitted_direction(theta_d, DirectionMode::Incident, medium);
    const double a = medium.k_plus() * std::sin(theta_d);
    const double b = medium.k_minus() * std::sin(tt);
    FresnelCoeffs f;
    f.R = (a - b) / (a + b);
    f.T = 2.0 * a / (a + b);
    return f;
}

double transmission_obs(double theta_obs, const Medium& medium) {
    if (!medium.in_observation_aperture(theta_obs, 1e-9))
        throw InvalidParamError("transmission_obs: angle outside observation aperture");
    if (medium.matched()) return 1.0;
    const double tt = transmitted_direction(theta_obs, DirectionMode::Observation, medium);
    const double a = medium.k_plus() * std::sin(theta_obs);
    const double b = medium.k_minus() * std::sin(tt);
    return 2.0 * a / (a + b);
}

FieldEval background_field(Vec2 x, double theta_d, const Medium& medium,
                           InterfaceBranch branch) {
    const Complex I(0.0, 1.0);
    FieldEval out;
    const bool upper = (branch == InterfaceBranch::Upper) ||
                       (branch == InterfaceBranch::Auto && x.y > 0.0);
    if (upper) {
        const Vec2 d = unit_vector(theta_d);
        const Vec2 dr{d.x, -d.y};
        const double R = fresnel(theta_d, medium).R;
        const double kp = medium.k_plus();
        const Complex inc = std::exp(I * kp * dot(x, d));
        const Complex ref = R * std::exp(I * kp * dot(x, dr));
        out.value = inc + ref;
        out.grad.x = I * kp * (d.x * inc + dr.x * ref);
        out.grad.y = I * kp * (d.y * inc + dr.y * ref);
    } else {
        const double tt = transmitted_direction(theta_d, DirectionMode::Incident, medium);
        const Vec2 dt = unit_vector(tt);
        const double T = fresnel(theta_d, medium).T;
        const double km = medium.k_minus();
        const Complex v = T * std::exp(I * km * dot(x, dt));
        out.value = v;
        out.grad.x = I * km * dt.x * v;
        out.grad.y = I * km * dt.y * v;
    }
    return out;
}

std::vector<double> observation_angles(int n_f, const Medium& medium) {
    if (n_f <= 0) throw InvalidParamError("observation_angles: n_f must be positive");
    std::vector<double> a(n_f);
    const double p = medium.aperture_length();
    for (int j = 0; j < n_f; ++j) a[j] = medium.observation_lo() + j * p / n_f;
    return a;
}

std::vector<double> incident_angles(int n_d, const Medium& medium) {
    if (n_d <= 0) throw InvalidParamError("incident_angles: n_d must be positive");
    std::vector<double> a(n_d);
    const double p = medium.aperture_length();
    for (int l = 0; l < n_d; ++l) a[l] = medium.incident_lo() + l * p / n_d;
    return a;
}

}  // namespace lmscat
