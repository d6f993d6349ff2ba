#ifndef LMSCAT_GEOMETRY_HPP
#define LMSCAT_GEOMETRY_HPP
//
// lmscat/geometry: boundary curves. Starlike trig-polynomial shapes are the
// reconstruction space; the four benchmark curves (ellipse, apple, rounded
// triangle, rounded square) serve as forward-model truth shapes. Also the
// weighted H^s seminorm used as the regularization penalty.
//

#include <functional>
#include <string>
#include <vector>

#include "lmscat/medium.hpp"

namespace lmscat {

struct CurveFrame {
    Vec2 point;
    Vec2 tangent;   // unit
    Vec2 normal;    // unit, outward
    double speed;   // |gamma'(t)|
    Vec2 d1;        // gamma'(t)
    Vec2 d2;        // gamma''(t)
};

// r(theta) = a0 + sum_{l=1..M} a_l cos(l theta) + a_{l+M} sin(l theta),
// curve gamma(theta) = center + r(theta) (cos theta, sin theta)
class StarlikeCurve {
public:
    StarlikeCurve(Vec2 center, std::vector<double> coeffs, int order);

    static StarlikeCurve circle(Vec2 center, double radius, int order = 0);

    Vec2 center() const { return center_; }
    int order() const { return order_; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    double radius(double theta) const;
    double radius_d1(double theta) const;
    double radius_d2(double theta) const;

    CurveFrame frame(double theta) const;

    // gridwise positivity check used by the constructor and after updates
    double min_radius(int samples = 1024) const;

    // floors r(theta) at r_min on a fine grid and refits the coefficients;
    // returns true if the floor was active
    bool project_positive(double r_min, int samples = 1024);

private:
    Vec2 center_;
    std::vector<double> coeffs_;  // size 2*order+1
    int order_;
};

// fit a degree-M trig polynomial to samples r_j = r(2 pi j / K), K >= 2M+1
std::vector<double> fit_trig_coeffs(const std::vector<double>& samples, int order);

// builds a starlike curve from possibly invalid coefficients by flooring the
// radial function at r_min on a fine grid and refitting; used after updates
StarlikeCurve make_positive_starlike(Vec2 center, const std::vector<double>& coeffs, int order,
                                     double r_min, bool* projected = nullptr);

// weighted squared H^s norm of a radial increment in W_M:
// 2 pi a0^2 + pi sum_l (1+l^2)^s (a_l^2 + a_{l+M}^2)
double hs_norm_sq(const std::vector<double>& coeffs, int order, double s);

// general parametric curve with analytic derivatives
class ParametricCurve {
public:
    using Fn = std::function<Vec2(double)>;
    ParametricCurve(Fn f, Fn d1, Fn d2) : f_(std::move(f)), d1_(std::move(d1)), d2_(std::move(d2)) {}
    CurveFrame frame(double t) const;

private:
    Fn f_, d1_, d2_;
};

// benchmark truth shapes; names: ellipse, apple, rounded_triangle, rounded_square
ParametricCurve builtin_curve(const std::string& name);
bool is_builtin_curve(const std::string& name);

// sampled closed boundary at the Nystrom nodes t_j = 2 pi j / N
struct BoundaryGrid {
    std::vector<CurveFrame> frames;
    int size() const { return static_cast<int>(frames.size()); }
    double max_y() const;
    Vec2 bbox_lo() const;
    Vec2 bbox_hi() const;
};

BoundaryGrid sample_boundary(const StarlikeCurve& c, int n);
BoundaryGrid sample_boundary(const ParametricCurve& c, int n);

// boundary perturbation h(theta) = da + dr(theta) (cos theta, sin theta)
// evaluated on the nodes of a starlike curve sampled at n points;
// returns h . nu per node
std::vector<double> perturbation_normal_component(const StarlikeCurve& c, int n,
                                                  Vec2 da,
                                                  const std::vector<double>& dr_coeffs);

// area of the enclosed region (shoelace over a fine sampling)
double enclosed_area(const BoundaryGrid& g);

}  // namespace lmscat

#endif  // LMSCAT_GEOMETRY_HPP
