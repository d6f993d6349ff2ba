//
// geometry.cpp: starlike shapes, benchmark curves, frames and the H^s penalty.
//

#include "lmscat/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace lmscat {

StarlikeCurve::StarlikeCurve(Vec2 center, std::vector<double> coeffs, int order)
    : center_(center), coeffs_(std::move(coeffs)), order_(order) {
    if (order_ < 0 || coeffs_.size() != static_cast<size_t>(2 * order_ + 1))
        throw InvalidParamError("StarlikeCurve: need 2M+1 coefficients");
    if (min_radius() <= 0.0)
        throw InvalidParamError("StarlikeCurve: radial function must be positive");
}

StarlikeCurve StarlikeCurve::circle(Vec2 center, double radius, int order) {
    std::vector<double> c(2 * order + 1, 0.0);
    c[0] = radius;
    return StarlikeCurve(center, std::move(c), order);
}

double StarlikeCurve::radius(double theta) const {
    double r = coeffs_[0];
    for (int l = 1; l <= order_; ++l)
        r += coeffs_[l] * std::cos(l * theta) + coeffs_[l + order_] * std::sin(l * theta);
    return r;
}

double StarlikeCurve::radius_d1(double theta) const {
    double r = 0.0;
    for (int l = 1; l <= order_; ++l)
        r += l * (-coeffs_[l] * std::sin(l * theta) + coeffs_[l + order_] * std::cos(l * theta));
    return r;
}

double StarlikeCurve::radius_d2(double theta) const {
    double r = 0.0;
    for (int l = 1; l <= order_; ++l)
        r -= l * l * (coeffs_[l] * std::cos(l * theta) + coeffs_[l + order_] * std::sin(l * theta));
    return r;
}

CurveFrame StarlikeCurve::frame(double theta) const {
    const double r = radius(theta), r1 = radius_d1(theta), r2 = radius_d2(theta);
    const double c = std::cos(theta), s = std::sin(theta);
    CurveFrame f;
    f.point = {center_.x + r * c, center_.y + r * s};
    f.d1 = {r1 * c - r * s, r1 * s + r * c};
    f.d2 = {r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s};
    f.speed = norm(f.d1);
    if (!(f.speed > 0.0)) throw InvalidParamError("StarlikeCurve: degenerate parametrization");
    f.tangent = (1.0 / f.speed) * f.d1;
    f.normal = {f.tangent.y, -f.tangent.x};  // ccw parametrization -> outward
    return f;
}

double StarlikeCurve::min_radius(int samples) const {
    double m = radius(0.0);
    for (int j = 1; j < samples; ++j)
        m = std::min(m, radius(2.0 * M_PI * j / samples));
    return m;
}

bool StarlikeCurve::project_positive(double r_min, int samples) {
    std::vector<double> r(samples);
    bool active = false;
    for (int j = 0; j < samples; ++j) {
        r[j] = radius(2.0 * M_PI * j / samples);
        if (r[j] < r_min) {
            r[j] = r_min;
            active = true;
        }
    }
    if (active) coeffs_ = fit_trig_coeffs(r, order_);
    return active;
}

std::vector<double> fit_trig_coeffs(const std::vector<double>& samples, int order) {
    const int k = static_cast<int>(samples.size());
    if (k < 2 * order + 1)
        throw InvalidParamError("fit_trig_coeffs: need at least 2M+1 samples");
    std::vector<double> c(2 * order + 1, 0.0);
    for (int j = 0; j < k; ++j) c[0] += samples[j];
    c[0] /= k;
    for (int l = 1; l <= order; ++l) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < k; ++j) {
            const double t = 2.0 * M_PI * j * l / k;
            a += samples[j] * std::cos(t);
            b += samples[j] * std::sin(t);
        }
        c[l] = 2.0 * a / k;
        c[l + order] = 2.0 * b / k;
    }
    return c;
}

StarlikeCurve make_positive_starlike(Vec2 center, const std::vector<double>& coeffs, int order,
                                     double r_min, bool* projected) {
    const int samples = 1024;
    std::vector<double> c = coeffs;
    bool active = false;
    for (int round = 0; round < 8; ++round) {
        std::vector<double> r(samples);
        bool floored = false;
        for (int j = 0; j < samples; ++j) {
            double v = c[0];
            const double th = 2.0 * M_PI * j / samples;
            for (int l = 1; l <= order; ++l)
                v += c[l] * std::cos(l * th) + c[l + order] * std::sin(l * th);
            if (v < r_min) {
                v = r_min;
                floored = true;
            }
            r[j] = v;
        }
        if (!floored) break;
        active = true;
        c = fit_trig_coeffs(r, order);
        // the refit may undershoot the floor slightly; accept once positive
        double mn = 1e300;
        for (int j = 0; j < samples; ++j) {
            double v = c[0];
            const double th = 2.0 * M_PI * j / samples;
            for (int l = 1; l <= order; ++l)
                v += c[l] * std::cos(l * th) + c[l + order] * std::sin(l * th);
            mn = std::min(mn, v);
        }
        if (mn > 0.5 * r_min) break;
    }
    if (projected != nullptr) *projected = active;
    return StarlikeCurve(center, c, order);
}

double hs_norm_sq(const std::vector<double>& coeffs, int order, double s) {
    if (coeffs.size() != static_cast<size_t>(2 * order + 1))
        throw InvalidParamError("hs_norm_sq: need 2M+1 coefficients");
    double v = 2.0 * M_PI * coeffs[0] * coeffs[0];
    for (int l = 1; l <= order; ++l)
        v += M_PI * std::pow(1.0 + l * l, s) *
             (coeffs[l] * coeffs[l] + coeffs[l + order] * coeffs[l + order]);
    return v;
}

CurveFrame ParametricCurve::frame(double t) const {
    CurveFrame f;
    f.point = f_(t);
    f.d1 = d1_(t);
    f.d2 = d2_(t);
    f.speed = norm(f.d1);
    if (!(f.speed > 0.0)) throw InvalidParamError("ParametricCurve: zero speed");
    f.tangent = (1.0 / f.speed) * f.d1;
    f.normal = {f.tangent.y, -f.tangent.x};
    return f;
}

namespace {

// apple radial profile r(t) = (0.5 + 0.4 cos t + 0.1 sin 2t)/(1 + 0.7 cos t);
// dividing only the sin 2t term would drive the radius negative near t ~ 2.8
// and make the trace self-intersect, so the quotient spans the whole numerator
double apple_r(double t) {
    return (0.5 + 0.4 * std::cos(t) + 0.1 * std::sin(2.0 * t)) / (1.0 + 0.7 * std::cos(t));
}
double apple_r1(double t) {
    const double num = 0.5 + 0.4 * std::cos(t) + 0.1 * std::sin(2.0 * t);
    const double dnum = -0.4 * std::sin(t) + 0.2 * std::cos(2.0 * t);
    const double den = 1.0 + 0.7 * std::cos(t);
    const double dden = -0.7 * std::sin(t);
    return (dnum * den - num * dden) / (den * den);
}
double apple_r2(double t) {
    const double num = 0.5 + 0.4 * std::cos(t) + 0.1 * std::sin(2.0 * t);
    const double dnum = -0.4 * std::sin(t) + 0.2 * std::cos(2.0 * t);
    const double ddnum = -0.4 * std::cos(t) - 0.4 * std::sin(2.0 * t);
    const double den = 1.0 + 0.7 * std::cos(t);
    const double dden = -0.7 * std::sin(t);
    const double ddden = -0.7 * std::cos(t);
    return ((ddnum * den - num * ddden) * den - 2.0 * dden * (dnum * den - num * dden)) /
           (den * den * den);
}

ParametricCurve make_radial(std::function<double(double)> r, std::function<double(double)> r1,
                            std::function<double(double)> r2, Vec2 offset) {
    auto f = [=](double t) -> Vec2 {
        const double rr = r(t);
        return {rr * std::cos(t) + offset.x, rr * std::sin(t) + offset.y};
    };
    auto g1 = [=](double t) -> Vec2 {
        const double rr = r(t), rr1 = r1(t);
        const double c = std::cos(t), s = std::sin(t);
        return {rr1 * c - rr * s, rr1 * s + rr * c};
    };
    auto g2 = [=](double t) -> Vec2 {
        const double rr = r(t), rr1 = r1(t), rr2 = r2(t);
        const double c = std::cos(t), s = std::sin(t);
        return {rr2 * c - 2.0 * rr1 * s - rr * c, rr2 * s + 2.0 * rr1 * c - rr * s};
    };
    return ParametricCurve(f, g1, g2);
}

}  // namespace

bool is_builtin_curve(const std::string& name) {
    return name == "ellipse" || name == "apple" || name == "rounded_triangle" ||
           name == "rounded_square";
}

ParametricCurve builtin_curve(const std::string& name) {
    if (name == "ellipse") {
        auto f = [](double t) -> Vec2 { return {std::cos(t) - 5.0, 1.35 * std::sin(t) - 6.0}; };
        auto d1 = [](double t) -> Vec2 { return {-std::sin(t), 1.35 * std::cos(t)}; };
        auto d2 = [](double t) -> Vec2 { return {-std::cos(t), -1.35 * std::sin(t)}; };
        return ParametricCurve(f, d1, d2);
    }
    if (name == "apple") {
        return make_radial(apple_r, apple_r1, apple_r2, {0.0, -4.0});
    }
    if (name == "rounded_triangle") {
        auto r = [](double t) { return 1.0 + 0.15 * std::cos(3.0 * t); };
        auto r1 = [](double t) { return -0.45 * std::sin(3.0 * t); };
        auto r2 = [](double t) { return -1.35 * std::cos(3.0 * t); };
        return make_radial(r, r1, r2, {-2.0, -2.0});
    }
    if (name == "rounded_square") {
        auto f = [](double t) -> Vec2 {
            const double c = std::cos(t), s = std::sin(t);
            return {0.6 * c * c * c + 0.6 * c + 1.5, 0.6 * s * s * s + 0.6 * s - 4.2};
        };
        auto d1 = [](double t) -> Vec2 {
            const double c = std::cos(t), s = std::sin(t);
            return {-1.8 * c * c * s - 0.6 * s, 1.8 * s * s * c + 0.6 * c};
        };
        auto d2 = [](double t) -> Vec2 {
            const double c = std::cos(t), s = std::sin(t);
            return {-1.8 * (2.0 * c * (-s) * s + c * c * c) - 0.6 * c,
                    1.8 * (2.0 * s * c * c - s * s * s) - 0.6 * s};
        };
        return ParametricCurve(f, d1, d2);
    }
    throw InvalidParamError("builtin_curve: unknown curve name '" + name + "'");
}

double BoundaryGrid::max_y() const {
    double m = frames.empty() ? 0.0 : frames[0].point.y;
    for (const auto& f : frames) m = std::max(m, f.point.y);
    return m;
}

Vec2 BoundaryGrid::bbox_lo() const {
    Vec2 lo = frames.at(0).point;
    for (const auto& f : frames) {
        lo.x = std::min(lo.x, f.point.x);
        lo.y = std::min(lo.y, f.point.y);
    }
    return lo;
}

Vec2 BoundaryGrid::bbox_hi() const {
    Vec2 hi = frames.at(0).point;
    for (const auto& f : frames) {
        hi.x = std::max(hi.x, f.point.x);
        hi.y = std::max(hi.y, f.point.y);
    }
    return hi;
}

BoundaryGrid sample_boundary(const StarlikeCurve& c, int n) {
    BoundaryGrid g;
    g.frames.reserve(n);
    for (int j = 0; j < n; ++j) g.frames.push_back(c.frame(2.0 * M_PI * j / n));
    return g;
}

BoundaryGrid sample_boundary(const ParametricCurve& c, int n) {
    BoundaryGrid g;
    g.frames.reserve(n);
    for (int j = 0; j < n; ++j) g.frames.push_back(c.frame(2.0 * M_PI * j / n));
    return g;
}

std::vector<double> perturbation_normal_component(const StarlikeCurve& c, int n, Vec2 da,
                                                  const std::vector<double>& dr_coeffs) {
    const int m = (static_cast<int>(dr_coeffs.size()) - 1) / 2;
    if (dr_coeffs.size() != static_cast<size_t>(2 * m + 1))
        throw InvalidParamError("perturbation_normal_component: need 2M+1 dr coefficients");
    std::vector<double> hn(n);
    for (int j = 0; j < n; ++j) {
        const double theta = 2.0 * M_PI * j / n;
        const CurveFrame f = c.frame(theta);
        double dr = dr_coeffs[0];
        for (int l = 1; l <= m; ++l)
            dr += dr_coeffs[l] * std::cos(l * theta) + dr_coeffs[l + m] * std::sin(l * theta);
        const Vec2 h{da.x + dr * std::cos(theta), da.y + dr * std::sin(theta)};
        hn[j] = dot(h, f.normal);
    }
    return hn;
}

double enclosed_area(const BoundaryGrid& g) {
    // shoelace on the sampled polygon
    double a = 0.0;
    const int n = g.size();
    for (int j = 0; j < n; ++j) {
        const Vec2 p = g.frames[j].point;
        const Vec2 q = g.frames[(j + 1) % n].point;
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

}  // namespace lmscat
