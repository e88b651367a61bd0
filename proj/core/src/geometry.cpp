#include "curve3dvg/geometry.hpp"

#include <stdexcept>

namespace c3vg {

static void check_t(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::domain_error("curve parameter t outside [0,1]");
}

std::array<double, 4> bernstein_weights(double t) {
    check_t(t);
    const double u = 1.0 - t;
    return {u * u * u, 3.0 * t * u * u, 3.0 * t * t * u, t * t * t};
}

std::array<double, 4> bernstein_weight_derivs(double t) {
    check_t(t);
    const double u = 1.0 - t;
    return {-3.0 * u * u, 3.0 * u * u - 6.0 * t * u, 6.0 * t * u - 3.0 * t * t,
            3.0 * t * t};
}

Vec3 eval_curve3d(const BezierCurve3D& curve, double t) {
    const auto b = bernstein_weights(t);
    Vec3 out;
    for (int i = 0; i < 4; ++i) out += b[i] * curve.points[i];
    return out;
}

Vec3 eval_curve3d_deriv(const BezierCurve3D& curve, double t) {
    const auto db = bernstein_weight_derivs(t);
    Vec3 out;
    for (int i = 0; i < 4; ++i) out += db[i] * curve.points[i];
    return out;
}

std::vector<Vec3> sample_points(const BezierCurve3D& curve, int k) {
    if (k < 2) throw std::invalid_argument("sample_points requires k >= 2");
    std::vector<Vec3> pts;
    pts.reserve(k);
    for (int i = 0; i < k; ++i)
        pts.push_back(eval_curve3d(curve, double(i) / double(k - 1)));
    return pts;
}

Vec2 eval_cubic2d(const Cubic2D& c, double t) {
    const auto b = bernstein_weights(t);
    Vec2 out;
    for (int i = 0; i < 4; ++i) out += b[i] * c.points[i];
    return out;
}

Vec2 eval_cubic2d_deriv(const Cubic2D& c, double t) {
    const auto db = bernstein_weight_derivs(t);
    Vec2 out;
    for (int i = 0; i < 4; ++i) out += db[i] * c.points[i];
    return out;
}

Vec2 eval_cubic2d_deriv2(const Cubic2D& c, double t) {
    // B''(t) = 6[(1-t)(p2-2p1+p0) + t(p3-2p2+p1)]
    const Vec2 a = c.points[2] - 2.0 * c.points[1] + c.points[0];
    const Vec2 b = c.points[3] - 2.0 * c.points[2] + c.points[1];
    return 6.0 * ((1.0 - t) * a + t * b);
}

}  // namespace c3vg
