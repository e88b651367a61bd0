#include "curve3dvg/project.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "curve3dvg/errors.hpp"

namespace c3vg {

ProjectedPoint project_point(const Camera& camera, const Vec3& p) {
    const CameraBasis basis = camera_basis(camera);
    const Vec3 rel = p - camera.position;
    const double z_c = dot(rel, basis.forward);
    if (z_c <= kNearEpsilon)
        throw BehindCameraError("point at or behind the camera near plane (z_c = " +
                                std::to_string(z_c) + ")");
    const double x_c = dot(rel, basis.right);
    const double y_c = dot(rel, basis.up);
    const double f = focal_length(camera);
    return ProjectedPoint{Vec2{f * x_c / z_c, f * y_c / z_c}, z_c};
}

RationalBezier2D project_curve(const Camera& camera, const BezierCurve3D& curve) {
    RationalBezier2D rb;
    for (int i = 0; i < 4; ++i) {
        try {
            rb.control[i] = project_point(camera, curve.points[i]);
        } catch (const BehindCameraError& e) {
            throw BehindCameraError(std::string(e.what()) + " at control point " +
                                        std::to_string(i),
                                    i);
        }
    }
    return rb;
}

Vec2 rational_eval(const RationalBezier2D& rb, double t) {
    const std::array<double, 4> b = bernstein_weights(t);  // throws outside [0,1]
    Vec2 num{0.0, 0.0};
    double den = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double w = b[i] * rb.control[i].d_z;
        num += w * rb.control[i].d_xy;
        den += w;
    }
    return {num.x / den, num.y / den};
}

Cubic2D approx_cubic(const RationalBezier2D& rb) {
    Cubic2D c;
    for (int i = 0; i < 4; ++i) c.points[i] = rb.control[i].d_xy;
    return c;
}

double projection_error(const Camera& camera, const BezierCurve3D& curve, int n_samples) {
    if (n_samples < 16) throw std::invalid_argument("projection_error needs >= 16 samples");
    const RationalBezier2D rb = project_curve(camera, curve);
    const Cubic2D cubic = approx_cubic(rb);
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = double(i) / double(n_samples - 1);
        const Vec2 exact = rational_eval(rb, t);
        const Vec2 approx = eval_cubic2d(cubic, t);
        worst = std::max(worst, (exact - approx).norm());
    }
    return worst;
}

}  // namespace c3vg
