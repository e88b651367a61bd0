#pragma once

#include <array>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/geometry.hpp"

namespace c3vg {

// A world point after perspective projection: normalized image coordinates
// (shorter image axis spans [-1, 1]) plus the perspective depth along the
// view axis.
struct ProjectedPoint {
    Vec2 d_xy;
    double d_z = 0.0;  // > 0: in front of the camera
};

// Projection of a 3D cubic: a 2D rational cubic whose weights are the
// per-control-point depths.
struct RationalBezier2D {
    std::array<ProjectedPoint, 4> control;
};

inline constexpr double kNearEpsilon = 1e-4;

// Throws BehindCameraError when the camera-space depth is <= kNearEpsilon.
ProjectedPoint project_point(const Camera& camera, const Vec3& p);

// Projects each control point independently. BehindCameraError carries the
// index of the first offending control point.
RationalBezier2D project_curve(const Camera& camera, const BezierCurve3D& curve);

// Sum_i b_i(t) d_z^i d_xy^i / Sum_i b_i(t) d_z^i. Domain error outside [0,1].
Vec2 rational_eval(const RationalBezier2D& rb, double t);

// Drops the weights, keeping the projected control points as an ordinary
// cubic. Exact when all weights are equal; near-exact when the depth spread
// is small relative to the mean depth.
Cubic2D approx_cubic(const RationalBezier2D& rb);

// Max over n_samples of |rational_eval - approx evaluation| in normalized
// units. n_samples must be >= 16.
double projection_error(const Camera& camera, const BezierCurve3D& curve, int n_samples);

}  // namespace c3vg
