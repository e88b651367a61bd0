#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace c3vg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline Vec3 normalized(const Vec3& v) {
    const double n = v.norm();
    return {v.x / n, v.y / n, v.z / n};
}

// World-space control point of a cubic curve.
using ControlPoint = Vec3;

struct BezierCurve3D {
    std::array<Vec3, 4> points;
};

// Degree-3 Bernstein basis b_i(t) = C(3,i) t^i (1-t)^(3-i).
// Throws std::domain_error for t outside [0,1].
std::array<double, 4> bernstein_weights(double t);

// Derivative of the basis w.r.t. t, for tangent evaluation.
std::array<double, 4> bernstein_weight_derivs(double t);

Vec3 eval_curve3d(const BezierCurve3D& curve, double t);
Vec3 eval_curve3d_deriv(const BezierCurve3D& curve, double t);

// k points at t = i/(k-1). Throws std::invalid_argument for k < 2.
std::vector<Vec3> sample_points(const BezierCurve3D& curve, int k);

// 2D cubic with the same basis; used by the projection and raster stages.
struct Cubic2D {
    std::array<Vec2, 4> points;
};

Vec2 eval_cubic2d(const Cubic2D& c, double t);
Vec2 eval_cubic2d_deriv(const Cubic2D& c, double t);
Vec2 eval_cubic2d_deriv2(const Cubic2D& c, double t);

}  // namespace c3vg
