#pragma once

#include <array>
#include <string>
#include <vector>

#include "curve3dvg/geometry.hpp"

namespace c3vg {

enum class PathKind { Sketch, Iconography };

// Per-view opacity override decided by the visibility stage.
struct OpacityState {
    enum class Mode { Trained, FixedHigh, FixedLow };
    Mode mode = Mode::FixedHigh;
    double value = 1.0;

    static OpacityState trained(double v) { return {Mode::Trained, v}; }
    static OpacityState fixed_high(double high = 1.0) { return {Mode::FixedHigh, high}; }
    static OpacityState fixed_low(double low = 0.2) { return {Mode::FixedLow, low}; }
};

// One path: a single open cubic for Sketch, or a closed loop of four cubics
// for Iconography. Iconography stores the 12 distinct control points of the
// loop (joints shared between neighbouring curves), so end-connection holds
// structurally; curve j is points[3j], points[3j+1], points[3j+2],
// points[(3j+3) % 12].
struct Path3D {
    PathKind kind = PathKind::Sketch;
    std::vector<Vec3> points;             // 4 (sketch) or 12 (iconography)
    std::array<double, 4> color{0.0, 0.0, 0.0, 1.0};
    double stroke_width = 1.5;            // pixels at the 512px reference resolution

    int curve_count() const { return kind == PathKind::Sketch ? 1 : 4; }
    BezierCurve3D curve(int j) const;

    static Path3D sketch(const std::array<Vec3, 4>& pts,
                         const std::array<double, 4>& color = {0, 0, 0, 1},
                         double stroke_width = 1.5);
    // Builds the shared-joint representation from four explicit curves.
    // Throws IngestError unless curve j's endpoint equals curve (j+1)%4's
    // start, coordinate-exact.
    static Path3D iconography(const std::array<BezierCurve3D, 4>& curves,
                              const std::array<double, 4>& color = {0, 0, 0, 1});
};

struct Scene3DVG {
    std::vector<Path3D> paths;

    int path_count() const { return static_cast<int>(paths.size()); }
    int curve_count() const;
    // Flattened curve index across paths, in path-major order.
    BezierCurve3D curve(int flat_index) const;
    std::pair<int, int> curve_location(int flat_index) const;  // (path, curve)
};

struct Violation {
    int path_index = -1;
    int joint_index = -1;  // joint between curve j and j+1, -1 if n/a
    std::string message;
};

// Structural checks on an in-memory scene: per-kind curve counts, uniform
// kind across paths, color ranges, finite coordinates, positive width.
// Violations are data, not errors.
std::vector<Violation> validate_scene(const Scene3DVG& scene);

}  // namespace c3vg
