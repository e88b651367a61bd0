#include "curve3dvg/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "curve3dvg/errors.hpp"

namespace c3vg {

BezierCurve3D Path3D::curve(int j) const {
    if (kind == PathKind::Sketch) {
        if (j != 0) throw std::out_of_range("sketch path has a single curve");
        return BezierCurve3D{{points[0], points[1], points[2], points[3]}};
    }
    if (j < 0 || j >= 4) throw std::out_of_range("iconography curve index out of range");
    const int base = 3 * j;
    return BezierCurve3D{{points[base], points[base + 1], points[base + 2],
                          points[(base + 3) % 12]}};
}

Path3D Path3D::sketch(const std::array<Vec3, 4>& pts, const std::array<double, 4>& color,
                      double stroke_width) {
    Path3D p;
    p.kind = PathKind::Sketch;
    p.points.assign(pts.begin(), pts.end());
    p.color = color;
    p.stroke_width = stroke_width;
    return p;
}

Path3D Path3D::iconography(const std::array<BezierCurve3D, 4>& curves,
                           const std::array<double, 4>& color) {
    for (int j = 0; j < 4; ++j) {
        const Vec3 end = curves[j].points[3];
        const Vec3 start = curves[(j + 1) % 4].points[0];
        if (end.x != start.x || end.y != start.y || end.z != start.z) {
            throw IngestError("iconography curves do not share joint " + std::to_string(j),
                              "");
        }
    }
    Path3D p;
    p.kind = PathKind::Iconography;
    p.points.reserve(12);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 3; ++i) p.points.push_back(curves[j].points[i]);
    p.color = color;
    p.stroke_width = 1.5;
    return p;
}

int Scene3DVG::curve_count() const {
    int n = 0;
    for (const Path3D& p : paths) n += p.curve_count();
    return n;
}

BezierCurve3D Scene3DVG::curve(int flat_index) const {
    auto [pi, ci] = curve_location(flat_index);
    return paths[pi].curve(ci);
}

std::pair<int, int> Scene3DVG::curve_location(int flat_index) const {
    int remaining = flat_index;
    for (int pi = 0; pi < path_count(); ++pi) {
        const int n = paths[pi].curve_count();
        if (remaining < n) return {pi, remaining};
        remaining -= n;
    }
    throw std::out_of_range("flat curve index out of range");
}

namespace {

bool finite_vec(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

}  // namespace

std::vector<Violation> validate_scene(const Scene3DVG& scene) {
    std::vector<Violation> out;
    for (int pi = 0; pi < scene.path_count(); ++pi) {
        const Path3D& p = scene.paths[pi];
        const int expect = p.kind == PathKind::Sketch ? 4 : 12;
        if (static_cast<int>(p.points.size()) != expect) {
            out.push_back({pi, -1,
                           "path " + std::to_string(pi) + " has " +
                               std::to_string(p.points.size()) + " control points, expected " +
                               std::to_string(expect)});
            continue;
        }
        if (pi > 0 && p.kind != scene.paths[0].kind)
            out.push_back({pi, -1, "path " + std::to_string(pi) + " mixes path kinds"});
        for (int k = 0; k < expect; ++k) {
            if (!finite_vec(p.points[k])) {
                out.push_back({pi, -1,
                               "path " + std::to_string(pi) + " control point " +
                                   std::to_string(k) + " is not finite"});
                break;
            }
        }
        for (int c = 0; c < 4; ++c) {
            if (!(p.color[c] >= 0.0 && p.color[c] <= 1.0)) {
                out.push_back({pi, -1,
                               "path " + std::to_string(pi) + " color channel " +
                                   std::to_string(c) + " outside [0,1]"});
                break;
            }
        }
        if (!(p.stroke_width > 0.0) || !std::isfinite(p.stroke_width))
            out.push_back({pi, -1, "path " + std::to_string(pi) + " stroke width not positive"});
    }
    return out;
}

}  // namespace c3vg
