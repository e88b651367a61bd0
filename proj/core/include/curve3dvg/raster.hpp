#pragma once

#include <array>
#include <memory>
#include <variant>
#include <vector>

#include "curve3dvg/camera.hpp"
#include "curve3dvg/geometry.hpp"
#include "curve3dvg/image.hpp"
#include "curve3dvg/scene.hpp"

namespace c3vg {

// Output raster target. Normalized scene coordinates span [-1, 1] across the
// shorter axis; stroke widths given at the 512px reference scale with
// min(width, height) / 512.
struct Canvas {
    int width = 512;
    int height = 512;
    std::array<double, 3> background{1.0, 1.0, 1.0};
};

// An open stroked cubic in normalized coordinates.
struct StrokeElement {
    Cubic2D curve;
    double width_ref = 1.5;  // pixels at the 512px reference resolution
    std::array<double, 4> color{0.0, 0.0, 0.0, 1.0};
    double opacity = 1.0;    // visibility multiplier on color alpha
    double depth_key = 0.0;  // mean control-point depth of the source path
    int path_index = -1;
    int curve_index = 0;
};

// A closed loop of four end-connected cubics, filled by the nonzero winding
// rule. Stored in the shared-joint layout of Path3D: curve j runs through
// points[3j], [3j+1], [3j+2], [(3j+3) % 12].
struct FillElement {
    std::array<Vec2, 12> points;
    std::array<double, 4> color{0.0, 0.0, 0.0, 1.0};
    double opacity = 1.0;
    double depth_key = 0.0;
    int path_index = -1;

    Cubic2D curve(int j) const;
};

using Element2D = std::variant<StrokeElement, FillElement>;

struct Scene2D {
    std::vector<Element2D> elements;
};

// Gradients for one element; d_points has 4 entries for strokes, 12 for
// fills, in normalized coordinates.
struct ElementGrads {
    std::vector<Vec2> d_points;
    double d_width = 0.0;  // strokes only, w.r.t. width_ref
    std::array<double, 4> d_color{0.0, 0.0, 0.0, 0.0};
    double d_opacity = 0.0;
};

using ParamGrads = std::vector<ElementGrads>;

struct RenderOutput {
    Image image;               // H x W x 4, values in [0,1]
    ParamGrads param_gradients;  // empty until backward runs
};

// Soft coverage of one pixel (device coordinates, e.g. center (x+0.5, y+0.5))
// by one element: smoothstep over a 1-pixel band of (half width - distance)
// for strokes, of the signed boundary distance for fills.
double curve_coverage(const StrokeElement& e, const Canvas& canvas, const Vec2& pixel_px);
double curve_coverage(const FillElement& e, const Canvas& canvas, const Vec2& pixel_px);

// Forward + backward rasterizer. forward() composites elements far-to-near
// (descending depth_key) over the background; backward() propagates an image
// gradient to every element parameter. The depth order is treated as a
// constant of the step.
class Rasterizer {
public:
    Rasterizer(Scene2D scene, Canvas canvas);
    ~Rasterizer();
    Rasterizer(Rasterizer&&) noexcept;
    Rasterizer& operator=(Rasterizer&&) noexcept;

    const Image& forward();
    // Requires a prior forward(); image_gradient must be H x W x 4.
    ParamGrads backward(const Image& image_gradient);

    const Scene2D& scene() const;
    const Canvas& canvas() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Forward-only convenience wrapper.
RenderOutput render_view(const Scene2D& scene, const Canvas& canvas);

// Projects a 3D scene into a Scene2D for one view. opacities holds one
// multiplier per path (empty = all 1.0). Paths with any control point behind
// the camera raise BehindCameraError unless skipped_paths is given, in which
// case they are dropped and their indices recorded.
Scene2D project_scene(const Scene3DVG& scene, const Camera& camera,
                      const std::vector<double>& opacities = {},
                      std::vector<int>* skipped_paths = nullptr);

}  // namespace c3vg
