#include "curve3dvg/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "curve3dvg/errors.hpp"
#include "curve3dvg/parallel.hpp"
#include "curve3dvg/project.hpp"

namespace c3vg {

Cubic2D FillElement::curve(int j) const {
    if (j < 0 || j >= 4) throw std::out_of_range("fill curve index out of range");
    const int base = 3 * j;
    return Cubic2D{{points[base], points[base + 1], points[base + 2],
                    points[(base + 3) % 12]}};
}

namespace {

// Soft coverage band, in device pixels. u = 0.5 at the nominal edge.
double smoothstep01(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * (3.0 - 2.0 * u);
}

double smoothstep01_deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 6.0 * u * (1.0 - u);
}

constexpr int kMaxStrokeSegments = 64;
constexpr double kFlatnessTolPx = 0.25;
// Rounds the |distance| corner where a pixel center sits exactly on the
// stroke spine.  The unsigned point-to-curve distance is not differentiable
// at zero, which shows up as gradient jumps for strokes narrower than a
// pixel; sqrt(d^2 + eps^2) is smooth everywhere and shifts the antialiased
// edge band by under eps^2 / (2 * halfwidth), far below a hundredth of a
// pixel for practical widths.
constexpr double kSpineSoftPx = 0.1;
constexpr int kFillSegmentsPerCurve = 64;  // fixed so sign and distance agree
constexpr double kBBoxMarginPx = 1.5;

// Normalized [-1,1]-on-shorter-axis coordinates to device pixels; y flips so
// +y in scene space points up the image.
struct DeviceMap {
    double s;
    double cx;
    double cy;
    Vec2 to_device(const Vec2& p) const { return {cx + p.x * s, cy - p.y * s}; }
    Vec2 grad_to_scene(const Vec2& g_dev) const { return {g_dev.x * s, -g_dev.y * s}; }
};

DeviceMap device_map(const Canvas& canvas) {
    return {0.5 * std::min(canvas.width, canvas.height), 0.5 * canvas.width,
            0.5 * canvas.height};
}

double width_scale(const Canvas& canvas) {
    return std::min(canvas.width, canvas.height) / 512.0;
}

struct PixelRect {
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;  // inclusive; empty when x1 < x0
    bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

PixelRect make_rect(double minx, double miny, double maxx, double maxy, double inflate,
                    const Canvas& canvas) {
    PixelRect r;
    r.x0 = std::max(0, static_cast<int>(std::floor(minx - inflate)));
    r.y0 = std::max(0, static_cast<int>(std::floor(miny - inflate)));
    r.x1 = std::min(canvas.width - 1, static_cast<int>(std::ceil(maxx + inflate)));
    r.y1 = std::min(canvas.height - 1, static_cast<int>(std::ceil(maxy + inflate)));
    return r;
}

double point_segment_dist2(const Vec2& p, const Vec2& a, const Vec2& b, double& s_out) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double s = 0.0;
    if (len2 > 0.0) s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    s_out = s;
    const Vec2 foot = a + s * ab;
    const Vec2 d = p - foot;
    return dot(d, d);
}

struct PreparedStroke {
    Cubic2D dev;
    std::vector<Vec2> poly;  // adaptive polyline, n+1 vertices
    double halfw = 0.0;      // device half width
    PixelRect rect;
};

struct PreparedFill {
    std::array<Vec2, 12> dev;
    // kFillSegmentsPerCurve + 1 vertices per cubic at fixed t = k/n.
    std::array<std::vector<Vec2>, 4> poly;
    struct Row {
        std::vector<double> xs;      // sorted crossing positions
        std::vector<int> winding;    // winding[i] = winding left of xs[i]; size xs+1
    };
    std::vector<Row> rows;           // rows rect.y0..rect.y1
    PixelRect rect;
};

int adaptive_segments(const Cubic2D& dev) {
    const Vec2 d1 = dev.points[0] - 2.0 * dev.points[1] + dev.points[2];
    const Vec2 d2 = dev.points[1] - 2.0 * dev.points[2] + dev.points[3];
    const double m = std::max(d1.norm(), d2.norm());
    const int n = static_cast<int>(std::ceil(std::sqrt(0.75 * m / kFlatnessTolPx)));
    return std::clamp(n, 1, kMaxStrokeSegments);
}

std::vector<Vec2> sample_polyline(const Cubic2D& dev, int n) {
    std::vector<Vec2> out;
    out.reserve(n + 1);
    for (int k = 0; k <= n; ++k) out.push_back(eval_cubic2d(dev, double(k) / double(n)));
    return out;
}

// Bernstein basis at the fixed fill-polyline parameters.
const std::array<std::array<double, 4>, kFillSegmentsPerCurve + 1>& fill_basis_table() {
    static const auto table = [] {
        std::array<std::array<double, 4>, kFillSegmentsPerCurve + 1> t{};
        for (int k = 0; k <= kFillSegmentsPerCurve; ++k)
            t[k] = bernstein_weights(double(k) / double(kFillSegmentsPerCurve));
        return t;
    }();
    return table;
}

PreparedStroke prepare_stroke(const StrokeElement& e, const Canvas& canvas,
                              const DeviceMap& map) {
    PreparedStroke p;
    for (int i = 0; i < 4; ++i) p.dev.points[i] = map.to_device(e.curve.points[i]);
    p.poly = sample_polyline(p.dev, adaptive_segments(p.dev));
    p.halfw = 0.5 * e.width_ref * width_scale(canvas);
    double minx = p.dev.points[0].x, maxx = minx, miny = p.dev.points[0].y, maxy = miny;
    for (int i = 1; i < 4; ++i) {
        minx = std::min(minx, p.dev.points[i].x);
        maxx = std::max(maxx, p.dev.points[i].x);
        miny = std::min(miny, p.dev.points[i].y);
        maxy = std::max(maxy, p.dev.points[i].y);
    }
    p.rect = make_rect(minx, miny, maxx, maxy, p.halfw + kBBoxMarginPx, canvas);
    return p;
}

PreparedFill prepare_fill(const FillElement& e, const Canvas& canvas, const DeviceMap& map) {
    PreparedFill p;
    for (int i = 0; i < 12; ++i) p.dev[i] = map.to_device(e.points[i]);
    for (int j = 0; j < 4; ++j) {
        const int base = 3 * j;
        const Cubic2D dev_curve{{p.dev[base], p.dev[base + 1], p.dev[base + 2],
                                 p.dev[(base + 3) % 12]}};
        p.poly[j] = sample_polyline(dev_curve, kFillSegmentsPerCurve);
    }
    double minx = p.dev[0].x, maxx = minx, miny = p.dev[0].y, maxy = miny;
    for (int i = 1; i < 12; ++i) {
        minx = std::min(minx, p.dev[i].x);
        maxx = std::max(maxx, p.dev[i].x);
        miny = std::min(miny, p.dev[i].y);
        maxy = std::max(maxy, p.dev[i].y);
    }
    p.rect = make_rect(minx, miny, maxx, maxy, kBBoxMarginPx, canvas);

    // Scanline winding table over the closed loop polyline (half-open in y so
    // joints are counted once).
    if (p.rect.x1 >= p.rect.x0 && p.rect.y1 >= p.rect.y0) {
        p.rows.resize(p.rect.y1 - p.rect.y0 + 1);
        std::vector<Vec2> loop;
        loop.reserve(4 * kFillSegmentsPerCurve);
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < kFillSegmentsPerCurve; ++k) loop.push_back(p.poly[j][k]);
        const std::size_t n = loop.size();
        for (int y = p.rect.y0; y <= p.rect.y1; ++y) {
            const double yc = y + 0.5;
            std::vector<std::pair<double, int>> crossings;
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2& a = loop[i];
                const Vec2& b = loop[(i + 1) % n];
                const bool below_a = a.y <= yc;
                const bool below_b = b.y <= yc;
                if (below_a == below_b) continue;
                const double x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
                crossings.emplace_back(x, below_a ? 1 : -1);
            }
            std::sort(crossings.begin(), crossings.end());
            PreparedFill::Row& row = p.rows[y - p.rect.y0];
            row.xs.reserve(crossings.size());
            row.winding.reserve(crossings.size() + 1);
            row.winding.push_back(0);
            for (const auto& [x, dir] : crossings) {
                row.xs.push_back(x);
                row.winding.push_back(row.winding.back() + dir);
            }
        }
    }
    return p;
}

bool fill_inside(const PreparedFill& p, int px, int py, double xc) {
    if (py < p.rect.y0 || py > p.rect.y1) return false;
    const PreparedFill::Row& row = p.rows[py - p.rect.y0];
    const auto it = std::upper_bound(row.xs.begin(), row.xs.end(), xc);
    return row.winding[it - row.xs.begin()] != 0;
}

// Everything backward needs about one pixel-element interaction.
struct CovDetail {
    double cov = 0.0;
    double u = 0.0;       // smoothstep input, pre-clamp
    double dist = 0.0;
    Vec2 normal{0.0, 0.0};  // (pixel - foot) / dist, device coords
    double t_star = 0.0;  // strokes: curve parameter of the foot
    double soft_ratio = 1.0;  // strokes: d(dist_soft)/d(dist) = dist / dist_soft
    int curve_j = 0;      // fills: cubic owning the foot
    int seg_k = 0;        // fills: polyline segment of the foot
    double seg_s = 0.0;   // fills: foot parameter within the segment
    double sign = 1.0;    // fills: +1 outside, -1 inside
};

// Refine a nearest-point candidate on the exact device cubic.  The returned
// parameter must be a genuine local minimum (or a clamped endpoint): the
// backward pass differentiates the distance through the foot alone, which is
// only exact when the residual tangent term vanishes.  Plain Newton on the
// stationarity condition can walk toward a distance *maximum* on S-shaped
// curves, so damp it with a decrease-only line search and iterate to
// convergence.
double refine_nearest_t(const Cubic2D& dev, const Vec2& px, double t0,
                        double fallback_step) {
    double t = t0;
    double best_sq = [&] {
        const Vec2 d0 = eval_cubic2d(dev, t) - px;
        return dot(d0, d0);
    }();
    for (int iter = 0; iter < 16; ++iter) {
        const Vec2 diff = eval_cubic2d(dev, t) - px;
        const Vec2 d1 = eval_cubic2d_deriv(dev, t);
        const Vec2 d2v = eval_cubic2d_deriv2(dev, t);
        const double g1 = 2.0 * dot(diff, d1);
        const double g2 = 2.0 * (dot(d1, d1) + dot(diff, d2v));
        double step = (g2 > 1e-12) ? -g1 / g2
                                   : (g1 > 0.0 ? -fallback_step : fallback_step);
        double t_next = t;
        double sq_next = best_sq;
        for (int back = 0; back < 6; ++back) {
            const double cand = std::clamp(t + step, 0.0, 1.0);
            const Vec2 cd = eval_cubic2d(dev, cand) - px;
            const double cand_sq = dot(cd, cd);
            if (cand_sq <= best_sq) {
                t_next = cand;
                sq_next = cand_sq;
                break;
            }
            step *= 0.5;
        }
        if (std::abs(t_next - t) < 1e-12) break;
        t = t_next;
        best_sq = sq_next;
    }
    return t;
}

CovDetail stroke_detail(const PreparedStroke& p, const Vec2& px) {
    // Every locally nearest polyline segment seeds a refinement and the best
    // refined foot wins.  Refining all candidate branches (not just the
    // globally nearest segment) keeps the distance continuous in the control
    // points: a min of smooth per-branch distances stays continuous when the
    // winning branch changes, whereas a single seed snaps between branches
    // and jumps by the polyline flatness error.
    const int n = static_cast<int>(p.poly.size()) - 1;
    std::array<double, kMaxStrokeSegments> seg_d2{};
    std::array<double, kMaxStrokeSegments> seg_s{};
    for (int k = 0; k < n; ++k)
        seg_d2[k] = point_segment_dist2(px, p.poly[k], p.poly[k + 1], seg_s[k]);

    CovDetail det;
    double best_dist = std::numeric_limits<double>::max();
    for (int k = 0; k < n; ++k) {
        const bool left_ok = (k == 0) || seg_d2[k] <= seg_d2[k - 1];
        const bool right_ok = (k == n - 1) || seg_d2[k] < seg_d2[k + 1];
        if (!left_ok || !right_ok) continue;
        const double t = refine_nearest_t(p.dev, px, (k + seg_s[k]) / n, 1.0 / n);
        const Vec2 foot = eval_cubic2d(p.dev, t);
        const Vec2 d = px - foot;
        const double dist = d.norm();
        if (dist < best_dist) {
            best_dist = dist;
            det.t_star = t;
            det.dist = dist;
            det.normal = dist > 1e-12 ? (1.0 / dist) * d : Vec2{0.0, 0.0};
        }
    }
    const double dist_soft =
        std::sqrt(det.dist * det.dist + kSpineSoftPx * kSpineSoftPx);
    det.soft_ratio = det.dist / dist_soft;
    det.u = p.halfw - dist_soft + 0.5;
    det.cov = smoothstep01(det.u);
    return det;
}

CovDetail fill_detail(const PreparedFill& p, const Vec2& px, int ix, int iy) {
    // Distance and inside test both use the same fixed polyline, keeping the
    // signed field continuous under parameter perturbations.
    CovDetail det;
    double best_d2 = std::numeric_limits<double>::max();
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < kFillSegmentsPerCurve; ++k) {
            double s;
            const double d2 = point_segment_dist2(px, p.poly[j][k], p.poly[j][k + 1], s);
            if (d2 < best_d2) {
                best_d2 = d2;
                det.curve_j = j;
                det.seg_k = k;
                det.seg_s = s;
            }
        }
    }
    det.dist = std::sqrt(best_d2);
    const Vec2 foot = p.poly[det.curve_j][det.seg_k] +
                      det.seg_s * (p.poly[det.curve_j][det.seg_k + 1] -
                                   p.poly[det.curve_j][det.seg_k]);
    const Vec2 d = px - foot;
    if (det.dist > 1e-12) det.normal = (1.0 / det.dist) * d;
    det.sign = fill_inside(p, ix, iy, px.x) ? -1.0 : 1.0;
    det.u = 0.5 - det.sign * det.dist;
    det.cov = smoothstep01(det.u);
    return det;
}

void check_canvas(const Canvas& canvas) {
    if (canvas.width < 16 || canvas.height < 16)
        throw std::invalid_argument("canvas must be at least 16x16");
}

}  // namespace

double curve_coverage(const StrokeElement& e, const Canvas& canvas, const Vec2& pixel_px) {
    check_canvas(canvas);
    const PreparedStroke p = prepare_stroke(e, canvas, device_map(canvas));
    return stroke_detail(p, pixel_px).cov;
}

double curve_coverage(const FillElement& e, const Canvas& canvas, const Vec2& pixel_px) {
    check_canvas(canvas);
    PreparedFill p = prepare_fill(e, canvas, device_map(canvas));
    const int ix = static_cast<int>(std::floor(pixel_px.x));
    const int iy = static_cast<int>(std::floor(pixel_px.y));
    return fill_detail(p, pixel_px, ix, iy).cov;
}

struct Rasterizer::Impl {
    Scene2D scene;
    Canvas canvas;
    DeviceMap map;
    std::vector<int> order;  // element indices, far first
    std::vector<PreparedStroke> strokes;
    std::vector<PreparedFill> fills;
    std::vector<int> prep_of_element;
    Image image;
    bool forward_done = false;

    const PixelRect& rect_of(int elem) const {
        if (std::holds_alternative<StrokeElement>(scene.elements[elem]))
            return strokes[prep_of_element[elem]].rect;
        return fills[prep_of_element[elem]].rect;
    }
};

Rasterizer::Rasterizer(Scene2D scene, Canvas canvas) : impl_(std::make_unique<Impl>()) {
    check_canvas(canvas);
    impl_->scene = std::move(scene);
    impl_->canvas = canvas;
    impl_->map = device_map(canvas);

    const std::size_t n = impl_->scene.elements.size();
    impl_->prep_of_element.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (const auto* s = std::get_if<StrokeElement>(&impl_->scene.elements[i])) {
            impl_->prep_of_element[i] = static_cast<int>(impl_->strokes.size());
            impl_->strokes.push_back(prepare_stroke(*s, canvas, impl_->map));
        } else {
            const auto& f = std::get<FillElement>(impl_->scene.elements[i]);
            impl_->prep_of_element[i] = static_cast<int>(impl_->fills.size());
            impl_->fills.push_back(prepare_fill(f, canvas, impl_->map));
        }
    }
    impl_->order.resize(n);
    std::iota(impl_->order.begin(), impl_->order.end(), 0);
    std::stable_sort(impl_->order.begin(), impl_->order.end(), [this](int a, int b) {
        const auto key = [this](int i) {
            return std::visit([](const auto& e) { return e.depth_key; },
                              impl_->scene.elements[i]);
        };
        return key(a) > key(b);
    });
}

Rasterizer::~Rasterizer() = default;
Rasterizer::Rasterizer(Rasterizer&&) noexcept = default;
Rasterizer& Rasterizer::operator=(Rasterizer&&) noexcept = default;

const Scene2D& Rasterizer::scene() const { return impl_->scene; }
const Canvas& Rasterizer::canvas() const { return impl_->canvas; }

namespace {

struct Hit {
    int elem;
    CovDetail det;
    double alpha;
};

}  // namespace

const Image& Rasterizer::forward() {
    Impl& im = *impl_;
    const int W = im.canvas.width, H = im.canvas.height;
    im.image = Image(W, H, 4);

    parallel_chunks(static_cast<std::size_t>(H), [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (int x = 0; x < W; ++x) {
                const Vec2 pc{x + 0.5, static_cast<double>(y) + 0.5};
                double rgb[3] = {im.canvas.background[0], im.canvas.background[1],
                                 im.canvas.background[2]};
                for (int elem : im.order) {
                    if (!im.rect_of(elem).contains(x, static_cast<int>(y))) continue;
                    double cov, alpha_color, opacity;
                    const double* color;
                    if (const auto* s = std::get_if<StrokeElement>(&im.scene.elements[elem])) {
                        cov = stroke_detail(im.strokes[im.prep_of_element[elem]], pc).cov;
                        color = s->color.data();
                        alpha_color = s->color[3];
                        opacity = s->opacity;
                    } else {
                        const auto& f = std::get<FillElement>(im.scene.elements[elem]);
                        cov = fill_detail(im.fills[im.prep_of_element[elem]], pc, x,
                                          static_cast<int>(y))
                                  .cov;
                        color = f.color.data();
                        alpha_color = f.color[3];
                        opacity = f.opacity;
                    }
                    const double a = alpha_color * opacity * cov;
                    if (a <= 0.0) continue;
                    for (int c = 0; c < 3; ++c) rgb[c] = rgb[c] * (1.0 - a) + color[c] * a;
                }
                for (int c = 0; c < 3; ++c) im.image.at(x, static_cast<int>(y), c) = rgb[c];
                im.image.at(x, static_cast<int>(y), 3) = 1.0;
            }
        }
    });
    im.forward_done = true;
    return im.image;
}

ParamGrads Rasterizer::backward(const Image& image_gradient) {
    Impl& im = *impl_;
    if (!im.forward_done) throw std::logic_error("backward requires a prior forward pass");
    const int W = im.canvas.width, H = im.canvas.height;
    if (image_gradient.width != W || image_gradient.height != H ||
        image_gradient.channels != 4)
        throw std::invalid_argument("image_gradient shape mismatch");

    const std::size_t n_elem = im.scene.elements.size();
    const auto make_zero = [&] {
        ParamGrads g(n_elem);
        for (std::size_t i = 0; i < n_elem; ++i)
            g[i].d_points.assign(
                std::holds_alternative<StrokeElement>(im.scene.elements[i]) ? 4 : 12,
                Vec2{0.0, 0.0});
        return g;
    };

    const int chunks = chunk_count(static_cast<std::size_t>(H));
    std::vector<ParamGrads> partial(static_cast<std::size_t>(std::max(chunks, 1)));
    for (auto& p : partial) p = make_zero();

    const double wscale = width_scale(im.canvas);
    const auto& basis = fill_basis_table();

    parallel_indexed_chunks(
        static_cast<std::size_t>(H), [&](int chunk, std::size_t y0, std::size_t y1) {
            ParamGrads& grads = partial[chunk];
            std::vector<Hit> hits;
            std::vector<std::array<double, 3>> prefix;  // color before each hit
            for (std::size_t y = y0; y < y1; ++y) {
                for (int x = 0; x < W; ++x) {
                    const int iy = static_cast<int>(y);
                    double g[3];
                    bool any = false;
                    for (int c = 0; c < 3; ++c) {
                        g[c] = image_gradient.at(x, iy, c);
                        any = any || g[c] != 0.0;
                    }
                    if (!any) continue;
                    const Vec2 pc{x + 0.5, y + 0.5};

                    hits.clear();
                    prefix.clear();
                    std::array<double, 3> rgb{im.canvas.background[0],
                                              im.canvas.background[1],
                                              im.canvas.background[2]};
                    for (int elem : im.order) {
                        if (!im.rect_of(elem).contains(x, iy)) continue;
                        CovDetail det;
                        double alpha_color, opacity;
                        const double* color;
                        if (const auto* s =
                                std::get_if<StrokeElement>(&im.scene.elements[elem])) {
                            det = stroke_detail(im.strokes[im.prep_of_element[elem]], pc);
                            color = s->color.data();
                            alpha_color = s->color[3];
                            opacity = s->opacity;
                        } else {
                            const auto& f = std::get<FillElement>(im.scene.elements[elem]);
                            det = fill_detail(im.fills[im.prep_of_element[elem]], pc, x, iy);
                            color = f.color.data();
                            alpha_color = f.color[3];
                            opacity = f.opacity;
                        }
                        if (det.cov <= 0.0 && smoothstep01_deriv(det.u) == 0.0) continue;
                        const double a = alpha_color * opacity * det.cov;
                        prefix.push_back(rgb);
                        hits.push_back(Hit{elem, det, a});
                        for (int c = 0; c < 3; ++c)
                            rgb[c] = rgb[c] * (1.0 - a) + color[c] * a;
                    }

                    double trans = 1.0;  // product of (1 - a) over nearer hits
                    for (int k = static_cast<int>(hits.size()) - 1; k >= 0; --k) {
                        const Hit& h = hits[k];
                        ElementGrads& eg = grads[h.elem];
                        double alpha_color, opacity;
                        const double* color;
                        const bool is_stroke =
                            std::holds_alternative<StrokeElement>(im.scene.elements[h.elem]);
                        if (is_stroke) {
                            const auto& s = std::get<StrokeElement>(im.scene.elements[h.elem]);
                            color = s.color.data();
                            alpha_color = s.color[3];
                            opacity = s.opacity;
                        } else {
                            const auto& f = std::get<FillElement>(im.scene.elements[h.elem]);
                            color = f.color.data();
                            alpha_color = f.color[3];
                            opacity = f.opacity;
                        }

                        double dL_da = 0.0;
                        for (int c = 0; c < 3; ++c) {
                            dL_da += g[c] * trans * (color[c] - prefix[k][c]);
                            eg.d_color[c] += g[c] * trans * h.alpha;
                        }
                        eg.d_color[3] += dL_da * opacity * h.det.cov;
                        eg.d_opacity += dL_da * alpha_color * h.det.cov;
                        const double dL_dcov = dL_da * alpha_color * opacity;
                        const double gu = dL_dcov * smoothstep01_deriv(h.det.u);
                        if (gu != 0.0) {
                            if (is_stroke) {
                                // u = halfw - dist_soft + 0.5, with
                                // d(dist_soft)/d(dist) = soft_ratio and
                                // halfw = width_ref * wscale / 2.
                                eg.d_width += gu * 0.5 * wscale;
                                if (h.det.dist > 1e-12) {
                                    const std::array<double, 4> b =
                                        bernstein_weights(h.det.t_star);
                                    const double gd = gu * h.det.soft_ratio;
                                    for (int i = 0; i < 4; ++i) {
                                        const Vec2 g_dev = (gd * b[i]) * h.det.normal;
                                        eg.d_points[i] += im.map.grad_to_scene(g_dev);
                                    }
                                }
                            } else if (h.det.dist > 1e-12) {
                                // u = 0.5 - sign * dist, and the distance to
                                // the foot falls as the vertex moves toward
                                // the pixel: d(dist)/d(vertex) = -w * normal.
                                const double dL_ddist = -gu * h.det.sign;
                                const int j = h.det.curve_j;
                                const double sw[2] = {1.0 - h.det.seg_s, h.det.seg_s};
                                for (int v = 0; v < 2; ++v) {
                                    const int kv = h.det.seg_k + v;
                                    const std::array<double, 4>& bw = basis[kv];
                                    const Vec2 g_dev =
                                        (-dL_ddist * sw[v]) * h.det.normal;
                                    for (int i = 0; i < 4; ++i) {
                                        const Vec2 gd = bw[i] * g_dev;
                                        eg.d_points[(3 * j + i) % 12] +=
                                            im.map.grad_to_scene(gd);
                                    }
                                }
                            }
                        }
                        trans *= 1.0 - h.alpha;
                    }
                }
            }
        });

    ParamGrads total = std::move(partial[0]);
    for (std::size_t c = 1; c < partial.size(); ++c) {
        for (std::size_t i = 0; i < n_elem; ++i) {
            for (std::size_t p = 0; p < total[i].d_points.size(); ++p)
                total[i].d_points[p] += partial[c][i].d_points[p];
            total[i].d_width += partial[c][i].d_width;
            for (int ch = 0; ch < 4; ++ch) total[i].d_color[ch] += partial[c][i].d_color[ch];
            total[i].d_opacity += partial[c][i].d_opacity;
        }
    }
    return total;
}

RenderOutput render_view(const Scene2D& scene, const Canvas& canvas) {
    Rasterizer r(scene, canvas);
    RenderOutput out;
    out.image = r.forward();
    return out;
}

Scene2D project_scene(const Scene3DVG& scene, const Camera& camera,
                      const std::vector<double>& opacities,
                      std::vector<int>* skipped_paths) {
    if (!opacities.empty() &&
        opacities.size() != static_cast<std::size_t>(scene.path_count()))
        throw std::invalid_argument("opacities must have one entry per path");
    Scene2D out;
    for (int pi = 0; pi < scene.path_count(); ++pi) {
        const Path3D& path = scene.paths[pi];
        const double opacity = opacities.empty() ? 1.0 : opacities[pi];
        try {
            if (path.kind == PathKind::Sketch) {
                const RationalBezier2D rb = project_curve(camera, path.curve(0));
                StrokeElement e;
                e.curve = approx_cubic(rb);
                e.width_ref = path.stroke_width;
                e.color = path.color;
                e.opacity = opacity;
                double depth = 0.0;
                for (int i = 0; i < 4; ++i) depth += rb.control[i].d_z;
                e.depth_key = depth / 4.0;
                e.path_index = pi;
                e.curve_index = 0;
                out.elements.emplace_back(e);
            } else {
                FillElement e;
                double depth = 0.0;
                for (int i = 0; i < 12; ++i) {
                    const ProjectedPoint pp = project_point(camera, path.points[i]);
                    e.points[i] = pp.d_xy;
                    depth += pp.d_z;
                }
                e.color = path.color;
                e.opacity = opacity;
                e.depth_key = depth / 12.0;
                e.path_index = pi;
                out.elements.emplace_back(e);
            }
        } catch (const BehindCameraError&) {
            if (!skipped_paths) throw;
            skipped_paths->push_back(pi);
        }
    }
    return out;
}

}  // namespace c3vg
