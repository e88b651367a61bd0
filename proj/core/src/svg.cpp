#include "curve3dvg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <variant>

namespace c3vg {

namespace {

constexpr double kInvisibleOpacity = 0.2;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string hex_color(const std::array<double, 4>& color) {
    char buf[8];
    const auto q = [](double v) {
        return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    };
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", q(color[0]), q(color[1]), q(color[2]));
    return buf;
}

struct Mapper {
    double s, cx, cy;
    std::string pt(const Vec2& p) const {
        return fmt(cx + p.x * s) + " " + fmt(cy - p.y * s);
    }
};

std::string cubic_cmd(const Mapper& m, const Cubic2D& c) {
    return "C " + m.pt(c.points[1]) + ", " + m.pt(c.points[2]) + ", " + m.pt(c.points[3]);
}

}  // namespace

std::string export_svg(const Scene2D& scene, const Canvas& canvas,
                       const std::vector<bool>& visible) {
    const Mapper m{0.5 * std::min(canvas.width, canvas.height), 0.5 * canvas.width,
                   0.5 * canvas.height};
    const double wscale = std::min(canvas.width, canvas.height) / 512.0;

    std::vector<int> order(scene.elements.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&scene](int a, int b) {
        const auto key = [&scene](int i) {
            return std::visit([](const auto& e) { return e.depth_key; }, scene.elements[i]);
        };
        return key(a) > key(b);
    });

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas.width
        << "\" height=\"" << canvas.height << "\" viewBox=\"0 0 " << canvas.width << " "
        << canvas.height << "\">\n"
        << "  <rect width=\"" << canvas.width << "\" height=\"" << canvas.height
        << "\" fill=\"" << hex_color({canvas.background[0], canvas.background[1],
                                      canvas.background[2], 1.0})
        << "\"/>\n";

    for (int idx : order) {
        const bool is_visible =
            visible.empty() || static_cast<std::size_t>(idx) >= visible.size() ||
            visible[static_cast<std::size_t>(idx)];
        if (const auto* s = std::get_if<StrokeElement>(&scene.elements[idx])) {
            const double opacity =
                is_visible ? s->color[3] * s->opacity : kInvisibleOpacity;
            out << "  <path d=\"M " << m.pt(s->curve.points[0]) << " "
                << cubic_cmd(m, s->curve) << "\" fill=\"none\" stroke=\""
                << hex_color(s->color) << "\" stroke-width=\""
                << fmt(s->width_ref * wscale) << "\" stroke-opacity=\"" << fmt(opacity)
                << "\" stroke-linecap=\"round\"/>\n";
        } else {
            const auto& f = std::get<FillElement>(scene.elements[idx]);
            const double opacity =
                is_visible ? f.color[3] * f.opacity : kInvisibleOpacity;
            out << "  <path d=\"M " << m.pt(f.points[0]);
            for (int j = 0; j < 4; ++j) out << " " << cubic_cmd(m, f.curve(j));
            out << " Z\" fill=\"" << hex_color(f.color) << "\" fill-opacity=\""
                << fmt(opacity) << "\" fill-rule=\"nonzero\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace c3vg
