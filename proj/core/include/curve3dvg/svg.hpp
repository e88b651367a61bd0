#pragma once

#include <string>
#include <vector>

#include "curve3dvg/raster.hpp"

namespace c3vg {

// SVG 1.1 document with one <path> per scene element, painted far-to-near to
// match the rasterizer. `visible` holds one flag per element (empty = all
// visible); elements annotated invisible keep their geometry but render at
// the fixed low opacity 0.2.
std::string export_svg(const Scene2D& scene, const Canvas& canvas,
                       const std::vector<bool>& visible = {});

}  // namespace c3vg
