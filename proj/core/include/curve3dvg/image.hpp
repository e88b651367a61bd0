#pragma once

#include <cstddef>
#include <vector>

namespace c3vg {

// Dense row-major H x W x C image, values nominally in [0,1].
// Row 0 is the top of the image.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    double& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// First `n` channels of `src` as a new image (e.g. RGBA -> RGB).
Image take_channels(const Image& src, int n);

}  // namespace c3vg
