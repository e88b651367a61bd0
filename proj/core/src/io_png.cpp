#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <zlib.h>

#include "curve3dvg/errors.hpp"
#include "curve3dvg/io.hpp"

namespace c3vg {

// Minimal PNG support: always writes 8-bit RGBA (color type 6, filter 0);
// reads 8-bit gray/RGB/RGBA with any of the five standard scanline filters.

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

std::uint32_t get_be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + data.size()));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

std::uint8_t quantize(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

std::uint8_t paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

const std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
    if (image.width <= 0 || image.height <= 0 || image.channels < 1)
        throw ConfigError("png encode: empty image");
    const std::size_t stride = static_cast<std::size_t>(image.width) * 4 + 1;
    std::vector<std::uint8_t> raw(stride * image.height);
    for (int y = 0; y < image.height; ++y) {
        std::uint8_t* row = raw.data() + stride * y;
        row[0] = 0;  // filter: none
        for (int x = 0; x < image.width; ++x) {
            std::uint8_t rgba[4];
            if (image.channels == 1) {
                const std::uint8_t g = quantize(image.at(x, y, 0));
                rgba[0] = rgba[1] = rgba[2] = g;
                rgba[3] = 255;
            } else {
                for (int c = 0; c < 3; ++c)
                    rgba[c] = quantize(image.at(x, y, std::min(c, image.channels - 1)));
                rgba[3] = image.channels >= 4 ? quantize(image.at(x, y, 3)) : 255;
            }
            std::memcpy(row + 1 + 4 * x, rgba, 4);
        }
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) !=
        Z_OK)
        throw RunError("png encode: deflate failed");
    compressed.resize(bound);

    std::vector<std::uint8_t> out(kSignature, kSignature + 8);
    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(image.width));
    put_be32(ihdr, static_cast<std::uint32_t>(image.height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(6);   // color type: RGBA
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", compressed);
    append_chunk(out, "IEND", {});
    return out;
}

Image decode_png(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
    const std::string where = origin.empty() ? "png" : origin;
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0)
        throw IngestError(where + ": not a PNG (bad signature)", origin);

    int width = 0, height = 0, channels = 0;
    std::vector<std::uint8_t> idat;
    std::size_t pos = 8;
    bool done = false;
    while (pos + 8 <= bytes.size() && !done) {
        const std::uint32_t len = get_be32(bytes.data() + pos);
        if (pos + 12 + len > bytes.size())
            throw IngestError(where + ": truncated chunk", origin);
        const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
        const std::uint8_t* data = bytes.data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw IngestError(where + ": bad IHDR", origin);
            width = static_cast<int>(get_be32(data));
            height = static_cast<int>(get_be32(data + 4));
            const int depth = data[8], color = data[9], interlace = data[12];
            if (depth != 8 || interlace != 0)
                throw IngestError(where + ": only 8-bit non-interlaced PNG supported", origin);
            if (color == 0)
                channels = 1;
            else if (color == 2)
                channels = 3;
            else if (color == 6)
                channels = 4;
            else
                throw IngestError(where + ": unsupported color type", origin);
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            done = true;
        }
        pos += 12 + len;
    }
    if (width <= 0 || height <= 0 || channels == 0 || idat.empty())
        throw IngestError(where + ": missing IHDR/IDAT", origin);

    const std::size_t stride = static_cast<std::size_t>(width) * channels + 1;
    std::vector<std::uint8_t> raw(stride * height);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw IngestError(where + ": inflate failed", origin);

    // Undo per-scanline filters in place.
    const int bpp = channels;
    for (int y = 0; y < height; ++y) {
        std::uint8_t* row = raw.data() + stride * y + 1;
        const std::uint8_t* prev = y > 0 ? raw.data() + stride * (y - 1) + 1 : nullptr;
        const int filter = raw[stride * y];
        const int n = width * channels;
        for (int i = 0; i < n; ++i) {
            const int a = i >= bpp ? row[i - bpp] : 0;
            const int b = prev ? prev[i] : 0;
            const int c = (prev && i >= bpp) ? prev[i - bpp] : 0;
            switch (filter) {
                case 0: break;
                case 1: row[i] = static_cast<std::uint8_t>(row[i] + a); break;
                case 2: row[i] = static_cast<std::uint8_t>(row[i] + b); break;
                case 3: row[i] = static_cast<std::uint8_t>(row[i] + (a + b) / 2); break;
                case 4: row[i] = static_cast<std::uint8_t>(row[i] + paeth(a, b, c)); break;
                default: throw IngestError(where + ": unknown scanline filter", origin);
            }
        }
    }

    Image image(width, height, 4);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* row = raw.data() + stride * y + 1;
        for (int x = 0; x < width; ++x) {
            const std::uint8_t* px = row + x * channels;
            double rgba[4];
            if (channels == 1) {
                rgba[0] = rgba[1] = rgba[2] = px[0] / 255.0;
                rgba[3] = 1.0;
            } else {
                for (int c = 0; c < 3; ++c) rgba[c] = px[c] / 255.0;
                rgba[3] = channels == 4 ? px[3] / 255.0 : 1.0;
            }
            for (int c = 0; c < 4; ++c) image.at(x, y, c) = rgba[c];
        }
    }
    return image;
}

void write_png(const Image& image, const std::string& path) {
    const std::vector<std::uint8_t> bytes = encode_png(image);
    write_text_file(path, std::string(bytes.begin(), bytes.end()));
}

Image read_png(const std::string& path) {
    const std::string text = read_text_file(path);
    return decode_png(std::vector<std::uint8_t>(text.begin(), text.end()), path);
}

Image take_channels(const Image& src, int n) {
    if (n < 1 || n > src.channels) throw ConfigError("take_channels: bad channel count");
    Image out(src.width, src.height, n);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x)
            for (int c = 0; c < n; ++c) out.at(x, y, c) = src.at(x, y, c);
    return out;
}

}  // namespace c3vg
