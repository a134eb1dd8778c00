#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace voidseg {

// Bad input or configuration. The CLI maps this to exit code 2;
// every other exception maps to exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// 8-bit single-channel image, row-major. Pixel (x, y) is pixels[y * width + x].
// Coordinates are plain pixel indices; a disc of radius r centred at (cx, cy)
// contains pixel (x, y) iff (x-cx)^2 + (y-cy)^2 < r^2.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w < 1 || h < 1) throw InputError("GrayImage: width and height must be >= 1");
        pixels.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t size() const { return pixels.size(); }

    bool operator==(const GrayImage& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

// Float plane for intermediate arithmetic; quantized to 8 bits only at
// image-write boundaries.
struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<float> v;

    FloatImage() = default;
    FloatImage(int w, int h, float fill = 0.f) : width(w), height(h) {
        if (w < 1 || h < 1) throw InputError("FloatImage: width and height must be >= 1");
        v.assign(static_cast<std::size_t>(w) * h, fill);
    }

    float& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t size() const { return v.size(); }
};

// Row-major boolean mask; values are strictly {0, 1} in memory and {0, 255}
// on disk.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w < 1 || h < 1) throw InputError("BinaryMask: width and height must be >= 1");
        bits.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
    }

    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    int count() const {
        int n = 0;
        for (auto b : bits) n += b;
        return n;
    }

    bool operator==(const BinaryMask& o) const {
        return width == o.width && height == o.height && bits == o.bits;
    }
};

inline FloatImage to_float(const GrayImage& img) {
    FloatImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) out.v[i] = static_cast<float>(img.pixels[i]);
    return out;
}

// Round-to-nearest with clamping to [0, 255].
inline GrayImage quantize(const FloatImage& img) {
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.v.size(); ++i) {
        float x = img.v[i];
        if (x < 0.f) x = 0.f;
        if (x > 255.f) x = 255.f;
        out.pixels[i] = static_cast<std::uint8_t>(x + 0.5f);
    }
    return out;
}

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point& o) const { return x == o.x && y == o.y; }
};

}  // namespace voidseg
