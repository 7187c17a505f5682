#pragma once

#include <cstdint>
#include <vector>

namespace melaseg {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

// Row-major 8-bit sRGB image.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    RgbImage() = default;
    RgbImage(int w, int h, Rgb fill = {}) : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    Rgb& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    const Rgb& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

// CIE L*a*b* pixel. L in [0,100]; a,b unbounded but finite.
struct Lab {
    float l = 0, a = 0, b = 0;
};

struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<Lab> pixels;

    LabImage() = default;
    LabImage(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h) {}

    Lab& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    const Lab& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

// Per-pixel lesion/skin labels. 1 = lesion, 0 = skin.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool lesion_fill = false)
        : width(w), height(h), labels(static_cast<size_t>(w) * h, lesion_fill ? 1 : 0) {}

    bool lesion(int x, int y) const { return labels[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool is_lesion) { labels[static_cast<size_t>(y) * width + x] = is_lesion ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    long long lesion_count() const {
        long long n = 0;
        for (auto v : labels) n += (v != 0);
        return n;
    }
    bool operator==(const BinaryMask&) const = default;
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
};

}  // namespace melaseg
