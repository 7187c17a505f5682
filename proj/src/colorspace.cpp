#include "melaseg/colorspace.hpp"

#include <array>
#include <cmath>

namespace melaseg {
namespace {

// sRGB linearization, tabulated over the 256 code values.
const std::array<double, 256>& linear_lut() {
    static const std::array<double, 256> lut = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            double s = i / 255.0;
            t[i] = s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return lut;
}

constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// White point chosen as M * (1,1,1): gray inputs then land exactly on
// a* = b* = 0 instead of picking up rounding residue against a separately
// rounded D65 constant.
constexpr double kWhite[3] = {
    kM[0][0] + kM[0][1] + kM[0][2],
    kM[1][0] + kM[1][1] + kM[1][2],
    kM[2][0] + kM[2][1] + kM[2][2],
};

double f_lab(double t) {
    constexpr double d = 6.0 / 29.0;
    constexpr double d3 = d * d * d;
    return t > d3 ? std::cbrt(t) : t / (3.0 * d * d) + 4.0 / 29.0;
}

}  // namespace

Lab srgb_to_lab(Rgb c) {
    const auto& lut = linear_lut();
    double r = lut[c.r], g = lut[c.g], b = lut[c.b];
    double fx = f_lab((kM[0][0] * r + kM[0][1] * g + kM[0][2] * b) / kWhite[0]);
    double fy = f_lab((kM[1][0] * r + kM[1][1] * g + kM[1][2] * b) / kWhite[1]);
    double fz = f_lab((kM[2][0] * r + kM[2][1] * g + kM[2][2] * b) / kWhite[2]);
    Lab out;
    out.l = static_cast<float>(116.0 * fy - 16.0);
    out.a = static_cast<float>(500.0 * (fx - fy));
    out.b = static_cast<float>(200.0 * (fy - fz));
    return out;
}

LabImage srgb_to_lab(const RgbImage& img) {
    LabImage out(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) out.pixels[i] = srgb_to_lab(img.pixels[i]);
    return out;
}

}  // namespace melaseg
