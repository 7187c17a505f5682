#pragma once

#include <array>

#include "melaseg/types.hpp"

namespace melaseg {

struct ChannelStats {
    double mean = 0;
    double stddev = 0;    // population
    double skewness = 0;  // m3 / stddev^3, 0 when stddev < 1e-9
};

// Per-channel stats over lesion pixels, order R, G, B, L*, a*, b*.
std::array<ChannelStats, 6> color_stats(const RgbImage& img, const LabImage& lab,
                                        const BinaryMask& mask);

inline constexpr int kDefaultGlcmLevels = 4;

struct GlcmFeatures {
    double contrast = 0;
    double correlation = 0;  // 0 when either marginal is constant
    double energy = 0;
    double entropy = 0;
    double homogeneity = 0;
};

// Symmetric co-occurrence of joint RGB codes (levels^3 states) pooled over
// offsets (0,1), (1,0), (1,1), (1,-1); both endpoints must be lesion pixels.
GlcmFeatures color_glcm(const RgbImage& img, const BinaryMask& mask,
                        int levels = kDefaultGlcmLevels);

}  // namespace melaseg
