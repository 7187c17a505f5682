#pragma once

#include <array>

#include "melaseg/types.hpp"

namespace melaseg {

// Round-to-nearest luma, 0.299 R + 0.587 G + 0.114 B.
GrayImage gray(const RgbImage& img);

inline constexpr int kFtsBins = 64;
inline constexpr double kDefaultFtsDelta = 10.0;
inline constexpr int kDefaultNgtdmLevels = 32;

struct FtsResult {
    std::array<double, kFtsBins> histogram{};  // normalized over units
    double mean = 0;                           // of FTU / max FTU in [0,1]
    double variance = 0;
    double energy = 0;   // sum h^2
    double entropy = 0;  // -sum h ln h over non-empty bins
    bool empty = false;  // no 3x3 window fits inside the mask
};

// Fuzzy texture spectrum over 3x3 neighborhoods fully inside the mask.
FtsResult fuzzy_texture_spectrum(const GrayImage& img, const BinaryMask& mask,
                                 double delta = kDefaultFtsDelta);

// NGTDM busyness on `levels` gray levels; 0 for flat or empty regions.
double busyness(const GrayImage& img, const BinaryMask& mask,
                int levels = kDefaultNgtdmLevels);

struct TextureFeatures {
    double fts_mean = 0;
    double fts_variance = 0;
    double fts_energy = 0;
    double fts_entropy = 0;
    double busyness = 0;
};

TextureFeatures compute_texture_features(const GrayImage& img, const BinaryMask& mask,
                                         double fts_delta = kDefaultFtsDelta,
                                         int ngtdm_levels = kDefaultNgtdmLevels);

}  // namespace melaseg
