#pragma once

#include <array>
#include <string>
#include <vector>

#include "melaseg/color_features.hpp"
#include "melaseg/texture_features.hpp"
#include "melaseg/types.hpp"

namespace melaseg {

inline constexpr int kFeatureCount = 42;

// Column names f01..f42: 14 shape, 5 texture, 18 color stats
// (channel-major R,G,B,L,a,b x mean,std,skew), 5 color GLCM.
const std::array<std::string, kFeatureCount>& feature_names();

struct FeatureVector {
    std::string image_id;
    std::array<double, kFeatureCount> values{};
};

struct FeatureParams {
    double fts_delta = kDefaultFtsDelta;
    int ngtdm_levels = kDefaultNgtdmLevels;
    int glcm_levels = kDefaultGlcmLevels;
};

// Full 42-element descriptor of one lesion image + mask.
FeatureVector extract_features(const std::string& image_id, const RgbImage& img,
                               const BinaryMask& mask, const FeatureParams& params = {});

void write_features_csv(const std::string& path, const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> load_features_csv(const std::string& path);

}  // namespace melaseg
