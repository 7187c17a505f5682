#include "melaseg/features.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "melaseg/colorspace.hpp"
#include "melaseg/errors.hpp"
#include "melaseg/shape_features.hpp"

namespace melaseg {

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = [] {
        std::array<std::string, kFeatureCount> n;
        char buf[8];
        for (int i = 0; i < kFeatureCount; ++i) {
            std::snprintf(buf, sizeof buf, "f%02d", i + 1);
            n[i] = buf;
        }
        return n;
    }();
    return names;
}

FeatureVector extract_features(const std::string& image_id, const RgbImage& img,
                               const BinaryMask& mask, const FeatureParams& params) {
    if (img.width != mask.width || img.height != mask.height)
        throw PreconditionError("image and mask dimensions differ");

    ShapeFeatures sh = compute_shape_features(mask);
    TextureFeatures tx =
        compute_texture_features(gray(img), mask, params.fts_delta, params.ngtdm_levels);
    LabImage lab = srgb_to_lab(img);
    std::array<ChannelStats, 6> cs = color_stats(img, lab, mask);
    GlcmFeatures gl = color_glcm(img, mask, params.glcm_levels);

    FeatureVector out;
    out.image_id = image_id;
    double* v = out.values.data();
    *v++ = sh.area;
    *v++ = sh.perimeter;
    *v++ = sh.compactness;
    *v++ = sh.asymmetry;
    *v++ = sh.aspect_ratio;
    *v++ = sh.eccentricity;
    *v++ = sh.bending_energy;
    *v++ = sh.contour_moment_2;
    *v++ = sh.contour_moment_3;
    *v++ = sh.hu_1;
    *v++ = sh.hu_2;
    *v++ = sh.hu_3;
    *v++ = sh.convexity;
    *v++ = sh.solidity;
    *v++ = tx.fts_mean;
    *v++ = tx.fts_variance;
    *v++ = tx.fts_energy;
    *v++ = tx.fts_entropy;
    *v++ = tx.busyness;
    for (const auto& c : cs) {
        *v++ = c.mean;
        *v++ = c.stddev;
        *v++ = c.skewness;
    }
    *v++ = gl.contrast;
    *v++ = gl.correlation;
    *v++ = gl.energy;
    *v++ = gl.entropy;
    *v++ = gl.homogeneity;

    for (double x : out.values)
        if (!std::isfinite(x)) throw Error("non-finite feature for " + image_id);
    return out;
}

void write_features_csv(const std::string& path, const std::vector<FeatureVector>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "image_id";
    for (const auto& n : feature_names()) out << ',' << n;
    out << '\n';
    char buf[40];
    for (const auto& r : rows) {
        out << r.image_id;
        for (double v : r.values) {
            std::snprintf(buf, sizeof buf, "%.9g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out.flush()) throw IoError("cannot write " + path);
}

std::vector<FeatureVector> load_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::string expected = "image_id";
        for (const auto& n : feature_names()) expected += "," + n;
        if (line != expected) throw FormatError(path + ": unexpected feature CSV header");
    }

    std::vector<FeatureVector> rows;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string where = path + ":" + std::to_string(lineno);
        FeatureVector row;
        std::istringstream ss(line);
        std::string field;
        if (!std::getline(ss, field, ',') || field.empty())
            throw FormatError(where + ": missing image_id");
        row.image_id = field;
        for (int i = 0; i < kFeatureCount; ++i) {
            if (!std::getline(ss, field, ','))
                throw FormatError(where + ": expected " + std::to_string(kFeatureCount + 1) +
                                  " columns");
            double v = 0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
                throw FormatError(where + ": bad number '" + field + "'");
            row.values[i] = v;
        }
        if (std::getline(ss, field, ',')) throw FormatError(where + ": too many columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace melaseg
