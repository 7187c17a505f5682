#include "melaseg/texture_features.hpp"

#include <cmath>
#include <vector>

#include "melaseg/errors.hpp"

namespace melaseg {
namespace {

// clockwise from top-left
constexpr int kNbrDx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
constexpr int kNbrDy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};

constexpr double kFtuMax = 6560.0;  // all eight e_i = 2

void check_dims(int iw, int ih, int mw, int mh) {
    if (iw != mw || ih != mh) throw PreconditionError("image and mask dimensions differ");
}

}  // namespace

GrayImage gray(const RgbImage& img) {
    GrayImage out(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        const Rgb& p = img.pixels[i];
        out.values[i] = static_cast<std::uint8_t>(
            std::lround(0.299 * p.r + 0.587 * p.g + 0.114 * p.b));
    }
    return out;
}

FtsResult fuzzy_texture_spectrum(const GrayImage& img, const BinaryMask& mask, double delta) {
    check_dims(img.width, img.height, mask.width, mask.height);
    if (delta <= 0) throw PreconditionError("delta must be positive");

    FtsResult r;
    long long units = 0;
    double sum = 0, sum_sq = 0;
    for (int y = 1; y + 1 < img.height; ++y)
        for (int x = 1; x + 1 < img.width; ++x) {
            bool inside = mask.lesion(x, y);
            for (int k = 0; inside && k < 8; ++k)
                inside = mask.lesion(x + kNbrDx[k], y + kNbrDy[k]);
            if (!inside) continue;

            double v0 = img.at(x, y);
            double ftu = 0, weight = 1;  // weight = 3^(i-1)
            for (int k = 0; k < 8; ++k) {
                double e = 1 + (img.at(x + kNbrDx[k], y + kNbrDy[k]) - v0) / (2 * delta);
                e = std::min(2.0, std::max(0.0, e));
                ftu += e * weight;
                weight *= 3;
            }
            int bin = std::min(kFtsBins - 1, static_cast<int>(ftu / kFtuMax * kFtsBins));
            r.histogram[bin] += 1;
            double u = ftu / kFtuMax;
            sum += u;
            sum_sq += u * u;
            ++units;
        }

    if (units == 0) {
        r.empty = true;
        return r;
    }
    r.mean = sum / units;
    r.variance = sum_sq / units - r.mean * r.mean;
    for (auto& h : r.histogram) {
        h /= units;
        r.energy += h * h;
        if (h > 0) r.entropy -= h * std::log(h);
    }
    return r;
}

double busyness(const GrayImage& img, const BinaryMask& mask, int levels) {
    check_dims(img.width, img.height, mask.width, mask.height);
    if (levels < 2 || levels > 256) throw PreconditionError("ngtdm levels must be in [2,256]");

    std::vector<long long> count(levels, 0);  // over all masked pixels
    std::vector<double> s(levels, 0);         // over masked pixels with masked neighbors
    long long total = 0;
    auto level = [&](int x, int y) { return img.at(x, y) * levels / 256; };

    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            if (!mask.lesion(x, y)) continue;
            int q = level(x, y);
            ++count[q];
            ++total;
            long long nbr_sum = 0;
            int nbr_n = 0;
            for (int k = 0; k < 8; ++k) {
                int nx = x + kNbrDx[k], ny = y + kNbrDy[k];
                if (mask.in_bounds(nx, ny) && mask.lesion(nx, ny)) {
                    nbr_sum += level(nx, ny);
                    ++nbr_n;
                }
            }
            if (nbr_n > 0) s[q] += std::abs(q - static_cast<double>(nbr_sum) / nbr_n);
        }

    if (total == 0) return 0;
    double num = 0, den = 0;
    for (int i = 0; i < levels; ++i) {
        if (count[i] == 0) continue;
        double pi = static_cast<double>(count[i]) / total;
        num += pi * s[i];
        for (int j = 0; j < levels; ++j) {
            if (count[j] == 0) continue;
            double pj = static_cast<double>(count[j]) / total;
            den += std::abs(i * pi - j * pj);
        }
    }
    return den > 0 ? num / den : 0;
}

TextureFeatures compute_texture_features(const GrayImage& img, const BinaryMask& mask,
                                         double fts_delta, int ngtdm_levels) {
    FtsResult fts = fuzzy_texture_spectrum(img, mask, fts_delta);
    return {fts.mean, fts.variance, fts.energy, fts.entropy, busyness(img, mask, ngtdm_levels)};
}

}  // namespace melaseg
