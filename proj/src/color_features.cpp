#include "melaseg/color_features.hpp"

#include <cmath>
#include <vector>

#include "melaseg/errors.hpp"

namespace melaseg {
namespace {

ChannelStats stats_of(const std::vector<double>& v) {
    ChannelStats s;
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = sum / v.size();
    double m2 = 0, m3 = 0;
    for (double x : v) {
        double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= v.size();
    m3 /= v.size();
    s.stddev = std::sqrt(m2);
    s.skewness = s.stddev < 1e-9 ? 0 : m3 / (s.stddev * s.stddev * s.stddev);
    return s;
}

}  // namespace

std::array<ChannelStats, 6> color_stats(const RgbImage& img, const LabImage& lab,
                                        const BinaryMask& mask) {
    if (img.width != mask.width || img.height != mask.height || lab.width != img.width ||
        lab.height != img.height)
        throw PreconditionError("image, lab and mask dimensions differ");
    std::array<std::vector<double>, 6> channels;
    for (size_t i = 0; i < img.pixels.size(); ++i) {
        if (!mask.labels[i]) continue;
        channels[0].push_back(img.pixels[i].r);
        channels[1].push_back(img.pixels[i].g);
        channels[2].push_back(img.pixels[i].b);
        channels[3].push_back(lab.pixels[i].l);
        channels[4].push_back(lab.pixels[i].a);
        channels[5].push_back(lab.pixels[i].b);
    }
    if (channels[0].empty()) throw NoLesionError("mask has no lesion pixels");
    std::array<ChannelStats, 6> out;
    for (int c = 0; c < 6; ++c) out[c] = stats_of(channels[c]);
    return out;
}

GlcmFeatures color_glcm(const RgbImage& img, const BinaryMask& mask, int levels) {
    if (img.width != mask.width || img.height != mask.height)
        throw PreconditionError("image and mask dimensions differ");
    if (levels < 2 || levels > 8) throw PreconditionError("glcm levels must be in [2,8]");

    const int states = levels * levels * levels;
    auto index = [&](const Rgb& p) {
        int qr = p.r * levels / 256, qg = p.g * levels / 256, qb = p.b * levels / 256;
        return (qr * levels + qg) * levels + qb;
    };

    static constexpr int kOffDx[4] = {1, 0, 1, -1};
    static constexpr int kOffDy[4] = {0, 1, 1, 1};
    std::vector<double> p(static_cast<size_t>(states) * states, 0.0);
    double total = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            if (!mask.lesion(x, y)) continue;
            int i = index(img.at(x, y));
            for (int k = 0; k < 4; ++k) {
                int nx = x + kOffDx[k], ny = y + kOffDy[k];
                if (!mask.in_bounds(nx, ny) || !mask.lesion(nx, ny)) continue;
                int j = index(img.at(nx, ny));
                p[static_cast<size_t>(i) * states + j] += 1;
                p[static_cast<size_t>(j) * states + i] += 1;
                total += 2;
            }
        }
    if (total == 0) throw NoPairsError("no co-occurring lesion pixel pair under any offset");
    for (auto& v : p) v /= total;

    // marginals (symmetric, so row == column)
    std::vector<double> marginal(states, 0.0);
    for (int i = 0; i < states; ++i)
        for (int j = 0; j < states; ++j) marginal[i] += p[static_cast<size_t>(i) * states + j];
    double mu = 0;
    for (int i = 0; i < states; ++i) mu += i * marginal[i];
    double var = 0;
    for (int i = 0; i < states; ++i) var += (i - mu) * (i - mu) * marginal[i];
    double sigma = std::sqrt(var);

    GlcmFeatures f;
    for (int i = 0; i < states; ++i)
        for (int j = 0; j < states; ++j) {
            double pij = p[static_cast<size_t>(i) * states + j];
            if (pij == 0) continue;
            f.contrast += (i - j) * (i - j) * pij;
            f.energy += pij * pij;
            f.entropy -= pij * std::log(pij);
            f.homogeneity += pij / (1 + std::abs(i - j));
            if (sigma >= 1e-12) f.correlation += (i - mu) * (j - mu) * pij;
        }
    f.correlation = sigma < 1e-12 ? 0 : f.correlation / (sigma * sigma);
    return f;
}

}  // namespace melaseg
