#include "melaseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "melaseg/colorspace.hpp"
#include "melaseg/errors.hpp"

namespace melaseg {
namespace {

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    if (radius < 0) throw PreconditionError("structuring element radius must be >= 0");
    std::vector<std::pair<int, int>> out;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) out.emplace_back(dx, dy);
    return out;
}

struct MeanAb {
    double a = 0, b = 0;
    long long n = 0;
    void add(const Lab& p) {
        a += p.a;
        b += p.b;
        ++n;
    }
    ColorMarker finish(MarkerSource source, const char* what) const {
        if (n == 0) throw PreconditionError(std::string(what) + " sample region is empty");
        return {a / n, b / n, source};
    }
};

ColorMarker border_marker(const LabImage& lab, double band_frac) {
    int side = std::min(lab.width, lab.height);
    int band = std::max(1, static_cast<int>(std::lround(band_frac * side)));
    MeanAb acc;
    for (int y = 0; y < lab.height; ++y)
        for (int x = 0; x < lab.width; ++x)
            if (x < band || x >= lab.width - band || y < band || y >= lab.height - band)
                acc.add(lab.at(x, y));
    return acc.finish(MarkerSource::auto_border, "skin");
}

ColorMarker disk_marker(const LabImage& lab, const DiskSeed& disk, MarkerSource source) {
    MeanAb acc;
    double r2 = disk.radius * disk.radius;
    int x0 = std::max(0, static_cast<int>(std::floor(disk.cx - disk.radius)));
    int x1 = std::min(lab.width - 1, static_cast<int>(std::ceil(disk.cx + disk.radius)));
    int y0 = std::max(0, static_cast<int>(std::floor(disk.cy - disk.radius)));
    int y1 = std::min(lab.height - 1, static_cast<int>(std::ceil(disk.cy + disk.radius)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double dx = x - disk.cx, dy = y - disk.cy;
            if (dx * dx + dy * dy <= r2) acc.add(lab.at(x, y));
        }
    return acc.finish(source, "lesion");
}

}  // namespace

std::pair<ColorMarker, ColorMarker> estimate_markers(const LabImage& lab, const SeedSpec& seeds) {
    if (lab.width < 1 || lab.height < 1) throw PreconditionError("empty image");
    double band = seeds.skin_band.value_or(kDefaultSkinBand);
    if (band <= 0 || band >= 0.5) throw PreconditionError("skin band must be in (0, 0.5)");
    ColorMarker lesion;
    if (seeds.mode == SeedSpec::Mode::manual) {
        if (!seeds.lesion_disk) throw PreconditionError("manual seeding requires a lesion disk");
        const DiskSeed& d = *seeds.lesion_disk;
        if (d.radius <= 0) throw PreconditionError("lesion seed radius must be positive");
        if (d.cx < 0 || d.cx > lab.width - 1 || d.cy < 0 || d.cy > lab.height - 1)
            throw PreconditionError("lesion seed center out of bounds");
        lesion = disk_marker(lab, d, MarkerSource::manual);
    } else {
        int side = std::min(lab.width, lab.height);
        DiskSeed d{(lab.width - 1) / 2.0, (lab.height - 1) / 2.0,
                   std::max(1.0, kAutoLesionRadiusFrac * side)};
        lesion = disk_marker(lab, d, MarkerSource::auto_center);
    }
    ColorMarker skin = border_marker(lab, band);
    double da = lesion.a - skin.a, db = lesion.b - skin.b;
    if (std::sqrt(da * da + db * db) < 1e-3)
        throw DegenerateMarkersError("lesion and skin color markers coincide");
    return {lesion, skin};
}

BinaryMask classify_pixels(const LabImage& lab, const ColorMarker& lesion, const ColorMarker& skin) {
    BinaryMask mask(lab.width, lab.height);
    for (size_t i = 0; i < lab.pixels.size(); ++i) {
        const Lab& p = lab.pixels[i];
        double dla = p.a - lesion.a, dlb = p.b - lesion.b;
        double dsa = p.a - skin.a, dsb = p.b - skin.b;
        mask.labels[i] = (dla * dla + dlb * dlb < dsa * dsa + dsb * dsb) ? 1 : 0;
    }
    return mask;
}

BinaryMask morph_erode(const BinaryMask& mask, int radius) {
    auto se = disk_offsets(radius);
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            bool keep = mask.lesion(x, y);
            for (size_t k = 0; keep && k < se.size(); ++k) {
                int nx = x + se[k].first, ny = y + se[k].second;
                keep = mask.in_bounds(nx, ny) && mask.lesion(nx, ny);
            }
            out.set(x, y, keep);
        }
    return out;
}

BinaryMask morph_dilate(const BinaryMask& mask, int radius) {
    auto se = disk_offsets(radius);
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            bool hit = false;
            for (size_t k = 0; !hit && k < se.size(); ++k) {
                int nx = x + se[k].first, ny = y + se[k].second;
                hit = mask.in_bounds(nx, ny) && mask.lesion(nx, ny);
            }
            out.set(x, y, hit);
        }
    return out;
}

BinaryMask morph_open(const BinaryMask& mask, int radius) {
    return morph_dilate(morph_erode(mask, radius), radius);
}

BinaryMask morph_close(const BinaryMask& mask, int radius) {
    return morph_erode(morph_dilate(mask, radius), radius);
}

BinaryMask largest_component(const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    std::vector<std::uint8_t> seen(mask.labels.size(), 0);
    std::vector<int> best, current;
    for (int y0 = 0; y0 < mask.height; ++y0)
        for (int x0 = 0; x0 < mask.width; ++x0) {
            size_t start = static_cast<size_t>(y0) * mask.width + x0;
            if (!mask.labels[start] || seen[start]) continue;
            current.clear();
            current.push_back(static_cast<int>(start));
            seen[start] = 1;
            for (size_t head = 0; head < current.size(); ++head) {
                int idx = current[head];
                int cx = idx % mask.width, cy = idx / mask.width;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = cx + dx, ny = cy + dy;
                        if (!mask.in_bounds(nx, ny)) continue;
                        size_t nidx = static_cast<size_t>(ny) * mask.width + nx;
                        if (mask.labels[nidx] && !seen[nidx]) {
                            seen[nidx] = 1;
                            current.push_back(static_cast<int>(nidx));
                        }
                    }
            }
            if (current.size() > best.size()) best = current;  // first wins ties
        }
    for (int idx : best) out.labels[static_cast<size_t>(idx)] = 1;
    return out;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    // Background flood from the border, 4-connected; unreached skin is a hole.
    std::vector<std::uint8_t> outside(mask.labels.size(), 0);
    std::queue<std::pair<int, int>> q;
    auto push = [&](int x, int y) {
        size_t idx = static_cast<size_t>(y) * mask.width + x;
        if (!mask.labels[idx] && !outside[idx]) {
            outside[idx] = 1;
            q.emplace(x, y);
        }
    };
    for (int x = 0; x < mask.width; ++x) {
        push(x, 0);
        push(x, mask.height - 1);
    }
    for (int y = 0; y < mask.height; ++y) {
        push(0, y);
        push(mask.width - 1, y);
    }
    while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop();
        if (x > 0) push(x - 1, y);
        if (x + 1 < mask.width) push(x + 1, y);
        if (y > 0) push(x, y - 1);
        if (y + 1 < mask.height) push(x, y + 1);
    }
    BinaryMask out(mask.width, mask.height);
    for (size_t i = 0; i < mask.labels.size(); ++i) out.labels[i] = outside[i] ? 0 : 1;
    return out;
}

BinaryMask postprocess(const BinaryMask& mask, int se_radius) {
    if (mask.lesion_count() == 0) return mask;
    BinaryMask opened = morph_open(mask, se_radius);
    if (opened.lesion_count() == 0) return largest_component(mask);
    BinaryMask closed = morph_close(opened, se_radius);
    if (closed.lesion_count() == 0) return largest_component(mask);
    return fill_holes(largest_component(closed));
}

BinaryMask segment(const RgbImage& img, const SeedSpec& seeds, int se_radius) {
    LabImage lab = srgb_to_lab(img);
    auto [lesion, skin] = estimate_markers(lab, seeds);
    return postprocess(classify_pixels(lab, lesion, skin), se_radius);
}

}  // namespace melaseg
