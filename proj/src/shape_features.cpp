#include "melaseg/shape_features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "melaseg/errors.hpp"

namespace melaseg {
namespace {

// Moore neighborhood, clockwise from west (y grows downward).
constexpr int kDx[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int direction_of(int dx, int dy) {
    for (int d = 0; d < 8; ++d)
        if (kDx[d] == dx && kDy[d] == dy) return d;
    throw Error("internal: backtrack cell not adjacent");
}

struct Bbox {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
};

Bbox lesion_bbox(const BinaryMask& mask) {
    Bbox b{mask.width, mask.height, -1, -1};
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.lesion(x, y)) {
                b.x0 = std::min(b.x0, x);
                b.y0 = std::min(b.y0, y);
                b.x1 = std::max(b.x1, x);
                b.y1 = std::max(b.y1, y);
            }
    if (b.x1 < 0) throw NoLesionError("mask has no lesion pixels");
    return b;
}

BinaryMask crop(const BinaryMask& mask, const Bbox& b) {
    BinaryMask out(b.width(), b.height());
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.set(x, y, mask.lesion(b.x0 + x, b.y0 + y));
    return out;
}

double cyclic_length(const std::vector<ContourPoint>& pts) {
    double len = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % pts.size()];
        len += std::hypot(b.x - a.x, b.y - a.y);
    }
    return len;
}

struct CentralMoments {
    double cx = 0, cy = 0;        // centroid
    double u20 = 0, u11 = 0, u02 = 0;
    double u30 = 0, u21 = 0, u12 = 0, u03 = 0;
    long long n = 0;
};

CentralMoments region_moments(const BinaryMask& mask) {
    CentralMoments m;
    double sx = 0, sy = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.lesion(x, y)) {
                sx += x;
                sy += y;
                ++m.n;
            }
    m.cx = sx / m.n;
    m.cy = sy / m.n;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.lesion(x, y)) continue;
            double dx = x - m.cx, dy = y - m.cy;
            m.u20 += dx * dx;
            m.u11 += dx * dy;
            m.u02 += dy * dy;
            m.u30 += dx * dx * dx;
            m.u21 += dx * dx * dy;
            m.u12 += dx * dy * dy;
            m.u03 += dy * dy * dy;
        }
    return m;
}

// |mask XOR reflected(mask)| / (2 area) for the axis through the centroid
// with unit direction (ex, ey). The reflected set lives on an unbounded
// lattice so the value does not depend on where the lesion sits.
double reflection_mismatch(const BinaryMask& mask, double cx, double cy, double ex, double ey) {
    std::unordered_set<std::int64_t> reflected;
    auto key = [](int x, int y) {
        return (static_cast<std::int64_t>(y) << 32) ^ static_cast<std::uint32_t>(x);
    };
    long long n = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.lesion(x, y)) continue;
            ++n;
            double dx = x - cx, dy = y - cy;
            double t = dx * ex + dy * ey;
            int ix = static_cast<int>(std::lround(cx + 2 * t * ex - dx));
            int iy = static_cast<int>(std::lround(cy + 2 * t * ey - dy));
            reflected.insert(key(ix, iy));
        }
    long long sym_diff = 0;
    for (const auto& k : reflected) {
        int x = static_cast<int>(static_cast<std::int32_t>(k & 0xffffffff));
        int y = static_cast<int>(k >> 32);
        if (!mask.in_bounds(x, y) || !mask.lesion(x, y)) ++sym_diff;  // reflected \ mask
    }
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.lesion(x, y) && !reflected.count(key(x, y))) ++sym_diff;  // mask \ reflected
    return static_cast<double>(sym_diff) / (2.0 * static_cast<double>(n));
}

constexpr int kResamplePoints = 128;
constexpr double kSmoothSigma = 2.0;

std::array<std::array<double, kResamplePoints>, 2> resample_contour(
    const std::vector<ContourPoint>& pts) {
    std::array<std::array<double, kResamplePoints>, 2> out{};
    std::vector<double> seg(pts.size());
    double total = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % pts.size()];
        seg[i] = std::hypot(b.x - a.x, b.y - a.y);
        total += seg[i];
    }
    if (total <= 0) {  // degenerate: every sample sits on the single point
        out[0].fill(pts[0].x);
        out[1].fill(pts[0].y);
        return out;
    }
    size_t i = 0;
    double start = 0;
    for (int k = 0; k < kResamplePoints; ++k) {
        double t = total * k / kResamplePoints;
        while (t >= start + seg[i]) {
            start += seg[i];
            i = (i + 1) % pts.size();
        }
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % pts.size()];
        double f = (t - start) / seg[i];
        out[0][k] = a.x + f * (b.x - a.x);
        out[1][k] = a.y + f * (b.y - a.y);
    }
    return out;
}

std::array<double, kResamplePoints> smooth_circular(const std::array<double, kResamplePoints>& v) {
    int radius = static_cast<int>(std::ceil(3 * kSmoothSigma));
    std::vector<double> w(2 * radius + 1);
    double z = 0;
    for (int k = -radius; k <= radius; ++k) {
        w[k + radius] = std::exp(-(k * k) / (2 * kSmoothSigma * kSmoothSigma));
        z += w[k + radius];
    }
    std::array<double, kResamplePoints> out{};
    for (int i = 0; i < kResamplePoints; ++i) {
        double s = 0;
        for (int k = -radius; k <= radius; ++k)
            s += w[k + radius] * v[(i + k + kResamplePoints) % kResamplePoints];
        out[i] = s / z;
    }
    return out;
}

double bending_energy(const std::vector<ContourPoint>& pts) {
    auto xy = resample_contour(pts);
    auto xs = smooth_circular(xy[0]);
    auto ys = smooth_circular(xy[1]);
    double sum = 0;
    for (int i = 0; i < kResamplePoints; ++i) {
        int ip = (i + 1) % kResamplePoints;
        int im = (i + kResamplePoints - 1) % kResamplePoints;
        double dx = (xs[ip] - xs[im]) / 2, dy = (ys[ip] - ys[im]) / 2;
        double ddx = xs[ip] - 2 * xs[i] + xs[im], ddy = ys[ip] - 2 * ys[i] + ys[im];
        double den = std::pow(dx * dx + dy * dy, 1.5);
        if (den < 1e-12) continue;
        double k = (dx * ddy - dy * ddx) / den;
        sum += k * k;
    }
    return sum / kResamplePoints;
}

long long cross(const ContourPoint& o, const ContourPoint& a, const ContourPoint& b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) -
           static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain; collinear points are not hull vertices.
std::vector<ContourPoint> convex_hull(std::vector<ContourPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const ContourPoint& a, const ContourPoint& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<ContourPoint> hull(2 * pts.size());
    size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

struct HullMetrics {
    double area = 0;       // lattice points covered by the hull polygon
    double perimeter = 0;
};

// Lattice-point count of the closed hull: twice the shoelace area plus the
// boundary points recovers interior + boundary via Pick's theorem, which
// is the number of pixel centers the hull covers. Digitally convex regions
// then get solidity exactly 1 and nothing exceeds 1.
HullMetrics hull_metrics(const std::vector<ContourPoint>& hull) {
    HullMetrics m;
    if (hull.size() == 1) {
        m.area = 1;
        m.perimeter = 4;  // matches the isolated-pixel contour conventions
        return m;
    }
    if (hull.size() == 2) {
        long long dx = hull[1].x - hull[0].x, dy = hull[1].y - hull[0].y;
        m.area = static_cast<double>(std::gcd(std::llabs(dx), std::llabs(dy))) + 1;
        m.perimeter = 2 * std::hypot(static_cast<double>(dx), static_cast<double>(dy));
        return m;
    }
    long long twice_area = 0, boundary = 0;
    double perim = 0;
    for (size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        twice_area += static_cast<long long>(a.x) * b.y - static_cast<long long>(b.x) * a.y;
        long long dx = b.x - a.x, dy = b.y - a.y;
        boundary += std::gcd(std::llabs(dx), std::llabs(dy));
        perim += std::hypot(static_cast<double>(dx), static_cast<double>(dy));
    }
    m.area = std::llabs(twice_area) / 2.0 + boundary / 2.0 + 1.0;
    m.perimeter = perim;
    return m;
}

}  // namespace

Contour trace_contour(const BinaryMask& mask) {
    int sx = -1, sy = -1;
    for (int y = 0; sy < 0 && y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.lesion(x, y)) {
                sx = x;
                sy = y;
                break;
            }
    if (sy < 0) throw NoLesionError("mask has no lesion pixels");

    Contour contour;
    contour.points.push_back({sx, sy});
    int px = sx, py = sy, bdir = 0;  // backtrack starts west of the start pixel

    // first_seen[(pixel, backtrack)] -> contour index; revisiting a state
    // means the walk has entered its cycle.
    std::unordered_map<std::uint64_t, std::uint32_t> first_seen;
    auto state_key = [&](int x, int y, int d) {
        return (static_cast<std::uint64_t>(y) * mask.width + x) * 8 + d;
    };

    for (;;) {
        auto [it, fresh] = first_seen.emplace(state_key(px, py, bdir),
                                              static_cast<std::uint32_t>(contour.points.size() - 1));
        if (!fresh) {
            // keep exactly one full cycle; anything before the first visit
            // of the repeated state was a lead-in
            std::vector<ContourPoint> cycle(contour.points.begin() + it->second,
                                            contour.points.end() - 1);
            contour.points = std::move(cycle);
            break;
        }
        int found = -1, bx = px + kDx[bdir], by = py + kDy[bdir];
        for (int k = 1; k <= 8; ++k) {
            int dir = (bdir + k) % 8;
            int nx = px + kDx[dir], ny = py + kDy[dir];
            if (mask.in_bounds(nx, ny) && mask.lesion(nx, ny)) {
                found = dir;
                break;
            }
            bx = nx;
            by = ny;
        }
        if (found < 0) break;  // isolated pixel
        px += kDx[found];
        py += kDy[found];
        contour.points.push_back({px, py});
        bdir = direction_of(bx - px, by - py);
    }
    return contour;
}

ShapeFeatures compute_shape_features(const BinaryMask& mask) {
    BinaryMask local = crop(mask, lesion_bbox(mask));
    Contour contour = trace_contour(local);
    const auto& pts = contour.points;

    ShapeFeatures f;
    CentralMoments m = region_moments(local);
    f.area = static_cast<double>(m.n);
    f.perimeter = pts.size() == 1 ? 4.0 : cyclic_length(pts);
    f.compactness = f.perimeter * f.perimeter / (4 * std::numbers::pi * f.area);

    // principal axes of the pixel covariance
    double m20 = m.u20 / m.n, m11 = m.u11 / m.n, m02 = m.u02 / m.n;
    double theta = (std::abs(m11) < 1e-12 && std::abs(m20 - m02) < 1e-12)
                       ? 0.0
                       : 0.5 * std::atan2(2 * m11, m20 - m02);
    double c = std::cos(theta), s = std::sin(theta);
    f.asymmetry = (reflection_mismatch(local, m.cx, m.cy, c, s) +
                   reflection_mismatch(local, m.cx, m.cy, -s, c)) /
                  2;

    double half_tr = (m20 + m02) / 2;
    double disc = std::sqrt((m20 - m02) * (m20 - m02) / 4 + m11 * m11);
    double lmax = half_tr + disc, lmin = std::max(0.0, half_tr - disc);
    if (lmin < 1e-12) {
        f.aspect_ratio = 1;
        f.eccentricity = 0;
    } else {
        f.aspect_ratio = std::sqrt(lmax / lmin);
        f.eccentricity = std::sqrt(1 - lmin / lmax);
    }

    f.bending_energy = bending_energy(pts);

    // radial distance distribution of the contour about the region centroid
    double mu = 0;
    std::vector<double> dist(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        dist[i] = std::hypot(pts[i].x - m.cx, pts[i].y - m.cy);
        mu += dist[i];
    }
    mu /= dist.size();
    if (mu > 1e-12) {
        double v2 = 0, v3 = 0;
        for (double d : dist) {
            double dd = d - mu;
            v2 += dd * dd;
            v3 += dd * dd * dd;
        }
        v2 /= dist.size();
        v3 /= dist.size();
        f.contour_moment_1 = 0;  // first central moment vanishes identically
        f.contour_moment_2 = v2 / (mu * mu);
        f.contour_moment_3 = v3 / (mu * mu * mu);
    }

    // eta_pq = mu_pq / mu00^(1 + (p+q)/2)
    double a00 = static_cast<double>(m.n);
    double s2 = a00 * a00, s3 = s2 * std::sqrt(a00);
    double n20 = m.u20 / s2, n02 = m.u02 / s2, n11 = m.u11 / s2;
    double n30 = m.u30 / s3, n03 = m.u03 / s3, n21 = m.u21 / s3, n12 = m.u12 / s3;
    f.hu_1 = n20 + n02;
    f.hu_2 = (n20 - n02) * (n20 - n02) + 4 * n11 * n11;
    f.hu_3 = (n30 - 3 * n12) * (n30 - 3 * n12) + (3 * n21 - n03) * (3 * n21 - n03);

    HullMetrics hull = hull_metrics(convex_hull(pts));
    f.hull_area = hull.area;
    f.hull_perimeter = hull.perimeter;
    f.convexity = hull.perimeter / f.perimeter;
    f.solidity = f.area / hull.area;
    return f;
}

}  // namespace melaseg
