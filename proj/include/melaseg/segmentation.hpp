#pragma once

#include <optional>
#include <utility>

#include "melaseg/types.hpp"

namespace melaseg {

enum class MarkerSource { auto_center, auto_border, manual };

// Prototype color of a region: mean (a*, b*) over its sample pixels.
struct ColorMarker {
    double a = 0;
    double b = 0;
    MarkerSource source = MarkerSource::manual;
};

struct DiskSeed {
    double cx = 0, cy = 0, radius = 1;
};

struct SeedSpec {
    enum class Mode { automatic, manual };
    Mode mode = Mode::automatic;
    std::optional<DiskSeed> lesion_disk;   // required in manual mode
    std::optional<double> skin_band;       // border frame width as a fraction of min(w,h)
};

inline constexpr double kDefaultSkinBand = 0.05;
inline constexpr double kAutoLesionRadiusFrac = 0.15;
inline constexpr int kDefaultSeRadius = 3;

// Mean (a*, b*) of the lesion sample region and the skin sample region.
// Auto mode samples a center disk of radius 0.15*min(w,h) and a border
// frame of width 0.05*min(w,h). Markers closer than 1e-3 in the (a*, b*)
// plane are rejected as degenerate.
std::pair<ColorMarker, ColorMarker> estimate_markers(const LabImage& lab, const SeedSpec& seeds);

// Nearest-marker labeling in the (a*, b*) plane. Ties go to skin.
BinaryMask classify_pixels(const LabImage& lab, const ColorMarker& lesion, const ColorMarker& skin);

// Morphology primitives exposed for mask construction and tests. The
// structuring element is the digital disk {d : |d|^2 <= r^2}.
BinaryMask morph_erode(const BinaryMask& mask, int radius);
BinaryMask morph_dilate(const BinaryMask& mask, int radius);
BinaryMask morph_open(const BinaryMask& mask, int radius);
BinaryMask morph_close(const BinaryMask& mask, int radius);
BinaryMask largest_component(const BinaryMask& mask);        // 8-connected
BinaryMask fill_holes(const BinaryMask& mask);               // skin not 4-connected to border

// Opening then closing, keep the largest 8-connected component, fill
// holes. Falls back to the largest component of the input when the
// opened mask is empty; an all-skin input is returned unchanged.
BinaryMask postprocess(const BinaryMask& mask, int se_radius = kDefaultSeRadius);

// Full phase-1 pipeline: srgb_to_lab -> estimate_markers -> classify_pixels
// -> postprocess.
BinaryMask segment(const RgbImage& img, const SeedSpec& seeds, int se_radius = kDefaultSeRadius);

}  // namespace melaseg
