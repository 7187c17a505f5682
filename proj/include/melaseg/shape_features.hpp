#pragma once

#include <vector>

#include "melaseg/types.hpp"

namespace melaseg {

struct ContourPoint {
    int x = 0, y = 0;
    bool operator==(const ContourPoint&) const = default;
};

// Closed outer boundary of the lesion, one entry per boundary pixel,
// consecutive points 8-adjacent.
struct Contour {
    std::vector<ContourPoint> points;
};

// Moore boundary tracing of the single lesion component.
Contour trace_contour(const BinaryMask& mask);

struct ShapeFeatures {
    double area = 0;              // lesion pixel count
    double perimeter = 0;         // contour arc length, sqrt(2) diagonals
    double compactness = 0;       // P^2 / (4 pi A), 1 for a circle
    double asymmetry = 0;         // mean reflective mismatch over principal axes
    double aspect_ratio = 1;      // major/minor axis length
    double eccentricity = 0;      // sqrt(1 - lmin/lmax)
    double bending_energy = 0;    // mean squared curvature of the smoothed contour
    double contour_moment_1 = 0;  // normalized central moments of the
    double contour_moment_2 = 0;  //   radial distance distribution
    double contour_moment_3 = 0;
    double hu_1 = 0;              // region moment invariants phi_1..phi_3
    double hu_2 = 0;
    double hu_3 = 0;
    double hull_area = 0;         // convex hull area, lattice-corrected
    double hull_perimeter = 0;
    double convexity = 0;         // hull perimeter / perimeter
    double solidity = 0;          // area / hull area
};

// All shape descriptors of a single-component non-empty mask. Computation
// is done in bounding-box-local coordinates, so whole-pixel translation
// leaves every value bit-identical.
ShapeFeatures compute_shape_features(const BinaryMask& mask);

}  // namespace melaseg
