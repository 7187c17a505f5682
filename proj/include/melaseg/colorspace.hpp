#pragma once

#include "melaseg/types.hpp"

namespace melaseg {

// sRGB (D65) -> CIE L*a*b*. Piecewise gamma with threshold 0.04045 and
// exponent 2.4, the standard sRGB/D65 matrix, and the cube-root lightness
// function with its linear segment below (6/29)^3. The white point is the
// matrix applied to (1,1,1), i.e. (0.95047, 1.0, 1.08883) to the published
// precision, which keeps the gray axis at a* = b* = 0 exactly.
Lab srgb_to_lab(Rgb c);

LabImage srgb_to_lab(const RgbImage& img);

}  // namespace melaseg
