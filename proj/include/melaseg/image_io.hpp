#pragma once

#include <filesystem>
#include <string>

#include "melaseg/types.hpp"

namespace melaseg {

// Decodes a JPEG or PNG (sniffed by magic bytes, not extension) into an
// 8-bit RGB image. 16-bit PNG channels are reduced to their high byte;
// grayscale and palette sources are expanded to RGB.
RgbImage load_image(const std::filesystem::path& path);

// Strict grayscale PNG reader used for masks: color type must be
// grayscale (16-bit depth is reduced to 8). Anything else is a FormatError.
GrayImage load_gray_png(const std::filesystem::path& path);

void write_gray_png(const GrayImage& img, const std::filesystem::path& path);
void write_rgb_png(const RgbImage& img, const std::filesystem::path& path);

}  // namespace melaseg
