#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "melaseg/types.hpp"

namespace melaseg {

enum class LesionClass { melanoma, seborrheic_keratosis, nevus };

const char* to_string(LesionClass c);

// image-id -> diagnosis, parsed from the two binary ground-truth columns.
struct LabelTable {
    std::map<std::string, LesionClass> entries;
};

// Grayscale PNG mask: value >= 128 is lesion, else skin.
BinaryMask load_mask(const std::filesystem::path& path);

// 0 = skin, 255 = lesion, 8-bit grayscale PNG.
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

// CSV with header image_id,melanoma,seborrheic_keratosis and {0,1} values.
// Both columns 1 on one row is an inconsistent-label error.
LabelTable load_labels(const std::filesystem::path& path);

struct SubmissionRow {
    std::string image_id;
    double melanoma = 0;
    double seborrheic_keratosis = 0;
};

// Challenge-format CSV, scores printed with exactly 6 decimals, rows in
// input order.
void write_submission(const std::vector<SubmissionRow>& rows, const std::filesystem::path& path);
std::vector<SubmissionRow> load_submission(const std::filesystem::path& path);

// Directory helpers for the ISIC layout: images <id>.jpg|.jpeg|.png,
// masks <id>_segmentation.png.
struct ImageEntry {
    std::string image_id;
    std::filesystem::path path;
};
std::vector<ImageEntry> list_images(const std::filesystem::path& dir);
std::vector<ImageEntry> list_masks(const std::filesystem::path& dir);
std::filesystem::path mask_path(const std::filesystem::path& dir, const std::string& image_id);

// Nearest-neighbor downscale so that max(width, height) <= cap. Images
// already within the cap are returned unchanged.
RgbImage resize_max_dim(const RgbImage& img, int cap);

}  // namespace melaseg
