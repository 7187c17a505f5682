#include "melaseg/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "melaseg/errors.hpp"
#include "melaseg/image_io.hpp"

namespace melaseg {
namespace {

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.back())) s.pop_back();
    size_t i = 0;
    while (i < s.size() && issp(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& context) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw FormatError(context + ": bad number '" + s + "'");
    return v;
}

void expect_header(const std::vector<std::string>& fields, const std::string& path) {
    if (fields.size() != 3 || fields[0] != "image_id" || fields[1] != "melanoma" ||
        fields[2] != "seborrheic_keratosis")
        throw FormatError(path + ": expected header image_id,melanoma,seborrheic_keratosis");
}

std::ifstream open_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

constexpr const char* kMaskSuffix = "_segmentation";

}  // namespace

const char* to_string(LesionClass c) {
    switch (c) {
        case LesionClass::melanoma: return "melanoma";
        case LesionClass::seborrheic_keratosis: return "seborrheic_keratosis";
        case LesionClass::nevus: return "nevus";
    }
    return "?";
}

BinaryMask load_mask(const std::filesystem::path& path) {
    GrayImage g = load_gray_png(path);
    BinaryMask mask(g.width, g.height);
    for (size_t i = 0; i < g.values.size(); ++i) mask.labels[i] = g.values[i] >= 128 ? 1 : 0;
    return mask;
}

void write_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    GrayImage g(mask.width, mask.height);
    for (size_t i = 0; i < mask.labels.size(); ++i) g.values[i] = mask.labels[i] ? 255 : 0;
    write_gray_png(g, path);
}

LabelTable load_labels(const std::filesystem::path& path) {
    std::ifstream in = open_text(path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    expect_header(split_csv_line(line), path.string());

    LabelTable table;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        std::string where = path.string() + ":" + std::to_string(lineno);
        if (fields.size() != 3) throw FormatError(where + ": expected 3 columns");
        if (fields[0].empty()) throw FormatError(where + ": empty image_id");
        double mel = parse_number(fields[1], where);
        double sk = parse_number(fields[2], where);
        if ((mel != 0 && mel != 1) || (sk != 0 && sk != 1))
            throw FormatError(where + ": label values must be 0 or 1");
        if (mel == 1 && sk == 1) throw FormatError(where + ": image labelled as both classes");
        LesionClass c = mel == 1   ? LesionClass::melanoma
                        : sk == 1 ? LesionClass::seborrheic_keratosis
                                  : LesionClass::nevus;
        if (!table.entries.emplace(fields[0], c).second)
            throw FormatError(where + ": duplicate image_id " + fields[0]);
    }
    return table;
}

void write_submission(const std::vector<SubmissionRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "image_id,melanoma,seborrheic_keratosis\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.melanoma, r.seborrheic_keratosis);
        out << r.image_id << ',' << buf << '\n';
    }
    if (!out.flush()) throw IoError("cannot write " + path.string());
}

std::vector<SubmissionRow> load_submission(const std::filesystem::path& path) {
    std::ifstream in = open_text(path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    expect_header(split_csv_line(line), path.string());

    std::vector<SubmissionRow> rows;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        std::string where = path.string() + ":" + std::to_string(lineno);
        if (fields.size() != 3) throw FormatError(where + ": expected 3 columns");
        if (fields[0].empty()) throw FormatError(where + ": empty image_id");
        rows.push_back({fields[0], parse_number(fields[1], where), parse_number(fields[2], where)});
    }
    return rows;
}

std::vector<ImageEntry> list_images(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<ImageEntry> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = lower(entry.path().extension().string());
        if (ext != ".jpg" && ext != ".jpeg" && ext != ".png") continue;
        std::string stem = entry.path().stem().string();
        if (stem.size() > std::strlen(kMaskSuffix) &&
            stem.ends_with(kMaskSuffix))
            continue;  // a mask living next to the images
        out.push_back({stem, entry.path()});
    }
    std::sort(out.begin(), out.end(),
              [](const ImageEntry& a, const ImageEntry& b) { return a.image_id < b.image_id; });
    return out;
}

std::vector<ImageEntry> list_masks(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<ImageEntry> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (lower(entry.path().extension().string()) != ".png") continue;
        std::string stem = entry.path().stem().string();
        if (stem.size() <= std::strlen(kMaskSuffix) || !stem.ends_with(kMaskSuffix)) continue;
        out.push_back({stem.substr(0, stem.size() - std::strlen(kMaskSuffix)), entry.path()});
    }
    std::sort(out.begin(), out.end(),
              [](const ImageEntry& a, const ImageEntry& b) { return a.image_id < b.image_id; });
    return out;
}

std::filesystem::path mask_path(const std::filesystem::path& dir, const std::string& image_id) {
    return dir / (image_id + kMaskSuffix + ".png");
}

RgbImage resize_max_dim(const RgbImage& img, int cap) {
    if (cap < 1) throw PreconditionError("resize cap must be positive");
    int side = std::max(img.width, img.height);
    if (side <= cap || side == 0) return img;
    double scale = static_cast<double>(cap) / side;
    int nw = std::max(1, static_cast<int>(std::lround(img.width * scale)));
    int nh = std::max(1, static_cast<int>(std::lround(img.height * scale)));
    RgbImage out(nw, nh);
    for (int y = 0; y < nh; ++y) {
        int sy = std::min(img.height - 1, static_cast<int>((y + 0.5) * img.height / nh));
        for (int x = 0; x < nw; ++x) {
            int sx = std::min(img.width - 1, static_cast<int>((x + 0.5) * img.width / nw));
            out.at(x, y) = img.at(sx, sy);
        }
    }
    return out;
}

}  // namespace melaseg
