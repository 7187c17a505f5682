#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "melaseg/dataset.hpp"
#include "melaseg/errors.hpp"
#include "melaseg/image_io.hpp"

namespace fs = std::filesystem;
using namespace melaseg;

namespace {

const fs::path kData = MELASEG_TEST_DATA_DIR;

fs::path scratch_dir(const std::string& name) {
    fs::path dir = fs::current_path() / "scratch" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("png loading: 1x1 white") {
    RgbImage img = load_image(kData / "white_1x1.png");
    CHECK(img.width == 1);
    CHECK(img.height == 1);
    CHECK(img.at(0, 0) == Rgb{255, 255, 255});
}

TEST_CASE("jpeg loading: gradient survives compression approximately") {
    RgbImage img = load_image(kData / "tiny_rgb.jpg");
    REQUIRE(img.width == 17);
    REQUIRE(img.height == 11);
    int worst = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            Rgb px = img.at(x, y);
            worst = std::max({worst, std::abs(px.r - 15 * x), std::abs(px.g - 23 * y),
                              std::abs(px.b - 40)});
        }
    CHECK(worst <= 14);  // quality-95 error bound, generous
}

TEST_CASE("jpeg loading: solid color decodes near-exactly") {
    RgbImage img = load_image(kData / "solid_23x9.jpg");
    REQUIRE(img.width == 23);
    REQUIRE(img.height == 9);
    for (const Rgb& px : img.pixels) {
        CHECK(std::abs(px.r - 200) <= 4);
        CHECK(std::abs(px.g - 50) <= 4);
        CHECK(std::abs(px.b - 30) <= 4);
    }
}

TEST_CASE("16-bit rgb png reduces to the high byte") {
    RgbImage img = load_image(kData / "rgb16_5x3.png");
    REQUIRE(img.width == 5);
    REQUIRE(img.height == 3);
    const int vals[5] = {0, 255, 256, 32768, 65535};
    for (int x = 0; x < 5; ++x) {
        int v = vals[x];
        Rgb want{static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>((65535 - v) >> 8),
                 static_cast<std::uint8_t>((v / 2) >> 8)};
        for (int y = 0; y < 3; ++y) CHECK(img.at(x, y) == want);
    }
}

TEST_CASE("nonexistent and corrupt files throw") {
    CHECK_THROWS_AS(load_image(kData / "does_not_exist.png"), IoError);
    auto dir = scratch_dir("corrupt");
    std::ofstream(dir / "junk.jpg") << "this is not an image";
    CHECK_THROWS_AS(load_image(dir / "junk.jpg"), Error);
}

TEST_CASE("gray png loader: 16-bit values reduce to the high byte") {
    GrayImage g = load_gray_png(kData / "gray16_4x2.png");
    REQUIRE(g.width == 4);
    REQUIRE(g.height == 2);
    const int expect[2][4] = {{0 >> 8, 256 >> 8, 32767 >> 8, 32768 >> 8},
                              {65535 >> 8, 513 >> 8, 40000 >> 8, 128 >> 8}};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) CHECK(g.at(x, y) == expect[y][x]);
}

TEST_CASE("gray png loader rejects rgb and palette files") {
    CHECK_THROWS_AS(load_gray_png(kData / "rgb_6x4.png"), FormatError);
    CHECK_THROWS_AS(load_gray_png(kData / "pal_6x4.png"), FormatError);
}

TEST_CASE("masks threshold at 128") {
    BinaryMask all = load_mask(kData / "mask_all255_9x7.png");
    CHECK(all.width == 9);
    CHECK(all.height == 7);
    CHECK(all.lesion_count() == 63);

    BinaryMask none = load_mask(kData / "mask_all0_9x7.png");
    CHECK(none.lesion_count() == 0);

    BinaryMask pat = load_mask(kData / "mask_pattern_8x5.png");
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 8; ++x) CHECK(pat.lesion(x, y) == ((x + 2 * y) % 3 == 0));

    BinaryMask mid = load_mask(kData / "mask_mid_4x2.png");
    const int vals[2][4] = {{0, 100, 127, 128}, {130, 200, 255, 90}};
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) CHECK(mid.lesion(x, y) == (vals[y][x] >= 128));
}

TEST_CASE("mask and rgb png writers round-trip") {
    auto dir = scratch_dir("roundtrip");

    BinaryMask mask(6, 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 6; ++x) mask.set(x, y, (x * y + x) % 2 == 0);
    write_mask(mask, dir / "m.png");
    CHECK(load_mask(dir / "m.png") == mask);
    GrayImage raw = load_gray_png(dir / "m.png");
    for (size_t i = 0; i < raw.values.size(); ++i)
        CHECK((raw.values[i] == 0 || raw.values[i] == 255));

    RgbImage img(4, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x)
            img.at(x, y) = Rgb{static_cast<std::uint8_t>(x * 60), static_cast<std::uint8_t>(y * 80),
                               static_cast<std::uint8_t>(x + y)};
    write_rgb_png(img, dir / "i.png");
    RgbImage back = load_image(dir / "i.png");
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    CHECK(back.pixels == img.pixels);
}

TEST_CASE("label csv parsing") {
    auto dir = scratch_dir("labels");
    {
        std::ofstream f(dir / "ok.csv");
        f << "image_id,melanoma,seborrheic_keratosis\n"
          << "ISIC_0000001,1,0\n"
          << "ISIC_0000002,0,1\n"
          << "ISIC_0000003,0,0\n";
    }
    LabelTable t = load_labels(dir / "ok.csv");
    REQUIRE(t.entries.size() == 3);
    CHECK(t.entries.at("ISIC_0000001") == LesionClass::melanoma);
    CHECK(t.entries.at("ISIC_0000002") == LesionClass::seborrheic_keratosis);
    CHECK(t.entries.at("ISIC_0000003") == LesionClass::nevus);

    std::ofstream(dir / "both.csv") << "image_id,melanoma,seborrheic_keratosis\nid1,1,1\n";
    CHECK_THROWS_AS(load_labels(dir / "both.csv"), FormatError);

    std::ofstream(dir / "dup.csv")
        << "image_id,melanoma,seborrheic_keratosis\nid1,1,0\nid1,0,0\n";
    CHECK_THROWS_AS(load_labels(dir / "dup.csv"), FormatError);

    std::ofstream(dir / "badval.csv") << "image_id,melanoma,seborrheic_keratosis\nid1,2,0\n";
    CHECK_THROWS_AS(load_labels(dir / "badval.csv"), FormatError);

    std::ofstream(dir / "badhdr.csv") << "id,mel,sk\nid1,1,0\n";
    CHECK_THROWS_AS(load_labels(dir / "badhdr.csv"), FormatError);
}

TEST_CASE("submission csv round-trips with six decimals") {
    auto dir = scratch_dir("submission");
    std::vector<SubmissionRow> rows = {{"b_image", 0.123456789, 1.0}, {"a_image", 0.5, 0.0}};
    write_submission(rows, dir / "sub.csv");

    std::ifstream f(dir / "sub.csv");
    std::string line;
    std::getline(f, line);
    CHECK(line == "image_id,melanoma,seborrheic_keratosis");
    std::getline(f, line);
    CHECK(line == "b_image,0.123457,1.000000");  // input order kept, 6 decimals
    std::getline(f, line);
    CHECK(line == "a_image,0.500000,0.000000");

    auto back = load_submission(dir / "sub.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[0].image_id == "b_image");
    CHECK(back[0].melanoma == doctest::Approx(0.123457).epsilon(1e-9));
    CHECK(back[1].seborrheic_keratosis == 0.0);
}

TEST_CASE("directory listing pairs images with masks and sorts by id") {
    auto dir = scratch_dir("listing");
    RgbImage px(1, 1);
    write_rgb_png(px, dir / "zeta.png");
    write_rgb_png(px, dir / "alpha.JPG");  // extension case-insensitive
    write_rgb_png(px, dir / "mid.jpeg");
    BinaryMask m(1, 1, true);
    write_mask(m, dir / "zeta_segmentation.png");
    write_mask(m, dir / "alpha_segmentation.png");
    std::ofstream(dir / "notes.txt") << "ignored";

    auto images = list_images(dir);
    REQUIRE(images.size() == 3);
    CHECK(images[0].image_id == "alpha");
    CHECK(images[1].image_id == "mid");
    CHECK(images[2].image_id == "zeta");

    auto masks = list_masks(dir);
    REQUIRE(masks.size() == 2);
    CHECK(masks[0].image_id == "alpha");
    CHECK(masks[1].image_id == "zeta");

    CHECK(mask_path(dir, "zeta") == dir / "zeta_segmentation.png");
}

TEST_CASE("resize caps the long side with nearest-neighbor sampling") {
    RgbImage img(10, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 10; ++x)
            img.at(x, y) = Rgb{static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), 7};

    RgbImage same = resize_max_dim(img, 10);
    CHECK(same.pixels == img.pixels);  // already within the cap

    RgbImage small = resize_max_dim(img, 5);
    REQUIRE(small.width == 5);
    REQUIRE(small.height == 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 5; ++x) {
            int sx = std::min(9, (2 * x + 1) * 10 / (2 * 5));
            int sy = std::min(3, (2 * y + 1) * 4 / (2 * 2));
            CHECK(small.at(x, y) == img.at(sx, sy));
        }

    CHECK_THROWS_AS(resize_max_dim(img, 0), PreconditionError);
}
