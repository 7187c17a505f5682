#include "melaseg/image_io.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "melaseg/errors.hpp"

namespace melaseg {
namespace {

static_assert(sizeof(Rgb) == 3, "pixel rows are written as packed RGB bytes");

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr fp(std::fopen(path.string().c_str(), mode));
    if (!fp) throw IoError("cannot open " + path.string());
    return fp;
}

enum class Magic { png, jpeg, other };

Magic sniff(std::FILE* fp) {
    unsigned char head[8] = {};
    size_t n = std::fread(head, 1, sizeof head, fp);
    std::rewind(fp);
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (n >= 8 && std::memcmp(head, png_sig, 8) == 0) return Magic::png;
    if (n >= 3 && head[0] == 0xff && head[1] == 0xd8 && head[2] == 0xff) return Magic::jpeg;
    return Magic::other;
}

// libpng/libjpeg report errors by longjmp. Everything with a destructor
// lives on the heap behind a pointer fixed before setjmp, so the jump
// never invalidates an object we still have to destroy.
struct PngBuf {
    std::vector<unsigned char> data;
    std::vector<png_bytep> rows;
};

void setup_rows(PngBuf& b, png_uint_32 height, size_t rowbytes) {
    b.data.resize(static_cast<size_t>(height) * rowbytes);
    b.rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) b.rows[y] = b.data.data() + static_cast<size_t>(y) * rowbytes;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngReader() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) {
            destroy();
            throw DecodeError("libpng: out of memory");
        }
    }
    ~PngReader() { destroy(); }
    void destroy() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        png = nullptr;
        info = nullptr;
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngWriter() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) {
            destroy();
            throw IoError("libpng: out of memory");
        }
    }
    ~PngWriter() { destroy(); }
    void destroy() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        png = nullptr;
        info = nullptr;
    }
};

RgbImage decode_png_rgb(std::FILE* fp, const std::filesystem::path& path) {
    PngReader r;
    auto buf = std::make_unique<PngBuf>();
    PngBuf* b = buf.get();

    if (setjmp(png_jmpbuf(r.png))) throw DecodeError("corrupt PNG: " + path.string());

    png_init_io(r.png, fp);
    png_read_info(r.png, r.info);

    int color_type = png_get_color_type(r.png, r.info);
    int bit_depth = png_get_bit_depth(r.png, r.info);
    if (bit_depth == 16) png_set_strip_16(r.png);  // keep the high byte
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(r.png);
    if (png_get_valid(r.png, r.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(r.png);
    png_set_strip_alpha(r.png);
    png_set_interlace_handling(r.png);
    png_read_update_info(r.png, r.info);

    png_uint_32 w = png_get_image_width(r.png, r.info);
    png_uint_32 h = png_get_image_height(r.png, r.info);
    size_t rowbytes = png_get_rowbytes(r.png, r.info);
    if (rowbytes != static_cast<size_t>(w) * 3)
        throw DecodeError("unexpected PNG layout: " + path.string());
    setup_rows(*b, h, rowbytes);

    png_read_image(r.png, b->rows.data());
    png_read_end(r.png, nullptr);

    RgbImage out(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y) {
        const unsigned char* src = b->rows[y];
        for (png_uint_32 x = 0; x < w; ++x)
            out.at(static_cast<int>(x), static_cast<int>(y)) = {src[3 * x], src[3 * x + 1], src[3 * x + 2]};
    }
    return out;
}

struct JpegErrorMgr {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_fail(j_common_ptr cinfo) {
    auto* e = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, e->message);
    std::longjmp(e->jump, 1);
}

// Corrupt-data warnings (premature EOF, bad Huffman data) mean the pixels
// are untrustworthy; treat them like hard errors.
void jpeg_message(j_common_ptr cinfo, int msg_level) {
    if (msg_level < 0) jpeg_fail(cinfo);
}

RgbImage decode_jpeg(std::FILE* fp, const std::filesystem::path& path) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_fail;
    err.mgr.emit_message = jpeg_message;
    err.message[0] = '\0';

    struct Buf {
        RgbImage img;
        std::vector<unsigned char> row;
    };
    auto buf = std::make_unique<Buf>();
    Buf* b = buf.get();

    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw DecodeError("corrupt JPEG: " + path.string() + " (" + err.message + ")");
    }

    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    b->img = RgbImage(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    b->row.resize(static_cast<size_t>(cinfo.output_width) * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        int y = static_cast<int>(cinfo.output_scanline);
        JSAMPROW rowp = b->row.data();
        jpeg_read_scanlines(&cinfo, &rowp, 1);
        for (int x = 0; x < b->img.width; ++x)
            b->img.at(x, y) = {b->row[3 * x], b->row[3 * x + 1], b->row[3 * x + 2]};
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return std::move(b->img);
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "rb");
    switch (sniff(fp.get())) {
        case Magic::png:
            return decode_png_rgb(fp.get(), path);
        case Magic::jpeg:
            return decode_jpeg(fp.get(), path);
        default:
            throw DecodeError("not a PNG or JPEG file: " + path.string());
    }
}

GrayImage load_gray_png(const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "rb");
    if (sniff(fp.get()) != Magic::png) throw FormatError("not a PNG file: " + path.string());

    PngReader r;
    auto buf = std::make_unique<PngBuf>();
    PngBuf* b = buf.get();

    if (setjmp(png_jmpbuf(r.png))) throw DecodeError("corrupt PNG: " + path.string());

    png_init_io(r.png, fp.get());
    png_read_info(r.png, r.info);

    int color_type = png_get_color_type(r.png, r.info);
    int bit_depth = png_get_bit_depth(r.png, r.info);
    if (color_type != PNG_COLOR_TYPE_GRAY)
        throw FormatError("mask must be a grayscale PNG: " + path.string());
    if (bit_depth == 16) png_set_strip_16(r.png);
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    png_set_interlace_handling(r.png);
    png_read_update_info(r.png, r.info);

    png_uint_32 w = png_get_image_width(r.png, r.info);
    png_uint_32 h = png_get_image_height(r.png, r.info);
    size_t rowbytes = png_get_rowbytes(r.png, r.info);
    if (rowbytes != static_cast<size_t>(w))
        throw DecodeError("unexpected PNG layout: " + path.string());
    setup_rows(*b, h, rowbytes);

    png_read_image(r.png, b->rows.data());
    png_read_end(r.png, nullptr);

    GrayImage out(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 y = 0; y < h; ++y)
        std::memcpy(&out.at(0, static_cast<int>(y)), b->rows[y], w);
    return out;
}

void write_gray_png(const GrayImage& img, const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "wb");
    PngWriter w;
    auto rows = std::make_unique<std::vector<png_bytep>>(img.height);
    auto* rp = rows.get();
    for (int y = 0; y < img.height; ++y)
        (*rp)[y] = const_cast<png_bytep>(&img.values[static_cast<size_t>(y) * img.width]);

    if (setjmp(png_jmpbuf(w.png))) throw IoError("cannot write " + path.string());

    png_init_io(w.png, fp.get());
    png_set_IHDR(w.png, w.info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    png_write_image(w.png, rp->data());
    png_write_end(w.png, nullptr);
}

void write_rgb_png(const RgbImage& img, const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "wb");
    PngWriter w;
    auto rows = std::make_unique<std::vector<png_bytep>>(img.height);
    auto* rp = rows.get();
    for (int y = 0; y < img.height; ++y)
        (*rp)[y] = const_cast<png_bytep>(reinterpret_cast<const unsigned char*>(&img.pixels[static_cast<size_t>(y) * img.width]));

    if (setjmp(png_jmpbuf(w.png))) throw IoError("cannot write " + path.string());

    png_init_io(w.png, fp.get());
    png_set_IHDR(w.png, w.info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    png_write_image(w.png, rp->data());
    png_write_end(w.png, nullptr);
}

}  // namespace melaseg
