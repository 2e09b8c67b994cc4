#include "quant/image.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace quant {

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &what) {
    throw std::runtime_error(path + ": " + what);
}

// PPM headers are whitespace-separated tokens; '#' starts a comment that runs
// to end of line and may appear between any two tokens.
bool next_ppm_token(std::istream &in, std::string &tok) {
    tok.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return true;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return !tok.empty();
}

long parse_ppm_number(std::istream &in, const std::string &path, const char *field) {
    std::string tok;
    if (!next_ppm_token(in, tok)) fail(path, std::string("truncated PPM header (missing ") + field + ")");
    try {
        size_t used = 0;
        long v = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception &) {
        fail(path, std::string("malformed PPM ") + field + " '" + tok + "'");
    }
}

LoadedImage load_ppm(std::ifstream &in, const std::string &path) {
    const long w = parse_ppm_number(in, path, "width");
    const long h = parse_ppm_number(in, path, "height");
    const long maxval = parse_ppm_number(in, path, "maxval");
    if (w <= 0 || h <= 0) fail(path, "non-positive PPM dimensions");
    if (maxval != 255) fail(path, "unsupported PPM maxval " + std::to_string(maxval) + " (only 255)");
    // Exactly one whitespace byte separates the header from the raster;
    // parse_ppm_number already consumed it as the token terminator.

    LoadedImage out;
    out.image.width = static_cast<int>(w);
    out.image.height = static_cast<int>(h);
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    out.image.pixels.resize(n);
    in.read(reinterpret_cast<char *>(out.image.pixels.data()),
            static_cast<std::streamsize>(n * 3));
    if (static_cast<std::size_t>(in.gcount()) != n * 3)
        fail(path, "truncated PPM pixel data (expected " + std::to_string(n * 3) + " bytes, got " +
                       std::to_string(in.gcount()) + ")");
    return out;
}

struct FileCloser {
    void operator()(std::FILE *f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors via longjmp; the error text is stashed here so the
// catch site can rethrow with the offending path attached.
struct PngErrorCtx {
    std::string message;
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto *ctx = static_cast<PngErrorCtx *>(png_get_error_ptr(png));
    if (ctx) ctx->message = msg;
    longjmp(png_jmpbuf(png), 1);
}

void png_warn_fn(png_structp, png_const_charp) {}

LoadedImage load_png(const std::string &path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open file");

    PngErrorCtx errctx;
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &errctx, png_error_fn, png_warn_fn);
    if (!png) fail(path, "libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "libpng initialization failed");
    }

    LoadedImage out;
    std::vector<png_bytep> row_ptrs;
    std::vector<std::uint8_t> raster;
    bool had_alpha = false;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "corrupt or truncated PNG data (" + errctx.message + ")");
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_byte depth = png_get_bit_depth(png, info);
    const png_byte ctype = png_get_color_type(png, info);
    if (depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported PNG bit depth " + std::to_string(depth) + " (only 8)");
    }
    if (ctype != PNG_COLOR_TYPE_RGB && ctype != PNG_COLOR_TYPE_RGB_ALPHA) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported PNG color type " + std::to_string(ctype) +
                       " (only 8-bit truecolor, with or without alpha)");
    }
    had_alpha = (ctype == PNG_COLOR_TYPE_RGB_ALPHA);
    if (had_alpha) png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    raster.resize(static_cast<std::size_t>(w) * h * 3);
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        row_ptrs[y] = raster.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    out.image.width = static_cast<int>(w);
    out.image.height = static_cast<int>(h);
    out.image.pixels.resize(static_cast<std::size_t>(w) * h);
    std::memcpy(out.image.pixels.data(), raster.data(), raster.size());
    if (had_alpha) out.warnings.push_back(path + ": alpha channel stripped");
    return out;
}

bool has_suffix_ci(const std::string &s, const char *suffix) {
    const std::size_t n = std::strlen(suffix);
    if (s.size() < n) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (std::tolower(static_cast<unsigned char>(s[s.size() - n + i])) != suffix[i]) return false;
    return true;
}

} // namespace

LoadedImage load_image(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() < 2) fail(path, "file too short to identify");
    if (magic[0] == 'P' && magic[1] == '6') return load_ppm(in, path);
    if (magic[0] == '\x89' && magic[1] == 'P') {
        in.close();
        return load_png(path);
    }
    fail(path, "unsupported format (expected binary PPM 'P6' or PNG)");
}

void save_ppm(const RawImage &image, const std::string &path) {
    if (image.width <= 0 || image.height <= 0 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw std::invalid_argument("save_ppm: inconsistent image dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char *>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size() * 3));
    if (!out) fail(path, "write failed");
}

void save_png(const RawImage &image, const std::string &path) {
    if (image.width <= 0 || image.height <= 0 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw std::invalid_argument("save_png: inconsistent image dimensions");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open file for writing");

    PngErrorCtx errctx;
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &errctx, png_error_fn, png_warn_fn);
    if (!png) fail(path, "libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "libpng initialization failed");
    }
    std::vector<png_bytep> row_ptrs(image.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG write failed (" + errctx.message + ")");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    auto *base = reinterpret_cast<const std::uint8_t *>(image.pixels.data());
    for (int y = 0; y < image.height; ++y)
        row_ptrs[y] = const_cast<png_bytep>(base + static_cast<std::size_t>(y) * image.width * 3);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_image(const RawImage &image, const std::string &path) {
    if (has_suffix_ci(path, ".ppm")) {
        save_ppm(image, path);
    } else if (has_suffix_ci(path, ".png")) {
        save_png(image, path);
    } else {
        fail(path, "unknown output extension (use .ppm or .png)");
    }
}

void save_palette_text(const Palette &palette, const std::string &path) {
    if (palette.colors.empty()) throw std::invalid_argument("save_palette_text: empty palette");
    std::ofstream out(path);
    if (!out) fail(path, "cannot open file for writing");
    for (const ColorPoint &c : palette.colors) {
        const Rgb8 q = to_rgb8(c);
        out << static_cast<int>(q.r) << ' ' << static_cast<int>(q.g) << ' '
            << static_cast<int>(q.b) << '\n';
    }
    if (!out) fail(path, "write failed");
}

} // namespace quant
