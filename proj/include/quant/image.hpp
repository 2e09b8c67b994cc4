#ifndef QUANT_IMAGE_HPP
#define QUANT_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "quant/color.hpp"

namespace quant {

// Interleaved 8-bit RGB raster, row-major. Alpha never survives loading.
struct RawImage {
    int width = 0;
    int height = 0;
    std::vector<Rgb8> pixels; // size == width * height

    std::size_t pixel_count() const { return pixels.size(); }

    Rgb8 &at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    const Rgb8 &at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

struct LoadedImage {
    RawImage image;
    // Non-fatal notes, e.g. "alpha channel stripped". The CLI forwards these
    // to stderr; library callers may ignore them.
    std::vector<std::string> warnings;
};

// Reads a binary PPM (P6, maxval 255) or an 8-bit truecolor PNG (alpha
// accepted and stripped with a warning). Failure modes are reported
// distinctly: unreadable file, unsupported format/depth, truncated data.
LoadedImage load_image(const std::string &path);

// Format picked by extension: ".ppm" or ".png" (case-insensitive).
void save_image(const RawImage &image, const std::string &path);

// P6 with the exact header "P6\n<w> <h>\n255\n" followed by raw RGB triples.
void save_ppm(const RawImage &image, const std::string &path);
void save_png(const RawImage &image, const std::string &path);

// One "R G B" line per palette entry, channels rounded half up and clamped.
void save_palette_text(const Palette &palette, const std::string &path);

} // namespace quant

#endif
