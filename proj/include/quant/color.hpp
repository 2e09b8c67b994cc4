#ifndef QUANT_COLOR_HPP
#define QUANT_COLOR_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace quant {

struct Rgb8 {
    std::uint8_t r = 0, g = 0, b = 0;

    friend bool operator==(const Rgb8 &a, const Rgb8 &b) {
        return a.r == b.r && a.g == b.g && a.b == b.b;
    }
};

// Real-valued color coordinate. Centers and all accumulation run in double;
// 8-bit channels are widened exactly once when a histogram or point set is
// built, never per distance evaluation.
struct ColorPoint {
    double r = 0.0, g = 0.0, b = 0.0;

    ColorPoint() = default;
    ColorPoint(double r_, double g_, double b_) : r(r_), g(g_), b(b_) {}
    explicit ColorPoint(Rgb8 c)
        : r(static_cast<double>(c.r)), g(static_cast<double>(c.g)), b(static_cast<double>(c.b)) {}

    ColorPoint &operator+=(const ColorPoint &o) {
        r += o.r;
        g += o.g;
        b += o.b;
        return *this;
    }

    friend ColorPoint operator+(ColorPoint a, const ColorPoint &b) { return a += b; }
    friend ColorPoint operator-(const ColorPoint &a, const ColorPoint &b) {
        return {a.r - b.r, a.g - b.g, a.b - b.b};
    }
    friend ColorPoint operator*(const ColorPoint &a, double s) { return {a.r * s, a.g * s, a.b * s}; }

    friend bool operator==(const ColorPoint &a, const ColorPoint &b) {
        return a.r == b.r && a.g == b.g && a.b == b.b;
    }
};

inline double dist2(const ColorPoint &a, const ColorPoint &b) {
    const double dr = a.r - b.r;
    const double dg = a.g - b.g;
    const double db = a.b - b.b;
    return dr * dr + dg * dg + db * db;
}

inline double dist2(const ColorPoint &a, const Rgb8 &b) {
    const double dr = a.r - static_cast<double>(b.r);
    const double dg = a.g - static_cast<double>(b.g);
    const double db = a.b - static_cast<double>(b.b);
    return dr * dr + dg * dg + db * db;
}

// Round half up, then clamp into the 8-bit range. Used whenever a real-valued
// center is rendered to an output pixel or palette file entry.
inline std::uint8_t channel_to_u8(double v) {
    double rounded = std::floor(v + 0.5);
    if (rounded < 0.0) rounded = 0.0;
    if (rounded > 255.0) rounded = 255.0;
    return static_cast<std::uint8_t>(rounded);
}

inline Rgb8 to_rgb8(const ColorPoint &c) {
    return {channel_to_u8(c.r), channel_to_u8(c.g), channel_to_u8(c.b)};
}

// Ordered palette of real-valued centers. `truncated` marks palettes that came
// out shorter than requested (coarse-grid preclusterers can run out of
// splittable cells); callers either accept the short palette or pad it.
struct Palette {
    std::vector<ColorPoint> colors;
    bool truncated = false;

    std::size_t size() const { return colors.size(); }
};

} // namespace quant

#endif
