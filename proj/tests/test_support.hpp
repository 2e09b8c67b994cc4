#ifndef QUANT_TEST_SUPPORT_HPP
#define QUANT_TEST_SUPPORT_HPP

// Shared fixtures and independent oracles for the test suites. Everything in
// here recomputes expectations from first principles (plain scans, no pruning,
// no incremental state) so the library is checked against genuinely separate
// code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <vector>

#include "quant/color.hpp"
#include "quant/histogram.hpp"
#include "quant/image.hpp"
#include "quant/rng.hpp"

namespace testsup {

// ---------------------------------------------------------------------------
// Synthetic images

// Smooth multi-octave value noise per channel plus a soft color blob and mild
// per-pixel jitter: spatially coherent like a photograph, with a realistic
// distinct-color count.
inline quant::RawImage synthetic_photo(int w, int h, std::uint64_t seed) {
    quant::Rng rng(seed);
    quant::RawImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);

    struct Lattice {
        int nx, ny;
        std::vector<double> v;
        double at(int x, int y) const { return v[static_cast<std::size_t>(y) * nx + x]; }
    };
    auto make_lattice = [&rng](int nx, int ny) {
        Lattice l{nx, ny, {}};
        l.v.resize(static_cast<std::size_t>(nx) * ny);
        for (double &x : l.v) x = rng.next_unit();
        return l;
    };
    auto sample = [](const Lattice &l, double fx, double fy) {
        const double gx = fx * (l.nx - 1), gy = fy * (l.ny - 1);
        const int x0 = std::min(static_cast<int>(gx), l.nx - 2);
        const int y0 = std::min(static_cast<int>(gy), l.ny - 2);
        const double tx = gx - x0, ty = gy - y0;
        const double a = l.at(x0, y0) * (1 - tx) + l.at(x0 + 1, y0) * tx;
        const double b = l.at(x0, y0 + 1) * (1 - tx) + l.at(x0 + 1, y0 + 1) * tx;
        return a * (1 - ty) + b * ty;
    };

    // three octaves per channel
    std::vector<Lattice> oct;
    for (int c = 0; c < 3; ++c) {
        oct.push_back(make_lattice(5, 5));
        oct.push_back(make_lattice(9, 9));
        oct.push_back(make_lattice(17, 17));
    }
    const double blob_x = rng.next_unit(), blob_y = rng.next_unit();
    const double blob_r = 0.15 + 0.2 * rng.next_unit();
    double blob_col[3] = {255 * rng.next_unit(), 255 * rng.next_unit(), 255 * rng.next_unit()};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double fx = (w > 1) ? static_cast<double>(x) / (w - 1) : 0.0;
            const double fy = (h > 1) ? static_cast<double>(y) / (h - 1) : 0.0;
            const double dx = fx - blob_x, dy = fy - blob_y;
            const double blob = std::exp(-(dx * dx + dy * dy) / (blob_r * blob_r));
            quant::Rgb8 px;
            std::uint8_t *ch[3] = {&px.r, &px.g, &px.b};
            for (int c = 0; c < 3; ++c) {
                double v = 0.55 * sample(oct[static_cast<std::size_t>(c) * 3], fx, fy) +
                           0.3 * sample(oct[static_cast<std::size_t>(c) * 3 + 1], fx, fy) +
                           0.15 * sample(oct[static_cast<std::size_t>(c) * 3 + 2], fx, fy);
                v = 255.0 * v * (1.0 - 0.6 * blob) + blob_col[c] * 0.6 * blob;
                v += 4.0 * (rng.next_unit() - 0.5); // sensor-ish jitter
                *ch[c] = quant::channel_to_u8(v);
            }
            img.at(x, y) = px;
        }
    }
    return img;
}

// A landscape-like scene: a smooth sky gradient above an irregular horizon,
// two-tone textured ground below it, and a few large soft-edged objects with
// hues of their own. The color mass concentrates in a handful of elongated
// clusters plus smooth shading, the way photographs do; population-driven
// splitters spread palette entries across the dominant region and starve the
// rest, which is exactly the weakness iterative refinement repairs.
inline quant::RawImage natural_photo(int w, int h, std::uint64_t seed) {
    quant::Rng rng(seed);
    quant::RawImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);

    const int hn = 9; // horizon control points
    std::vector<double> horizon(hn);
    for (double &v : horizon) v = 0.35 + 0.35 * rng.next_unit();
    auto horizon_at = [&](double fx) {
        const double g = fx * (hn - 1);
        const int i = std::min(static_cast<int>(g), hn - 2);
        const double t = g - i;
        return horizon[static_cast<std::size_t>(i)] * (1 - t) +
               horizon[static_cast<std::size_t>(i) + 1] * t;
    };

    // ground texture field (coarse 2-D lattice, bilinear)
    const int gn = 13;
    std::vector<double> ground(static_cast<std::size_t>(gn) * gn);
    for (double &v : ground) v = rng.next_unit();
    auto ground_at = [&](double fx, double fy) {
        const double gx = fx * (gn - 1), gy = fy * (gn - 1);
        const int x0 = std::min(static_cast<int>(gx), gn - 2);
        const int y0 = std::min(static_cast<int>(gy), gn - 2);
        const double tx = gx - x0, ty = gy - y0;
        const auto at = [&](int x, int y) {
            return ground[static_cast<std::size_t>(y) * gn + x];
        };
        const double a = at(x0, y0) * (1 - tx) + at(x0 + 1, y0) * tx;
        const double b = at(x0, y0 + 1) * (1 - tx) + at(x0 + 1, y0 + 1) * tx;
        return a * (1 - ty) + b * ty;
    };

    double sky_top[3], sky_bot[3], ground_a[3], ground_b[3];
    for (int c = 0; c < 3; ++c) {
        sky_top[c] = 90 + 130 * rng.next_unit();
        sky_bot[c] = std::clamp(sky_top[c] + 120 * (rng.next_unit() - 0.5), 0.0, 255.0);
        ground_a[c] = 20 + 120 * rng.next_unit();
        ground_b[c] = std::clamp(ground_a[c] + 90 * (rng.next_unit() - 0.5), 0.0, 255.0);
    }

    struct Blob {
        double x, y, rx, ry, col[3];
    };
    std::vector<Blob> blobs(3);
    for (Blob &b : blobs) {
        b.x = rng.next_unit();
        b.y = rng.next_unit();
        b.rx = 0.08 + 0.15 * rng.next_unit();
        b.ry = 0.08 + 0.15 * rng.next_unit();
        for (double &c : b.col) c = 255 * rng.next_unit();
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double fx = (w > 1) ? static_cast<double>(x) / (w - 1) : 0.0;
            const double fy = (h > 1) ? static_cast<double>(y) / (h - 1) : 0.0;
            const double hy = horizon_at(fx);
            double col[3];
            if (fy < hy) {
                const double t = fy / hy; // top of sky -> horizon
                for (int c = 0; c < 3; ++c) col[c] = sky_top[c] * (1 - t) + sky_bot[c] * t;
            } else {
                const double t = ground_at(fx, fy);
                for (int c = 0; c < 3; ++c) col[c] = ground_a[c] * (1 - t) + ground_b[c] * t;
            }
            for (const Blob &b : blobs) {
                const double dx = (fx - b.x) / b.rx, dy = (fy - b.y) / b.ry;
                const double a = std::exp(-(dx * dx + dy * dy));
                for (int c = 0; c < 3; ++c) col[c] = col[c] * (1 - a) + b.col[c] * a;
            }
            quant::Rgb8 px;
            px.r = quant::channel_to_u8(col[0] + 3.0 * (rng.next_unit() - 0.5));
            px.g = quant::channel_to_u8(col[1] + 3.0 * (rng.next_unit() - 0.5));
            px.b = quant::channel_to_u8(col[2] + 3.0 * (rng.next_unit() - 0.5));
            img.at(x, y) = px;
        }
    }
    return img;
}

inline quant::RawImage random_noise_image(int w, int h, std::uint64_t seed) {
    quant::Rng rng(seed);
    quant::RawImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    for (auto &p : img.pixels) {
        p.r = static_cast<std::uint8_t>(rng.next_below(256));
        p.g = static_cast<std::uint8_t>(rng.next_below(256));
        p.b = static_cast<std::uint8_t>(rng.next_below(256));
    }
    return img;
}

// n distinct random colors (as real-valued points on the integer grid)
inline std::vector<quant::ColorPoint> distinct_random_colors(std::size_t n, quant::Rng &rng) {
    std::set<std::uint32_t> seen;
    std::vector<quant::ColorPoint> out;
    out.reserve(n);
    while (out.size() < n) {
        const std::uint32_t key = static_cast<std::uint32_t>(rng.next_below(1u << 24));
        if (!seen.insert(key).second) continue;
        out.push_back({static_cast<double>((key >> 16) & 0xFF),
                       static_cast<double>((key >> 8) & 0xFF),
                       static_cast<double>(key & 0xFF)});
    }
    return out;
}

inline std::vector<double> random_weights(std::size_t n, quant::Rng &rng) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double &x : w) {
        x = 0.05 + rng.next_unit();
        sum += x;
    }
    for (double &x : w) x /= sum;
    return w;
}

// ---------------------------------------------------------------------------
// Oracles

struct Nearest {
    std::size_t index;
    double d2;
};

// Lowest index among exact minima.
inline Nearest brute_nearest(const quant::ColorPoint &x,
                             std::span<const quant::ColorPoint> centers) {
    Nearest best{0, quant::dist2(x, centers[0])};
    for (std::size_t j = 1; j < centers.size(); ++j) {
        const double d = quant::dist2(x, centers[j]);
        if (d < best.d2) best = {j, d};
    }
    return best;
}

inline double brute_sse(std::span<const quant::ColorPoint> points,
                        std::span<const double> weights,
                        std::span<const quant::ColorPoint> centers) {
    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        sse += weights[i] * brute_nearest(points[i], centers).d2;
    return sse;
}

// All eigenvalues of a symmetric 3x3 matrix {rr, rg, rb, gg, gb, bb} in
// descending order, closed form (trigonometric solution of the cubic).
inline void symmetric3_eigenvalues(const double S[6], double out[3]) {
    const double p1 = S[1] * S[1] + S[2] * S[2] + S[4] * S[4];
    if (p1 == 0.0) {
        out[0] = S[0];
        out[1] = S[3];
        out[2] = S[5];
        std::sort(out, out + 3, std::greater<>());
        return;
    }
    const double q = (S[0] + S[3] + S[5]) / 3.0;
    const double p2 = (S[0] - q) * (S[0] - q) + (S[3] - q) * (S[3] - q) +
                      (S[5] - q) * (S[5] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    // B = (S - qI) / p
    const double b00 = (S[0] - q) / p, b01 = S[1] / p, b02 = S[2] / p;
    const double b11 = (S[3] - q) / p, b12 = S[4] / p, b22 = (S[5] - q) / p;
    const double detB = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
                        b02 * (b01 * b12 - b11 * b02);
    const double r = std::clamp(detB / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    out[0] = q + 2.0 * p * std::cos(phi);
    out[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    out[1] = 3.0 * q - out[0] - out[2];
}

inline double symmetric3_max_eigenvalue(const double S[6]) {
    double eig[3];
    symmetric3_eigenvalues(S, eig);
    return eig[0];
}

// Weighted scatter matrix around the weighted mean, same layout as above.
inline void scatter_matrix(std::span<const quant::ColorPoint> colors,
                           std::span<const double> weights, double S[6]) {
    double wsum = 0, mr = 0, mg = 0, mb = 0;
    for (std::size_t i = 0; i < colors.size(); ++i) {
        wsum += weights[i];
        mr += weights[i] * colors[i].r;
        mg += weights[i] * colors[i].g;
        mb += weights[i] * colors[i].b;
    }
    mr /= wsum;
    mg /= wsum;
    mb /= wsum;
    std::fill(S, S + 6, 0.0);
    for (std::size_t i = 0; i < colors.size(); ++i) {
        const double dr = colors[i].r - mr, dg = colors[i].g - mg, db = colors[i].b - mb;
        S[0] += weights[i] * dr * dr;
        S[1] += weights[i] * dr * dg;
        S[2] += weights[i] * dr * db;
        S[3] += weights[i] * dg * dg;
        S[4] += weights[i] * dg * db;
        S[5] += weights[i] * db * db;
    }
}

// Builds a weighted histogram directly from distinct colors and raw counts
// (bypassing the hashing path) for hand-crafted fixtures.
inline quant::WeightedHistogram hist_direct(std::vector<quant::ColorPoint> colors,
                                            std::vector<std::uint32_t> counts) {
    quant::WeightedHistogram h;
    h.colors = std::move(colors);
    h.counts = std::move(counts);
    std::uint64_t total = 0;
    for (std::uint32_t c : h.counts) total += c;
    h.source_pixel_count = total;
    h.weights.resize(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        h.weights[i] = static_cast<double>(h.counts[i]) / static_cast<double>(total);
    return h;
}

} // namespace testsup

#endif
