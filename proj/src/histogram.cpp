#include "quant/histogram.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace quant {

const char *sampling_mode_token(SamplingMode mode) {
    switch (mode) {
        case SamplingMode::None: return "none";
        case SamplingMode::TwoToOne: return "2to1";
        case SamplingMode::Unique: return "unique";
        case SamplingMode::TwoToOneUnique: return "both";
    }
    return "?";
}

SamplingMode parse_sampling_mode(const std::string &token) {
    if (token == "none") return SamplingMode::None;
    if (token == "2to1") return SamplingMode::TwoToOne;
    if (token == "unique") return SamplingMode::Unique;
    if (token == "both") return SamplingMode::TwoToOneUnique;
    throw std::invalid_argument("unknown sampling mode '" + token +
                                "' (expected none|2to1|unique|both)");
}

std::uint64_t hash_color(Rgb8 c, const HashParams &p) {
    const std::uint64_t s =
        p.a[0] * static_cast<std::uint64_t>(c.r) + p.a[1] * static_cast<std::uint64_t>(c.g) +
        p.a[2] * static_cast<std::uint64_t>(c.b);
    return s % p.m;
}

std::uint64_t next_prime_at_least(std::uint64_t n) {
    if (n <= 2) return 2;
    std::uint64_t c = n | 1; // first odd candidate >= n
    for (;; c += 2) {
        bool prime = true;
        for (std::uint64_t d = 3; d * d <= c; d += 2) {
            if (c % d == 0) {
                prime = false;
                break;
            }
        }
        if (prime) return c;
    }
}

HashParams make_hash_params(std::size_t pixel_count, Rng &rng) {
    if (pixel_count == 0) throw std::invalid_argument("make_hash_params: no pixels");
    HashParams p;
    p.m = next_prime_at_least(2 * static_cast<std::uint64_t>(pixel_count));
    do {
        for (auto &a : p.a) a = rng.next_below(p.m);
    } while (p.a[0] == 0 && p.a[1] == 0 && p.a[2] == 0);
    return p;
}

std::vector<Rgb8> subsample_2to1(const RawImage &image) {
    std::vector<Rgb8> out;
    out.reserve((static_cast<std::size_t>(image.width) + 1) / 2 *
                ((static_cast<std::size_t>(image.height) + 1) / 2));
    for (int y = 0; y < image.height; y += 2)
        for (int x = 0; x < image.width; x += 2) out.push_back(image.at(x, y));
    return out;
}

WeightedHistogram build_histogram(std::span<const Rgb8> pixels, std::uint64_t seed) {
    if (pixels.empty()) throw std::invalid_argument("build_histogram: no pixels");
    Rng rng(seed);
    WeightedHistogram hist;
    hist.source_pixel_count = pixels.size();
    hist.hash = make_hash_params(pixels.size(), rng);

    // Chained hash table: bucket heads index into per-color chain nodes.
    // Colors are appended on first sight, which fixes the histogram order.
    std::vector<std::int32_t> head(hist.hash.m, -1);
    std::vector<std::int32_t> next;
    std::vector<Rgb8> keys;

    for (const Rgb8 &px : pixels) {
        const std::uint64_t h = hash_color(px, hist.hash);
        std::int32_t i = head[h];
        while (i >= 0 && !(keys[static_cast<std::size_t>(i)] == px))
            i = next[static_cast<std::size_t>(i)];
        if (i >= 0) {
            ++hist.counts[static_cast<std::size_t>(i)];
        } else {
            const auto idx = static_cast<std::int32_t>(keys.size());
            keys.push_back(px);
            next.push_back(head[h]);
            head[h] = idx;
            hist.colors.emplace_back(px);
            hist.counts.push_back(1);
        }
    }

    const double inv = 1.0 / static_cast<double>(pixels.size());
    hist.weights.resize(hist.counts.size());
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        hist.weights[i] = static_cast<double>(hist.counts[i]) * inv;
    return hist;
}

void dump_histogram_csv(const WeightedHistogram &hist, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    out << "r,g,b,count,weight\n";
    char line[96];
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const ColorPoint &c = hist.colors[i];
        std::snprintf(line, sizeof line, "%d,%d,%d,%u,%.9f\n", static_cast<int>(c.r),
                      static_cast<int>(c.g), static_cast<int>(c.b), hist.counts[i],
                      hist.weights[i]);
        out << line;
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace quant
