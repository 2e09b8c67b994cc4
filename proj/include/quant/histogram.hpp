#ifndef QUANT_HISTOGRAM_HPP
#define QUANT_HISTOGRAM_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quant/color.hpp"
#include "quant/image.hpp"
#include "quant/rng.hpp"

namespace quant {

// Data-reduction stages applied before clustering. TwoToOne keeps every other
// row and column; Unique collapses duplicates into a weighted histogram; Both
// composes them. Unique is the default: the weighted objective over distinct
// colors is then exactly the full-image objective, just cheaper to evaluate.
enum class SamplingMode { None, TwoToOne, Unique, TwoToOneUnique };

const char *sampling_mode_token(SamplingMode mode);
SamplingMode parse_sampling_mode(const std::string &token);

// Universal multiplicative hash h(x) = (a1*x1 + a2*x2 + a3*x3) mod m.
struct HashParams {
    std::uint64_t a[3] = {1, 1, 1};
    std::uint64_t m = 1;
};

std::uint64_t hash_color(Rgb8 c, const HashParams &p);

// Smallest prime >= n (trial division; n is at most a few million here).
std::uint64_t next_prime_at_least(std::uint64_t n);

// Hash parameters for a table over `pixel_count` pixels: m is the smallest
// prime >= 2 * pixel_count and the coefficients are drawn from the seeded
// generator over {0,...,m-1}, rejecting the all-zero triple.
HashParams make_hash_params(std::size_t pixel_count, Rng &rng);

// Distinct colors of a pixel sequence in first-occurrence order, with
// normalized weights. counts[i] is the raw occurrence count, so
// weights[i] * source_pixel_count reproduces it exactly.
struct WeightedHistogram {
    std::vector<ColorPoint> colors;
    std::vector<double> weights;
    std::vector<std::uint32_t> counts;
    std::size_t source_pixel_count = 0;
    HashParams hash;

    std::size_t size() const { return colors.size(); }
};

// Pixels at even rows and even columns (0-based), row-major order; output is
// ceil(w/2) x ceil(h/2) pixels.
std::vector<Rgb8> subsample_2to1(const RawImage &image);

WeightedHistogram build_histogram(std::span<const Rgb8> pixels, std::uint64_t seed);

// "r,g,b,count,weight" rows in histogram order, after a header line.
void dump_histogram_csv(const WeightedHistogram &hist, const std::string &path);

} // namespace quant

#endif
