#ifndef QUANT_PRECLUSTER_HPP
#define QUANT_PRECLUSTER_HPP

#include <cstdint>
#include <span>

#include "quant/color.hpp"
#include "quant/histogram.hpp"

namespace quant {

// 32x32x32 coarse histogram (5 bits per channel). Bins keep pixel counts and
// sums of the *original* 8-bit values, so box centroids land in original color
// space; sum_sq is the summed squared norm r^2+g^2+b^2, which is exactly what
// a 3-D within-box squared error needs.
struct CoarseHistogram {
    static constexpr int grid = 32;
    static constexpr std::size_t bins = 32768;

    std::vector<std::uint64_t> count;
    std::vector<std::int64_t> sum_r, sum_g, sum_b, sum_sq;

    CoarseHistogram()
        : count(bins, 0), sum_r(bins, 0), sum_g(bins, 0), sum_b(bins, 0), sum_sq(bins, 0) {}

    static std::size_t bin_index(int br, int bg, int bb) {
        return (static_cast<std::size_t>(br) * grid + bg) * grid + bb;
    }
    static std::size_t bin_of(Rgb8 c) { return bin_index(c.r >> 3, c.g >> 3, c.b >> 3); }
};

CoarseHistogram build_coarse_histogram(std::span<const Rgb8> pixels);
// Same aggregates, reconstructed from a weighted histogram's exact counts.
CoarseHistogram build_coarse_histogram(const WeightedHistogram &hist);

// All six return at most k centroids in deterministic order; palettes come
// back truncated when the structure runs out of splittable mass (coarse grids
// and the octree can merge distinct colors away, the exact-color methods
// cannot while k <= distinct colors).

// Median cut over the coarse grid: split the most populous box on its longest
// axis after the slice where cumulative count first reaches half.
Palette mediancut(const CoarseHistogram &ch, int k);

// Greedy marginal-variance splitting over the coarse grid: split the box with
// the largest squared error on its largest-variance channel, at the cut
// minimizing the 1-D marginal squared error (slice-mean granularity).
Palette wan_quantize(const CoarseHistogram &ch, int k);

// Like wan_quantize, but the (axis, cut) pair jointly minimizes the full 3-D
// squared error of the two sides, evaluated in O(1) per cut from cumulative
// moment tables over the grid.
Palette wu_quantize(const CoarseHistogram &ch, int k);

// Octree built from the top 6 bits of each channel; while leaves exceed k the
// deepest lowest-population internal node (ties to the lower Morton path)
// absorbs its leaf children.
Palette octree_quantize(std::span<const Rgb8> pixels, int k);

// Exact-color greedy bipartition: every step evaluates, over all boxes, all 3
// axes and all distinct projected cut positions (sorted projections + prefix
// moments), and applies the split with the greatest total squared-error
// decrease.
Palette otto_quantize(const WeightedHistogram &hist, int k);

// Exact-color binary splitting: split the cluster whose weighted scatter has
// the largest principal eigenvalue (power iteration), partitioning members by
// the sign of (x - mean) . v.
Palette binary_split(const WeightedHistogram &hist, int k);

// Dominant eigenpair of the weighted scatter matrix around the weighted mean,
// exactly as binary_split computes it (power iteration with axis fallback).
std::pair<double, ColorPoint> principal_scatter_axis(std::span<const ColorPoint> colors,
                                                     std::span<const double> weights);

} // namespace quant

#endif
