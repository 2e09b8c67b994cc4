#ifndef QUANT_INIT_HPP
#define QUANT_INIT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "quant/color.hpp"
#include "quant/histogram.hpp"
#include "quant/kmeans.hpp"

namespace quant {

// Shared knobs for the initialization schemes. Every scheme consumes the
// weighted histogram and the seed only; the remaining fields tune individual
// schemes and keep their documented defaults here.
struct SeedConfig {
    int k = 8;
    std::uint64_t seed = 1;
    // Splitting offset for the doubling scheme, one LSB of the normalized
    // [0,1] channel scale expressed in 8-bit units: 0.001 * 255.
    ColorPoint lbg_perturbation{0.255, 0.255, 0.255};
    Termination lbg_refine{}; // refinement runs between doublings
    int density_grid = 8;     // cells per channel
    // Maximin's seed center: weight-proportional by default, uniform when off.
    bool maximin_weighted_first = true;
};

// Random centers: k distinct histogram colors, uniform without replacement.
std::vector<ColorPoint> init_forgy(const WeightedHistogram &hist, const SeedConfig &cfg);

// Doubling: start at the weighted centroid; split every center c into
// c +- perturbation and refine with wsm, repeated floor(log2 k) times. A
// non-power-of-two k then splits the (k - 2^floor(log2 k)) clusters with the
// largest SSE contribution once more and refines again.
std::vector<ColorPoint> init_lbg(const WeightedHistogram &hist, const SeedConfig &cfg);

// Maximin: seeded first center, then repeatedly the color with the largest
// minimum distance to the chosen set (ties to the lower histogram index).
std::vector<ColorPoint> init_maximin(const WeightedHistogram &hist, const SeedConfig &cfg);

// Density grid: colors binned into density_grid^3 cells; per-cell center
// quotas apportioned to cell weight by largest remainder, then drawn uniform
// without replacement inside each cell.
std::vector<ColorPoint> init_density(const WeightedHistogram &hist, const SeedConfig &cfg);

// Variance slicing: sort on the channel with the largest weighted variance
// (ties R, G, B), partition into k near-equal-weight contiguous groups, take
// each group's weighted lower median.
std::vector<ColorPoint> init_variance(const WeightedHistogram &hist, const SeedConfig &cfg);

// Subset maximin: weight-proportional subset of size min(ceil(2k ln k), N),
// then maximin restricted to it. k == 1 degenerates to init_forgy.
std::vector<ColorPoint> init_splitforgy(const WeightedHistogram &hist, const SeedConfig &cfg);

// Subset size used by init_splitforgy: min(ceil(2k ln k), n).
std::size_t splitforgy_subset_size(int k, std::size_t n);

// k-means++: weight-proportional first center, every next center drawn with
// probability proportional to weight * squared distance to the chosen set.
std::vector<ColorPoint> init_kmeanspp(const WeightedHistogram &hist, const SeedConfig &cfg);

// Probability masses of the next k-means++ draw given the chosen centers;
// the sampling law seam used by init_kmeanspp (incrementally) and the tests.
std::vector<double> kmeanspp_next_masses(const WeightedHistogram &hist,
                                         std::span<const ColorPoint> centers);

// Extends a (possibly short) center set to k by maximin picks over the
// histogram. Used when a coarse preclusterer hands back fewer colors than
// requested but a refinement stage needs exactly k.
std::vector<ColorPoint> maximin_pad(const WeightedHistogram &hist,
                                    std::vector<ColorPoint> centers, int k);

} // namespace quant

#endif
