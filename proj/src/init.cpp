#include "quant/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace quant {

namespace {

void validate_k(const WeightedHistogram &hist, int k) {
    if (k < 1) throw std::invalid_argument("initialization: k must be at least 1");
    if (static_cast<std::size_t>(k) > hist.size())
        throw std::invalid_argument("initialization: k (" + std::to_string(k) +
                                    ") exceeds distinct colors (" + std::to_string(hist.size()) +
                                    ")");
}

ColorPoint weighted_centroid(const WeightedHistogram &hist) {
    ColorPoint c;
    for (std::size_t i = 0; i < hist.size(); ++i) c += hist.colors[i] * hist.weights[i];
    return c; // weights sum to 1
}

// min squared distance from each color to the center set
std::vector<double> min_dist2_to(const WeightedHistogram &hist,
                                 std::span<const ColorPoint> centers) {
    std::vector<double> d(hist.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < hist.size(); ++i)
        for (const ColorPoint &c : centers) d[i] = std::min(d[i], dist2(hist.colors[i], c));
    return d;
}

void maximin_extend(const WeightedHistogram &hist, std::span<const std::size_t> pool,
                    std::vector<ColorPoint> &centers, int k) {
    std::vector<double> mind2(pool.size(), std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < pool.size(); ++p)
        for (const ColorPoint &c : centers)
            mind2[p] = std::min(mind2[p], dist2(hist.colors[pool[p]], c));
    while (static_cast<int>(centers.size()) < k) {
        std::size_t best = 0;
        for (std::size_t p = 1; p < pool.size(); ++p)
            if (mind2[p] > mind2[best]) best = p;
        const ColorPoint &chosen = hist.colors[pool[best]];
        centers.push_back(chosen);
        for (std::size_t p = 0; p < pool.size(); ++p)
            mind2[p] = std::min(mind2[p], dist2(hist.colors[pool[p]], chosen));
    }
}

} // namespace

std::vector<ColorPoint> init_forgy(const WeightedHistogram &hist, const SeedConfig &cfg) {
    validate_k(hist, cfg.k);
    Rng rng(cfg.seed);
    const auto idx = sample_indices_uniform(hist.size(), static_cast<std::size_t>(cfg.k), rng);
    std::vector<ColorPoint> centers;
    centers.reserve(idx.size());
    for (std::size_t i : idx) centers.push_back(hist.colors[i]);
    return centers;
}

std::vector<ColorPoint> init_lbg(const WeightedHistogram &hist, const SeedConfig &cfg) {
    validate_k(hist, cfg.k);
    const int k = cfg.k;
    std::vector<ColorPoint> centers{weighted_centroid(hist)};
    if (k == 1) return centers;

    ClusterOptions refine_opts;
    refine_opts.term = cfg.lbg_refine;
    const ColorPoint eps = cfg.lbg_perturbation;

    auto split = [&eps](const ColorPoint &c) {
        return std::pair<ColorPoint, ColorPoint>{c - eps, c + eps};
    };

    int doublings = 0;
    while ((2 << doublings) <= k) ++doublings; // floor(log2 k)
    for (int d = 0; d < doublings; ++d) {
        std::vector<ColorPoint> next;
        next.reserve(centers.size() * 2);
        for (const ColorPoint &c : centers) {
            auto [lo, hi] = split(c);
            next.push_back(lo);
            next.push_back(hi);
        }
        centers = wsm(hist.colors, hist.weights, std::move(next), refine_opts).centers;
    }

    const int remainder = k - (1 << doublings);
    if (remainder > 0) {
        // SSE contribution per cluster under the current centers decides which
        // clusters earn the extra splits.
        std::vector<double> contrib(centers.size(), 0.0);
        std::uint64_t scratch = 0;
        for (std::size_t i = 0; i < hist.size(); ++i) {
            const std::uint32_t m = nearest_full(hist.colors[i], centers, scratch);
            contrib[m] += hist.weights[i] * dist2(hist.colors[i], centers[m]);
        }
        std::vector<std::size_t> order(centers.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&contrib](std::size_t a, std::size_t b) {
            if (contrib[a] != contrib[b]) return contrib[a] > contrib[b];
            return a < b;
        });
        std::vector<bool> chosen(centers.size(), false);
        for (int i = 0; i < remainder; ++i) chosen[order[static_cast<std::size_t>(i)]] = true;
        std::vector<ColorPoint> next;
        next.reserve(static_cast<std::size_t>(k));
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (chosen[c]) {
                auto [lo, hi] = split(centers[c]);
                next.push_back(lo);
                next.push_back(hi);
            } else {
                next.push_back(centers[c]);
            }
        }
        centers = wsm(hist.colors, hist.weights, std::move(next), refine_opts).centers;
    }
    return centers;
}

std::vector<ColorPoint> init_maximin(const WeightedHistogram &hist, const SeedConfig &cfg) {
    validate_k(hist, cfg.k);
    Rng rng(cfg.seed);
    const std::size_t first = cfg.maximin_weighted_first
                                  ? weighted_draw(hist.weights, rng)
                                  : static_cast<std::size_t>(rng.next_below(hist.size()));
    std::vector<ColorPoint> centers{hist.colors[first]};
    std::vector<std::size_t> pool(hist.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    maximin_extend(hist, pool, centers, cfg.k);
    return centers;
}

std::vector<ColorPoint> init_density(const WeightedHistogram &hist, const SeedConfig &cfg) {
    validate_k(hist, cfg.k);
    const int g = cfg.density_grid;
    if (g < 1 || g > 256) throw std::invalid_argument("init_density: grid out of range");
    Rng rng(cfg.seed);

    const std::size_t cells = static_cast<std::size_t>(g) * g * g;
    auto cell_of = [g](const ColorPoint &c) {
        const int cr = static_cast<int>(c.r) * g / 256;
        const int cg = static_cast<int>(c.g) * g / 256;
        const int cb = static_cast<int>(c.b) * g / 256;
        return (static_cast<std::size_t>(cr) * g + cg) * g + cb;
    };

    std::vector<double> cell_weight(cells, 0.0);
    std::vector<std::vector<std::size_t>> cell_members(cells);
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const std::size_t c = cell_of(hist.colors[i]);
        cell_weight[c] += hist.weights[i];
        cell_members[c].push_back(i);
    }

    // Largest-remainder apportionment of k across nonempty cells, capped at
    // each cell's distinct-color capacity; leftover grants go to the cell with
    // the largest unmet ideal share (ties to the lower cell index).
    std::vector<std::size_t> nonempty;
    for (std::size_t c = 0; c < cells; ++c)
        if (!cell_members[c].empty()) nonempty.push_back(c);
    std::vector<int> quota(nonempty.size(), 0);
    int granted = 0;
    for (std::size_t i = 0; i < nonempty.size(); ++i) {
        const double ideal = cfg.k * cell_weight[nonempty[i]];
        quota[i] = std::min(static_cast<int>(ideal),
                            static_cast<int>(cell_members[nonempty[i]].size()));
        granted += quota[i];
    }
    while (granted < cfg.k) {
        std::size_t best = nonempty.size();
        double best_deficit = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nonempty.size(); ++i) {
            if (quota[i] >= static_cast<int>(cell_members[nonempty[i]].size())) continue;
            const double deficit = cfg.k * cell_weight[nonempty[i]] - quota[i];
            if (deficit > best_deficit) {
                best_deficit = deficit;
                best = i;
            }
        }
        if (best == nonempty.size()) // unreachable: total capacity >= k was validated
            throw std::logic_error("init_density: apportionment ran out of capacity");
        ++quota[best];
        ++granted;
    }

    std::vector<ColorPoint> centers;
    centers.reserve(static_cast<std::size_t>(cfg.k));
    for (std::size_t i = 0; i < nonempty.size(); ++i) {
        if (quota[i] == 0) continue;
        const auto &members = cell_members[nonempty[i]];
        const auto picks =
            sample_indices_uniform(members.size(), static_cast<std::size_t>(quota[i]), rng);
        for (std::size_t p : picks) centers.push_back(hist.colors[members[p]]);
    }
    return centers;
}

std::vector<ColorPoint> init_variance(const WeightedHistogram &hist, const SeedConfig &cfg) {
    validate_k(hist, cfg.k);
    const std::size_t n = hist.size();

    double mean[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        mean[0] += hist.weights[i] * hist.colors[i].r;
        mean[1] += hist.weights[i] * hist.colors[i].g;
        mean[2] += hist.weights[i] * hist.colors[i].b;
    }
    double var[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const double d[3] = {hist.colors[i].r - mean[0], hist.colors[i].g - mean[1],
                             hist.colors[i].b - mean[2]};
        for (int c = 0; c < 3; ++c) var[c] += hist.weights[i] * d[c] * d[c];
    }
    int axis = 0;
    for (int c = 1; c < 3; ++c)
        if (var[c] > var[axis]) axis = c;

    auto channel = [axis](const ColorPoint &c) {
        return axis == 0 ? c.r : (axis == 1 ? c.g : c.b);
    };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = channel(hist.colors[a]), vb = channel(hist.colors[b]);
        if (va != vb) return va < vb;
        return a < b;
    });

    // Greedy near-equal-weight contiguous groups; each group takes at least
    // one color and leaves enough colors for the groups after it.
    std::vector<ColorPoint> centers;
    centers.reserve(static_cast<std::size_t>(cfg.k));
    std::size_t pos = 0;
    double weight_left = 1.0;
    for (int grp = 0; grp < cfg.k; ++grp) {
        const int groups_after = cfg.k - grp - 1;
        const double target = weight_left / (cfg.k - grp);
        const std::size_t begin = pos;
        double acc = 0.0;
        while (pos < n - static_cast<std::size_t>(groups_after)) {
            acc += hist.weights[order[pos]];
            ++pos;
            if (groups_after > 0 && acc >= target) break; // last group takes the rest
        }
        weight_left -= acc;
        // weighted lower median of [begin, pos)
        double half = acc / 2.0, cum = 0.0;
        std::size_t median = pos - 1;
        for (std::size_t i = begin; i < pos; ++i) {
            cum += hist.weights[order[i]];
            if (cum >= half) {
                median = i;
                break;
            }
        }
        centers.push_back(hist.colors[order[median]]);
    }
    return centers;
}

std::size_t splitforgy_subset_size(int k, std::size_t n) {
    const auto want =
        static_cast<std::size_t>(std::ceil(2.0 * k * std::log(static_cast<double>(k))));
    return std::min(want, n);
}

std::vector<ColorPoint> init_splitforgy(const WeightedHistogram &hist, const SeedConfig &cfg) {
    validate_k(hist, cfg.k);
    if (cfg.k == 1) return init_forgy(hist, cfg);
    Rng rng(cfg.seed);
    const std::size_t subset_size = splitforgy_subset_size(cfg.k, hist.size());
    std::vector<std::size_t> subset = sample_indices_weighted(hist.weights, subset_size, rng);
    std::sort(subset.begin(), subset.end()); // histogram order for index tie-breaks

    std::size_t first;
    if (cfg.maximin_weighted_first) {
        std::vector<double> w(subset.size());
        for (std::size_t i = 0; i < subset.size(); ++i) w[i] = hist.weights[subset[i]];
        first = subset[weighted_draw(w, rng)];
    } else {
        first = subset[rng.next_below(subset.size())];
    }
    std::vector<ColorPoint> centers{hist.colors[first]};
    maximin_extend(hist, subset, centers, cfg.k);
    return centers;
}

std::vector<ColorPoint> init_kmeanspp(const WeightedHistogram &hist, const SeedConfig &cfg) {
    validate_k(hist, cfg.k);
    Rng rng(cfg.seed);
    std::vector<ColorPoint> centers;
    centers.reserve(static_cast<std::size_t>(cfg.k));
    centers.push_back(hist.colors[weighted_draw(hist.weights, rng)]);

    std::vector<double> mind2(hist.size());
    std::vector<double> mass(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i)
        mind2[i] = dist2(hist.colors[i], centers[0]);
    while (static_cast<int>(centers.size()) < cfg.k) {
        for (std::size_t i = 0; i < hist.size(); ++i) mass[i] = hist.weights[i] * mind2[i];
        const std::size_t pick = weighted_draw(mass, rng);
        centers.push_back(hist.colors[pick]);
        for (std::size_t i = 0; i < hist.size(); ++i)
            mind2[i] = std::min(mind2[i], dist2(hist.colors[i], centers.back()));
    }
    return centers;
}

std::vector<double> kmeanspp_next_masses(const WeightedHistogram &hist,
                                         std::span<const ColorPoint> centers) {
    if (centers.empty()) return {hist.weights.begin(), hist.weights.end()};
    const std::vector<double> mind2 = min_dist2_to(hist, centers);
    std::vector<double> mass(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i) mass[i] = hist.weights[i] * mind2[i];
    return mass;
}

std::vector<ColorPoint> maximin_pad(const WeightedHistogram &hist,
                                    std::vector<ColorPoint> centers, int k) {
    validate_k(hist, k);
    if (centers.empty()) throw std::invalid_argument("maximin_pad: need at least one center");
    if (static_cast<int>(centers.size()) >= k) return centers;
    std::vector<std::size_t> pool(hist.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    maximin_extend(hist, pool, centers, k);
    return centers;
}

} // namespace quant
