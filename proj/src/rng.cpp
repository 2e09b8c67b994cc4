#include "quant/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace quant {

std::vector<std::size_t> sample_indices_uniform(std::size_t n, std::size_t k, Rng &rng) {
    if (k > n) throw std::invalid_argument("sample_indices_uniform: k exceeds population");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

std::vector<std::size_t> sample_indices_weighted(std::span<const double> weights, std::size_t k,
                                                 Rng &rng) {
    const std::size_t n = weights.size();
    if (k > n) throw std::invalid_argument("sample_indices_weighted: k exceeds population");
    // Key log(u)/w is monotone in u^(1/w); taking the k largest keys realizes
    // sequential weighted sampling without replacement.
    struct Keyed {
        double key;
        std::size_t idx;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("sample_indices_weighted: weights must be positive");
        double u = rng.next_unit();
        if (u <= 0.0) u = 0x1.0p-53; // log(0) guard; probability 2^-53 per draw
        keyed.push_back({std::log(u) / weights[i], i});
    }
    auto better = [](const Keyed &a, const Keyed &b) {
        if (a.key != b.key) return a.key > b.key;
        return a.idx < b.idx;
    };
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k), keyed.end(),
                      better);
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = keyed[i].idx;
    return out;
}

} // namespace quant
