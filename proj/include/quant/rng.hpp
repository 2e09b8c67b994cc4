#ifndef QUANT_RNG_HPP
#define QUANT_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace quant {

// Seeded generator with portable derived draws. std::mt19937_64 produces a
// standardized stream, but std::uniform_int_distribution and friends are
// implementation-defined; every benchmark result and sampling law here must be
// reproducible from a seed alone, so the bounded/real/weighted draws are
// implemented explicitly on top of the raw 64-bit stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform integer in [0, n) by rejection; no modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("next_below: empty range");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 gen_;
};

// Index draw proportional to mass[i]; masses must be non-negative with a
// positive total. Prefix scan keeps the draw deterministic and O(n).
inline std::size_t weighted_draw(std::span<const double> mass, Rng &rng) {
    double total = 0.0;
    for (double m : mass) total += m;
    if (!(total > 0.0)) throw std::invalid_argument("weighted_draw: total mass must be positive");
    const double u = rng.next_unit() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < mass.size(); ++i) {
        acc += mass[i];
        if (u < acc) return i;
    }
    return mass.size() - 1;
}

// k distinct indices from [0, n), uniform without replacement
// (partial Fisher-Yates). Order of selection is preserved.
std::vector<std::size_t> sample_indices_uniform(std::size_t n, std::size_t k, Rng &rng);

// k distinct indices drawn weight-proportionally without replacement.
// Uses exponential keys (Efraimidis-Spirakis): exact sequential law, one pass.
std::vector<std::size_t> sample_indices_weighted(std::span<const double> weights, std::size_t k,
                                                 Rng &rng);

} // namespace quant

#endif
