#ifndef QUANT_BENCH_HPP
#define QUANT_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "quant/metrics.hpp"
#include "quant/pipeline.hpp"

namespace quant {

struct BenchConfig {
    std::vector<std::string> image_paths;
    std::vector<std::string> methods;
    std::vector<int> ks;
    int runs = 1;
    std::uint64_t seed_base = 1;
    SamplingMode sampling = SamplingMode::Unique;
    Termination term;
    // Writes 0.000 into time_ms so two runs with the same seed base produce
    // byte-identical CSVs (wall time is the one nondeterministic column).
    bool zero_time = false;
};

struct BenchResults {
    std::vector<QuantReport> rows; // sorted by (image, method, k, run)
    int error_count = 0;
};

// Runs every (image, method, k, run) cell; a failing cell becomes an error row
// (mse/psnr nan, flags carry the message) and the sweep continues. Per-run
// seed is seed_base + run index. `log`, when non-null, receives one line per
// cell.
BenchResults run_bench(const BenchConfig &config, std::ostream *log);

void write_bench_csv(const BenchResults &results, const std::string &path);

// Midranks: ranks 1..n by ascending value, ties averaged.
std::vector<double> midrank(std::span<const double> values);

// Consensus ranking across images: per (image, k) the methods are ranked by
// mean-over-runs MSE and time; ranks are averaged over images (per k), then
// over k per criterion, and the overall score is the mean of the two
// criterion means.
struct RankSummary {
    std::vector<std::string> methods;
    std::vector<int> ks;
    std::vector<std::vector<double>> mse_rank;  // [k][method]
    std::vector<std::vector<double>> time_rank; // [k][method]
    std::vector<double> mse_rank_mean;          // [method]
    std::vector<double> time_rank_mean;         // [method]
    std::vector<double> overall;                // [method]
};

RankSummary rank_aggregate(const BenchResults &results);

void print_rank_summary(const RankSummary &summary, std::ostream &out);

} // namespace quant

#endif
