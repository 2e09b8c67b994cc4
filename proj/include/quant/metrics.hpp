#ifndef QUANT_METRICS_HPP
#define QUANT_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "quant/color.hpp"
#include "quant/histogram.hpp"
#include "quant/image.hpp"

namespace quant {

struct MappingResult {
    std::vector<std::uint32_t> indices; // per-pixel palette index
    RawImage quantized;                 // palette colors rendered to 8-bit
    // Mean over all pixels of the squared distance to the assigned
    // (real-valued) palette color; this is the distortion the clustering
    // stage actually optimizes, free of 8-bit rendering jitter.
    double mean_sq_dist = 0.0;
    std::uint64_t ndc = 0;
};

// Maps every pixel to its exact nearest palette color (ties to the lower
// palette index). Each distinct color is resolved once through the pruned
// center search and the result reused for all its occurrences, so the cost
// scales with distinct colors rather than pixels.
MappingResult map_pixels(const RawImage &image, const Palette &palette);

// Mean squared RGB error between two equal-sized 8-bit images.
double mse(const RawImage &a, const RawImage &b);

// 20*log10(255/sqrt(mse)); +infinity when mse == 0.
double psnr_from_mse(double mse_value);

// One quantization run, as reported by the CLI and the benchmark harness.
struct QuantReport {
    std::string image;
    std::string method;
    int k_requested = 0;
    int k_actual = 0;
    int run = 0;
    std::uint64_t seed = 0;
    SamplingMode sampling = SamplingMode::Unique;
    double mse = 0.0;
    double psnr = 0.0;
    int iterations = 0;
    double ndc_per_point_iter = 0.0;
    double time_ms = 0.0;
    std::vector<std::string> flags;

    std::string to_json() const;

    // CSV schema shared by `--report csv` and the benchmark harness.
    static const char *csv_header();
    std::string csv_row() const;
};

} // namespace quant

#endif
