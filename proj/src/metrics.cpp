#include "quant/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "quant/kmeans.hpp"

namespace quant {

MappingResult map_pixels(const RawImage &image, const Palette &palette) {
    if (palette.colors.empty()) throw std::invalid_argument("map_pixels: empty palette");
    if (image.pixels.empty()) throw std::invalid_argument("map_pixels: empty image");

    MappingResult out;
    out.indices.resize(image.pixel_count());
    out.quantized.width = image.width;
    out.quantized.height = image.height;
    out.quantized.pixels.resize(image.pixel_count());

    std::vector<Rgb8> palette8(palette.colors.size());
    for (std::size_t i = 0; i < palette.colors.size(); ++i) palette8[i] = to_rgb8(palette.colors[i]);

    // Resolve each distinct color once; duplicates reuse the result.
    std::unordered_map<std::uint32_t, std::uint32_t> resolved;
    resolved.reserve(4096);
    const CenterDistanceTable table = build_center_distance_table(palette.colors);
    const std::span<const ColorPoint> centers(palette.colors);

    double total_d2 = 0.0;
    std::uint32_t hint = 0;
    for (std::size_t p = 0; p < image.pixels.size(); ++p) {
        const Rgb8 px = image.pixels[p];
        const std::uint32_t key = (static_cast<std::uint32_t>(px.r) << 16) |
                                  (static_cast<std::uint32_t>(px.g) << 8) | px.b;
        std::uint32_t idx;
        auto it = resolved.find(key);
        if (it != resolved.end()) {
            idx = it->second;
        } else {
            idx = nearest_pruned_lowest_index(ColorPoint(px), hint, table, centers, out.ndc);
            resolved.emplace(key, idx);
            hint = idx;
        }
        out.indices[p] = idx;
        out.quantized.pixels[p] = palette8[idx];
        total_d2 += dist2(centers[idx], px);
    }
    out.mean_sq_dist = total_d2 / static_cast<double>(image.pixel_count());
    return out;
}

double mse(const RawImage &a, const RawImage &b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("mse: image dimensions differ");
    if (a.pixels.empty()) throw std::invalid_argument("mse: empty images");
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const int dr = static_cast<int>(a.pixels[i].r) - b.pixels[i].r;
        const int dg = static_cast<int>(a.pixels[i].g) - b.pixels[i].g;
        const int db = static_cast<int>(a.pixels[i].b) - b.pixels[i].b;
        sum += static_cast<std::uint64_t>(dr * dr + dg * dg + db * db);
    }
    return static_cast<double>(sum) / static_cast<double>(a.pixels.size());
}

double psnr_from_mse(double mse_value) {
    if (mse_value < 0.0) throw std::invalid_argument("psnr_from_mse: negative mse");
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(255.0 / std::sqrt(mse_value));
}

namespace {

std::string join_flags(const std::vector<std::string> &flags) {
    std::string out;
    for (const std::string &f : flags) {
        if (!out.empty()) out += ';';
        out += f;
    }
    return out;
}

std::string fmt(const char *spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

} // namespace

std::string QuantReport::to_json() const {
    nlohmann::json j;
    j["image"] = image;
    j["method"] = method;
    j["k"] = k_requested;
    j["actual_k"] = k_actual;
    j["run"] = run;
    j["seed"] = seed;
    j["sampling"] = sampling_mode_token(sampling);
    j["mse"] = mse;
    if (std::isinf(psnr))
        j["psnr"] = "inf";
    else
        j["psnr"] = psnr;
    j["iterations"] = iterations;
    j["ndc_per_point_iter"] = ndc_per_point_iter;
    j["time_ms"] = time_ms;
    j["flags"] = flags;
    return j.dump(2);
}

const char *QuantReport::csv_header() {
    return "image,method,k,run,seed,sampling,mse,psnr,iterations,ndc_per_point_iter,time_ms,"
           "actual_k,flags";
}

std::string QuantReport::csv_row() const {
    std::string row;
    row += image;
    row += ',';
    row += method;
    row += ',';
    row += std::to_string(k_requested);
    row += ',';
    row += std::to_string(run);
    row += ',';
    row += std::to_string(seed);
    row += ',';
    row += sampling_mode_token(sampling);
    row += ',';
    row += std::isnan(mse) ? "nan" : fmt("%.6f", mse);
    row += ',';
    row += std::isinf(psnr) ? "inf" : (std::isnan(psnr) ? "nan" : fmt("%.4f", psnr));
    row += ',';
    row += std::to_string(iterations);
    row += ',';
    row += fmt("%.4f", ndc_per_point_iter);
    row += ',';
    row += fmt("%.3f", time_ms);
    row += ',';
    row += std::to_string(k_actual);
    row += ',';
    row += join_flags(flags);
    return row;
}

} // namespace quant
