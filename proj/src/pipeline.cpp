#include "quant/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace quant {

namespace {

const std::vector<std::string> kPreclusterTokens = {"mc", "ott", "oct", "wan", "wu", "bs"};
const std::vector<std::string> kInitTokens = {"fgy", "lbg", "mmx", "den", "var", "sff", "kpp"};

bool contains(const std::vector<std::string> &v, const std::string &s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

} // namespace

MethodSpec parse_method(const std::string &method, const std::string &init) {
    MethodSpec spec;
    if (method == "wsm") {
        spec.refine = true;
        spec.base = init.empty() ? "fgy" : init;
    } else if (method.rfind("wsm-", 0) == 0) {
        if (!init.empty()) throw std::invalid_argument("method '" + method + "' already names its initializer; drop --init");
        spec.refine = true;
        spec.base = method.substr(4);
    } else {
        if (!init.empty())
            throw std::invalid_argument("--init only applies to wsm methods, not '" + method + "'");
        spec.refine = false;
        spec.base = method;
    }
    if (spec.refine) {
        if (!contains(kInitTokens, spec.base) && !contains(kPreclusterTokens, spec.base))
            throw std::invalid_argument("unknown initializer '" + spec.base +
                                        "' (expected fgy|lbg|mmx|den|var|sff|kpp|mc|ott|oct|wan|wu|bs)");
    } else {
        if (!contains(kPreclusterTokens, spec.base))
            throw std::invalid_argument("unknown method '" + method +
                                        "' (expected mc|ott|oct|wan|wu|bs, wsm, or wsm-<init>)");
    }
    return spec;
}

std::vector<std::string> all_method_tokens() {
    std::vector<std::string> out = kPreclusterTokens;
    for (const std::string &t : kInitTokens) out.push_back("wsm-" + t);
    for (const std::string &t : kPreclusterTokens) out.push_back("wsm-" + t);
    return out;
}

namespace {

Palette run_preclusterer(const std::string &token, std::span<const Rgb8> pixels,
                         const WeightedHistogram &hist, int k) {
    if (token == "mc") return mediancut(build_coarse_histogram(hist), k);
    if (token == "wan") return wan_quantize(build_coarse_histogram(hist), k);
    if (token == "wu") return wu_quantize(build_coarse_histogram(hist), k);
    if (token == "oct") return octree_quantize(pixels, k);
    if (token == "ott") return otto_quantize(hist, k);
    if (token == "bs") return binary_split(hist, k);
    throw std::invalid_argument("unknown preclusterer '" + token + "'");
}

std::vector<ColorPoint> run_initializer(const std::string &token, const WeightedHistogram &hist,
                                        const SeedConfig &cfg) {
    if (token == "fgy") return init_forgy(hist, cfg);
    if (token == "lbg") return init_lbg(hist, cfg);
    if (token == "mmx") return init_maximin(hist, cfg);
    if (token == "den") return init_density(hist, cfg);
    if (token == "var") return init_variance(hist, cfg);
    if (token == "sff") return init_splitforgy(hist, cfg);
    if (token == "kpp") return init_kmeanspp(hist, cfg);
    throw std::invalid_argument("unknown initializer '" + token + "'");
}

} // namespace

QuantizeResult run_quantize(const RawImage &image, const QuantizeConfig &config) {
    if (image.pixels.empty()) throw std::invalid_argument("run_quantize: empty image");
    if (config.k < 1) throw std::invalid_argument("run_quantize: k must be at least 1");

    QuantizeResult out;
    const auto t0 = std::chrono::steady_clock::now();

    // Data reduction. The histogram of the (possibly subsampled) pixels is
    // always built: initializers and the exact-color preclusterers consume it,
    // and in the unique modes it is also the clustering substrate.
    const bool subsampled =
        config.sampling == SamplingMode::TwoToOne || config.sampling == SamplingMode::TwoToOneUnique;
    const bool dedup =
        config.sampling == SamplingMode::Unique || config.sampling == SamplingMode::TwoToOneUnique;

    std::vector<Rgb8> sampled_storage;
    std::span<const Rgb8> sampled(image.pixels);
    if (subsampled) {
        sampled_storage = subsample_2to1(image);
        sampled = sampled_storage;
    }
    const WeightedHistogram hist = build_histogram(sampled, config.seed);

    // Non-dedup substrates feed the raw (sub)sampled pixels to the engine with
    // uniform weights; histogram order drives everything else either way.
    std::vector<ColorPoint> raw_points;
    std::vector<double> raw_weights;
    if (!dedup && config.method.refine) {
        raw_points.reserve(sampled.size());
        for (const Rgb8 &p : sampled) raw_points.emplace_back(p);
        raw_weights.assign(sampled.size(), 1.0 / static_cast<double>(sampled.size()));
    }
    const std::span<const ColorPoint> points = dedup ? std::span<const ColorPoint>(hist.colors)
                                                     : std::span<const ColorPoint>(raw_points);
    const std::span<const double> weights =
        dedup ? std::span<const double>(hist.weights) : std::span<const double>(raw_weights);
    out.substrate_points = config.method.refine ? points.size() : 0;

    // Palette generation.
    if (config.method.refine) {
        std::vector<ColorPoint> init;
        if (std::find(kInitTokens.begin(), kInitTokens.end(), config.method.base) !=
            kInitTokens.end()) {
            SeedConfig scfg;
            scfg.k = config.k;
            scfg.seed = config.seed;
            init = run_initializer(config.method.base, hist, scfg);
        } else {
            Palette pre = run_preclusterer(config.method.base, sampled, hist, config.k);
            init = std::move(pre.colors);
            if (static_cast<int>(init.size()) < config.k) {
                init = maximin_pad(hist, std::move(init), config.k);
                out.report.flags.push_back("padded_init");
            }
        }
        ClusterOptions opts;
        opts.term = config.term;
        opts.record_history = config.record_history;
        out.state = wsm(points, weights, std::move(init), opts);
        out.palette.colors = out.state.centers;
        out.palette.truncated = false;
    } else {
        out.palette = run_preclusterer(config.method.base, sampled, hist, config.k);
        if (out.palette.truncated) out.report.flags.push_back("short_palette");
    }

    out.mapping = map_pixels(image, out.palette);
    const auto t1 = std::chrono::steady_clock::now();

    QuantReport &r = out.report;
    r.method = config.method.token();
    r.k_requested = config.k;
    r.k_actual = static_cast<int>(out.palette.size());
    r.seed = config.seed;
    r.sampling = config.sampling;
    r.mse = out.mapping.mean_sq_dist;
    r.psnr = psnr_from_mse(r.mse);
    r.iterations = out.state.iterations;
    r.ndc_per_point_iter = out.state.ndc_per_point_iter(out.substrate_points);
    r.time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (out.state.repair_count > 0)
        r.flags.push_back("repairs:" + std::to_string(out.state.repair_count));
    return out;
}

} // namespace quant
