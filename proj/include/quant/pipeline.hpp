#ifndef QUANT_PIPELINE_HPP
#define QUANT_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "quant/histogram.hpp"
#include "quant/init.hpp"
#include "quant/kmeans.hpp"
#include "quant/metrics.hpp"
#include "quant/precluster.hpp"

namespace quant {

// A method is either a standalone preclusterer (mc, ott, oct, wan, wu, bs) or
// a refined run "wsm-<x>" where <x> is an initialization scheme (fgy, lbg,
// mmx, den, var, sff, kpp) or any preclusterer used as the initializer.
struct MethodSpec {
    bool refine = false;
    std::string base; // precluster or init token

    std::string token() const { return refine ? "wsm-" + base : base; }
};

// Accepts "mc".."bs", "wsm-<x>", or "wsm" combined with a separate init token
// (empty init defaults to fgy). Throws on unknown tokens.
MethodSpec parse_method(const std::string &method, const std::string &init = "");

// Every method token, in the canonical benchmark order.
std::vector<std::string> all_method_tokens();

struct QuantizeConfig {
    MethodSpec method;
    int k = 8;
    SamplingMode sampling = SamplingMode::Unique;
    std::uint64_t seed = 1;
    Termination term;
    bool record_history = false; // forwarded to the clustering engine
};

struct QuantizeResult {
    Palette palette;
    MappingResult mapping;
    ClusterState state; // default-constructed for standalone preclusterers
    QuantReport report;
    std::size_t substrate_points = 0; // points the clustering stage saw
};

// Full pipeline: sample, build the histogram, generate the palette (with
// refinement when requested), map the full-resolution image, and assemble the
// report. time_ms spans palette generation through mapping.
QuantizeResult run_quantize(const RawImage &image, const QuantizeConfig &config);

} // namespace quant

#endif
