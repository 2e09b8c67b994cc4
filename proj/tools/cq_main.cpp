#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "quant/bench.hpp"
#include "quant/image.hpp"
#include "quant/pipeline.hpp"

namespace {

std::vector<int> parse_int_list(const std::string &csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<std::string> parse_string_list(const std::string &csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

std::vector<std::string> collect_images(const std::string &dir) {
    std::vector<std::string> out;
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (char &c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (ext == ".ppm" || ext == ".png") out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"cq - color quantization via weighted sort-means"};
    app.require_subcommand(1);

    // --- quantize ---
    auto *q = app.add_subcommand("quantize", "quantize one image");
    std::string q_input, q_output, q_palette_out, q_method = "wsm-wu", q_init, q_sampling = "unique",
                q_report;
    int q_colors = 64, q_max_iters = 100, q_fixed_iters = 0;
    std::uint64_t q_seed = 1;
    double q_epsilon = 0.001;
    q->add_option("--input", q_input, "input image (.ppm or .png)")->required();
    q->add_option("--colors", q_colors, "palette size K")->required();
    q->add_option("--method", q_method, "mc|ott|oct|wan|wu|bs, wsm, or wsm-<init>");
    q->add_option("--init", q_init, "initializer when --method wsm");
    q->add_option("--sampling", q_sampling, "none|2to1|unique|both (default unique)");
    q->add_option("--seed", q_seed, "random seed");
    q->add_option("--epsilon", q_epsilon, "relative SSE convergence threshold");
    q->add_option("--max-iters", q_max_iters, "iteration cap");
    q->add_option("--fixed-iters", q_fixed_iters, "run exactly this many iterations");
    q->add_option("--output", q_output, "quantized image path")->required();
    q->add_option("--palette-out", q_palette_out, "palette text file (R G B per line)");
    q->add_option("--report", q_report, "print a run report: json or csv");

    // --- bench ---
    auto *b = app.add_subcommand("bench", "benchmark methods over an image directory");
    std::string b_images, b_methods = "all", b_colors = "32,64", b_csv, b_sampling = "unique",
                b_time_mode = "wall";
    int b_runs = 1, b_max_iters = 100, b_fixed_iters = 0;
    std::uint64_t b_seed = 1;
    double b_epsilon = 0.001;
    b->add_option("--images", b_images, "directory of .ppm/.png images")->required();
    b->add_option("--methods", b_methods, "comma list of method tokens, or 'all'");
    b->add_option("--colors", b_colors, "comma list of palette sizes");
    b->add_option("--runs", b_runs, "runs per cell");
    b->add_option("--seed", b_seed, "seed base (per-run seed = base + run index)");
    b->add_option("--sampling", b_sampling, "none|2to1|unique|both");
    b->add_option("--epsilon", b_epsilon, "relative SSE convergence threshold");
    b->add_option("--max-iters", b_max_iters, "iteration cap");
    b->add_option("--fixed-iters", b_fixed_iters, "run exactly this many iterations");
    b->add_option("--csv", b_csv, "output CSV path")->required();
    b->add_option("--time-mode", b_time_mode,
                  "wall (default) or zero: zero writes 0 for time_ms so CSVs reproduce "
                  "byte-identically");

    CLI11_PARSE(app, argc, argv);

    try {
        if (q->parsed()) {
            quant::QuantizeConfig cfg;
            cfg.method = quant::parse_method(q_method, q_init);
            cfg.k = q_colors;
            cfg.sampling = quant::parse_sampling_mode(q_sampling);
            cfg.seed = q_seed;
            cfg.term.epsilon = q_epsilon;
            cfg.term.max_iterations = q_max_iters;
            if (q_fixed_iters > 0) cfg.term.fixed_iterations = q_fixed_iters;

            quant::LoadedImage loaded = quant::load_image(q_input);
            for (const std::string &w : loaded.warnings) std::cerr << "warning: " << w << "\n";

            quant::QuantizeResult result = quant::run_quantize(loaded.image, cfg);
            result.report.image = std::filesystem::path(q_input).filename().string();
            quant::save_image(result.mapping.quantized, q_output);
            if (!q_palette_out.empty()) quant::save_palette_text(result.palette, q_palette_out);

            if (q_report == "json") {
                std::cout << result.report.to_json() << "\n";
            } else if (q_report == "csv") {
                std::cout << quant::QuantReport::csv_header() << "\n"
                          << result.report.csv_row() << "\n";
            } else if (q_report.empty()) {
                std::cout << result.report.method << " k=" << result.report.k_actual
                          << " mse=" << result.report.mse << " psnr=" << result.report.psnr
                          << " iters=" << result.report.iterations
                          << " time=" << result.report.time_ms << "ms\n";
            } else {
                throw std::invalid_argument("unknown report format '" + q_report + "'");
            }
        } else {
            quant::BenchConfig cfg;
            cfg.image_paths = collect_images(b_images);
            cfg.methods =
                (b_methods == "all") ? quant::all_method_tokens() : parse_string_list(b_methods);
            cfg.ks = parse_int_list(b_colors);
            cfg.runs = b_runs;
            cfg.seed_base = b_seed;
            cfg.sampling = quant::parse_sampling_mode(b_sampling);
            cfg.term.epsilon = b_epsilon;
            cfg.term.max_iterations = b_max_iters;
            if (b_fixed_iters > 0) cfg.term.fixed_iterations = b_fixed_iters;
            if (b_time_mode == "zero")
                cfg.zero_time = true;
            else if (b_time_mode != "wall")
                throw std::invalid_argument("unknown time mode '" + b_time_mode + "'");

            quant::BenchResults results = quant::run_bench(cfg, &std::cerr);
            quant::write_bench_csv(results, b_csv);
            quant::print_rank_summary(quant::rank_aggregate(results), std::cout);
            if (results.error_count > 0)
                std::cerr << results.error_count << " cell(s) failed; see error rows in " << b_csv
                          << "\n";
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
