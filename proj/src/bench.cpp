#include "quant/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "quant/image.hpp"

namespace quant {

namespace {

std::string sanitize_flag(std::string s) {
    for (char &c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == ';') c = ' ';
    return s;
}

} // namespace

BenchResults run_bench(const BenchConfig &config, std::ostream *log) {
    if (config.image_paths.empty()) throw std::invalid_argument("bench: no images");
    if (config.methods.empty()) throw std::invalid_argument("bench: no methods");
    if (config.ks.empty()) throw std::invalid_argument("bench: no palette sizes");
    if (config.runs < 1) throw std::invalid_argument("bench: runs must be at least 1");

    BenchResults results;
    for (const std::string &path : config.image_paths) {
        const std::string name = std::filesystem::path(path).filename().string();
        LoadedImage loaded;
        bool load_failed = false;
        try {
            loaded = load_image(path);
        } catch (const std::exception &e) {
            load_failed = true;
            if (log) *log << "error: " << e.what() << "\n";
            // one error row per would-be cell keeps the grid shape visible
            for (const std::string &method : config.methods)
                for (int k : config.ks)
                    for (int run = 0; run < config.runs; ++run) {
                        QuantReport r;
                        r.image = name;
                        r.method = method;
                        r.k_requested = r.k_actual = k;
                        r.run = run;
                        r.seed = config.seed_base + static_cast<std::uint64_t>(run);
                        r.sampling = config.sampling;
                        r.mse = r.psnr = std::nan("");
                        r.flags = {"error:" + sanitize_flag(e.what())};
                        results.rows.push_back(std::move(r));
                        ++results.error_count;
                    }
        }
        if (load_failed) continue;

        for (const std::string &method : config.methods)
            for (int k : config.ks)
                for (int run = 0; run < config.runs; ++run) {
                    QuantizeConfig qc;
                    qc.k = k;
                    qc.sampling = config.sampling;
                    qc.seed = config.seed_base + static_cast<std::uint64_t>(run);
                    qc.term = config.term;
                    QuantReport row;
                    try {
                        qc.method = parse_method(method);
                        QuantizeResult qr = run_quantize(loaded.image, qc);
                        row = std::move(qr.report);
                    } catch (const std::exception &e) {
                        row.method = method;
                        row.k_actual = k;
                        row.mse = row.psnr = std::nan("");
                        row.flags = {"error:" + sanitize_flag(e.what())};
                        ++results.error_count;
                    }
                    row.image = name;
                    row.k_requested = k;
                    row.run = run;
                    row.seed = qc.seed;
                    row.sampling = config.sampling;
                    if (config.zero_time) row.time_ms = 0.0;
                    if (log)
                        *log << name << ' ' << method << " k=" << k << " run=" << run << " mse="
                             << row.mse << " time=" << row.time_ms << "ms\n";
                    results.rows.push_back(std::move(row));
                }
    }

    // Collection order is an implementation detail; the CSV contract is the
    // sorted order.
    std::sort(results.rows.begin(), results.rows.end(),
              [](const QuantReport &a, const QuantReport &b) {
                  if (a.image != b.image) return a.image < b.image;
                  if (a.method != b.method) return a.method < b.method;
                  if (a.k_requested != b.k_requested) return a.k_requested < b.k_requested;
                  return a.run < b.run;
              });
    return results;
}

void write_bench_csv(const BenchResults &results, const std::string &path) {
    std::ofstream out(path, std::ios::binary); // fixed '\n' regardless of platform
    if (!out) throw std::runtime_error(path + ": cannot open file for writing");
    out << QuantReport::csv_header() << '\n';
    for (const QuantReport &r : results.rows) out << r.csv_row() << '\n';
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<double> midrank(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&values](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t p = i; p <= j; ++p) ranks[order[p]] = avg;
        i = j + 1;
    }
    return ranks;
}

RankSummary rank_aggregate(const BenchResults &results) {
    RankSummary s;
    // cell -> (sum, count) keyed by image/method/k, averaging over runs
    struct Acc {
        double mse = 0, time = 0;
        int n = 0;
    };
    std::map<std::string, std::map<int, std::map<std::string, Acc>>> cells; // image -> k -> method
    for (const QuantReport &r : results.rows) {
        if (std::isnan(r.mse)) continue; // error rows don't rank
        Acc &a = cells[r.image][r.k_requested][r.method];
        a.mse += r.mse;
        a.time += r.time_ms;
        ++a.n;
    }
    std::vector<std::string> methods;
    std::vector<int> ks;
    for (const auto &[image, by_k] : cells)
        for (const auto &[k, by_method] : by_k) {
            if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
            for (const auto &[m, acc] : by_method)
                if (std::find(methods.begin(), methods.end(), m) == methods.end())
                    methods.push_back(m);
        }
    std::sort(ks.begin(), ks.end());
    std::sort(methods.begin(), methods.end());
    s.methods = methods;
    s.ks = ks;

    const std::size_t nm = methods.size();
    s.mse_rank.assign(ks.size(), std::vector<double>(nm, 0.0));
    s.time_rank.assign(ks.size(), std::vector<double>(nm, 0.0));
    std::vector<std::vector<int>> images_counted(ks.size(), std::vector<int>(nm, 0));

    for (const auto &[image, by_k] : cells) {
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            auto it = by_k.find(ks[ki]);
            if (it == by_k.end()) continue;
            // methods present in this (image, k) cell
            std::vector<std::size_t> present;
            std::vector<double> mse_vals, time_vals;
            for (std::size_t mi = 0; mi < nm; ++mi) {
                auto mit = it->second.find(methods[mi]);
                if (mit == it->second.end()) continue;
                present.push_back(mi);
                mse_vals.push_back(mit->second.mse / mit->second.n);
                time_vals.push_back(mit->second.time / mit->second.n);
            }
            const std::vector<double> mr = midrank(mse_vals);
            const std::vector<double> tr = midrank(time_vals);
            for (std::size_t p = 0; p < present.size(); ++p) {
                s.mse_rank[ki][present[p]] += mr[p];
                s.time_rank[ki][present[p]] += tr[p];
                ++images_counted[ki][present[p]];
            }
        }
    }
    for (std::size_t ki = 0; ki < ks.size(); ++ki)
        for (std::size_t mi = 0; mi < nm; ++mi)
            if (images_counted[ki][mi] > 0) {
                s.mse_rank[ki][mi] /= images_counted[ki][mi];
                s.time_rank[ki][mi] /= images_counted[ki][mi];
            }

    s.mse_rank_mean.assign(nm, 0.0);
    s.time_rank_mean.assign(nm, 0.0);
    s.overall.assign(nm, 0.0);
    for (std::size_t mi = 0; mi < nm; ++mi) {
        int counted = 0;
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            if (images_counted[ki][mi] == 0) continue;
            s.mse_rank_mean[mi] += s.mse_rank[ki][mi];
            s.time_rank_mean[mi] += s.time_rank[ki][mi];
            ++counted;
        }
        if (counted > 0) {
            s.mse_rank_mean[mi] /= counted;
            s.time_rank_mean[mi] /= counted;
        }
        s.overall[mi] = (s.mse_rank_mean[mi] + s.time_rank_mean[mi]) / 2.0;
    }
    return s;
}

void print_rank_summary(const RankSummary &summary, std::ostream &out) {
    char line[160];
    for (std::size_t ki = 0; ki < summary.ks.size(); ++ki) {
        out << "k=" << summary.ks[ki] << "\n";
        std::snprintf(line, sizeof line, "  %-10s %10s %10s\n", "method", "mse_rank", "time_rank");
        out << line;
        for (std::size_t mi = 0; mi < summary.methods.size(); ++mi) {
            std::snprintf(line, sizeof line, "  %-10s %10.2f %10.2f\n",
                          summary.methods[mi].c_str(), summary.mse_rank[ki][mi],
                          summary.time_rank[ki][mi]);
            out << line;
        }
    }
    out << "overall (mean rank across k)\n";
    std::snprintf(line, sizeof line, "  %-10s %10s %10s %10s\n", "method", "mse_rank", "time_rank",
                  "overall");
    out << line;
    for (std::size_t mi = 0; mi < summary.methods.size(); ++mi) {
        std::snprintf(line, sizeof line, "  %-10s %10.2f %10.2f %10.2f\n",
                      summary.methods[mi].c_str(), summary.mse_rank_mean[mi],
                      summary.time_rank_mean[mi], summary.overall[mi]);
        out << line;
    }
}

} // namespace quant
