#include "quant/kmeans.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace quant {

bool check_convergence(double sse_prev, double sse_cur, double epsilon) {
    if (sse_cur == 0.0) return true;
    return (sse_prev - sse_cur) / sse_cur <= epsilon;
}

CenterDistanceTable build_center_distance_table(std::span<const ColorPoint> centers) {
    const std::size_t k = centers.size();
    CenterDistanceTable t;
    t.k = k;
    t.dist2.resize(k * k);
    t.order.resize(k * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) t.dist2[i * k + j] = dist2(centers[i], centers[j]);
    for (std::size_t i = 0; i < k; ++i) {
        std::uint32_t *row = t.order.data() + i * k;
        for (std::size_t j = 0; j < k; ++j) row[j] = static_cast<std::uint32_t>(j);
        const double *drow = t.dist2.data() + i * k;
        std::sort(row, row + k, [drow](std::uint32_t a, std::uint32_t b) {
            if (drow[a] != drow[b]) return drow[a] < drow[b];
            return a < b;
        });
        // Self distance is 0, so index i sorts to the front (ties with a
        // coincident lower-index center would displace it; force the contract).
        if (row[0] != i) {
            auto *self = std::find(row, row + k, static_cast<std::uint32_t>(i));
            std::rotate(row, self, self + 1);
        }
    }
    return t;
}

std::uint32_t nearest_full(const ColorPoint &x, std::span<const ColorPoint> centers,
                           std::uint64_t &ndc) {
    std::uint32_t best = 0;
    double best_d = dist2(x, centers[0]);
    ++ndc;
    for (std::size_t j = 1; j < centers.size(); ++j) {
        const double d = dist2(x, centers[j]);
        ++ndc;
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::uint32_t>(j);
        }
    }
    return best;
}

std::uint32_t assign_point_sortmeans(const ColorPoint &x, std::uint32_t prev,
                                     const CenterDistanceTable &table,
                                     std::span<const ColorPoint> centers, std::uint64_t &ndc) {
    const std::size_t k = table.k;
    const double *drow = table.dist2.data() + static_cast<std::size_t>(prev) * k;
    const std::uint32_t *orow = table.order.data() + static_cast<std::size_t>(prev) * k;

    const double prev_d2 = dist2(x, centers[prev]);
    ++ndc;
    const double cutoff = 4.0 * prev_d2;
    double best_d = prev_d2;
    std::uint32_t best = prev;
    for (std::size_t j = 1; j < k; ++j) {
        const std::uint32_t t = orow[j];
        if (drow[t] >= cutoff) break;
        const double d = dist2(x, centers[t]);
        ++ndc;
        if (d < best_d) {
            best_d = d;
            best = t;
        }
    }
    return best;
}

std::uint32_t nearest_pruned_lowest_index(const ColorPoint &x, std::uint32_t hint,
                                          const CenterDistanceTable &table,
                                          std::span<const ColorPoint> centers,
                                          std::uint64_t &ndc) {
    const std::size_t k = table.k;
    const double *drow = table.dist2.data() + static_cast<std::size_t>(hint) * k;
    const std::uint32_t *orow = table.order.data() + static_cast<std::size_t>(hint) * k;

    const double prev_d2 = dist2(x, centers[hint]);
    ++ndc;
    const double cutoff = 4.0 * prev_d2;
    double best_d = prev_d2;
    std::uint32_t best = hint;
    for (std::size_t j = 1; j < k; ++j) {
        const std::uint32_t t = orow[j];
        if (drow[t] > cutoff) break;
        const double d = dist2(x, centers[t]);
        ++ndc;
        if (d < best_d || (d == best_d && t < best)) {
            best_d = d;
            best = t;
        }
    }
    return best;
}

double compute_sse(std::span<const ColorPoint> points, std::span<const double> weights,
                   std::span<const ColorPoint> centers,
                   std::span<const std::uint32_t> memberships) {
    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        sse += weights[i] * dist2(points[i], centers[memberships[i]]);
    return sse;
}

double compute_sse(std::span<const ColorPoint> points, std::span<const ColorPoint> centers,
                   std::span<const std::uint32_t> memberships) {
    double sse = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        sse += dist2(points[i], centers[memberships[i]]);
    return sse;
}

int repair_empty_clusters(std::span<const ColorPoint> points, std::span<const double> weights,
                          std::vector<ColorPoint> &centers,
                          std::vector<std::uint32_t> &memberships) {
    const std::size_t k = centers.size();
    std::vector<std::uint32_t> size(k, 0);
    for (std::uint32_t m : memberships) ++size[m];

    int repairs = 0;
    for (std::size_t e = 0; e < k;) {
        if (size[e] != 0) {
            ++e;
            continue;
        }
        // Largest remaining contributor to the objective donates its point.
        std::size_t donor = points.size();
        double best = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double c = weights[i] * dist2(points[i], centers[memberships[i]]);
            if (c > best) {
                best = c;
                donor = i;
            }
        }
        if (best <= 0.0) {
            // Every point already sits on its center, which requires duplicate
            // points (a weighted histogram never gets here). Take the first
            // point whose cluster can spare one.
            donor = points.size();
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (size[memberships[i]] >= 2) {
                    donor = i;
                    break;
                }
            }
            if (donor == points.size())
                throw std::runtime_error("repair_empty_clusters: more clusters than points");
        }
        --size[memberships[donor]];
        memberships[donor] = static_cast<std::uint32_t>(e);
        centers[e] = points[donor];
        ++size[e];
        ++repairs;
        e = 0; // the donor cluster may itself have emptied
    }
    return repairs;
}

namespace {

void validate_run(std::size_t n_points, std::size_t n_weights, std::size_t k,
                  const ClusterOptions &options, bool weighted) {
    if (k == 0) throw std::invalid_argument("clustering: no initial centers");
    if (n_points == 0) throw std::invalid_argument("clustering: no points");
    if (k > n_points)
        throw std::invalid_argument("clustering: k (" + std::to_string(k) +
                                    ") exceeds number of points (" + std::to_string(n_points) +
                                    ")");
    if (weighted && n_weights != n_points)
        throw std::invalid_argument("clustering: weights/points size mismatch");
    const Termination &t = options.term;
    if (t.epsilon < 0.0) throw std::invalid_argument("clustering: negative epsilon");
    if (t.max_iterations <= 0) throw std::invalid_argument("clustering: max_iterations < 1");
    if (t.fixed_iterations && *t.fixed_iterations <= 0)
        throw std::invalid_argument("clustering: fixed_iterations < 1");
}

// Shared Lloyd loop. `weights` carries unit weights for the reference engine,
// which also disables pruning and repair.
ClusterState run_lloyd(std::span<const ColorPoint> points, std::span<const double> weights,
                       std::vector<ColorPoint> init, const ClusterOptions &options, bool prune,
                       bool repair) {
    const std::size_t n = points.size();
    const std::size_t k = init.size();

    ClusterState state;
    state.centers = std::move(init);
    state.memberships.assign(n, 0);

    std::vector<double> sum_r(k), sum_g(k), sum_b(k), wsum(k);

    const Termination &term = options.term;
    const int limit = term.fixed_iterations ? *term.fixed_iterations : term.max_iterations;

    for (int iter = 1;; ++iter) {
        // Assignment. The first pass has no usable previous membership, so it
        // always runs the full scan.
        if (prune && iter > 1) {
            const CenterDistanceTable table = build_center_distance_table(state.centers);
            for (std::size_t i = 0; i < n; ++i)
                state.memberships[i] = assign_point_sortmeans(
                    points[i], state.memberships[i], table, state.centers, state.ndc_total);
        } else {
            for (std::size_t i = 0; i < n; ++i)
                state.memberships[i] = nearest_full(points[i], state.centers, state.ndc_total);
        }

        if (options.record_history) state.history.push_back({state.centers, state.memberships});

        if (repair)
            state.repair_count +=
                repair_empty_clusters(points, weights, state.centers, state.memberships);

        // Update: weighted means. A cluster that is still empty (reference
        // engine only) keeps its previous center.
        std::fill(sum_r.begin(), sum_r.end(), 0.0);
        std::fill(sum_g.begin(), sum_g.end(), 0.0);
        std::fill(sum_b.begin(), sum_b.end(), 0.0);
        std::fill(wsum.begin(), wsum.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t m = state.memberships[i];
            const double w = weights[i];
            sum_r[m] += w * points[i].r;
            sum_g[m] += w * points[i].g;
            sum_b[m] += w * points[i].b;
            wsum[m] += w;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (wsum[c] > 0.0)
                state.centers[c] = {sum_r[c] / wsum[c], sum_g[c] / wsum[c], sum_b[c] / wsum[c]};
        }

        const double sse = compute_sse(points, weights, state.centers, state.memberships);
        state.sse_trace.push_back(sse);
        state.iterations = iter;

        if (term.fixed_iterations) {
            if (iter >= limit) break;
        } else {
            if (sse == 0.0) break;
            if (iter >= 2 &&
                check_convergence(state.sse_trace[iter - 2], sse, term.epsilon))
                break;
            if (iter >= limit) break;
        }
    }
    return state;
}

} // namespace

ClusterState kmeans_full(std::span<const ColorPoint> points, std::vector<ColorPoint> init,
                         const ClusterOptions &options) {
    validate_run(points.size(), 0, init.size(), options, false);
    std::vector<double> unit(points.size(), 1.0);
    return run_lloyd(points, unit, std::move(init), options, /*prune=*/false, /*repair=*/false);
}

ClusterState wsm(std::span<const ColorPoint> points, std::span<const double> weights,
                 std::vector<ColorPoint> init, const ClusterOptions &options) {
    validate_run(points.size(), weights.size(), init.size(), options, true);
    for (double w : weights)
        if (!(w > 0.0)) throw std::invalid_argument("wsm: weights must be positive");
    return run_lloyd(points, weights, std::move(init), options, /*prune=*/true, /*repair=*/true);
}

} // namespace quant
