#include "quant/precluster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace quant {

CoarseHistogram build_coarse_histogram(std::span<const Rgb8> pixels) {
    if (pixels.empty()) throw std::invalid_argument("build_coarse_histogram: no pixels");
    CoarseHistogram ch;
    for (const Rgb8 &p : pixels) {
        const std::size_t b = CoarseHistogram::bin_of(p);
        ch.count[b] += 1;
        ch.sum_r[b] += p.r;
        ch.sum_g[b] += p.g;
        ch.sum_b[b] += p.b;
        ch.sum_sq[b] += static_cast<std::int64_t>(p.r) * p.r +
                        static_cast<std::int64_t>(p.g) * p.g +
                        static_cast<std::int64_t>(p.b) * p.b;
    }
    return ch;
}

CoarseHistogram build_coarse_histogram(const WeightedHistogram &hist) {
    if (hist.size() == 0) throw std::invalid_argument("build_coarse_histogram: empty histogram");
    CoarseHistogram ch;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const auto r = static_cast<std::int64_t>(hist.colors[i].r);
        const auto g = static_cast<std::int64_t>(hist.colors[i].g);
        const auto b = static_cast<std::int64_t>(hist.colors[i].b);
        const auto n = static_cast<std::int64_t>(hist.counts[i]);
        const std::size_t bin = CoarseHistogram::bin_index(static_cast<int>(r >> 3),
                                                           static_cast<int>(g >> 3),
                                                           static_cast<int>(b >> 3));
        ch.count[bin] += hist.counts[i];
        ch.sum_r[bin] += n * r;
        ch.sum_g[bin] += n * g;
        ch.sum_b[bin] += n * b;
        ch.sum_sq[bin] += n * (r * r + g * g + b * b);
    }
    return ch;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Shared coarse-grid box machinery (median cut + marginal-variance splitting)

struct GridBox {
    int lo[3] = {0, 0, 0};
    int hi[3] = {CoarseHistogram::grid - 1, CoarseHistogram::grid - 1, CoarseHistogram::grid - 1};
    std::uint64_t count = 0;
    std::int64_t sr = 0, sg = 0, sb = 0, sq = 0;

    bool splittable() const { return lo[0] < hi[0] || lo[1] < hi[1] || lo[2] < hi[2]; }

    double sse() const {
        if (count == 0) return 0.0;
        const double n = static_cast<double>(count);
        const double r = static_cast<double>(sr), g = static_cast<double>(sg),
                     b = static_cast<double>(sb);
        return static_cast<double>(sq) - (r * r + g * g + b * b) / n;
    }

    ColorPoint centroid() const {
        const double n = static_cast<double>(count);
        return {static_cast<double>(sr) / n, static_cast<double>(sg) / n,
                static_cast<double>(sb) / n};
    }
};

// Scans the given range, accumulating moments and tightening the bounds to
// the nonempty extent on every axis.
GridBox scan_box(const CoarseHistogram &ch, const int lo[3], const int hi[3]) {
    GridBox box;
    int mins[3] = {CoarseHistogram::grid, CoarseHistogram::grid, CoarseHistogram::grid};
    int maxs[3] = {-1, -1, -1};
    for (int r = lo[0]; r <= hi[0]; ++r)
        for (int g = lo[1]; g <= hi[1]; ++g)
            for (int b = lo[2]; b <= hi[2]; ++b) {
                const std::size_t bin = CoarseHistogram::bin_index(r, g, b);
                if (ch.count[bin] == 0) continue;
                box.count += ch.count[bin];
                box.sr += ch.sum_r[bin];
                box.sg += ch.sum_g[bin];
                box.sb += ch.sum_b[bin];
                box.sq += ch.sum_sq[bin];
                const int coord[3] = {r, g, b};
                for (int a = 0; a < 3; ++a) {
                    mins[a] = std::min(mins[a], coord[a]);
                    maxs[a] = std::max(maxs[a], coord[a]);
                }
            }
    for (int a = 0; a < 3; ++a) {
        box.lo[a] = mins[a];
        box.hi[a] = maxs[a];
    }
    return box;
}

struct SliceStats {
    std::uint64_t n = 0;
    std::int64_t sum[3] = {0, 0, 0}; // per-channel original-value sums
};

// Marginal distribution of a box along `axis`, one entry per slice lo..hi.
std::vector<SliceStats> slice_stats(const CoarseHistogram &ch, const GridBox &box, int axis) {
    std::vector<SliceStats> out(static_cast<std::size_t>(box.hi[axis] - box.lo[axis] + 1));
    for (int r = box.lo[0]; r <= box.hi[0]; ++r)
        for (int g = box.lo[1]; g <= box.hi[1]; ++g)
            for (int b = box.lo[2]; b <= box.hi[2]; ++b) {
                const std::size_t bin = CoarseHistogram::bin_index(r, g, b);
                if (ch.count[bin] == 0) continue;
                const int coord[3] = {r, g, b};
                SliceStats &s = out[static_cast<std::size_t>(coord[axis] - box.lo[axis])];
                s.n += ch.count[bin];
                s.sum[0] += ch.sum_r[bin];
                s.sum[1] += ch.sum_g[bin];
                s.sum[2] += ch.sum_b[bin];
            }
    return out;
}

void split_box(const CoarseHistogram &ch, std::vector<GridBox> &boxes, std::size_t idx, int axis,
               int cut /* last slice of the left side */) {
    const GridBox box = boxes[idx];
    int llo[3] = {box.lo[0], box.lo[1], box.lo[2]};
    int lhi[3] = {box.hi[0], box.hi[1], box.hi[2]};
    int rlo[3] = {box.lo[0], box.lo[1], box.lo[2]};
    int rhi[3] = {box.hi[0], box.hi[1], box.hi[2]};
    lhi[axis] = cut;
    rlo[axis] = cut + 1;
    boxes[idx] = scan_box(ch, llo, lhi);
    boxes.push_back(scan_box(ch, rlo, rhi));
}

std::vector<GridBox> grid_boxes_init(const CoarseHistogram &ch) {
    const int lo[3] = {0, 0, 0};
    const int hi[3] = {CoarseHistogram::grid - 1, CoarseHistogram::grid - 1,
                       CoarseHistogram::grid - 1};
    GridBox root = scan_box(ch, lo, hi);
    if (root.count == 0) throw std::invalid_argument("coarse histogram is empty");
    return {root};
}

Palette boxes_to_palette(const std::vector<GridBox> &boxes, int k) {
    Palette p;
    p.colors.reserve(boxes.size());
    for (const GridBox &b : boxes) p.colors.push_back(b.centroid());
    p.truncated = static_cast<int>(p.colors.size()) < k;
    return p;
}

void validate_precluster_k(int k) {
    if (k < 1) throw std::invalid_argument("preclustering: k must be at least 1");
}

// ---------------------------------------------------------------------------
// Cumulative moment tables for the joint (axis, cut) minimizer

struct WuTables {
    static constexpr int n = CoarseHistogram::grid + 1;
    std::vector<double> cnt, sr, sg, sb, sq;

    explicit WuTables(const CoarseHistogram &ch)
        : cnt(n * n * n, 0.0), sr(n * n * n, 0.0), sg(n * n * n, 0.0), sb(n * n * n, 0.0),
          sq(n * n * n, 0.0) {
        // T[r][g][b] accumulates bins with coordinates strictly below each
        // index, so a box query is pure inclusion-exclusion on 8 corners.
        for (int r = 1; r < n; ++r)
            for (int g = 1; g < n; ++g)
                for (int b = 1; b < n; ++b) {
                    const std::size_t bin = CoarseHistogram::bin_index(r - 1, g - 1, b - 1);
                    const std::size_t t = at(r, g, b);
                    const double c0 = static_cast<double>(ch.count[bin]);
                    cnt[t] = c0 + cnt[at(r - 1, g, b)] + cnt[at(r, g - 1, b)] +
                             cnt[at(r, g, b - 1)] - cnt[at(r - 1, g - 1, b)] -
                             cnt[at(r - 1, g, b - 1)] - cnt[at(r, g - 1, b - 1)] +
                             cnt[at(r - 1, g - 1, b - 1)];
                    sr[t] = sum_cell(ch.sum_r, bin) + sr[at(r - 1, g, b)] + sr[at(r, g - 1, b)] +
                            sr[at(r, g, b - 1)] - sr[at(r - 1, g - 1, b)] -
                            sr[at(r - 1, g, b - 1)] - sr[at(r, g - 1, b - 1)] +
                            sr[at(r - 1, g - 1, b - 1)];
                    sg[t] = sum_cell(ch.sum_g, bin) + sg[at(r - 1, g, b)] + sg[at(r, g - 1, b)] +
                            sg[at(r, g, b - 1)] - sg[at(r - 1, g - 1, b)] -
                            sg[at(r - 1, g, b - 1)] - sg[at(r, g - 1, b - 1)] +
                            sg[at(r - 1, g - 1, b - 1)];
                    sb[t] = sum_cell(ch.sum_b, bin) + sb[at(r - 1, g, b)] + sb[at(r, g - 1, b)] +
                            sb[at(r, g, b - 1)] - sb[at(r - 1, g - 1, b)] -
                            sb[at(r - 1, g, b - 1)] - sb[at(r, g - 1, b - 1)] +
                            sb[at(r - 1, g - 1, b - 1)];
                    sq[t] = sum_cell(ch.sum_sq, bin) + sq[at(r - 1, g, b)] + sq[at(r, g - 1, b)] +
                            sq[at(r, g, b - 1)] - sq[at(r - 1, g - 1, b)] -
                            sq[at(r - 1, g, b - 1)] - sq[at(r, g - 1, b - 1)] +
                            sq[at(r - 1, g - 1, b - 1)];
                }
    }

    static std::size_t at(int r, int g, int b) {
        return (static_cast<std::size_t>(r) * n + g) * n + b;
    }
    static double sum_cell(const std::vector<std::int64_t> &v, std::size_t bin) {
        return static_cast<double>(v[bin]);
    }

    struct Stats {
        double cnt = 0, sr = 0, sg = 0, sb = 0, sq = 0;
        double sse() const {
            if (cnt <= 0.0) return 0.0;
            return sq - (sr * sr + sg * sg + sb * sb) / cnt;
        }
    };

    Stats box(const int lo[3], const int hi[3]) const {
        const int r0 = lo[0], g0 = lo[1], b0 = lo[2];
        const int r1 = hi[0] + 1, g1 = hi[1] + 1, b1 = hi[2] + 1;
        Stats s;
        auto vol = [&](const std::vector<double> &t) {
            return t[at(r1, g1, b1)] - t[at(r0, g1, b1)] - t[at(r1, g0, b1)] -
                   t[at(r1, g1, b0)] + t[at(r0, g0, b1)] + t[at(r0, g1, b0)] +
                   t[at(r1, g0, b0)] - t[at(r0, g0, b0)];
        };
        s.cnt = vol(cnt);
        s.sr = vol(sr);
        s.sg = vol(sg);
        s.sb = vol(sb);
        s.sq = vol(sq);
        return s;
    }
};

struct WuBox {
    int lo[3], hi[3];

    bool splittable() const { return lo[0] < hi[0] || lo[1] < hi[1] || lo[2] < hi[2]; }
};

// Shrinks the box to its nonempty extent using single-slice count queries.
void wu_tighten(const WuTables &t, WuBox &b) {
    for (int a = 0; a < 3; ++a) {
        while (b.lo[a] < b.hi[a]) {
            int slo[3] = {b.lo[0], b.lo[1], b.lo[2]};
            int shi[3] = {b.hi[0], b.hi[1], b.hi[2]};
            shi[a] = slo[a] = b.lo[a];
            if (t.box(slo, shi).cnt > 0.0) break;
            ++b.lo[a];
        }
        while (b.hi[a] > b.lo[a]) {
            int slo[3] = {b.lo[0], b.lo[1], b.lo[2]};
            int shi[3] = {b.hi[0], b.hi[1], b.hi[2]};
            slo[a] = shi[a] = b.hi[a];
            if (t.box(slo, shi).cnt > 0.0) break;
            --b.hi[a];
        }
    }
}

// ---------------------------------------------------------------------------
// Octree

struct OctNode {
    std::int32_t parent = -1;
    std::array<std::int32_t, 8> child{-1, -1, -1, -1, -1, -1, -1, -1};
    std::uint8_t depth = 0;
    bool leaf = false;
    std::uint64_t count = 0;
    std::int64_t sr = 0, sg = 0, sb = 0;
    std::uint32_t morton = 0; // concatenated child indices along the path
};

constexpr int kOctDepth = 6; // top 6 bits of each channel

// ---------------------------------------------------------------------------
// Exact-color boxes (greedy best-split bipartition)

struct OttoBox {
    std::vector<std::uint32_t> members;
    double w = 0, sr = 0, sg = 0, sb = 0, sq = 0;
    double sse = 0;
    // best cached split: left side takes channel values <= cut_value
    double best_total = kInf;
    int best_axis = -1;
    double cut_value = 0;
};

double channel_of(const ColorPoint &c, int axis) {
    return axis == 0 ? c.r : (axis == 1 ? c.g : c.b);
}

void otto_compute(const WeightedHistogram &hist, OttoBox &box) {
    box.w = box.sr = box.sg = box.sb = box.sq = 0;
    for (std::uint32_t i : box.members) {
        const double w = hist.weights[i];
        const ColorPoint &c = hist.colors[i];
        box.w += w;
        box.sr += w * c.r;
        box.sg += w * c.g;
        box.sb += w * c.b;
        box.sq += w * (c.r * c.r + c.g * c.g + c.b * c.b);
    }
    box.sse = box.sq - (box.sr * box.sr + box.sg * box.sg + box.sb * box.sb) / box.w;

    box.best_total = kInf;
    box.best_axis = -1;
    const std::size_t n = box.members.size();
    if (n < 2) return;
    std::vector<std::uint32_t> order(box.members);
    for (int axis = 0; axis < 3; ++axis) {
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            const double va = channel_of(hist.colors[a], axis);
            const double vb = channel_of(hist.colors[b], axis);
            if (va != vb) return va < vb;
            return a < b;
        });
        double w = 0, sr = 0, sg = 0, sb = 0, sq = 0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            const std::uint32_t i = order[p];
            const double wi = hist.weights[i];
            const ColorPoint &c = hist.colors[i];
            w += wi;
            sr += wi * c.r;
            sg += wi * c.g;
            sb += wi * c.b;
            sq += wi * (c.r * c.r + c.g * c.g + c.b * c.b);
            // cuts live between distinct projected values only
            if (channel_of(hist.colors[order[p + 1]], axis) == channel_of(c, axis)) continue;
            const double lw = w, rw = box.w - w;
            const double lsse = sq - (sr * sr + sg * sg + sb * sb) / lw;
            const double rsq = box.sq - sq, rsr = box.sr - sr, rsg = box.sg - sg,
                         rsb = box.sb - sb;
            const double rsse = rsq - (rsr * rsr + rsg * rsg + rsb * rsb) / rw;
            const double total = lsse + rsse;
            if (total < box.best_total) {
                box.best_total = total;
                box.best_axis = axis;
                box.cut_value = channel_of(c, axis);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Binary splitting along the principal scatter direction

struct BsCluster {
    std::vector<std::uint32_t> members;
    double w = 0;
    ColorPoint mean;
    double S[6] = {0, 0, 0, 0, 0, 0}; // rr, rg, rb, gg, gb, bb
    double lambda = 0;                // split priority
    ColorPoint dir{1, 0, 0};
};

ColorPoint mat_mul(const double S[6], const ColorPoint &v) {
    return {S[0] * v.r + S[1] * v.g + S[2] * v.b, S[1] * v.r + S[3] * v.g + S[4] * v.b,
            S[2] * v.r + S[4] * v.g + S[5] * v.b};
}

double dot(const ColorPoint &a, const ColorPoint &b) { return a.r * b.r + a.g * b.g + a.b * b.b; }

void bs_compute(const WeightedHistogram &hist, BsCluster &cl) {
    cl.w = 0;
    double mr = 0, mg = 0, mb = 0;
    for (std::uint32_t i : cl.members) {
        const double w = hist.weights[i];
        cl.w += w;
        mr += w * hist.colors[i].r;
        mg += w * hist.colors[i].g;
        mb += w * hist.colors[i].b;
    }
    cl.mean = {mr / cl.w, mg / cl.w, mb / cl.w};
    std::fill(std::begin(cl.S), std::end(cl.S), 0.0);
    for (std::uint32_t i : cl.members) {
        const double w = hist.weights[i];
        const ColorPoint d = hist.colors[i] - cl.mean;
        cl.S[0] += w * d.r * d.r;
        cl.S[1] += w * d.r * d.g;
        cl.S[2] += w * d.r * d.b;
        cl.S[3] += w * d.g * d.g;
        cl.S[4] += w * d.g * d.b;
        cl.S[5] += w * d.b * d.b;
    }

    // Power iteration from the fixed diagonal start. The only true degeneracy
    // is S*v == 0 (the start vector lies in the null space); there the largest
    // -variance axis still gives a usable split direction. A slow eigengap just
    // means the Rayleigh estimate at the iteration cap is the best available,
    // and it is always at least as good as an axis guess.
    if (cl.members.size() < 2) {
        cl.lambda = 0.0;
        cl.dir = {1, 0, 0};
        return;
    }
    const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
    ColorPoint v{inv_sqrt3, inv_sqrt3, inv_sqrt3};
    double lambda_prev = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const ColorPoint u = mat_mul(cl.S, v);
        const double norm = std::sqrt(dot(u, u));
        if (norm == 0.0) {
            const double diag[3] = {cl.S[0], cl.S[3], cl.S[5]};
            int axis = 0;
            for (int a = 1; a < 3; ++a)
                if (diag[a] > diag[axis]) axis = a;
            cl.lambda = diag[axis];
            cl.dir = {axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0, axis == 2 ? 1.0 : 0.0};
            return;
        }
        v = u * (1.0 / norm);
        const double lambda = dot(v, mat_mul(cl.S, v));
        if (it > 0 && std::abs(lambda - lambda_prev) <= 1e-9 * std::max(std::abs(lambda), 1e-30)) {
            lambda_prev = lambda;
            break;
        }
        lambda_prev = lambda;
    }
    cl.lambda = lambda_prev;
    cl.dir = v;
}

// Splits by the sign of (x - mean) . dir; zero goes left. Degenerate splits
// (one empty side) fall back to a weighted lower-median cut on the
// largest-variance axis.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>
bs_partition(const WeightedHistogram &hist, const BsCluster &cl) {
    std::vector<std::uint32_t> left, right;
    for (std::uint32_t i : cl.members) {
        if (dot(hist.colors[i] - cl.mean, cl.dir) <= 0.0)
            left.push_back(i);
        else
            right.push_back(i);
    }
    if (!left.empty() && !right.empty()) return {std::move(left), std::move(right)};

    const double diag[3] = {cl.S[0], cl.S[3], cl.S[5]};
    int axis = 0;
    for (int a = 1; a < 3; ++a)
        if (diag[a] > diag[axis]) axis = a;
    std::vector<std::uint32_t> order(cl.members);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double va = channel_of(hist.colors[a], axis);
        const double vb = channel_of(hist.colors[b], axis);
        if (va != vb) return va < vb;
        return a < b;
    });
    const double half = cl.w / 2.0;
    double cum = 0.0;
    std::size_t split = order.size() - 1;
    for (std::size_t p = 0; p < order.size(); ++p) {
        cum += hist.weights[order[p]];
        if (cum >= half) {
            split = p;
            break;
        }
    }
    if (split + 1 >= order.size()) split = order.size() - 2;
    left.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(split + 1));
    right.assign(order.begin() + static_cast<std::ptrdiff_t>(split + 1), order.end());
    return {std::move(left), std::move(right)};
}

} // namespace

// ---------------------------------------------------------------------------

Palette mediancut(const CoarseHistogram &ch, int k) {
    validate_precluster_k(k);
    std::vector<GridBox> boxes = grid_boxes_init(ch);
    while (static_cast<int>(boxes.size()) < k) {
        // most populous splittable box
        std::size_t pick = boxes.size();
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (!boxes[i].splittable()) continue;
            if (pick == boxes.size() || boxes[i].count > boxes[pick].count) pick = i;
        }
        if (pick == boxes.size()) break;
        GridBox &box = boxes[pick];

        int axis = 0;
        for (int a = 1; a < 3; ++a)
            if (box.hi[a] - box.lo[a] > box.hi[axis] - box.lo[axis]) axis = a;

        const std::vector<SliceStats> slices = slice_stats(ch, box, axis);
        std::uint64_t cum = 0;
        int cut = box.hi[axis] - 1;
        for (int s = box.lo[axis]; s <= box.hi[axis]; ++s) {
            cum += slices[static_cast<std::size_t>(s - box.lo[axis])].n;
            if (2 * cum >= box.count) {
                cut = std::min(s, box.hi[axis] - 1);
                break;
            }
        }
        split_box(ch, boxes, pick, axis, cut);
    }
    return boxes_to_palette(boxes, k);
}

Palette wan_quantize(const CoarseHistogram &ch, int k) {
    validate_precluster_k(k);
    std::vector<GridBox> boxes = grid_boxes_init(ch);
    while (static_cast<int>(boxes.size()) < k) {
        std::size_t pick = boxes.size();
        double pick_sse = -1.0;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (!boxes[i].splittable()) continue;
            const double s = boxes[i].sse();
            if (s > pick_sse) {
                pick_sse = s;
                pick = i;
            }
        }
        if (pick == boxes.size()) break;
        GridBox &box = boxes[pick];

        // axis: largest marginal variance at slice granularity
        int axis = -1;
        double axis_var = -1.0;
        std::array<std::vector<SliceStats>, 3> margins;
        for (int a = 0; a < 3; ++a) {
            if (box.lo[a] >= box.hi[a]) continue;
            margins[a] = slice_stats(ch, box, a);
            double sqsum = 0.0, sum = 0.0;
            for (const SliceStats &s : margins[a]) {
                if (s.n == 0) continue;
                const double sv = static_cast<double>(s.sum[a]);
                sqsum += sv * sv / static_cast<double>(s.n);
                sum += sv;
            }
            const double var = sqsum - sum * sum / static_cast<double>(box.count);
            if (var > axis_var) {
                axis_var = var;
                axis = a;
            }
        }

        // cut: minimize left+right marginal squared error via prefix moments
        const std::vector<SliceStats> &sl = margins[axis];
        double tot_sq = 0.0, tot_sum = 0.0;
        for (const SliceStats &s : sl) {
            if (s.n == 0) continue;
            const double sv = static_cast<double>(s.sum[axis]);
            tot_sq += sv * sv / static_cast<double>(s.n);
            tot_sum += sv;
        }
        int cut = box.lo[axis];
        double best = kInf;
        double pre_sq = 0.0, pre_sum = 0.0;
        std::uint64_t pre_n = 0;
        for (int s = box.lo[axis]; s < box.hi[axis]; ++s) {
            const SliceStats &st = sl[static_cast<std::size_t>(s - box.lo[axis])];
            if (st.n > 0) {
                const double sv = static_cast<double>(st.sum[axis]);
                pre_sq += sv * sv / static_cast<double>(st.n);
                pre_sum += sv;
                pre_n += st.n;
            }
            if (pre_n == 0 || pre_n == box.count) continue;
            const double left = pre_sq - pre_sum * pre_sum / static_cast<double>(pre_n);
            const double rn = static_cast<double>(box.count - pre_n);
            const double rsum = tot_sum - pre_sum;
            const double right = (tot_sq - pre_sq) - rsum * rsum / rn;
            if (left + right < best) {
                best = left + right;
                cut = s;
            }
        }
        split_box(ch, boxes, pick, axis, cut);
    }
    return boxes_to_palette(boxes, k);
}

Palette wu_quantize(const CoarseHistogram &ch, int k) {
    validate_precluster_k(k);
    const WuTables tables(ch);
    WuBox root{{0, 0, 0},
               {CoarseHistogram::grid - 1, CoarseHistogram::grid - 1, CoarseHistogram::grid - 1}};
    wu_tighten(tables, root);
    if (tables.box(root.lo, root.hi).cnt <= 0.0)
        throw std::invalid_argument("coarse histogram is empty");

    std::vector<WuBox> boxes{root};
    while (static_cast<int>(boxes.size()) < k) {
        std::size_t pick = boxes.size();
        double pick_sse = -1.0;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (!boxes[i].splittable()) continue;
            const double s = tables.box(boxes[i].lo, boxes[i].hi).sse();
            if (s > pick_sse) {
                pick_sse = s;
                pick = i;
            }
        }
        if (pick == boxes.size()) break;
        const WuBox box = boxes[pick];

        int best_axis = -1, best_cut = 0;
        double best = kInf;
        for (int a = 0; a < 3; ++a) {
            if (box.lo[a] >= box.hi[a]) continue;
            for (int s = box.lo[a]; s < box.hi[a]; ++s) {
                int lhi[3] = {box.hi[0], box.hi[1], box.hi[2]};
                int rlo[3] = {box.lo[0], box.lo[1], box.lo[2]};
                lhi[a] = s;
                rlo[a] = s + 1;
                const double total =
                    tables.box(box.lo, lhi).sse() + tables.box(rlo, box.hi).sse();
                if (total < best) {
                    best = total;
                    best_axis = a;
                    best_cut = s;
                }
            }
        }

        WuBox left = box, right = box;
        left.hi[best_axis] = best_cut;
        right.lo[best_axis] = best_cut + 1;
        wu_tighten(tables, left);
        wu_tighten(tables, right);
        boxes[pick] = left;
        boxes.push_back(right);
    }

    Palette p;
    p.colors.reserve(boxes.size());
    for (const WuBox &b : boxes) {
        const WuTables::Stats s = tables.box(b.lo, b.hi);
        p.colors.push_back({s.sr / s.cnt, s.sg / s.cnt, s.sb / s.cnt});
    }
    p.truncated = static_cast<int>(p.colors.size()) < k;
    return p;
}

Palette octree_quantize(std::span<const Rgb8> pixels, int k) {
    validate_precluster_k(k);
    if (pixels.empty()) throw std::invalid_argument("octree_quantize: no pixels");

    std::vector<OctNode> nodes(1); // root
    std::size_t leaf_count = 0;
    for (const Rgb8 &px : pixels) {
        std::int32_t cur = 0;
        nodes[0].count += 1;
        nodes[0].sr += px.r;
        nodes[0].sg += px.g;
        nodes[0].sb += px.b;
        for (int d = 1; d <= kOctDepth; ++d) {
            const int bit = 8 - d;
            const int ci = (((px.r >> bit) & 1) << 2) | (((px.g >> bit) & 1) << 1) |
                           ((px.b >> bit) & 1);
            std::int32_t next = nodes[static_cast<std::size_t>(cur)].child[ci];
            if (next < 0) {
                next = static_cast<std::int32_t>(nodes.size());
                OctNode n;
                n.parent = cur;
                n.depth = static_cast<std::uint8_t>(d);
                n.morton = (nodes[static_cast<std::size_t>(cur)].morton << 3) |
                           static_cast<std::uint32_t>(ci);
                n.leaf = (d == kOctDepth);
                nodes.push_back(n);
                nodes[static_cast<std::size_t>(cur)].child[ci] = next;
                if (d == kOctDepth) ++leaf_count;
            }
            OctNode &nn = nodes[static_cast<std::size_t>(next)];
            nn.count += 1;
            nn.sr += px.r;
            nn.sg += px.g;
            nn.sb += px.b;
            cur = next;
        }
    }

    // Reduction: deepest / lowest-count / lowest-Morton internal node whose
    // children are all leaves folds them in. Keyed set keeps the scan O(log n).
    struct Key {
        int neg_depth;
        std::uint64_t count;
        std::uint32_t morton;
        std::int32_t id;
        bool operator<(const Key &o) const {
            if (neg_depth != o.neg_depth) return neg_depth < o.neg_depth;
            if (count != o.count) return count < o.count;
            if (morton != o.morton) return morton < o.morton;
            return id < o.id;
        }
    };
    auto reducible = [&nodes](std::int32_t id) {
        const OctNode &n = nodes[static_cast<std::size_t>(id)];
        if (n.leaf) return false;
        for (std::int32_t c : n.child)
            if (c >= 0 && !nodes[static_cast<std::size_t>(c)].leaf) return false;
        return true;
    };
    auto key_of = [&nodes](std::int32_t id) {
        const OctNode &n = nodes[static_cast<std::size_t>(id)];
        return Key{-static_cast<int>(n.depth), n.count, n.morton, id};
    };
    std::set<Key> queue;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (reducible(static_cast<std::int32_t>(i))) queue.insert(key_of(static_cast<std::int32_t>(i)));

    while (leaf_count > static_cast<std::size_t>(k) && !queue.empty()) {
        const Key top = *queue.begin();
        queue.erase(queue.begin());
        OctNode &n = nodes[static_cast<std::size_t>(top.id)];
        std::size_t merged = 0;
        for (std::int32_t &c : n.child) {
            if (c >= 0) {
                ++merged;
                c = -1;
            }
        }
        n.leaf = true;
        leaf_count = leaf_count - merged + 1;
        if (n.parent >= 0 && reducible(n.parent)) queue.insert(key_of(n.parent));
    }

    // Leaves in depth-first child order == ascending Morton path order.
    Palette p;
    p.colors.reserve(leaf_count);
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const std::int32_t id = stack.back();
        stack.pop_back();
        const OctNode &n = nodes[static_cast<std::size_t>(id)];
        if (n.leaf) {
            const double cnt = static_cast<double>(n.count);
            p.colors.push_back({static_cast<double>(n.sr) / cnt, static_cast<double>(n.sg) / cnt,
                                static_cast<double>(n.sb) / cnt});
            continue;
        }
        for (int ci = 7; ci >= 0; --ci)
            if (n.child[static_cast<std::size_t>(ci)] >= 0)
                stack.push_back(n.child[static_cast<std::size_t>(ci)]);
    }
    p.truncated = static_cast<int>(p.colors.size()) < k;
    return p;
}

Palette otto_quantize(const WeightedHistogram &hist, int k) {
    validate_precluster_k(k);
    if (static_cast<std::size_t>(k) > hist.size())
        throw std::invalid_argument("otto_quantize: k exceeds distinct colors");

    std::vector<OttoBox> boxes(1);
    boxes[0].members.resize(hist.size());
    std::iota(boxes[0].members.begin(), boxes[0].members.end(), 0u);
    otto_compute(hist, boxes[0]);

    while (static_cast<int>(boxes.size()) < k) {
        std::size_t pick = boxes.size();
        double best_decrease = -kInf;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (boxes[i].best_axis < 0) continue;
            const double dec = boxes[i].sse - boxes[i].best_total;
            if (dec > best_decrease) {
                best_decrease = dec;
                pick = i;
            }
        }
        if (pick == boxes.size()) {
            Palette p; // defensive: cannot happen while k <= distinct colors
            for (const OttoBox &b : boxes) p.colors.push_back({b.sr / b.w, b.sg / b.w, b.sb / b.w});
            p.truncated = true;
            return p;
        }
        OttoBox right;
        OttoBox &left = boxes[pick];
        std::vector<std::uint32_t> keep;
        for (std::uint32_t i : left.members) {
            if (channel_of(hist.colors[i], left.best_axis) <= left.cut_value)
                keep.push_back(i);
            else
                right.members.push_back(i);
        }
        left.members = std::move(keep);
        otto_compute(hist, left);
        otto_compute(hist, right);
        boxes.push_back(std::move(right));
    }

    Palette p;
    p.colors.reserve(boxes.size());
    for (const OttoBox &b : boxes) p.colors.push_back({b.sr / b.w, b.sg / b.w, b.sb / b.w});
    return p;
}

Palette binary_split(const WeightedHistogram &hist, int k) {
    validate_precluster_k(k);
    if (static_cast<std::size_t>(k) > hist.size())
        throw std::invalid_argument("binary_split: k exceeds distinct colors");

    std::vector<BsCluster> clusters(1);
    clusters[0].members.resize(hist.size());
    std::iota(clusters[0].members.begin(), clusters[0].members.end(), 0u);
    bs_compute(hist, clusters[0]);

    while (static_cast<int>(clusters.size()) < k) {
        std::size_t pick = clusters.size();
        double best = -1.0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            if (clusters[i].members.size() < 2) continue;
            if (clusters[i].lambda > best) {
                best = clusters[i].lambda;
                pick = i;
            }
        }
        auto [lm, rm] = bs_partition(hist, clusters[pick]);
        BsCluster right;
        right.members = std::move(rm);
        clusters[pick].members = std::move(lm);
        bs_compute(hist, clusters[pick]);
        bs_compute(hist, right);
        clusters.push_back(std::move(right));
    }

    Palette p;
    p.colors.reserve(clusters.size());
    for (const BsCluster &c : clusters) p.colors.push_back(c.mean);
    return p;
}

std::pair<double, ColorPoint> principal_scatter_axis(std::span<const ColorPoint> colors,
                                                     std::span<const double> weights) {
    if (colors.empty() || colors.size() != weights.size())
        throw std::invalid_argument("principal_scatter_axis: bad input");
    WeightedHistogram tmp;
    tmp.colors.assign(colors.begin(), colors.end());
    tmp.weights.assign(weights.begin(), weights.end());
    BsCluster cl;
    cl.members.resize(colors.size());
    std::iota(cl.members.begin(), cl.members.end(), 0u);
    bs_compute(tmp, cl);
    return {cl.lambda, cl.dir};
}

} // namespace quant
