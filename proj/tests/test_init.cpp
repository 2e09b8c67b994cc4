#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "quant/init.hpp"
#include "quant/rng.hpp"
#include "test_support.hpp"

using namespace quant;

namespace {

WeightedHistogram random_hist(std::size_t n, Rng &rng) {
    auto colors = testsup::distinct_random_colors(n, rng);
    std::vector<std::uint32_t> counts(n);
    for (auto &c : counts) c = 1 + static_cast<std::uint32_t>(rng.next_below(40));
    return testsup::hist_direct(std::move(colors), std::move(counts));
}

std::set<std::tuple<double, double, double>> as_set(const std::vector<ColorPoint> &v) {
    std::set<std::tuple<double, double, double>> s;
    for (const auto &c : v) s.insert({c.r, c.g, c.b});
    return s;
}

// Order-insensitive comparison with a tolerance: a weighted mean of a single
// color (w*x)/w can pick up an ulp of dust, so exact set equality is too
// strict for anything that went through a refinement pass.
void check_centers_match(std::vector<ColorPoint> got, std::vector<ColorPoint> want, double eps) {
    REQUIRE(got.size() == want.size());
    const auto by_rgb = [](const ColorPoint &x, const ColorPoint &y) {
        if (x.r != y.r) return x.r < y.r;
        if (x.g != y.g) return x.g < y.g;
        return x.b < y.b;
    };
    std::sort(got.begin(), got.end(), by_rgb);
    std::sort(want.begin(), want.end(), by_rgb);
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].r == doctest::Approx(want[i].r).epsilon(eps));
        CHECK(got[i].g == doctest::Approx(want[i].g).epsilon(eps));
        CHECK(got[i].b == doctest::Approx(want[i].b).epsilon(eps));
    }
}

// Reference maximin growth: repeatedly add the histogram color with the
// largest distance to its nearest chosen center, ties to the lower index.
void oracle_maximin_extend(const WeightedHistogram &hist, std::vector<ColorPoint> &centers,
                           int k) {
    while (static_cast<int>(centers.size()) < k) {
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < hist.size(); ++i) {
            double d = testsup::brute_nearest(hist.colors[i], centers).d2;
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        centers.push_back(hist.colors[best]);
    }
}

} // namespace

TEST_CASE("random seeding draws k distinct histogram colors, reproducibly") {
    Rng rng(1);
    WeightedHistogram h = random_hist(60, rng);
    SeedConfig cfg;
    cfg.k = 12;
    cfg.seed = 31;

    auto c1 = init_forgy(h, cfg);
    auto c2 = init_forgy(h, cfg);
    REQUIRE(c1.size() == 12);
    CHECK(c1 == c2);
    CHECK(as_set(c1).size() == 12);
    auto all = as_set(std::vector<ColorPoint>(h.colors.begin(), h.colors.end()));
    for (const auto &c : c1) CHECK(all.count({c.r, c.g, c.b}) == 1);

    cfg.k = 60; // exhaustive draw returns the whole histogram
    CHECK(as_set(init_forgy(h, cfg)) == all);

    cfg.k = 61;
    CHECK_THROWS_AS(init_forgy(h, cfg), std::invalid_argument);
}

TEST_CASE("doubling scheme: k = 1 is the exact weighted centroid") {
    WeightedHistogram h = testsup::hist_direct({{0, 0, 0}, {100, 0, 0}}, {1, 3});
    SeedConfig cfg;
    cfg.k = 1;
    auto c = init_lbg(h, cfg);
    REQUIRE(c.size() == 1);
    CHECK(c[0].r == doctest::Approx(75.0).epsilon(1e-12));
    CHECK(c[0].g == 0.0);
}

TEST_CASE("doubling scheme recovers well-separated atoms exactly") {
    SeedConfig cfg;

    // two atoms, k = 2
    WeightedHistogram h2 = testsup::hist_direct({{0, 0, 0}, {100, 100, 100}}, {1, 1});
    cfg.k = 2;
    check_centers_match(init_lbg(h2, cfg), {{0, 0, 0}, {100, 100, 100}}, 1e-12);

    // three atoms, k = 3: one doubling plus a remainder split
    WeightedHistogram h3 =
        testsup::hist_direct({{0, 0, 0}, {50, 50, 50}, {100, 100, 100}}, {1, 1, 1});
    cfg.k = 3;
    check_centers_match(init_lbg(h3, cfg), {{0, 0, 0}, {50, 50, 50}, {100, 100, 100}}, 1e-12);
}

TEST_CASE("maximin growth matches the reference sequence") {
    Rng rng(9);
    for (int trial = 0; trial < 8; ++trial) {
        WeightedHistogram h = random_hist(40 + rng.next_below(60), rng);
        SeedConfig cfg;
        cfg.k = 2 + static_cast<int>(rng.next_below(10));
        cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
        cfg.maximin_weighted_first = (trial % 2 == 0);

        auto got = init_maximin(h, cfg);
        REQUIRE(got.size() == static_cast<std::size_t>(cfg.k));

        // the first center is a seeded draw; the growth after it is determined
        std::vector<ColorPoint> want = {got[0]};
        oracle_maximin_extend(h, want, cfg.k);
        CHECK(got == want);
    }
}

TEST_CASE("maximin with k = N returns every color") {
    Rng rng(15);
    WeightedHistogram h = random_hist(17, rng);
    SeedConfig cfg;
    cfg.k = 17;
    auto c = init_maximin(h, cfg);
    CHECK(as_set(c) == as_set(std::vector<ColorPoint>(h.colors.begin(), h.colors.end())));
}

TEST_CASE("density grid: quotas follow cell weight with largest remainder") {
    // two occupied cells holding 60% / 40% of the weight, k = 5 -> 3 + 2
    std::vector<ColorPoint> colors;
    std::vector<std::uint32_t> counts;
    for (int i = 0; i < 10; ++i) { // cell (0,0,0): r,g,b < 32
        colors.push_back({static_cast<double>(i), 0, 0});
        counts.push_back(6);
    }
    for (int i = 0; i < 10; ++i) { // cell (7,7,7): r,g,b >= 224
        colors.push_back({250, 250, static_cast<double>(224 + i)});
        counts.push_back(4);
    }
    WeightedHistogram h = testsup::hist_direct(colors, counts);
    SeedConfig cfg;
    cfg.k = 5;
    auto c = init_density(h, cfg);
    REQUIRE(c.size() == 5);
    int low = 0, high = 0;
    for (const auto &p : c) (p.r < 32 ? low : high)++;
    CHECK(low == 3);
    CHECK(high == 2);
}

TEST_CASE("density grid: cell capacity caps the quota") {
    // dominant cell has one distinct color; the rest must flow elsewhere
    std::vector<ColorPoint> colors = {{0, 0, 0}};
    std::vector<std::uint32_t> counts = {90};
    for (int i = 0; i < 9; ++i) {
        colors.push_back({240, 240, static_cast<double>(224 + i)});
        counts.push_back(1);
    }
    WeightedHistogram h = testsup::hist_direct(colors, counts);
    SeedConfig cfg;
    cfg.k = 5;
    auto c = init_density(h, cfg);
    REQUIRE(c.size() == 5);
    int low = 0;
    for (const auto &p : c) low += (p.r < 32) ? 1 : 0;
    CHECK(low == 1);
    CHECK(as_set(c).size() == 5);
}

TEST_CASE("density grid collapses to random seeding when one cell holds everything") {
    Rng rng(3);
    std::vector<ColorPoint> colors;
    std::vector<std::uint32_t> counts;
    for (int i = 0; i < 25; ++i) { // all inside cell (0,0,0)
        colors.push_back({static_cast<double>(i % 32), static_cast<double>((i * 7) % 32),
                          static_cast<double>((i * 13) % 32)});
        counts.push_back(1 + static_cast<std::uint32_t>(rng.next_below(5)));
    }
    WeightedHistogram h = testsup::hist_direct(colors, counts);
    SeedConfig cfg;
    cfg.k = 6;
    cfg.seed = 99;
    CHECK(init_density(h, cfg) == init_forgy(h, cfg));
}

TEST_CASE("variance slicing: frozen lower medians") {
    SeedConfig cfg;
    cfg.k = 2;

    // equal weights: groups {0,10} and {20,30}, lower medians 0 and 20
    WeightedHistogram h1 = testsup::hist_direct(
        {{0, 3, 3}, {10, 3, 3}, {20, 3, 3}, {30, 3, 3}}, {1, 1, 1, 1});
    CHECK(as_set(init_variance(h1, cfg)) == as_set({{0, 3, 3}, {20, 3, 3}}));

    // weighted medians move toward the heavy colors
    WeightedHistogram h2 = testsup::hist_direct(
        {{0, 3, 3}, {10, 3, 3}, {20, 3, 3}, {30, 3, 3}}, {1, 4, 1, 4});
    CHECK(as_set(init_variance(h2, cfg)) == as_set({{10, 3, 3}, {30, 3, 3}}));
}

TEST_CASE("variance slicing picks the channel with the largest weighted variance") {
    SeedConfig cfg;
    cfg.k = 2;
    // green varies twice as much as red; slicing must happen along green
    WeightedHistogram h = testsup::hist_direct(
        {{0, 0, 9}, {4, 40, 9}, {8, 80, 9}, {12, 120, 9}}, {1, 1, 1, 1});
    auto c = init_variance(h, cfg);
    CHECK(as_set(c) == as_set({{0, 0, 9}, {8, 80, 9}}));
}

TEST_CASE("variance slicing covers every color when k equals the histogram size") {
    Rng rng(21);
    WeightedHistogram h = random_hist(9, rng);
    SeedConfig cfg;
    cfg.k = 9;
    CHECK(as_set(init_variance(h, cfg)) ==
          as_set(std::vector<ColorPoint>(h.colors.begin(), h.colors.end())));
}

TEST_CASE("subset seeding: frozen subset sizes and the k = 1 fallback") {
    CHECK(splitforgy_subset_size(2, 100000) == 3);    // ceil(4 ln 2)  = ceil(2.77)
    CHECK(splitforgy_subset_size(256, 100000) == 2840); // ceil(512 ln 256)
    CHECK(splitforgy_subset_size(256, 50) == 50);     // capped by the histogram

    Rng rng(4);
    WeightedHistogram h = random_hist(30, rng);
    SeedConfig cfg;
    cfg.k = 1;
    cfg.seed = 5;
    CHECK(init_splitforgy(h, cfg) == init_forgy(h, cfg));
}

TEST_CASE("subset seeding draws k distinct colors from the histogram") {
    Rng rng(44);
    WeightedHistogram h = random_hist(300, rng);
    SeedConfig cfg;
    cfg.k = 16;
    cfg.seed = 7;
    auto c = init_splitforgy(h, cfg);
    REQUIRE(c.size() == 16);
    CHECK(as_set(c).size() == 16);
    auto all = as_set(std::vector<ColorPoint>(h.colors.begin(), h.colors.end()));
    for (const auto &p : c) CHECK(all.count({p.r, p.g, p.b}) == 1);
    CHECK(init_splitforgy(h, cfg) == c);
}

TEST_CASE("distance-weighted seeding: next-draw masses on a three-color fixture") {
    WeightedHistogram h =
        testsup::hist_direct({{0, 0, 0}, {255, 255, 255}, {128, 128, 128}}, {1, 1, 1});
    std::vector<ColorPoint> chosen = {{0, 0, 0}};
    auto masses = kmeanspp_next_masses(h, chosen);
    REQUIRE(masses.size() == 3);
    CHECK(masses[0] == 0.0);
    // d2(white) = 3 * 255^2 = 195075, d2(gray) = 3 * 128^2 = 49152, equal weights
    const double total = masses[0] + masses[1] + masses[2];
    CHECK(masses[1] / total == doctest::Approx(195075.0 / 244227.0).epsilon(1e-12));
    CHECK(masses[2] / total == doctest::Approx(49152.0 / 244227.0).epsilon(1e-12));

    // with no centers chosen yet the law is the color weight itself
    auto first = kmeanspp_next_masses(h, {});
    CHECK(first == std::vector<double>(h.weights.begin(), h.weights.end()));
}

TEST_CASE("distance-weighted seeding: determinism and distinctness") {
    Rng rng(64);
    WeightedHistogram h = random_hist(200, rng);
    SeedConfig cfg;
    cfg.k = 20;
    cfg.seed = 17;
    auto c1 = init_kmeanspp(h, cfg);
    auto c2 = init_kmeanspp(h, cfg);
    REQUIRE(c1.size() == 20);
    CHECK(c1 == c2);
    CHECK(as_set(c1).size() == 20);

    cfg.k = static_cast<int>(h.size());
    CHECK(as_set(init_kmeanspp(h, cfg)).size() == h.size());
}

TEST_CASE("maximin padding extends a short palette and leaves full ones alone") {
    Rng rng(7);
    WeightedHistogram h = random_hist(50, rng);
    std::vector<ColorPoint> two = {h.colors[0], h.colors[1]};

    auto padded = maximin_pad(h, two, 6);
    REQUIRE(padded.size() == 6);
    CHECK(padded[0] == h.colors[0]);
    CHECK(padded[1] == h.colors[1]);
    std::vector<ColorPoint> want = {h.colors[0], h.colors[1]};
    oracle_maximin_extend(h, want, 6);
    CHECK(padded == want);

    auto same = maximin_pad(h, padded, 6);
    CHECK(same == padded);
}
