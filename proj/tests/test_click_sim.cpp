#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "sfg/click_sim.hpp"
#include "sfg/errors.hpp"
#include "test_util.hpp"

using namespace sfg;

namespace {

BinaryMask random_mask(test::Lcg& gen, GridDims dims, double density) {
    BinaryMask m(dims);
    for (std::size_t r = 0; r < dims.height; ++r)
        for (std::size_t c = 0; c < dims.width; ++c)
            m.set(r, c, gen.real(0, 1) < density);
    return m;
}

bool blob_contains(const Component& blob, Point p) {
    return std::binary_search(blob.pixels.begin(), blob.pixels.end(), snap(p));
}

// Indices (i, j) of the closest pair, scanning all pairs; first minimum wins.
std::pair<int, int> closest_pair(const PointSet& q) {
    std::pair<int, int> best{0, 1};
    double best_d = 1e300;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (distance(q[std::size_t(i)], q[std::size_t(j)]) < best_d) {
                best_d = distance(q[std::size_t(i)], q[std::size_t(j)]);
                best = {i, j};
            }
    return best;
}

} // namespace

TEST_CASE("extract_extreme_points examples") {
    BinaryMask dot({10, 10});
    dot.set(5, 5);
    CHECK(extract_extreme_points(dot) == PointSet{{5, 5}, {5, 5}, {5, 5}, {5, 5}});

    const BinaryMask square = test::rect_mask({5, 5}, 1, 1, 3, 3);
    CHECK(extract_extreme_points(square) == PointSet{{1, 2}, {3, 2}, {2, 1}, {2, 3}});

    const BinaryMask ellipse = test::ellipse_mask({100, 100}, 50, 50, 20, 30);
    CHECK(extract_extreme_points(ellipse) == PointSet{{30, 50}, {70, 50}, {50, 20}, {50, 80}});

    // Even run: lower median. Row 2 runs over cols 3..6 -> col 4.
    const BinaryMask bar = test::rect_mask({8, 10}, 2, 3, 5, 6);
    CHECK(extract_extreme_points(bar) == PointSet{{2, 4}, {5, 4}, {3, 3}, {3, 6}});

    CHECK_THROWS_AS(extract_extreme_points(BinaryMask({4, 4})), EmptyMask);
}

TEST_CASE("extract_extreme_points attains the mask extremes on random masks") {
    test::Lcg gen(41);
    for (int trial = 0; trial < 50; ++trial) {
        const BinaryMask m = random_mask(gen, {20, 27}, 0.05 + 0.02 * (trial % 10));
        if (m.count() == 0)
            continue;
        std::size_t top = 99, bottom = 0, left = 99, right = 0;
        for (std::size_t r = 0; r < m.height(); ++r)
            for (std::size_t c = 0; c < m.width(); ++c)
                if (m.at(r, c)) {
                    top = std::min(top, r), bottom = std::max(bottom, r);
                    left = std::min(left, c), right = std::max(right, c);
                }
        const PointSet eps = extract_extreme_points(m);
        for (auto e : eps)
            CHECK(m.at(std::size_t(e.row), std::size_t(e.col)));
        CHECK(eps[0].row == double(top));
        CHECK(eps[1].row == double(bottom));
        CHECK(eps[2].col == double(left));
        CHECK(eps[3].col == double(right));

        Rng rng(trial);
        CHECK(perturb_points(eps, 0.0, rng) == eps);
    }
}

TEST_CASE("perturb_points") {
    const PointSet pts{{10, 10}, {20, 30}, {0, 63}};
    Rng a(5), b(5);
    CHECK(perturb_points(pts, 0.0, a) == pts);
    const PointSet p1 = perturb_points(pts, 10.0, a);
    const PointSet p2 = perturb_points(pts, 10.0, b);
    CHECK(p1 == p2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(std::abs(p1[i].row - pts[i].row) <= 10.0);
        CHECK(std::abs(p1[i].col - pts[i].col) <= 10.0);
    }

    Rng c(8);
    const PointSet clipped = perturb_points({{0, 0}, {63, 63}}, 30.0, c, GridDims{64, 64});
    for (auto p : clipped) {
        CHECK(p.row >= 0.0);
        CHECK(p.row <= 63.0);
        CHECK(p.col >= 0.0);
        CHECK(p.col <= 63.0);
    }
    CHECK_THROWS_AS(perturb_points(pts, -1.0, c), InvalidArgument);
}

TEST_CASE("perturb_points: mean absolute offset of U[-10, 10] is 5") {
    Rng rng(123);
    const PointSet origin{{0, 0}};
    double sum_r = 0.0, sum_c = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const Point p = perturb_points(origin, 10.0, rng).front();
        sum_r += std::abs(p.row);
        sum_c += std::abs(p.col);
    }
    CHECK(std::abs(sum_r / n - 5.0) <= 0.05);
    CHECK(std::abs(sum_c / n - 5.0) <= 0.05);
}

TEST_CASE("select_three_points") {
    const PointSet q{{0, 0}, {0, 1}, {10, 0}, {10, 10}};
    std::set<std::size_t> dropped;
    for (std::uint64_t s = 0; s < 64; ++s) {
        Rng rng(s);
        const PointSet three = select_three_points(q, rng);
        REQUIRE(three.size() == 3);
        CHECK(std::count(three.begin(), three.end(), Point{10, 0}) == 1);
        CHECK(std::count(three.begin(), three.end(), Point{10, 10}) == 1);
        for (std::size_t i = 0; i < 2; ++i)
            if (std::find(three.begin(), three.end(), q[i]) == three.end())
                dropped.insert(i);
    }
    CHECK(dropped == std::set<std::size_t>{0, 1}); // both members get dropped for some seed

    // Coincident points: the tie picks pair (0, 1), so index 2 and 3 survive.
    const PointSet same{{4, 4}, {4, 4}, {4, 4}, {4, 4}};
    Rng rng(1);
    CHECK(select_three_points(same, rng) == PointSet{{4, 4}, {4, 4}, {4, 4}});

    // Survivors keep their original order.
    Rng r2(2);
    const PointSet kept = select_three_points({{10, 10}, {50, 50}, {10, 11}, {90, 0}}, r2);
    CHECK((kept == PointSet{{50, 50}, {10, 11}, {90, 0}} || kept == PointSet{{10, 10}, {50, 50}, {90, 0}}));

    CHECK_THROWS_AS(select_three_points({{0, 0}, {1, 1}, {2, 2}}, rng), InvalidArgument);
}

TEST_CASE("select_three_points drops a member of the all-pairs closest pair") {
    test::Lcg gen(77);
    for (int trial = 0; trial < 1000; ++trial) {
        PointSet q;
        for (int i = 0; i < 4; ++i)
            q.push_back({gen.real(0, 200), gen.real(0, 200)});
        Rng rng{std::uint64_t(trial)};
        const PointSet three = select_three_points(q, rng);
        const auto [i, j] = closest_pair(q);
        int missing = -1;
        for (int k = 0; k < 4; ++k)
            if (std::find(three.begin(), three.end(), q[std::size_t(k)]) == three.end())
                missing = k;
        REQUIRE((missing == i || missing == j));
    }
}

TEST_CASE("connected_components examples") {
    CHECK(connected_components(BinaryMask({5, 5})).empty());

    BinaryMask diag({3, 3});
    diag.set(0, 0);
    diag.set(1, 1);
    auto cc = connected_components(diag);
    REQUIRE(cc.size() == 1);
    CHECK(cc[0].size == 2);

    BinaryMask checker({4, 4});
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            checker.set(r, c, (r + c) % 2 == 0);
    CHECK(test::flood_fill_sizes(checker) == std::vector<std::size_t>{8});
    cc = connected_components(checker);
    REQUIRE(cc.size() == 1);
    CHECK(cc[0].size == 8);

    // Equal sizes keep raster order of their first pixel; labels are 1-based raster order.
    BinaryMask two({5, 5});
    two.set(0, 4);
    two.set(4, 0);
    two.set(2, 2);
    two.set(2, 3);
    cc = connected_components(two);
    REQUIRE(cc.size() == 3);
    CHECK(cc[0].size == 2);
    CHECK(cc[0].label == 2);
    CHECK(cc[1].pixels == std::vector<Pixel>{{0, 4}});
    CHECK(cc[1].label == 1);
    CHECK(cc[2].pixels == std::vector<Pixel>{{4, 0}});
}

TEST_CASE("connected_components matches flood fill and partitions the foreground") {
    test::Lcg gen(64);
    for (int trial = 0; trial < 100; ++trial) {
        const BinaryMask m = random_mask(gen, {64, 64}, 0.1 + 0.005 * trial);
        const auto cc = connected_components(m);
        std::vector<std::size_t> sizes;
        std::size_t total = 0;
        std::vector<std::size_t> owner(m.dims().cells(), 0);
        for (const auto& comp : cc) {
            sizes.push_back(comp.size);
            total += comp.size;
            REQUIRE(comp.pixels.size() == comp.size);
            for (auto px : comp.pixels) {
                REQUIRE(m.at(std::size_t(px.row), std::size_t(px.col)));
                owner[std::size_t(px.row) * 64 + std::size_t(px.col)] = comp.label;
            }
        }
        REQUIRE(sizes == test::flood_fill_sizes(m));
        REQUIRE(total == m.count());
        // No two 8-adjacent foreground pixels belong to different components.
        for (long r = 0; r < 64; ++r)
            for (long c = 0; c < 64; ++c) {
                if (!m.at(std::size_t(r), std::size_t(c)))
                    continue;
                for (long dr = -1; dr <= 1; ++dr)
                    for (long dc = -1; dc <= 1; ++dc) {
                        const long nr = r + dr, nc = c + dc;
                        if (nr < 0 || nc < 0 || nr >= 64 || nc >= 64 || !m.at(std::size_t(nr), std::size_t(nc)))
                            continue;
                        REQUIRE(owner[std::size_t(r * 64 + c)] == owner[std::size_t(nr * 64 + nc)]);
                    }
            }
    }
}

TEST_CASE("boundary_distance equals a brute-force scan over boundary pixels") {
    test::Lcg gen(5);
    for (int trial = 0; trial < 6; ++trial) {
        BinaryMask m = trial == 0 ? test::ellipse_mask({30, 40}, 15, 20, 9, 14) : random_mask(gen, {30, 40}, 0.5);
        std::vector<Pixel> boundary;
        for (long r = 0; r < 30; ++r)
            for (long c = 0; c < 40; ++c) {
                if (!m.at(std::size_t(r), std::size_t(c)))
                    continue;
                const long nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
                for (const auto& n : nbr)
                    if (n[0] >= 0 && n[1] >= 0 && n[0] < 30 && n[1] < 40 &&
                        !m.at(std::size_t(n[0]), std::size_t(n[1]))) {
                        boundary.push_back({r, c});
                        break;
                    }
            }
        const ScalarField d = boundary_distance(m);
        for (long r = 0; r < 30; ++r)
            for (long c = 0; c < 40; ++c) {
                double best = INFINITY;
                for (auto b : boundary)
                    best = std::min(best, std::hypot(double(r - b.row), double(c - b.col)));
                REQUIRE(d.at(std::size_t(r), std::size_t(c)) == doctest::Approx(best).epsilon(1e-12));
            }
    }
    const ScalarField none = boundary_distance(BinaryMask({4, 4}, true));
    CHECK(std::isinf(none.at(2, 2)));
}

TEST_CASE("sample_corrective_click examples") {
    const GridDims dims{40, 40};
    const BinaryMask gt = test::rect_mask(dims, 10, 10, 29, 29);
    Rng rng(9);
    CHECK_FALSE(sample_corrective_click(gt, gt, SampleMode::Test, rng).has_value());
    CHECK_THROWS_AS(sample_corrective_click(gt, BinaryMask({40, 41}), SampleMode::Test, rng), InvalidArgument);

    SUBCASE("FP blob of 20 px vs FN blob of 50 px -> FNC inside the FN blob") {
        BinaryMask pred = gt;
        for (std::size_t r = 10; r < 15; ++r) // FN: 5x10 hole
            for (std::size_t c = 10; c < 20; ++c)
                pred.set(r, c, false);
        for (std::size_t r = 0; r < 4; ++r) // FP: 4x5 patch outside
            for (std::size_t c = 0; c < 5; ++c)
                pred.set(r, c, true);
        for (std::uint64_t s = 0; s < 50; ++s) {
            Rng r(s);
            const auto click = sample_corrective_click(pred, gt, SampleMode::Test, r);
            REQUIRE(click.has_value());
            CHECK(click->polarity == Polarity::FNC);
            CHECK(click->location.row >= 10);
            CHECK(click->location.row < 15);
            CHECK(click->location.col >= 10);
            CHECK(click->location.col < 20);
        }
    }
    SUBCASE("two FP blobs of 30 and 7 px -> click in the 30 px blob") {
        BinaryMask pred = gt;
        for (std::size_t r = 0; r < 5; ++r)
            for (std::size_t c = 0; c < 6; ++c)
                pred.set(r, c, true);
        for (std::size_t c = 32; c < 39; ++c)
            pred.set(36, c, true);
        for (std::uint64_t s = 0; s < 50; ++s) {
            Rng r(s);
            const auto sample = sample_corrective_click_detailed(pred, gt, SampleMode::Test, r);
            REQUIRE(sample.has_value());
            CHECK(sample->blob.size == 30);
            CHECK(sample->click.polarity == Polarity::FPC);
            CHECK(sample->click.location.row < 5);
            CHECK(sample->click.location.col < 6);
        }
    }
    SUBCASE("equal blob sizes go to FN") {
        BinaryMask pred = gt;
        pred.set(10, 10, false);
        pred.set(0, 0, true);
        Rng r(4);
        const auto click = sample_corrective_click(pred, gt, SampleMode::Test, r);
        REQUIRE(click.has_value());
        CHECK(click->polarity == Polarity::FNC);
        CHECK(click->location == Point{10, 10});
    }
}

TEST_CASE("train mode draws from the 15-60 px band and falls back to the whole blob") {
    const GridDims dims{160, 160};
    const BinaryMask gt = test::rect_mask(dims, 20, 20, 139, 139);
    const BinaryMask pred(dims); // everything missed: one FN blob = gt
    const ScalarField d = boundary_distance(gt);
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(s);
        const auto click = sample_corrective_click(pred, gt, SampleMode::Train, rng);
        REQUIRE(click.has_value());
        const double dist = d.at(std::size_t(click->location.row), std::size_t(click->location.col));
        REQUIRE(dist >= kTrainBandMin);
        REQUIRE(dist <= kTrainBandMax);
        CHECK(gt.at(std::size_t(click->location.row), std::size_t(click->location.col)));
    }

    // A thin object has no pixel 15 px deep; the sample falls back to the blob.
    const BinaryMask thin = test::rect_mask(dims, 50, 20, 55, 100);
    Rng rng(3);
    const auto sample = sample_corrective_click_detailed(pred, thin, SampleMode::Train, rng);
    REQUIRE(sample.has_value());
    CHECK(blob_contains(sample->blob, sample->click.location));
}

TEST_CASE("sampled clicks lie inside the selected blob and replay from the seed") {
    test::Lcg gen(31);
    for (int trial = 0; trial < 100; ++trial) {
        const BinaryMask gt = random_mask(gen, {48, 48}, 0.4);
        const BinaryMask pred = random_mask(gen, {48, 48}, 0.4);
        for (SampleMode mode : {SampleMode::Test, SampleMode::Train}) {
            Rng a{std::uint64_t(trial)}, b{std::uint64_t(trial)};
            const auto s1 = sample_corrective_click_detailed(pred, gt, mode, a);
            const auto s2 = sample_corrective_click_detailed(pred, gt, mode, b);
            REQUIRE(s1.has_value());
            REQUIRE(s2.has_value());
            CHECK(s1->click == s2->click);
            REQUIRE(blob_contains(s1->blob, s1->click.location));
            const bool in_gt = gt.at(std::size_t(s1->click.location.row), std::size_t(s1->click.location.col));
            CHECK(in_gt == (s1->click.polarity == Polarity::FNC));
        }
    }
}
