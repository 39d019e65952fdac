#include <cmath>
#include <omp.h>
#include <random>

#include "doctest.h"
#include "sfg/errors.hpp"
#include "sfg/field.hpp"
#include "test_util.hpp"

using namespace sfg;
using doctest::Approx;

TEST_CASE("potential_eval examples") {
    CHECK(potential_eval({{0, 0}}, {3, 4}) == 5.0);
    CHECK(potential_eval({{0, 0}, {0, 10}}, {0, 5}) == 10.0);
    CHECK(potential_eval({{0, 0}, {0, 10}, {10, 0}, {10, 10}}, {5, 5}) == Approx(4 * std::sqrt(50.0)).epsilon(1e-12));
    CHECK_THROWS_AS(potential_eval({}, {0, 0}), InvalidArgument);
}

TEST_CASE("rasterize_potential samples pixel centers") {
    const ScalarField f = rasterize_potential({{0, 0}}, {3, 3});
    CHECK(f.at(0, 0) == 0.0);
    CHECK(f.at(2, 2) == Approx(std::sqrt(8.0)));
    CHECK_THROWS_AS(rasterize_potential({{0, 0}}, {0, 3}), InvalidArgument);
    CHECK_THROWS_AS(rasterize_potential({}, {3, 3}), InvalidArgument);
}

TEST_CASE("rasterize_potential equals per-pixel potential_eval") {
    test::Lcg gen(11);
    for (int trial = 0; trial < 10; ++trial) {
        PointSet pts;
        for (int i = 0; i < 1 + trial % 5; ++i)
            pts.push_back({gen.real(-5, 40), gen.real(-5, 40)});
        const GridDims dims{17 + std::size_t(trial), 23};
        const ScalarField f = rasterize_potential(pts, dims);
        for (std::size_t r = 0; r < dims.height; ++r)
            for (std::size_t c = 0; c < dims.width; ++c)
                REQUIRE(f.at(r, c) == potential_eval(pts, {double(r), double(c)}));
    }
}

TEST_CASE("rasterize_potential minimum on a two-point segment (brute-force oracle)") {
    const PointSet pts{{1, 1}, {1, 3}};
    const ScalarField f = rasterize_potential(pts, {5, 5});
    // Oracle: enumerate all 25 cells with hypot.
    double best = 1e300;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c)
            best = std::min(best, std::hypot(r - 1.0, c - 1.0) + std::hypot(r - 1.0, c - 3.0));
    CHECK(best == 2.0);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 5; ++c) {
            const bool on_segment = r == 1 && c >= 1 && c <= 3;
            CHECK((f.at(r, c) == Approx(2.0).epsilon(1e-15)) == on_segment);
        }
}

TEST_CASE("threaded rasterizers are bit-identical to the serial references") {
    const PointSet pts{{3.25, 90.5}, {120.0, 7.75}, {64.0, 64.0}, {10.0, 10.0}, {99.9, 120.1}};
    const GridDims dims{131, 97};
    const ScalarField ref_pi = serial::rasterize_potential(pts, dims);
    const ScalarField ref_g = serial::rasterize_gaussian(pts, 7.5, dims);
    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 3, 4, 7}) {
        omp_set_num_threads(threads);
        CHECK(rasterize_potential(pts, dims) == ref_pi);
        CHECK(rasterize_gaussian(pts, 7.5, dims) == ref_g);
    }
    omp_set_num_threads(saved);
}

TEST_CASE("gaussian_eval examples") {
    CHECK(gaussian_eval({{5, 5}}, 10, {5, 5}) == 1.0);
    CHECK(gaussian_eval({{5, 5}}, 10, {5, 15}) == Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(gaussian_eval({}, 10, {3, 3}) == 0.0);
    CHECK_THROWS_AS(gaussian_eval({{0, 0}}, 0.0, {0, 0}), InvalidArgument);
    CHECK_THROWS_AS(gaussian_eval({{0, 0}}, -1.0, {0, 0}), InvalidArgument);
}

TEST_CASE("gaussian_eval composites several centers by maximum") {
    const PointSet centers{{0, 0}, {0, 6}};
    CHECK(gaussian_eval(centers, 3, {0, 0}) == 1.0);
    CHECK(gaussian_eval(centers, 3, {0, 6}) == 1.0);
    CHECK(gaussian_eval(centers, 3, {0, 2}) == Approx(std::exp(-4.0 / 18.0)));
    test::Lcg gen(5);
    for (int i = 0; i < 500; ++i) {
        const Point x{gen.real(-30, 30), gen.real(-30, 30)};
        const double v = gaussian_eval(centers, 3, x);
        CHECK(v <= 1.0);
        CHECK(v >= 0.0);
    }
}

TEST_CASE("focal_point examples") {
    const Point sq = focal_point({{0, 0}, {0, 10}, {10, 0}, {10, 10}});
    CHECK(sq.row == Approx(5.0).epsilon(1e-6));
    CHECK(sq.col == Approx(5.0).epsilon(1e-6));

    const Point col = focal_point({{0, 0}, {0, 4}, {0, 10}});
    CHECK(col.row == 0.0);
    CHECK(col.col == 4.0);

    // Frozen from an independent 0.1 px numpy grid search over [0, 100]^2: (50.0, 56.3).
    const Point five = focal_point({{12, 80}, {55, 10}, {90, 70}, {40, 45}, {70, 95}});
    CHECK(std::abs(five.row - 50.0) < 0.5);
    CHECK(std::abs(five.col - 56.3) < 0.5);
}

TEST_CASE("focal_point matches a 0.1 px grid search on random 5-point sets") {
    test::Lcg gen(2024);
    for (int trial = 0; trial < 5; ++trial) {
        PointSet pts;
        for (int i = 0; i < 5; ++i)
            pts.push_back({gen.real(0, 100), gen.real(0, 100)});
        const Point oracle = test::grid_search_median(pts, 0.0, 100.0, 0.1);
        const Point fp = focal_point(pts);
        CHECK(distance(fp, oracle) < 0.5);
    }
}

TEST_CASE("focal_point degenerate and error paths") {
    CHECK(focal_point({{3, 4}, {3, 4}, {3, 4}}) == Point{3, 4});
    CHECK(focal_point({{7, -2}}) == Point{7, -2});
    CHECK_THROWS_AS(focal_point({}), InvalidArgument);
    CHECK_THROWS_AS(focal_point({{0, 0}, {1, 1}}, {0.0}), InvalidArgument);

    // One iteration cannot certify the minimum of a generic set.
    const PointSet pts{{0, 0}, {0, 40}, {30, 3}, {17, 25}, {5, 60}};
    try {
        focal_point(pts, {1e-3, 1});
        FAIL("expected IterationLimit");
    } catch (const IterationLimit& e) {
        CHECK(std::isfinite(e.best_iterate.row));
        CHECK(potential_eval(pts, e.best_iterate) <= potential_eval(pts, {10.4, 25.6}));
    }
}

TEST_CASE("focal_point singular iterate: returns an input point when it is the minimizer") {
    // Unit pulls from three points 120 degrees apart cancel at the hub.
    const PointSet star{{0, 0}, {10, 0}, {-5, 8.660254037844386}, {-5, -8.660254037844386}};
    CHECK(focal_point(star) == Point{0, 0});
    // Coincident multiplicity: two copies at the origin dominate a single far point.
    CHECK(focal_point({{0, 0}, {0, 0}, {50, 50}}) == Point{0, 0});
}

TEST_CASE("focal_point post-condition, permutation invariance and translation equivariance") {
    test::Lcg gen(99);
    for (int trial = 0; trial < 50; ++trial) {
        PointSet pts;
        const int n = 3 + trial % 4;
        for (int i = 0; i < n; ++i)
            pts.push_back({gen.real(0, 100), gen.real(0, 100)});
        const double tol = 1e-3;
        const Point x = focal_point(pts, {tol});
        const double here = potential_eval(pts, x);
        for (Point s : {Point{tol, 0}, Point{-tol, 0}, Point{0, tol}, Point{0, -tol}})
            CHECK(here <= potential_eval(pts, x + s) + 1e-9);

        PointSet rev(pts.rbegin(), pts.rend());
        CHECK(distance(focal_point(rev, {tol}), x) < 1e-2);

        const Point t{37.0, -12.0};
        PointSet moved;
        for (auto p : pts)
            moved.push_back(p + t);
        CHECK(distance(focal_point(moved, {tol}), x + t) < 1e-2);
    }
}

TEST_CASE("potential properties: convexity, triangle bound, translation and scale") {
    test::Lcg gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        PointSet pts;
        for (int i = 0; i < 1 + trial % 6; ++i)
            pts.push_back({gen.real(-50, 50), gen.real(-50, 50)});
        const Point x{gen.real(-80, 80), gen.real(-80, 80)};
        const Point y{gen.real(-80, 80), gen.real(-80, 80)};
        const double t = gen.real(0, 1);
        CHECK(potential_eval(pts, t * x + (1 - t) * y) <=
              t * potential_eval(pts, x) + (1 - t) * potential_eval(pts, y) + 1e-9);

        const Point shift{gen.real(-64, 64), gen.real(-64, 64)};
        PointSet moved;
        for (auto p : pts)
            moved.push_back(p + shift);
        CHECK(std::abs(potential_eval(moved, x + shift) - potential_eval(pts, x)) <= 1e-9);

        const double s = gen.real(0.25, 8);
        PointSet scaled;
        for (auto p : pts)
            scaled.push_back(s * p);
        const double base = potential_eval(pts, x);
        CHECK(std::abs(potential_eval(scaled, s * x) - s * base) <= 1e-9 * std::max(1.0, s * base));
    }

    const PointSet pair{{2, 3}, {14, 8}};
    const double d = distance(pair[0], pair[1]);
    for (int i = 0; i < 200; ++i) {
        const Point x{gen.real(-20, 40), gen.real(-20, 40)};
        CHECK(potential_eval(pair, x) >= d - 1e-12);
    }
    for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        const Point on = pair[0] + t * (pair[1] - pair[0]);
        CHECK(potential_eval(pair, on) == Approx(d).epsilon(1e-14));
    }
    CHECK(potential_eval(pair, {20, 0}) > d + 1.0);
}
