#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "degwave/errors.hpp"
#include "degwave/geometry.hpp"

using namespace degwave;

namespace {

Domain box1d(double a, double b, double alpha) {
    Domain d;
    d.dim = 1;
    d.bounds[0] = {a, b};
    d.alpha = alpha;
    return d;
}

Domain box2d(double a, double b, double alpha) {
    Domain d;
    d.dim = 2;
    d.bounds[0] = {a, b};
    d.bounds[1] = {a, b};
    d.alpha = alpha;
    return d;
}

}  // namespace

TEST_CASE("coefficient_at evaluates |x|^alpha") {
    CHECK(coefficient_at(box1d(-1, 1, 0.5), {0.0, 0.0}) == 0.0);
    CHECK(coefficient_at(box2d(-2, 2, 1.0), {1.0, 0.0}) == doctest::Approx(1.0));
    // |(0.3, 0.4)| = 0.5 by Pythagoras; 0.5^0.5 frozen from sqrt.
    CHECK(coefficient_at(box2d(-1, 1, 0.5), {0.3, 0.4}) ==
          doctest::Approx(0.70710678118654752).epsilon(1e-12));
    // alpha = 0 is the reference mode, exactly 1 everywhere including 0.
    CHECK(coefficient_at(box1d(-1, 1, 0.0), {0.0, 0.0}) == 1.0);
}

TEST_CASE("coefficient_at is Hoelder continuous with computable constant") {
    std::mt19937_64 eng(7);
    auto draw = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
    };
    for (double alpha : {0.5, 1.5}) {
        const Domain dom = box2d(-1, 1, alpha);
        const double R = dom.max_radius();
        const double expo = std::min(alpha, 1.0);
        const double L = alpha <= 1.0 ? 1.0 : alpha * std::pow(R, alpha - 1.0);
        for (int k = 0; k < 200; ++k) {
            const Point p{draw(-1, 1), draw(-1, 1)};
            const Point q{draw(-1, 1), draw(-1, 1)};
            const double lhs = std::abs(coefficient_at(dom, p) - coefficient_at(dom, q));
            const double dist = std::hypot(p[0] - q[0], p[1] - q[1]);
            CHECK(lhs <= L * std::pow(dist, expo) + 1e-12);
        }
    }
}

TEST_CASE("gamma_plus covers the whole boundary of boxes containing 0") {
    SUBCASE("1D symmetric") {
        const auto faces = gamma_plus(box1d(-1, 1, 0.5));
        REQUIRE(faces.size() == 2);
        CHECK(faces[0].normal_component == doctest::Approx(1.0));
        CHECK(faces[1].normal_component == doctest::Approx(1.0));
    }
    SUBCASE("1D asymmetric") {
        const auto faces = gamma_plus(box1d(-1, 2, 0.5));
        REQUIRE(faces.size() == 2);
        CHECK(faces[0].normal_component == doctest::Approx(1.0));
        CHECK(faces[1].normal_component == doctest::Approx(2.0));
    }
    SUBCASE("2D box") {
        const auto faces = gamma_plus(box2d(-1, 1, 1.0));
        CHECK(faces.size() == 4);
        for (const auto& f : faces) CHECK(f.normal_component > 0.0);
    }
    SUBCASE("every test box yields the full boundary") {
        for (const Domain& dom :
             {box1d(-0.5, 0.5, 0.5), box1d(-1, 3, 0.0), box2d(-2, 2, 1.5)}) {
            CHECK(gamma_plus(dom).size() == static_cast<std::size_t>(2 * dom.dim));
        }
    }
}

TEST_CASE("grid construction") {
    auto grid = std::make_shared<Grid>(box1d(-1, 1, 0.5), 200);
    CHECK(grid->nodes_per_axis() == 201);
    CHECK(grid->spacing(0) == doctest::Approx(0.01));
    REQUIRE(grid->origin_node().has_value());
    CHECK((*grid->origin_node())[0] == 100);
    // Node at the origin is exact, faces never are.
    CHECK(grid->node_coord(0, 100) == 0.0);
    for (int i = 0; i < grid->cells(); ++i) CHECK(grid->face_coord(0, i) != 0.0);

    CHECK_THROWS_AS(Grid(box1d(-1, 1, 0.5), 4), ValidationError);
    // Odd cell count on a symmetric box puts a face exactly on the origin.
    CHECK_THROWS_AS(Grid(box1d(-1, 1, 0.5), 9), ValidationError);
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(box1d(0.1, 1, 0.5).validate(), ValidationError);
    CHECK_THROWS_AS(box1d(-1, 1, 2.5).validate(), ValidationError);
    CHECK_THROWS_AS(box1d(-1, 1, -0.1).validate(), ValidationError);
    CHECK_NOTHROW(box1d(-1, 1, 0.0).validate());
    CHECK_NOTHROW(box2d(-1, 1, 1.999).validate());
}

TEST_CASE("build_control_region 1D collar and origin ball") {
    auto grid = std::make_shared<Grid>(box1d(-1, 1, 0.5), 200);
    SUBCASE("collar only") {
        const ControlRegion region = build_control_region(grid, 0.1, 0.1, false);
        for (std::size_t k = 0; k < grid->node_count(); ++k) {
            const double x = grid->node_point(k)[0];
            const bool expect = x <= -0.7 + 1e-9 || x >= 0.7 - 1e-9;
            CHECK(region.contains(k) == expect);
        }
        CHECK_FALSE(region.covers_domain);
    }
    SUBCASE("with origin ball") {
        const ControlRegion region = build_control_region(grid, 0.1, 0.1, true);
        for (std::size_t k = 0; k < grid->node_count(); ++k) {
            const double x = grid->node_point(k)[0];
            const bool expect = x <= -0.7 + 1e-9 || x >= 0.7 - 1e-9 ||
                                std::abs(x) <= 0.3 + 1e-9;
            CHECK(region.contains(k) == expect);
        }
        CHECK(region.contains_origin);
    }
    SUBCASE("oversized collar rejected") {
        CHECK_THROWS_AS(build_control_region(grid, 0.5, 0.1, false), ValidationError);
        CHECK_THROWS_AS(build_control_region(grid, 0.1, 0.4, true), ValidationError);
    }
}

TEST_CASE("build_control_region 2D frame against brute-force distances") {
    auto grid = std::make_shared<Grid>(box2d(-1, 1, 1.0), 40);
    const ControlRegion region = build_control_region(grid, 0.05, 0.1, false);

    // Independent oracle: sample the boundary densely and take the min
    // distance to the sampled points.
    const Domain dom = grid->domain();
    auto brute_distance = [&](const Point& p) {
        double best = 1e300;
        const int samples = 2000;
        for (int i = 0; i <= samples; ++i) {
            const double t = -1.0 + 2.0 * i / samples;
            for (const Point b : {Point{t, -1.0}, Point{t, 1.0}, Point{-1.0, t},
                                  Point{1.0, t}}) {
                best = std::min(best, std::hypot(p[0] - b[0], p[1] - b[1]));
            }
        }
        return best;
    };
    (void)dom;
    int checked = 0;
    for (std::size_t k = 0; k < grid->node_count(); k += 7) {
        const Point p = grid->node_point(k);
        const bool expect = brute_distance(p) <= 0.15 + 1e-9;
        CHECK(region.contains(k) == expect);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("control region mask is monotone in delta") {
    auto grid = std::make_shared<Grid>(box2d(-1, 1, 1.0), 24);
    const ControlRegion small = build_control_region(grid, 0.04, 0.1, true);
    const ControlRegion large = build_control_region(grid, 0.12, 0.1, true);
    for (std::size_t k = 0; k < grid->node_count(); ++k)
        if (small.contains(k)) CHECK(large.contains(k));
}

TEST_CASE("minimal_time closed forms") {
    SUBCASE("alpha 1, eps 0.25") {
        const Domain dom = box1d(-1, 1, 1.0);
        CHECK(time_horizon_floor(dom, 0.25) == doctest::Approx(8.0));
        CHECK(minimal_time(dom, 0.25, 1e-14) == doctest::Approx(8.08).epsilon(1e-6));
    }
    SUBCASE("alpha 0 classical flavor") {
        const Domain dom = box1d(-1, 1, 0.0);
        CHECK(time_horizon_floor(dom, 1.0) == doctest::Approx(2.0));
    }
    SUBCASE("both branches evaluated") {
        const Domain dom = box1d(-0.5, 0.5, 0.5);
        const double t0 = 2.0 / std::sqrt(std::pow(0.2, 1.5)) * 0.5;
        const double t1 = std::sqrt((4.0 * 0.25 + 0.04) / std::pow(0.2, 1.5));
        CHECK(minimal_time(dom, 0.2, 0.01) ==
              doctest::Approx(1.01 * std::max(t0, t1)).epsilon(1e-12));
    }
    SUBCASE("returned horizon satisfies both constraints") {
        for (const Domain& dom :
             {box1d(-1, 1, 0.5), box1d(-0.5, 0.5, 1.5), box2d(-1, 1, 1.0)}) {
            const double eps = 0.2, delta = 0.05;
            const double T = minimal_time(dom, eps, delta);
            const double r = dom.max_radius();
            CHECK(T >= time_horizon_floor(dom, eps));
            CHECK(std::pow(eps, dom.alpha + 1.0) * T * T >
                  4.0 * r * r + 4.0 * delta);
        }
    }
}
