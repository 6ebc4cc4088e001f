#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "degwave/carleman.hpp"
#include "degwave/errors.hpp"
#include "degwave/sampling.hpp"
#include "degwave/spaces.hpp"
#include "degwave/wavesolver.hpp"

using namespace degwave;

namespace {

Domain box1d(double alpha) {
    Domain d;
    d.dim = 1;
    d.bounds[0] = {-1.0, 1.0};
    d.alpha = alpha;
    return d;
}

struct Setup {
    std::shared_ptr<const Grid> grid;
    std::shared_ptr<const ControlRegion> omega;
    double T;
    double dt;
    CarlemanParams params;
};

Setup benchmark_setup(int cells) {
    Setup s;
    const Domain dom = box1d(0.5);
    s.grid = std::make_shared<Grid>(dom, cells);
    s.omega = std::make_shared<ControlRegion>(
        build_control_region(s.grid, 0.1, 0.1, true));
    s.T = minimal_time(dom, 0.1, 0.1);
    s.dt = cfl_timestep(*s.grid, 0.9);
    s.params = default_params(dom, s.T, 0.1, 0.1);
    return s;
}

}  // namespace

TEST_CASE("psi closed forms") {
    const Domain dom = box1d(0.5);
    CarlemanParams p;
    p.beta = 0.1;
    p.t0 = 2.0;
    p.beta0 = 0.7;
    CHECK(psi(dom, {0.0, 0.0}, 2.0, p) == doctest::Approx(0.7));
    p.beta0 = 0.0;
    CHECK(psi(dom, {1.0, 0.0}, 3.0, p) == doctest::Approx(0.9));
}

TEST_CASE("psi is below -delta at the time endpoints under the horizon coupling") {
    const Setup s = benchmark_setup(200);
    CHECK(psi_negative_at_start(*s.grid, s.params, 0.1));
    // The same structure holds at t = T by symmetry of t0 = T/2.
    for (std::size_t k = 0; k < s.grid->node_count(); ++k)
        CHECK(psi(s.grid->domain(), s.grid->node_point(k), s.T, s.params) < -0.1);
}

TEST_CASE("phi identities") {
    const Domain dom = box1d(0.5);
    CarlemanParams p;
    p.gamma = 2.0;
    p.beta = 0.05;
    p.t0 = 1.0;
    p.beta0 = 0.0;
    SUBCASE("unit value when psi vanishes") {
        CHECK(phi(dom, {0.0, 0.0}, 1.0, p) == doctest::Approx(1.0));
    }
    SUBCASE("gradient and time derivative match finite differences") {
        Rng rng(4);
        const double fd = 1e-6;
        for (int k = 0; k < 20; ++k) {
            const Point x{0.9 * rng.symmetric(), 0.0};
            const double t = 0.2 + 1.6 * rng.uniform();
            const double gx = (phi(dom, {x[0] + fd, 0.0}, t, p) -
                               phi(dom, {x[0] - fd, 0.0}, t, p)) / (2.0 * fd);
            CHECK(phi_gradient(dom, x, t, p)[0] ==
                  doctest::Approx(gx).epsilon(1e-6));
            const double gt =
                (phi(dom, x, t + fd, p) - phi(dom, x, t - fd, p)) / (2.0 * fd);
            CHECK(phi_time_derivative(dom, x, t, p) ==
                  doctest::Approx(gt).epsilon(1e-6));
        }
    }
    SUBCASE("positivity and psi upper bound on all nodes") {
        const Setup s = benchmark_setup(100);
        const double psi_cap = s.grid->domain().max_radius() *
                                   s.grid->domain().max_radius() +
                               s.params.beta0;
        for (std::size_t k = 0; k < s.grid->node_count(); ++k) {
            const Point x = s.grid->node_point(k);
            for (double t : {0.0, 0.3 * s.T, s.T}) {
                CHECK(phi(s.grid->domain(), x, t, s.params) > 0.0);
                CHECK(psi(s.grid->domain(), x, t, s.params) <= psi_cap);
            }
        }
    }
}

TEST_CASE("beta windows") {
    const Domain dom = box1d(0.5);
    SUBCASE("interior-estimate window only") {
        const BetaWindow w = beta_window(dom, 10.0, 0.1, 0.1, false);
        CHECK(w.upper == doctest::Approx((1.5 / 5.0) * std::sqrt(0.1)));
        CHECK(w.lower == 0.0);
    }
    SUBCASE("horizon-coupled window takes the intersection") {
        const BetaWindow w = beta_window(dom, 12.0, 0.1, 0.1, true);
        CHECK(w.upper == doctest::Approx(std::pow(0.1, 1.5)));
        CHECK(w.binding == "eps^(alpha+1)");
        CHECK(w.lower == doctest::Approx((4.0 + 0.4) / 144.0));
    }
    SUBCASE("binding constraint flips with alpha") {
        // alpha > 1 shrinks the interior-estimate window below eps^alpha/5.
        Domain dom2 = box1d(1.5);
        const BetaWindow w = beta_window(dom2, 1e6, 0.9, 0.1, true);
        CHECK(w.binding == "(2-alpha)/5 * eps^alpha");
    }
    SUBCASE("default beta sits inside both windows") {
        const Setup s = benchmark_setup(100);
        CHECK(s.params.violations(dom, s.T, true).empty());
    }
    SUBCASE("violations are named") {
        CarlemanParams p = default_params(dom, 12.0, 0.1, 0.1);
        p.beta = std::sqrt(0.1);  // eps^alpha: outside every window
        const auto v = p.violations(dom, 12.0, true);
        REQUIRE(!v.empty());
        CHECK(v.front().find("carleman.beta") != std::string::npos);
    }
}

TEST_CASE("carleman_sides") {
    const Setup s = benchmark_setup(100);
    SUBCASE("zero trajectory is degenerate") {
        const SpaceTimeField traj =
            solve_forward(zero_state(s.grid), SourceTerm::zero(), s.T, s.dt);
        const CarlemanSides sides =
            carleman_sides(traj, SourceTerm::zero(), *s.omega, s.params);
        CHECK(sides.degenerate);
        CHECK(sides.lhs() == 0.0);
        CHECK(sides.rhs_control() == 0.0);
        CHECK(sides.rhs_source() == 0.0);
    }
    SUBCASE("solution supported in omega gives ratio 1") {
        // A narrow bump in B(0, 0.3) stays inside omega over a short
        // horizon: the omega integral then equals the full integral.
        auto grid = s.grid;
        StatePair init;
        init.u = make_field(grid, [](const Point& p) {
            const double r = std::abs(p[0]) / 0.12;
            const double v = 1.0 - r * r;
            return v > 0.0 ? v * v : 0.0;
        });
        init.v = zero_field(grid);
        const double t_short = 0.1;
        const SpaceTimeField traj =
            solve_forward(init, SourceTerm::zero(), t_short, s.dt);
        // Containment check: nothing measurable escaped B(0, 0.3).
        double outside = 0.0, inside = 0.0;
        for (const auto& snap : traj.snapshots) {
            for (std::size_t k = 0; k < snap.size(); ++k) {
                const double x = std::abs(grid->node_point(k)[0]);
                if (x > 0.3) outside = std::max(outside, std::abs(snap[k]));
                else inside = std::max(inside, std::abs(snap[k]));
            }
        }
        REQUIRE(outside <= 1e-12 * inside);
        CarlemanParams p = s.params;
        p.t0 = t_short / 2.0;
        const CarlemanSides sides =
            carleman_sides(traj, SourceTerm::zero(), *s.omega, p);
        CHECK(sides.ratio == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("homogeneous of degree two in the trajectory") {
        Rng rng(12);
        const StatePair q = band_limited_pair(s.grid, 6, rng);
        SpaceTimeField traj = solve_forward(q, SourceTerm::zero(), s.T, s.dt, 4);
        const CarlemanSides base =
            carleman_sides(traj, SourceTerm::zero(), *s.omega, s.params);
        const double c = 3.7;
        for (auto& snap : traj.snapshots)
            for (double& v : snap) v *= c;
        for (double& v : traj.state_at_0.v.values) v *= c;
        for (double& v : traj.state_at_T.v.values) v *= c;
        const CarlemanSides scaled =
            carleman_sides(traj, SourceTerm::zero(), *s.omega, s.params);
        CHECK(scaled.log_lhs ==
              doctest::Approx(base.log_lhs + 2.0 * std::log(c)).epsilon(1e-12));
        CHECK(scaled.log_rhs_control ==
              doctest::Approx(base.log_rhs_control + 2.0 * std::log(c)).epsilon(1e-12));
        CHECK(scaled.ratio == doctest::Approx(base.ratio).epsilon(1e-10));
    }
    SUBCASE("weight concentration drives the ratio to one from above") {
        // At small (s, gamma) the weight is flat and the whole-domain
        // integral strictly dominates the collar one; growing s
        // concentrates the mass near max |x|, inside the collar.
        Rng rng(8);
        const StatePair q = band_limited_pair(s.grid, 8, rng);
        const SpaceTimeField traj = solve_forward(q, SourceTerm::zero(), s.T, s.dt);
        CarlemanParams p = s.params;
        p.gamma = 1.0;
        std::vector<double> ratios;
        for (double sv : {1.0, 2.0, 4.0}) {
            p.s = sv;
            ratios.push_back(carleman_sides(traj, SourceTerm::zero(), *s.omega, p).ratio);
        }
        CHECK(ratios[0] > 1.0 + 1e-4);
        CHECK(ratios[0] > ratios[1]);
        CHECK(ratios[1] > ratios[2]);
        CHECK(ratios[2] >= 1.0 - 1e-12);
    }
    SUBCASE("source term enters the right-hand side") {
        Rng rng(2);
        const StatePair q = band_limited_pair(s.grid, 4, rng);
        const SourceTerm f = SourceTerm::from_function(
            [](const Point& p, double) { return std::cos(p[0]); });
        const SpaceTimeField traj = solve_forward(q, f, s.T, s.dt, 4);
        const CarlemanSides sides = carleman_sides(traj, f, *s.omega, s.params);
        CHECK(std::isfinite(sides.log_rhs_source));
        CHECK(sides.rhs_source() > 0.0);
        CHECK(!sides.degenerate);
    }
}

TEST_CASE("ratios stay bounded and stable under refinement") {
    double recorded[2] = {0.0, 0.0};
    int idx = 0;
    for (int cells : {100, 200}) {
        const Setup s = benchmark_setup(cells);
        Rng rng(77);
        double worst = 0.0;
        for (int run = 0; run < 3; ++run) {
            const StatePair q = band_limited_pair(s.grid, 8, rng);
            const SpaceTimeField traj =
                solve_forward(q, SourceTerm::zero(), s.T, s.dt);
            for (double sv : {10.0, 20.0, 40.0}) {
                CarlemanParams p = s.params;
                p.s = sv;
                const CarlemanSides sides =
                    carleman_sides(traj, SourceTerm::zero(), *s.omega, p);
                CHECK(std::isfinite(sides.ratio));
                worst = std::max(worst, sides.ratio);
            }
        }
        recorded[idx++] = worst;
    }
    MESSAGE("carleman ratio bound: ", recorded[0], " -> ", recorded[1]);
    CHECK(std::abs(recorded[1] - recorded[0]) <= 0.25 * recorded[1]);
}

TEST_CASE("carleman_scan") {
    const Setup s = benchmark_setup(100);
    Rng rng(5);
    const StatePair q = band_limited_pair(s.grid, 6, rng);
    const SpaceTimeField traj = solve_forward(q, SourceTerm::zero(), s.T, s.dt, 2);

    SUBCASE("single pair matches carleman_sides") {
        const double sv[] = {15.0};
        const double gv[] = {2.0};
        const ScanResult r = carleman_scan(traj, SourceTerm::zero(), *s.omega,
                                           s.params, sv, gv, s.T);
        REQUIRE(r.rows.size() == 1);
        CarlemanParams p = s.params;
        p.s = 15.0;
        p.gamma = 2.0;
        const CarlemanSides direct =
            carleman_sides(traj, SourceTerm::zero(), *s.omega, p);
        CHECK(r.rows[0].sides.log_lhs == direct.log_lhs);
        CHECK(r.rows[0].sides.ratio == direct.ratio);
    }
    SUBCASE("3x3 scan emits nine rows in deterministic order") {
        const double sv[] = {10.0, 20.0, 40.0};
        const double gv[] = {1.5, 2.0, 3.0};
        const ScanResult r = carleman_scan(traj, SourceTerm::zero(), *s.omega,
                                           s.params, sv, gv, s.T);
        REQUIRE(r.rows.size() == 9);
        CHECK(r.rows[0].s == 10.0);
        CHECK(r.rows[0].gamma == 1.5);
        CHECK(r.rows[8].s == 40.0);
        CHECK(r.rows[8].gamma == 3.0);
    }
    SUBCASE("invalid pairs are skipped with a reason") {
        const double sv[] = {0.5, 10.0};
        const double gv[] = {2.0};
        const ScanResult r = carleman_scan(traj, SourceTerm::zero(), *s.omega,
                                           s.params, sv, gv, s.T);
        CHECK(r.rows.size() == 1);
        REQUIRE(r.skipped.size() == 1);
        CHECK(r.skipped[0].find("carleman.s") != std::string::npos);
    }
    SUBCASE("ratio trend over s is non-increasing") {
        const double sv[] = {10.0, 20.0, 40.0};
        const double gv[] = {2.0};
        const ScanResult r = carleman_scan(traj, SourceTerm::zero(), *s.omega,
                                           s.params, sv, gv, s.T);
        std::vector<double> ratios;
        for (const auto& row : r.rows) ratios.push_back(row.sides.ratio);
        CHECK(monotone_trend_ok(ratios));
    }
    SUBCASE("calibration stabilizes") {
        const double s_star =
            calibrate_s(traj, SourceTerm::zero(), *s.omega, s.params, 10.0);
        CHECK(s_star >= 10.0);
        CHECK(s_star <= 160.0);
    }
}

TEST_CASE("monotone_trend_ok") {
    const std::vector<double> down{5.0, 3.0, 1.0};
    const std::vector<double> up{1.0, 3.0, 9.0};
    CHECK(monotone_trend_ok(down));
    CHECK(!monotone_trend_ok(up));
}
