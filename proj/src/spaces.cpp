#include "degwave/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "degwave/errors.hpp"

namespace degwave {

ScalarField zero_field(std::shared_ptr<const Grid> grid) {
    ScalarField f;
    f.values.assign(grid->node_count(), 0.0);
    f.grid = std::move(grid);
    return f;
}

ScalarField make_field(std::shared_ptr<const Grid> grid,
                       const std::function<double(const Point&)>& fn,
                       bool zero_boundary) {
    ScalarField f;
    f.zero_boundary = zero_boundary;
    f.values.resize(grid->node_count());
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        f.values[k] = (zero_boundary && grid->is_boundary_node(k))
                          ? 0.0
                          : fn(grid->node_point(k));
    }
    f.grid = std::move(grid);
    return f;
}

double grid_inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
    return s * a.grid->cell_volume();
}

double grid_norm(const ScalarField& a) { return std::sqrt(grid_inner(a, a)); }

void scale(ScalarField& a, double c) {
    for (double& v : a.values) v *= c;
}

void axpy(ScalarField& y, double c, const ScalarField& x) {
    for (std::size_t k = 0; k < y.values.size(); ++k) y.values[k] += c * x.values[k];
}

double l2_norm_sq(const ScalarField& u) {
    const Grid& g = *u.grid;
    const int n = g.cells();
    const double vol = g.cell_volume();
    double s = 0.0;
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            const double mid = 0.5 * (u.values[i] + u.values[i + 1]);
            s += mid * mid;
        }
    } else {
        const int stride = g.nodes_per_axis();
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = g.node_index(i, j);
                const double mid = 0.25 * (u.values[k] + u.values[k + 1] +
                                           u.values[k + stride] +
                                           u.values[k + stride + 1]);
                s += mid * mid;
            }
        }
    }
    return s * vol;
}

double weighted_gradient_sq(const ScalarField& u) {
    const Grid& g = *u.grid;
    const Domain& dom = g.domain();
    const int n = g.cells();
    const double vol = g.cell_volume();
    double s = 0.0;
    if (g.dim() == 1) {
        const double inv_h = 1.0 / g.spacing(0);
        for (int i = 0; i < n; ++i) {
            const double a = coefficient_at(dom, {g.face_coord(0, i), 0.0});
            const double d = (u.values[i + 1] - u.values[i]) * inv_h;
            s += a * d * d;
        }
    } else {
        const int stride = g.nodes_per_axis();
        const double inv_hx = 1.0 / g.spacing(0);
        const double inv_hy = 1.0 / g.spacing(1);
        for (int j = 0; j <= n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double a = coefficient_at(
                    dom, {g.face_coord(0, i), g.node_coord(1, j)});
                const std::size_t k = g.node_index(i, j);
                const double d = (u.values[k + 1] - u.values[k]) * inv_hx;
                s += a * d * d;
            }
        }
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i <= n; ++i) {
                const double a = coefficient_at(
                    dom, {g.node_coord(0, i), g.face_coord(1, j)});
                const std::size_t k = g.node_index(i, j);
                const double d = (u.values[k + stride] - u.values[k]) * inv_hy;
                s += a * d * d;
            }
        }
    }
    return s * vol;
}

double weighted_h1_norm(const ScalarField& u) {
    return std::sqrt(weighted_gradient_sq(u)) + std::sqrt(l2_norm_sq(u));
}

EnergySnapshot energy(const ScalarField& u, const ScalarField& ut, double t) {
    EnergySnapshot e;
    e.time = t;
    e.kinetic = l2_norm_sq(ut);
    e.potential = weighted_gradient_sq(u);
    e.total = e.kinetic + e.potential;
    return e;
}

HardyResult hardy_ratio(const ScalarField& u) {
    const Grid& g = *u.grid;
    const Domain& dom = g.domain();
    if (g.dim() < 2)
        throw ValidationError("hardy.dim", "requires dimension >= 2");
    if (!(dom.alpha > 0.0 && dom.alpha < 2.0))
        throw ValidationError("hardy.alpha", "requires alpha in (0,2)");
    if (!u.zero_boundary)
        throw ValidationError("hardy.field", "field must vanish on the boundary");

    const int n = g.cells();
    const int stride = g.nodes_per_axis();
    const double vol = g.cell_volume();
    double s = 0.0;
    int excluded = 0;
    double excl_max_u = 0.0;
    double excl_max_r = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t k = g.node_index(i, j);
            const bool touches_origin =
                g.node_coord(0, i) <= 0.0 && 0.0 <= g.node_coord(0, i + 1) &&
                g.node_coord(1, j) <= 0.0 && 0.0 <= g.node_coord(1, j + 1);
            const double c0 = u.values[k], c1 = u.values[k + 1];
            const double c2 = u.values[k + stride], c3 = u.values[k + stride + 1];
            if (touches_origin) {
                ++excluded;
                excl_max_u = std::max({excl_max_u, std::abs(c0), std::abs(c1),
                                       std::abs(c2), std::abs(c3)});
                for (int ci = 0; ci < 2; ++ci)
                    for (int cj = 0; cj < 2; ++cj)
                        excl_max_r = std::max(
                            excl_max_r,
                            std::hypot(g.node_coord(0, i + ci), g.node_coord(1, j + cj)));
                continue;
            }
            const Point c{0.5 * (g.node_coord(0, i) + g.node_coord(0, i + 1)),
                          0.5 * (g.node_coord(1, j) + g.node_coord(1, j + 1))};
            const double w = std::pow(point_norm(dom, c), dom.alpha - 2.0);
            const double mid = 0.25 * (c0 + c1 + c2 + c3);
            s += w * mid * mid;
        }
    }
    HardyResult r;
    r.weighted_l2 = std::sqrt(s * vol);
    r.h1_norm = weighted_h1_norm(u);
    if (r.h1_norm == 0.0)
        throw ValidationError("hardy.field", "field must be nonzero");
    const double prefactor = dom.dim - 2 + dom.alpha;
    r.ratio = prefactor * r.weighted_l2 / r.h1_norm;
    r.excluded_cells = excluded;
    // Integral of |x|^(alpha-2) over the ball covering the skipped cells:
    // 2 pi r^alpha / alpha in the plane.
    r.excluded_mass_bound = excl_max_u * excl_max_u * 2.0 * std::numbers::pi *
                            std::pow(excl_max_r, dom.alpha) / dom.alpha;
    return r;
}

double lq_norm(const ScalarField& u, double q) {
    const Grid& g = *u.grid;
    const int n = g.cells();
    const double vol = g.cell_volume();
    double s = 0.0;
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            const double mid = 0.5 * (u.values[i] + u.values[i + 1]);
            s += std::pow(std::abs(mid), q);
        }
    } else {
        const int stride = g.nodes_per_axis();
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = g.node_index(i, j);
                const double mid = 0.25 * (u.values[k] + u.values[k + 1] +
                                           u.values[k + stride] +
                                           u.values[k + stride + 1]);
                s += std::pow(std::abs(mid), q);
            }
        }
    }
    return std::pow(s * vol, 1.0 / q);
}

double critical_exponent(const Domain& domain) {
    return 2.0 * domain.dim / (domain.dim - 2 + domain.alpha);
}

double lq_embedding_ratio(const ScalarField& u, double q) {
    const Domain& dom = u.grid->domain();
    if (dom.dim < 2)
        throw ValidationError("embedding.dim", "requires dimension >= 2");
    const double qc = critical_exponent(dom);
    if (!(q >= 1.0 && q <= qc))
        throw ValidationError("embedding.q",
                              "exponent must lie in [1, 2N/(N-2+alpha)]");
    const double h1 = weighted_h1_norm(u);
    if (h1 == 0.0)
        throw ValidationError("embedding.field", "field must be nonzero");
    return lq_norm(u, q) / h1;
}

std::vector<std::array<int, 2>> lowest_modes(const Domain& domain, int count) {
    std::vector<std::array<int, 2>> out;
    if (domain.dim == 1) {
        for (int k = 1; k <= count; ++k) out.push_back({k, 0});
        return out;
    }
    const double lx = domain.length(0), ly = domain.length(1);
    std::vector<std::array<int, 2>> all;
    const int kmax = count + 2;
    for (int k = 1; k <= kmax; ++k)
        for (int l = 1; l <= kmax; ++l) all.push_back({k, l});
    std::stable_sort(all.begin(), all.end(),
                     [&](const auto& a, const auto& b) {
                         const double fa = a[0] * a[0] / (lx * lx) + a[1] * a[1] / (ly * ly);
                         const double fb = b[0] * b[0] / (lx * lx) + b[1] * b[1] / (ly * ly);
                         if (fa != fb) return fa < fb;
                         return a < b;
                     });
    all.resize(count);
    return all;
}

ScalarField mode_field(std::shared_ptr<const Grid> grid,
                       const std::array<int, 2>& mode) {
    const Domain dom = grid->domain();
    return make_field(grid, [dom, mode](const Point& p) {
        double v = std::sin(mode[0] * std::numbers::pi *
                            (p[0] - dom.bounds[0][0]) / dom.length(0));
        if (dom.dim == 2)
            v *= std::sin(mode[1] * std::numbers::pi *
                          (p[1] - dom.bounds[1][0]) / dom.length(1));
        return v;
    });
}

std::vector<ScalarField> hardy_test_suite(std::shared_ptr<const Grid> grid) {
    const Domain dom = grid->domain();
    auto normalized = [dom](const Point& p) {
        Point xi{0.0, 0.0};
        for (int d = 0; d < dom.dim; ++d) {
            const double mid = 0.5 * (dom.bounds[d][0] + dom.bounds[d][1]);
            xi[d] = (p[d] - mid) / (0.5 * dom.length(d));
        }
        return xi;
    };
    auto bump = [](const Point& xi, double cx, double cy, double r) {
        const double d2 = (xi[0] - cx) * (xi[0] - cx) + (xi[1] - cy) * (xi[1] - cy);
        const double s = 1.0 - d2 / (r * r);
        return s > 0.0 ? s * s : 0.0;
    };

    std::vector<std::function<double(const Point&)>> fns;
    for (double r : {0.9, 0.7, 0.5, 0.35})
        fns.push_back([=](const Point& p) { return bump(normalized(p), 0, 0, r); });
    const double off[8][2] = {{0.2, 0},  {-0.2, 0}, {0, 0.2},    {0, -0.2},
                              {0.3, 0.3}, {-0.3, 0.3}, {0.3, -0.3}, {-0.3, -0.3}};
    for (const auto& c : off)
        fns.push_back([=](const Point& p) {
            return bump(normalized(p), c[0], c[1], 0.45);
        });
    fns.push_back([=](const Point& p) {
        const Point xi = normalized(p);
        return bump(xi, 0, 0, 0.8) * xi[0];
    });
    fns.push_back([=](const Point& p) {
        const Point xi = normalized(p);
        return bump(xi, 0, 0, 0.8) * xi[1];
    });
    fns.push_back([=](const Point& p) {
        const Point xi = normalized(p);
        return bump(xi, 0, 0, 0.8) * xi[0] * xi[1];
    });
    fns.push_back([=](const Point& p) {
        const Point xi = normalized(p);
        return bump(xi, 0, 0, 0.8) * (xi[0] * xi[0] - xi[1] * xi[1]);
    });
    const double twin[4][2] = {{0.4, 0}, {0, 0.4}, {0.3, 0.3}, {0.4, 0.4}};
    for (const auto& c : twin)
        fns.push_back([=](const Point& p) {
            const Point xi = normalized(p);
            return bump(xi, c[0], c[1], 0.3) + bump(xi, -c[0], -c[1], 0.3);
        });

    std::vector<ScalarField> out;
    out.reserve(fns.size());
    for (const auto& fn : fns) out.push_back(make_field(grid, fn));
    return out;
}

}  // namespace degwave
