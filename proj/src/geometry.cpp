#include "degwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "degwave/errors.hpp"

namespace degwave {

double point_norm(const Domain& domain, const Point& p) {
    if (domain.dim == 1) return std::abs(p[0]);
    return std::hypot(p[0], p[1]);
}

double coefficient_at(const Domain& domain, const Point& p) {
    if (domain.alpha == 0.0) return 1.0;
    return std::pow(point_norm(domain, p), domain.alpha);
}

double Domain::origin_distance_to_boundary() const {
    double d = std::min(-bounds[0][0], bounds[0][1]);
    if (dim == 2) d = std::min(d, std::min(-bounds[1][0], bounds[1][1]));
    return d;
}

double Domain::max_radius() const {
    double r2 = std::max(bounds[0][0] * bounds[0][0], bounds[0][1] * bounds[0][1]);
    if (dim == 2)
        r2 += std::max(bounds[1][0] * bounds[1][0], bounds[1][1] * bounds[1][1]);
    return std::sqrt(r2);
}

bool Domain::contains_closure(const Point& p) const {
    for (int d = 0; d < dim; ++d)
        if (p[d] < bounds[d][0] || p[d] > bounds[d][1]) return false;
    return true;
}

void Domain::validate() const {
    if (dim != 1 && dim != 2)
        throw ValidationError("domain.dim", "must be 1 or 2");
    for (int d = 0; d < dim; ++d) {
        if (!(bounds[d][0] < 0.0 && 0.0 < bounds[d][1]))
            throw ValidationError("domain.bounds",
                                  "the origin must be strictly interior: a_" +
                                      std::to_string(d) + " < 0 < b_" + std::to_string(d));
    }
    if (alpha != 0.0 && !(alpha > 0.0 && alpha < 2.0))
        throw ValidationError("domain.alpha",
                              "must satisfy 0 < alpha < 2 (alpha = 0 is the "
                              "non-degenerate reference mode)");
}

Grid::Grid(Domain domain, int cells_per_axis)
    : domain_(domain), cells_(cells_per_axis) {
    domain_.validate();
    if (cells_ < 8)
        throw ValidationError("grid.cells_per_axis", "must be at least 8");
    for (int d = 0; d < domain_.dim; ++d) {
        const double a = domain_.bounds[d][0];
        const double b = domain_.bounds[d][1];
        h_[d] = (b - a) / cells_;
        nodes_[d].resize(cells_ + 1);
        faces_[d].resize(cells_);
        // Blend form keeps the origin exact when it lies on the lattice.
        for (int i = 0; i <= cells_; ++i)
            nodes_[d][i] = (a * (cells_ - i) + b * i) / cells_;
        for (int i = 0; i < cells_; ++i) {
            faces_[d][i] = 0.5 * (nodes_[d][i] + nodes_[d][i + 1]);
            if (faces_[d][i] == 0.0)
                throw ValidationError(
                    "grid.cells_per_axis",
                    "a face coordinate coincides with the degenerate point; "
                    "choose an even cell count so the origin is a node");
        }
    }
}

double Grid::cell_volume() const {
    return domain_.dim == 1 ? h_[0] : h_[0] * h_[1];
}

std::size_t Grid::node_count() const {
    const std::size_t n = nodes_per_axis();
    return domain_.dim == 1 ? n : n * n;
}

Point Grid::node_point(std::size_t index) const {
    const int n = nodes_per_axis();
    const int i = static_cast<int>(index % n);
    const int j = static_cast<int>(index / n);
    Point p{nodes_[0][i], 0.0};
    if (domain_.dim == 2) p[1] = nodes_[1][j];
    return p;
}

bool Grid::is_boundary_node(std::size_t index) const {
    const int n = nodes_per_axis();
    const int i = static_cast<int>(index % n);
    if (i == 0 || i == n - 1) return true;
    if (domain_.dim == 2) {
        const int j = static_cast<int>(index / n);
        if (j == 0 || j == n - 1) return true;
    }
    return false;
}

std::optional<std::array<int, 2>> Grid::origin_node() const {
    std::array<int, 2> idx{0, 0};
    for (int d = 0; d < domain_.dim; ++d) {
        const auto& xs = nodes_[d];
        auto it = std::find(xs.begin(), xs.end(), 0.0);
        if (it == xs.end()) return std::nullopt;
        idx[d] = static_cast<int>(it - xs.begin());
    }
    return idx;
}

std::vector<BoundaryFace> gamma_plus(const Domain& domain) {
    std::vector<BoundaryFace> out;
    for (int d = 0; d < domain.dim; ++d) {
        for (int side = 0; side < 2; ++side) {
            // Face center has the other coordinates at the interval midpoints,
            // which contribute nothing to x . nu for an axis face.
            const double plane = domain.bounds[d][side];
            const double xdotnu = (side == 1) ? plane : -plane;
            if (xdotnu >= 0.0)
                out.push_back({d, side, xdotnu});
        }
    }
    return out;
}

double distance_to_faces(const Domain& domain, const Point& p,
                         const std::vector<BoundaryFace>& faces) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : faces) {
        double d2 = (p[f.axis] - domain.bounds[f.axis][f.side]) *
                    (p[f.axis] - domain.bounds[f.axis][f.side]);
        for (int t = 0; t < domain.dim; ++t) {
            if (t == f.axis) continue;
            const double lo = domain.bounds[t][0] - p[t];
            const double hi = p[t] - domain.bounds[t][1];
            const double excess = std::max({0.0, lo, hi});
            d2 += excess * excess;
        }
        best = std::min(best, std::sqrt(d2));
    }
    return best;
}

ControlRegion build_control_region(std::shared_ptr<const Grid> grid,
                                   double delta, double epsilon,
                                   bool include_origin) {
    const Domain& domain = grid->domain();
    double min_len = domain.length(0);
    if (domain.dim == 2) min_len = std::min(min_len, domain.length(1));
    if (!(delta > 0.0) || 3.0 * delta >= 0.5 * min_len)
        throw ValidationError("region.delta",
                              "collar width 3*delta must be positive and "
                              "smaller than half the shortest axis");
    if (include_origin &&
        !(epsilon > 0.0 && 3.0 * epsilon < domain.origin_distance_to_boundary()))
        throw ValidationError("region.epsilon",
                              "B(0, 3*epsilon) must be contained in the domain");

    ControlRegion region;
    region.grid = grid;
    region.delta = delta;
    region.epsilon = epsilon;
    region.collar_width = 3.0 * delta;
    region.contains_origin = include_origin;
    region.indicator.assign(grid->node_count(), 0);

    const auto faces = gamma_plus(domain);
    // Slack of one part in 1e12 keeps nodes that sit exactly on the collar edge.
    const double tol = 1e-12 * std::max(1.0, min_len);
    bool all = true;
    for (std::size_t k = 0; k < grid->node_count(); ++k) {
        const Point p = grid->node_point(k);
        bool in = distance_to_faces(domain, p, faces) <= region.collar_width + tol;
        if (!in && include_origin)
            in = point_norm(domain, p) <= 3.0 * epsilon + tol;
        region.indicator[k] = in ? 1 : 0;
        all = all && in;
    }
    region.covers_domain = all;
    return region;
}

double time_horizon_floor(const Domain& domain, double epsilon) {
    return 2.0 / std::sqrt(std::pow(epsilon, domain.alpha + 1.0)) *
           domain.max_radius();
}

double minimal_time(const Domain& domain, double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon <= domain.origin_distance_to_boundary()))
        throw ValidationError("region.epsilon",
                              "must lie in (0, dist(0, boundary)]");
    const double r = domain.max_radius();
    const double t0 = time_horizon_floor(domain, epsilon);
    const double t1 = std::sqrt((4.0 * r * r + 4.0 * delta) /
                                std::pow(epsilon, domain.alpha + 1.0));
    return 1.01 * std::max(t0, t1);
}

}  // namespace degwave
