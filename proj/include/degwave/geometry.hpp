#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace degwave {

/// Spatial point. 1D problems use component 0 only; component 1 is kept at 0.
using Point = std::array<double, 2>;

/// Axis-aligned box domain containing the origin in its interior, together
/// with the exponent alpha of the interior-degenerate coefficient a(x) = |x|^alpha.
///
/// alpha = 0 is admitted as the non-degenerate reference mode; otherwise
/// alpha must lie in (0, 2).
struct Domain {
    int dim = 1;
    /// Per-axis interval [a_i, b_i]; axis 1 is ignored in 1D.
    std::array<std::array<double, 2>, 2> bounds{{{-1.0, 1.0}, {-1.0, 1.0}}};
    double alpha = 0.0;

    double length(int axis) const { return bounds[axis][1] - bounds[axis][0]; }

    /// Distance from the origin to the boundary, min over axes of min(-a_i, b_i).
    double origin_distance_to_boundary() const;

    /// max over the closed box of |x| (attained at the farthest corner).
    double max_radius() const;

    bool contains_closure(const Point& p) const;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;
};

/// Euclidean norm restricted to the active components of the domain.
double point_norm(const Domain& domain, const Point& p);

/// The degenerate coefficient a(p) = |p|^alpha; returns 1 when alpha = 0.
double coefficient_at(const Domain& domain, const Point& p);

/// Tensor-product uniform grid on a Domain. Nodes include the boundary;
/// face coordinates sit halfway between consecutive nodes and are where
/// the degenerate coefficient is sampled, so the grid rejects layouts in
/// which a face falls exactly on the origin (choose an even cell count so
/// the origin is a node instead).
class Grid {
public:
    Grid(Domain domain, int cells_per_axis);

    const Domain& domain() const { return domain_; }
    int dim() const { return domain_.dim; }
    int cells() const { return cells_; }
    int nodes_per_axis() const { return cells_ + 1; }
    double spacing(int axis) const { return h_[axis]; }
    double cell_volume() const;

    double node_coord(int axis, int i) const { return nodes_[axis][i]; }
    double face_coord(int axis, int i) const { return faces_[axis][i]; }

    /// Total node count: (cells+1)^dim.
    std::size_t node_count() const;
    /// Flattened node index, x fastest.
    std::size_t node_index(int i, int j = 0) const {
        return static_cast<std::size_t>(j) * nodes_per_axis() + i;
    }
    Point node_point(std::size_t index) const;
    bool is_boundary_node(std::size_t index) const;

    /// Per-axis node index of the origin if it is exactly a grid node.
    std::optional<std::array<int, 2>> origin_node() const;

private:
    Domain domain_;
    int cells_;
    std::array<double, 2> h_{0.0, 0.0};
    std::array<std::vector<double>, 2> nodes_;
    std::array<std::vector<double>, 2> faces_;
};

/// One whole side of the box boundary.
struct BoundaryFace {
    int axis = 0;   ///< normal direction
    int side = 0;   ///< 0 = lower bound, 1 = upper bound
    double normal_component = 0.0;  ///< x . nu at the face center
};

/// Boundary sides whose outward normal nu satisfies x . nu >= 0 at the
/// face center. For a box containing the origin this is the whole boundary.
std::vector<BoundaryFace> gamma_plus(const Domain& domain);

/// Distance from p to the union of the given boundary faces.
double distance_to_faces(const Domain& domain, const Point& p,
                         const std::vector<BoundaryFace>& faces);

/// Interior control region: nodes within the 3*delta collar of the
/// x . nu >= 0 part of the boundary, optionally joined with the ball
/// B(0, 3*epsilon) around the degeneracy.
struct ControlRegion {
    std::shared_ptr<const Grid> grid;
    std::vector<std::uint8_t> indicator;  ///< per-node membership mask
    double delta = 0.0;
    double epsilon = 0.0;
    double collar_width = 0.0;   ///< 3 * delta
    bool contains_origin = false;
    bool covers_domain = false;  ///< degenerate case: the mask is all of Omega

    bool contains(std::size_t node) const { return indicator[node] != 0; }
};

ControlRegion build_control_region(std::shared_ptr<const Grid> grid,
                                   double delta, double epsilon,
                                   bool include_origin);

/// The geometric-optics time floor 2 |x|_max / sqrt(eps^(alpha+1)).
double time_horizon_floor(const Domain& domain, double epsilon);

/// Smallest admissible control horizon: the larger of the time floor and
/// the root of eps^(alpha+1) T^2 > 4 max|x|^2 + 4 delta, rounded up by 1%.
double minimal_time(const Domain& domain, double epsilon, double delta);

}  // namespace degwave
