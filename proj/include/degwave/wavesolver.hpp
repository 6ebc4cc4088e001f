#pragma once

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "degwave/geometry.hpp"
#include "degwave/spaces.hpp"

namespace degwave {

/// Flux-form discretization of div(|x|^alpha grad u) with the coefficient
/// sampled at cell faces and homogeneous Dirichlet rows. Every row stays
/// nontrivial even when the origin is a grid node, and the operator is
/// exactly symmetric and negative semidefinite in the grid inner product.
class DegenerateOperator {
public:
    explicit DegenerateOperator(std::shared_ptr<const Grid> grid);

    void apply(std::span<const double> u, std::span<double> out) const;

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    double max_face_coefficient() const { return max_face_a_; }

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> face_a_x_;  ///< x-faces, i in [0,cells) fastest, j rows
    std::vector<double> face_a_y_;  ///< y-faces (2D only)
    double max_face_a_ = 0.0;
};

/// Largest stable explicit step: safety * h / sqrt(max face coefficient)
/// in 1D, with the usual sqrt(dim) reduction on tensor grids.
double cfl_timestep(const Grid& grid, double safety);

/// Displacement / velocity snapshot with both fields on the same grid.
struct StatePair {
    ScalarField u;
    ScalarField v;
};

StatePair zero_state(std::shared_ptr<const Grid> grid);
double state_inner(const StatePair& a, const StatePair& b);
double state_norm(const StatePair& a);

struct SpaceTimeField;

/// Right-hand side of a solve: nothing, a closed form sampled on demand,
/// or a stored trajectory optionally restricted to a control region.
class SourceTerm {
public:
    static SourceTerm zero();
    static SourceTerm from_function(std::function<double(const Point&, double)> fn);
    static SourceTerm from_trajectory(std::shared_ptr<const SpaceTimeField> traj,
                                      std::shared_ptr<const ControlRegion> mask = nullptr);

    bool is_zero() const { return std::holds_alternative<std::monostate>(body_); }

    /// Writes the nodal source values for time step `step` (time t) of the
    /// consuming solve. Trajectory sources are indexed by step and must have
    /// been produced with the same step count.
    void sample(const Grid& grid, int step, double t, std::span<double> out) const;

private:
    struct Stored {
        std::shared_ptr<const SpaceTimeField> traj;
        std::shared_ptr<const ControlRegion> mask;
    };
    std::variant<std::monostate, std::function<double(const Point&, double)>, Stored> body_;
};

/// Space-time trajectory: every stride-th displacement snapshot plus the
/// exact end states. Quadratures over a trajectory use the stored stride
/// with trapezoidal weights in time.
struct SpaceTimeField {
    std::shared_ptr<const Grid> grid;
    double dt = 0.0;      ///< solver step
    int n_steps = 0;      ///< total steps; t_final = n_steps * dt
    int stride = 1;       ///< snapshots kept every stride steps
    double t_final = 0.0;
    std::vector<std::vector<double>> snapshots;
    StatePair state_at_0;
    StatePair state_at_T;
    /// Staggered leapfrog energy recorded at each stored step except the
    /// last; exactly conserved for source-free runs.
    std::vector<EnergySnapshot> energy_series;

    int stored_count() const { return static_cast<int>(snapshots.size()); }
    int step_of(int snap) const { return snap * stride; }
    double time_of(int snap) const { return snap * stride * dt; }
    ScalarField field_at(int snap) const;
};

/// Explicit leapfrog march of u_tt = div(|x|^alpha grad u) + f from initial
/// data, with a Taylor-corrected first step so the discrete initial velocity
/// is second-order accurate. Aborts with InstabilityError when the staggered
/// energy outruns the accumulated data and source budget tenfold over a
/// 100-step window.
SpaceTimeField solve_forward(const StatePair& init, const SourceTerm& source,
                             double T, double dt, int stride = 1);

/// Terminal-data solve: the equation is time symmetric, so this is the
/// forward march under t -> T - t. Snapshots are returned in forward-time
/// order; state_at_0 carries the recovered physical state at t = 0.
SpaceTimeField solve_backward(const StatePair& terminal, const SourceTerm& source,
                              double T, double dt, int stride = 1);

/// One mesh face on the boundary (an edge of a boundary cell in 2D, an
/// endpoint in 1D).
struct MeshBoundaryFace {
    int axis = 0;
    int side = 0;
    int t_index = 0;  ///< tangential cell index (2D), 0 in 1D
    Point center{0.0, 0.0};
};

/// Outward normal derivative along the boundary, one-sided second-order,
/// per stored time step, together with its L2(boundary x (0,T)) norm.
struct BoundaryTrace {
    struct FaceSeries {
        MeshBoundaryFace face;
        std::vector<double> values;
    };
    std::vector<FaceSeries> faces;
    double l2_sigma_norm = 0.0;
};

BoundaryTrace boundary_trace(const SpaceTimeField& traj);

/// The staggered energy series recorded during the march.
const std::vector<EnergySnapshot>& energy_trace(const SpaceTimeField& traj);

}  // namespace degwave
