#include "degwave/wavesolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "degwave/errors.hpp"

namespace degwave {

DegenerateOperator::DegenerateOperator(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)) {
    const Grid& g = *grid_;
    const Domain& dom = g.domain();
    const int n = g.cells();
    if (g.dim() == 1) {
        face_a_x_.resize(n);
        for (int i = 0; i < n; ++i)
            face_a_x_[i] = coefficient_at(dom, {g.face_coord(0, i), 0.0});
    } else {
        const int nn = g.nodes_per_axis();
        face_a_x_.resize(static_cast<std::size_t>(n) * nn);
        for (int j = 0; j < nn; ++j)
            for (int i = 0; i < n; ++i)
                face_a_x_[static_cast<std::size_t>(j) * n + i] =
                    coefficient_at(dom, {g.face_coord(0, i), g.node_coord(1, j)});
        face_a_y_.resize(static_cast<std::size_t>(nn) * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nn; ++i)
                face_a_y_[static_cast<std::size_t>(j) * nn + i] =
                    coefficient_at(dom, {g.node_coord(0, i), g.face_coord(1, j)});
    }
    max_face_a_ = 0.0;
    for (double a : face_a_x_) max_face_a_ = std::max(max_face_a_, a);
    for (double a : face_a_y_) max_face_a_ = std::max(max_face_a_, a);
}

void DegenerateOperator::apply(std::span<const double> u, std::span<double> out) const {
    const Grid& g = *grid_;
    const int n = g.cells();
    if (g.dim() == 1) {
        const double inv_h2 = 1.0 / (g.spacing(0) * g.spacing(0));
        out[0] = 0.0;
        out[n] = 0.0;
        for (int i = 1; i < n; ++i) {
            out[i] = (face_a_x_[i] * (u[i + 1] - u[i]) -
                      face_a_x_[i - 1] * (u[i] - u[i - 1])) * inv_h2;
        }
        return;
    }
    const int nn = g.nodes_per_axis();
    const double inv_hx2 = 1.0 / (g.spacing(0) * g.spacing(0));
    const double inv_hy2 = 1.0 / (g.spacing(1) * g.spacing(1));
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 1; j < n; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nn;
        const double* ax = &face_a_x_[static_cast<std::size_t>(j) * n];
        const double* ays = &face_a_y_[static_cast<std::size_t>(j) * nn];
        const double* ayn = &face_a_y_[static_cast<std::size_t>(j - 1) * nn];
        for (int i = 1; i < n; ++i) {
            const std::size_t k = row + i;
            out[k] = (ax[i] * (u[k + 1] - u[k]) - ax[i - 1] * (u[k] - u[k - 1])) * inv_hx2 +
                     (ays[i] * (u[k + nn] - u[k]) - ayn[i] * (u[k] - u[k - nn])) * inv_hy2;
        }
    }
}

double cfl_timestep(const Grid& grid, double safety) {
    if (!(safety > 0.0 && safety <= 1.0))
        throw ValidationError("time.safety", "must lie in (0, 1]");
    const Domain& dom = grid.domain();
    double max_a = 0.0;
    for (int i = 0; i < grid.cells(); ++i) {
        if (grid.dim() == 1) {
            max_a = std::max(max_a, coefficient_at(dom, {grid.face_coord(0, i), 0.0}));
        } else {
            for (int j = 0; j <= grid.cells(); ++j) {
                max_a = std::max(max_a, coefficient_at(dom, {grid.face_coord(0, i),
                                                             grid.node_coord(1, j)}));
                max_a = std::max(max_a, coefficient_at(dom, {grid.node_coord(0, j),
                                                             grid.face_coord(1, i)}));
            }
        }
    }
    double inv_h2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    if (grid.dim() == 2) inv_h2 += 1.0 / (grid.spacing(1) * grid.spacing(1));
    return safety / std::sqrt(max_a * inv_h2);
}

StatePair zero_state(std::shared_ptr<const Grid> grid) {
    return {zero_field(grid), zero_field(grid)};
}

double state_inner(const StatePair& a, const StatePair& b) {
    return grid_inner(a.u, b.u) + grid_inner(a.v, b.v);
}

double state_norm(const StatePair& a) { return std::sqrt(state_inner(a, a)); }

SourceTerm SourceTerm::zero() { return SourceTerm{}; }

SourceTerm SourceTerm::from_function(std::function<double(const Point&, double)> fn) {
    SourceTerm s;
    s.body_ = std::move(fn);
    return s;
}

SourceTerm SourceTerm::from_trajectory(std::shared_ptr<const SpaceTimeField> traj,
                                       std::shared_ptr<const ControlRegion> mask) {
    SourceTerm s;
    s.body_ = Stored{std::move(traj), std::move(mask)};
    return s;
}

void SourceTerm::sample(const Grid& grid, int step, double t,
                        std::span<double> out) const {
    if (std::holds_alternative<std::monostate>(body_)) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    if (const auto* fn = std::get_if<std::function<double(const Point&, double)>>(&body_)) {
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = grid.is_boundary_node(k) ? 0.0 : (*fn)(grid.node_point(k), t);
        return;
    }
    const Stored& st = std::get<Stored>(body_);
    if (st.traj->stride != 1)
        throw ValidationError("source.trajectory",
                              "stored sources must be kept at every step");
    if (step < 0 || step > st.traj->n_steps)
        throw ValidationError("source.trajectory",
                              "step " + std::to_string(step) +
                                  " outside the stored range");
    const std::vector<double>& snap = st.traj->snapshots[step];
    if (st.mask) {
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = st.mask->indicator[k] ? snap[k] : 0.0;
    } else {
        std::copy(snap.begin(), snap.end(), out.begin());
    }
}

ScalarField SpaceTimeField::field_at(int snap) const {
    ScalarField f;
    f.grid = grid;
    f.values = snapshots[snap];
    return f;
}

namespace {

struct MarchSetup {
    int n_steps;
    double dt;
};

MarchSetup snap_steps(double T, double dt, int stride) {
    if (!(T > 0.0)) throw ValidationError("time.T", "must be positive");
    if (!(dt > 0.0) || dt > T)
        throw ValidationError("time.dt", "must lie in (0, T]");
    if (stride < 1) throw ValidationError("time.stride", "must be >= 1");
    const int blocks = static_cast<int>(std::ceil(T / (dt * stride) - 1e-9));
    const int n = std::max(1, blocks) * stride;
    return {n, T / n};
}

/// Forward march in local time; the backward solve reuses it under t -> T - t.
SpaceTimeField march(const StatePair& init, const SourceTerm& source, double T,
                     double dt_requested, int stride, bool reversed_source) {
    auto grid = init.u.grid;
    const Grid& g = *grid;
    const DegenerateOperator op(grid);
    const auto [n_steps, dt] = snap_steps(T, dt_requested, stride);
    const std::size_t nn = g.node_count();
    const double vol = g.cell_volume();

    SpaceTimeField traj;
    traj.grid = grid;
    traj.dt = dt;
    traj.n_steps = n_steps;
    traj.stride = stride;
    traj.t_final = T;
    traj.snapshots.reserve(n_steps / stride + 1);

    std::vector<double> prev(nn), cur(nn), next(nn), au(nn), src(nn);
    cur = init.u.values;
    for (std::size_t k = 0; k < nn; ++k)
        if (g.is_boundary_node(k)) cur[k] = 0.0;

    auto sample_source = [&](int step, std::span<double> out) {
        const int s = reversed_source ? n_steps - step : step;
        const double t = reversed_source ? T - step * dt : step * dt;
        source.sample(g, s, t, out);
    };

    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t k = 0; k < nn; ++k) s += a[k] * b[k];
        return s * vol;
    };

    // Instability detection: the staggered energy magnitude must not outrun
    // ten times the window baseline plus the running budget
    // E(0) + integral of ||f||^2, the quantity stable runs are bounded by.
    double source_budget = 0.0;
    double window_energy = -1.0;
    double initial_energy = 0.0;
    int window_start = 0;

    double last_total = 0.0;
    for (int n = 0; n < n_steps; ++n) {
        op.apply(cur, au);
        sample_source(n, src);
        if (n == 0) {
            for (std::size_t k = 0; k < nn; ++k)
                next[k] = g.is_boundary_node(k)
                              ? 0.0
                              : cur[k] + dt * init.v.values[k] +
                                    0.5 * dt * dt * (au[k] + src[k]);
        } else {
            for (std::size_t k = 0; k < nn; ++k)
                next[k] = g.is_boundary_node(k)
                              ? 0.0
                              : 2.0 * cur[k] - prev[k] + dt * dt * (au[k] + src[k]);
        }
        source_budget += dt * dot(src, src);

        if (n % stride == 0) {
            traj.snapshots.push_back(cur);
            EnergySnapshot e;
            e.time = (n + 0.5) * dt;
            double kin = 0.0, pot = 0.0;
            const double inv_dt = 1.0 / dt;
            for (std::size_t k = 0; k < nn; ++k) {
                const double d = (next[k] - cur[k]) * inv_dt;
                kin += d * d;
                pot -= au[k] * next[k];
            }
            e.kinetic = kin * vol;
            e.potential = pot * vol;
            e.total = e.kinetic + e.potential;
            traj.energy_series.push_back(e);
            last_total = e.total;
            if (n == 0) initial_energy = e.total;
        }

        if (n - window_start >= 100) {
            const double budget = initial_energy + source_budget;
            const double magnitude = std::abs(last_total);
            if (!std::isfinite(last_total) ||
                (window_energy >= 0.0 &&
                 magnitude > 10.0 * (window_energy + budget) &&
                 magnitude > 1e-280)) {
                throw InstabilityError(
                    "energy grew more than tenfold over a 100-step window at t = " +
                    std::to_string(n * dt));
            }
            window_energy = magnitude;
            window_start = n;
        }

        std::swap(prev, cur);
        std::swap(cur, next);
    }

    // cur now holds u^N; reconstruct the terminal velocity to second order.
    op.apply(cur, au);
    sample_source(n_steps, src);
    traj.snapshots.push_back(cur);

    StatePair final_state = zero_state(grid);
    final_state.u.values = cur;
    const double inv_dt = 1.0 / dt;
    for (std::size_t k = 0; k < nn; ++k)
        final_state.v.values[k] =
            g.is_boundary_node(k)
                ? 0.0
                : (cur[k] - prev[k]) * inv_dt + 0.5 * dt * (au[k] + src[k]);

    traj.state_at_0 = init;
    traj.state_at_0.u.values = traj.snapshots.front();
    traj.state_at_T = std::move(final_state);
    return traj;
}

}  // namespace

SpaceTimeField solve_forward(const StatePair& init, const SourceTerm& source,
                             double T, double dt, int stride) {
    return march(init, source, T, dt, stride, /*reversed_source=*/false);
}

SpaceTimeField solve_backward(const StatePair& terminal, const SourceTerm& source,
                              double T, double dt, int stride) {
    StatePair start = terminal;
    scale(start.v, -1.0);
    SpaceTimeField rev = march(start, source, T, dt, stride, /*reversed_source=*/true);

    // Re-index to forward time.
    SpaceTimeField traj;
    traj.grid = rev.grid;
    traj.dt = rev.dt;
    traj.n_steps = rev.n_steps;
    traj.stride = rev.stride;
    traj.t_final = rev.t_final;
    traj.snapshots.assign(rev.snapshots.rbegin(), rev.snapshots.rend());
    traj.state_at_T = terminal;
    traj.state_at_0 = rev.state_at_T;
    scale(traj.state_at_0.v, -1.0);
    traj.energy_series.assign(rev.energy_series.rbegin(), rev.energy_series.rend());
    for (auto& e : traj.energy_series) e.time = T - e.time;
    return traj;
}

BoundaryTrace boundary_trace(const SpaceTimeField& traj) {
    const Grid& g = *traj.grid;
    const int n = g.cells();
    BoundaryTrace out;

    auto push_face = [&](MeshBoundaryFace f) {
        out.faces.push_back({f, std::vector<double>(traj.stored_count(), 0.0)});
    };

    if (g.dim() == 1) {
        push_face({0, 0, 0, {g.node_coord(0, 0), 0.0}});
        push_face({0, 1, 0, {g.node_coord(0, n), 0.0}});
    } else {
        for (int side = 0; side < 2; ++side)
            for (int t = 0; t < n; ++t)
                push_face({0, side, t,
                           {g.node_coord(0, side == 0 ? 0 : n), g.face_coord(1, t)}});
        for (int side = 0; side < 2; ++side)
            for (int t = 0; t < n; ++t)
                push_face({1, side, t,
                           {g.face_coord(0, t), g.node_coord(1, side == 0 ? 0 : n)}});
    }

    // One-sided second-order normal derivative from the three node layers
    // nearest the face, tangentially averaged to the face center in 2D.
    for (int m = 0; m < traj.stored_count(); ++m) {
        const std::vector<double>& u = traj.snapshots[m];
        for (auto& fs : out.faces) {
            const MeshBoundaryFace& f = fs.face;
            const double h = g.spacing(f.axis);
            double layer[3];
            for (int d = 0; d < 3; ++d) {
                const int along = (f.side == 0) ? d : n - d;
                double val = 0.0;
                if (g.dim() == 1) {
                    val = u[along];
                } else if (f.axis == 0) {
                    val = 0.5 * (u[g.node_index(along, f.t_index)] +
                                 u[g.node_index(along, f.t_index + 1)]);
                } else {
                    val = 0.5 * (u[g.node_index(f.t_index, along)] +
                                 u[g.node_index(f.t_index + 1, along)]);
                }
                layer[d] = val;
            }
            const double d_into = (-3.0 * layer[0] + 4.0 * layer[1] - layer[2]) / (2.0 * h);
            fs.values[m] = -d_into;  // outward normal points away from the interior
        }
    }

    const double dt_store = traj.dt * traj.stride;
    double acc = 0.0;
    for (int m = 0; m < traj.stored_count(); ++m) {
        const double w = (m == 0 || m == traj.stored_count() - 1) ? 0.5 : 1.0;
        double s = 0.0;
        for (const auto& fs : out.faces) {
            const double measure =
                (g.dim() == 1) ? 1.0 : g.spacing(1 - fs.face.axis);
            s += fs.values[m] * fs.values[m] * measure;
        }
        acc += w * dt_store * s;
    }
    out.l2_sigma_norm = std::sqrt(acc);
    return out;
}

const std::vector<EnergySnapshot>& energy_trace(const SpaceTimeField& traj) {
    return traj.energy_series;
}

}  // namespace degwave
