#include "degwave/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "degwave/errors.hpp"
#include "degwave/sampling.hpp"

namespace degwave {

namespace {

StatePair pair_sub(const StatePair& a, const StatePair& b) {
    StatePair d = a;
    axpy(d.u, -1.0, b.u);
    axpy(d.v, -1.0, b.v);
    return d;
}

void pair_axpy(StatePair& y, double c, const StatePair& x) {
    axpy(y.u, c, x.u);
    axpy(y.v, c, x.v);
}

/// Gramian application: Lambda q = (-u_t(0), u(0)) of the controlled
/// backward solve, so that <Lambda q, q'> equals the omega integral of
/// z_q z_q' under the plain pair inner product.
StatePair gramian_apply(const StatePair& q, const ControlRegion& omega,
                        double T, double dt) {
    auto z = std::make_shared<SpaceTimeField>(
        solve_forward(q, SourceTerm::zero(), T, dt));
    auto mask = std::make_shared<ControlRegion>(omega);
    const SourceTerm f = SourceTerm::from_trajectory(z, mask);
    const SpaceTimeField u = solve_backward(zero_state(q.u.grid), f, T, dt);
    StatePair out = u.state_at_0;
    scale(out.v, -1.0);
    std::swap(out.u, out.v);  // (-u_t(0), u(0))
    return out;
}

}  // namespace

StatePair apply_J(const StatePair& q, const ControlRegion& omega, double T,
                  double dt) {
    // J itself is (u_t(0), -u(0)), the negation of the Gramian form.
    StatePair lam = gramian_apply(q, omega, T, dt);
    scale(lam.u, -1.0);
    scale(lam.v, -1.0);
    return lam;
}

double duality_pairing(const StatePair& jq, const StatePair& q) {
    return -(grid_inner(jq.u, q.u) + grid_inner(jq.v, q.v));
}

double omega_space_time_integral(const SpaceTimeField& z, const ControlRegion& omega) {
    const double vol = z.grid->cell_volume();
    const double dt_store = z.dt * z.stride;
    double acc = 0.0;
    for (int m = 0; m < z.stored_count(); ++m) {
        const double w = (m == 0 || m == z.stored_count() - 1) ? 0.5 : 1.0;
        const std::vector<double>& snap = z.snapshots[m];
        double s = 0.0;
        for (std::size_t k = 0; k < snap.size(); ++k)
            if (omega.indicator[k]) s += snap[k] * snap[k];
        acc += w * dt_store * vol * s;
    }
    return acc;
}

HUMSolution hum_solve(const HUMProblem& problem) {
    auto grid = problem.initial.u.grid;
    const ControlRegion& omega = *problem.omega;
    const double T = problem.T;
    const double dt = problem.dt;
    if (!(problem.tol > 0.0))
        throw ValidationError("hum.tol", "must be positive");
    if (problem.max_iter < 1)
        throw ValidationError("hum.max_iter", "must be >= 1");
    const double t_min = minimal_time(grid->domain(), omega.epsilon, omega.delta);
    if (T < t_min * (1.0 - 1e-12))
        throw ValidationError("time.T",
                              "horizon below the minimal control time " +
                                  std::to_string(t_min));

    // Pull the target back to t = 0 along the free flow; driving the
    // difference to rest steers the original data to the target.
    StatePair difference = problem.initial;
    const double target_size = state_norm(problem.target);
    if (target_size > 0.0) {
        const SpaceTimeField back =
            solve_backward(problem.target, SourceTerm::zero(), T, dt);
        difference = pair_sub(problem.initial, back.state_at_0);
    }

    // Right-hand side of the duality system under the plain pair product.
    StatePair b = zero_state(grid);
    b.u = difference.v;
    scale(b.u, -1.0);
    b.v = difference.u;

    HUMSolution sol;
    sol.adjoint_datum = zero_state(grid);

    const double data_scale =
        state_norm(problem.initial) + target_size;
    const double nb = state_norm(b);

    auto finish = [&](StatePair q, std::vector<double> history, int iters,
                      bool converged) {
        auto z = std::make_shared<SpaceTimeField>(
            solve_forward(q, SourceTerm::zero(), T, dt));
        // Materialize the masked control so the exported field vanishes
        // outside omega at every step.
        auto control = std::make_shared<SpaceTimeField>(*z);
        for (auto& snap : control->snapshots)
            for (std::size_t k = 0; k < snap.size(); ++k)
                if (!omega.indicator[k]) snap[k] = 0.0;
        for (std::size_t k = 0; k < grid->node_count(); ++k) {
            if (!omega.indicator[k]) {
                control->state_at_0.u.values[k] = 0.0;
                control->state_at_0.v.values[k] = 0.0;
                control->state_at_T.u.values[k] = 0.0;
                control->state_at_T.v.values[k] = 0.0;
            }
        }

        const SpaceTimeField resim = solve_forward(
            problem.initial, SourceTerm::from_trajectory(control), T, dt);
        const StatePair miss = pair_sub(resim.state_at_T, problem.target);
        const double init_e = energy(problem.initial.u, problem.initial.v, 0.0).total;
        const double targ_e = energy(problem.target.u, problem.target.v, T).total;
        const double scale_e = std::sqrt(init_e) + std::sqrt(targ_e);
        const double miss_e = std::sqrt(energy(miss.u, miss.v, T).total);
        sol.adjoint_datum = std::move(q);
        sol.control = std::move(control);
        sol.residual_history = std::move(history);
        sol.iterations = iters;
        sol.converged = converged;
        sol.final_state_error = scale_e > 0.0 ? miss_e / scale_e : miss_e;
        return sol;
    };

    if (nb <= 1e-12 * std::max(data_scale, 1e-300)) {
        // Zero or free-evolution-consistent data: the zero control is exact.
        return finish(zero_state(grid), {0.0}, 0, true);
    }

    // Minimal-residual Krylov iteration on the symmetric positive
    // semidefinite Gramian; residual norms decrease monotonically.
    StatePair q = zero_state(grid);
    StatePair r = b;
    StatePair ar = gramian_apply(r, omega, T, dt);
    StatePair p = r;
    StatePair ap = ar;
    double rho = state_inner(r, ar);
    std::vector<double> history{1.0};
    bool converged = false;
    int iters = 0;

    for (int k = 0; k < problem.max_iter; ++k) {
        const double papa = state_inner(ap, ap);
        if (!(papa > 0.0) || !(rho > 0.0)) break;
        const double alpha = rho / papa;
        pair_axpy(q, alpha, p);
        pair_axpy(r, -alpha, ap);
        ++iters;
        const double rel = state_norm(r) / nb;
        history.push_back(rel);
        if (rel <= problem.tol) {
            converged = true;
            break;
        }
        ar = gramian_apply(r, omega, T, dt);
        const double rho_new = state_inner(r, ar);
        const double beta = rho_new / rho;
        rho = rho_new;
        StatePair p_new = r;
        pair_axpy(p_new, beta, p);
        p = std::move(p_new);
        StatePair ap_new = ar;
        pair_axpy(ap_new, beta, ap);
        ap = std::move(ap_new);
    }

    if (!converged)
        throw NonConvergenceError(
            "control iteration exhausted " + std::to_string(problem.max_iter) +
                " iterations at relative residual " +
                std::to_string(history.back()),
            history);
    return finish(std::move(q), std::move(history), iters, converged);
}

HUMSolution steer_general(const HUMProblem& problem) { return hum_solve(problem); }

ObservabilityReport observability_sample(std::shared_ptr<const Grid> grid,
                                         const ControlRegion& omega, double T,
                                         double dt, int n_samples,
                                         std::uint64_t seed, int n_modes) {
    if (n_samples < 1)
        throw ValidationError("observability.samples", "must be >= 1");
    Rng rng(seed);
    ObservabilityReport report;
    report.samples = n_samples;
    report.T_used = T;
    report.ratios.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const StatePair q = band_limited_pair(grid, n_modes, rng);
        const SpaceTimeField z = solve_forward(q, SourceTerm::zero(), T, dt);
        const double e0 = energy(q.u, q.v, 0.0).total;
        const double obs = omega_space_time_integral(z, omega);
        report.ratios.push_back(e0 / obs);
    }
    report.min_ratio = *std::min_element(report.ratios.begin(), report.ratios.end());
    report.max_ratio = *std::max_element(report.ratios.begin(), report.ratios.end());
    return report;
}

UniqueContinuationReport unique_continuation_probe(
    std::shared_ptr<const Grid> grid, const ControlRegion& omega, double T,
    double dt, int n_samples, std::uint64_t seed, double threshold, int n_modes) {
    if (!(threshold > 0.0))
        throw ValidationError("observability.threshold", "must be positive");
    Rng rng(seed);
    UniqueContinuationReport report;
    report.samples = n_samples;
    report.threshold = threshold;
    for (int i = 0; i < n_samples; ++i) {
        const StatePair q = band_limited_pair(grid, n_modes, rng);
        const double e0 = energy(q.u, q.v, 0.0).total;
        if (e0 == 0.0) continue;
        const SpaceTimeField z = solve_forward(q, SourceTerm::zero(), T, dt);
        const double obs = omega_space_time_integral(z, omega);
        if (obs <= threshold * e0 * 1e-10) {
            ++report.flags;
            report.flagged.push_back(i);
        }
    }
    return report;
}

}  // namespace degwave
