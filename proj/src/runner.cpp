#include "degwave/runner.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "degwave/carleman.hpp"
#include "degwave/config.hpp"
#include "degwave/control.hpp"
#include "degwave/errors.hpp"
#include "degwave/io.hpp"
#include "degwave/sampling.hpp"
#include "degwave/spaces.hpp"
#include "degwave/wavesolver.hpp"

namespace degwave::cli {

namespace {

std::string grid_header(const ResolvedScenario& rs, const SpaceTimeField& traj) {
    std::string h = "# ";
    h += "dim=" + std::to_string(rs.raw.domain.dim);
    h += ",alpha=" + format_double(rs.raw.domain.alpha);
    h += ",bounds=";
    for (int d = 0; d < rs.raw.domain.dim; ++d) {
        if (d) h += " ";
        h += format_double(rs.raw.domain.bounds[d][0]) + " " +
             format_double(rs.raw.domain.bounds[d][1]);
    }
    h += ",cells=" + std::to_string(rs.raw.cells);
    h += ",dt=" + format_double(traj.dt);
    h += ",stride=" + std::to_string(traj.stride);
    h += ",t_final=" + format_double(traj.t_final);
    return h;
}

std::string trajectory_csv(const ResolvedScenario& rs, const SpaceTimeField& traj,
                           int thin) {
    CsvBuilder csv(grid_header(rs, traj));
    std::string header = "t";
    for (std::size_t k = 0; k < traj.grid->node_count(); ++k)
        header += ",u" + std::to_string(k);
    csv.add_raw_row(header);
    for (int m = 0; m < traj.stored_count(); m += thin) {
        std::string row = format_double(traj.time_of(m));
        for (double v : traj.snapshots[m]) row += "," + format_double(v);
        csv.add_raw_row(row);
    }
    return csv.str();
}

std::string energy_csv(const SpaceTimeField& traj) {
    CsvBuilder csv("t,kinetic,potential,total");
    for (const auto& e : energy_trace(traj))
        csv.add_row({e.time, e.kinetic, e.potential, e.total});
    return csv.str();
}

std::string summary_line(const std::string& key, const std::string& value) {
    return key + " = " + value + "\n";
}

std::string scenario_summary(const ResolvedScenario& rs) {
    std::string s;
    s += summary_line("dim", std::to_string(rs.raw.domain.dim));
    s += summary_line("alpha", format_double(rs.raw.domain.alpha));
    s += summary_line("cells_per_axis", std::to_string(rs.raw.cells));
    s += summary_line("delta", format_double(rs.omega->delta));
    s += summary_line("epsilon", format_double(rs.omega->epsilon));
    s += summary_line("T", format_double(rs.T));
    s += summary_line("dt", format_double(rs.dt));
    s += summary_line("seed", std::to_string(rs.raw.seed));
    return s;
}

int run_validate(const Scenario& scenario) {
    std::vector<std::string> warnings;
    const auto violations = validate_scenario(scenario, &warnings);
    for (const auto& w : warnings) std::cout << "warn: " << w << "\n";
    if (violations.empty()) {
        std::cout << "ok: all invariants satisfied\n";
        return 0;
    }
    for (const auto& v : violations) std::cout << "fail: " << v << "\n";
    return 2;
}

int run_solve(const ResolvedScenario& rs, ArtifactWriter& out) {
    StatePair init;
    init.u = parse_field_spec(rs.raw.initial_u, rs.grid);
    init.v = parse_field_spec(rs.raw.initial_v, rs.grid);
    const SpaceTimeField traj = solve_forward(init, SourceTerm::zero(), rs.T,
                                              rs.dt, rs.export_stride);
    const BoundaryTrace trace = boundary_trace(traj);

    out.write_file("trajectory.csv", trajectory_csv(rs, traj, 1));
    out.write_file("energy.csv", energy_csv(traj));

    {
        std::string header = "t";
        for (std::size_t f = 0; f < trace.faces.size(); ++f)
            header += ",face" + std::to_string(f);
        CsvBuilder tc(header);
        for (int m = 0; m < traj.stored_count(); ++m) {
            std::string row = format_double(traj.time_of(m));
            for (const auto& fs : trace.faces)
                row += "," + format_double(fs.values[m]);
            tc.add_raw_row(row);
        }
        out.write_file("boundary_trace.csv", tc.str());
    }

    std::string summary = scenario_summary(rs);
    summary += summary_line("l2_sigma_norm", format_double(trace.l2_sigma_norm));
    const auto& es = energy_trace(traj);
    summary += summary_line("energy_initial", format_double(es.front().total));
    summary += summary_line("energy_final", format_double(es.back().total));
    double drift = 0.0;
    if (es.front().total > 0.0)
        for (const auto& e : es)
            drift = std::max(drift, std::abs(e.total - es.front().total) /
                                        es.front().total);
    summary += summary_line("energy_drift", format_double(drift));
    out.write_file("summary.txt", summary);
    return 0;
}

int run_hardy(const ResolvedScenario& rs, ArtifactWriter& out) {
    if (rs.raw.domain.dim < 2)
        throw ValidationError("domain.dim", "the hardy subcommand needs dim = 2");
    const auto suite = hardy_test_suite(rs.grid);
    CsvBuilder csv("field,ratio,weighted_l2,h1_norm,excluded_cells,excluded_mass_bound");
    double c_h = 0.0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const HardyResult r = hardy_ratio(suite[i]);
        csv.add_row({static_cast<double>(i), r.ratio, r.weighted_l2, r.h1_norm,
                     static_cast<double>(r.excluded_cells), r.excluded_mass_bound});
        c_h = std::max(c_h, r.ratio);
    }
    out.write_file("hardy.csv", csv.str());

    std::string summary = scenario_summary(rs);
    summary += summary_line("suite_size", std::to_string(suite.size()));
    summary += summary_line("hardy_bound", format_double(c_h));
    summary += summary_line("prefactor",
                            format_double(rs.raw.domain.dim - 2 + rs.raw.domain.alpha));
    out.write_file("summary.txt", summary);
    return 0;
}

int run_carleman_scan(const ResolvedScenario& rs, ArtifactWriter& out) {
    Rng rng(rs.raw.seed);
    const StatePair q = band_limited_pair(rs.grid, rs.raw.n_modes, rng);
    const SpaceTimeField traj =
        solve_forward(q, SourceTerm::zero(), rs.T, rs.dt, rs.export_stride);

    const ScanResult scan =
        carleman_scan(traj, SourceTerm::zero(), *rs.omega, rs.carleman,
                      rs.raw.s_list, rs.raw.gamma_list, rs.T);

    CsvBuilder csv("s,gamma,log_lhs,log_rhs_control,log_rhs_source,ratio");
    for (const auto& row : scan.rows)
        csv.add_row({row.s, row.gamma, row.sides.log_lhs, row.sides.log_rhs_control,
                     row.sides.log_rhs_source, row.sides.ratio});
    out.write_file("carleman.csv", csv.str());
    for (const auto& skip : scan.skipped) out.append_log("skipped " + skip);

    std::string summary = scenario_summary(rs);
    summary += summary_line("beta", format_double(rs.carleman.beta));
    summary += summary_line("t0", format_double(rs.carleman.t0));
    summary += summary_line("rows", std::to_string(scan.rows.size()));
    summary += summary_line("skipped", std::to_string(scan.skipped.size()));
    const BetaWindow w = beta_window(rs.raw.domain, rs.T, rs.omega->epsilon,
                                     rs.omega->delta, true);
    summary += summary_line("beta_window_binding", w.binding);
    summary += summary_line(
        "psi_negative_at_start",
        psi_negative_at_start(*rs.grid, rs.carleman, rs.omega->delta) ? "true"
                                                                      : "false");
    double worst = 0.0;
    for (const auto& row : scan.rows) worst = std::max(worst, row.sides.ratio);
    summary += summary_line("max_ratio", format_double(worst));
    out.write_file("summary.txt", summary);
    return 0;
}

int run_observability(const ResolvedScenario& rs, ArtifactWriter& out) {
    const ObservabilityReport report =
        observability_sample(rs.grid, *rs.omega, rs.T, rs.dt, rs.raw.samples,
                             rs.raw.seed, rs.raw.n_modes);
    const UniqueContinuationReport probe = unique_continuation_probe(
        rs.grid, *rs.omega, rs.T, rs.dt, rs.raw.samples, rs.raw.seed,
        rs.raw.threshold, rs.raw.n_modes);

    CsvBuilder csv("sample,ratio");
    for (std::size_t i = 0; i < report.ratios.size(); ++i)
        csv.add_row({static_cast<double>(i), report.ratios[i]});
    out.write_file("observability.csv", csv.str());

    std::string summary = scenario_summary(rs);
    summary += summary_line("samples", std::to_string(report.samples));
    summary += summary_line("min_ratio", format_double(report.min_ratio));
    summary += summary_line("max_ratio", format_double(report.max_ratio));
    summary += summary_line("unique_continuation_flags",
                            std::to_string(probe.flags));
    out.write_file("summary.txt", summary);
    return 0;
}

int run_hum(const ResolvedScenario& rs, ArtifactWriter& out, bool steer) {
    HUMProblem problem;
    problem.initial.u = parse_field_spec(rs.raw.initial_u, rs.grid);
    problem.initial.v = parse_field_spec(rs.raw.initial_v, rs.grid);
    problem.target.u = parse_field_spec(rs.raw.target_u, rs.grid);
    problem.target.v = parse_field_spec(rs.raw.target_v, rs.grid);
    problem.omega = rs.omega;
    problem.T = rs.T;
    problem.dt = rs.dt;
    problem.tol = rs.raw.tol;
    problem.max_iter = rs.raw.max_iter;

    const HUMSolution sol = steer ? steer_general(problem) : hum_solve(problem);

    out.write_file("control.csv",
                   trajectory_csv(rs, *sol.control, rs.export_stride));
    CsvBuilder res("iter,relative_residual");
    for (std::size_t i = 0; i < sol.residual_history.size(); ++i)
        res.add_row({static_cast<double>(i), sol.residual_history[i]});
    out.write_file("residual.csv", res.str());

    std::string summary = scenario_summary(rs);
    summary += summary_line("iterations", std::to_string(sol.iterations));
    summary += summary_line("converged", sol.converged ? "true" : "false");
    summary += summary_line("final_state_error", format_double(sol.final_state_error));
    summary += summary_line("tol", format_double(rs.raw.tol));
    out.write_file("summary.txt", summary);
    return 0;
}

}  // namespace

int run(const std::string& subcommand, const std::string& config_path,
        const std::string& output_override) {
    try {
        Scenario scenario = load_scenario(config_path);
        if (!output_override.empty()) scenario.output_dir = output_override;

        if (subcommand == "validate") return run_validate(scenario);

        const auto violations = validate_scenario(scenario);
        if (!violations.empty()) {
            for (const auto& v : violations)
                std::cerr << "validation error: " << v << "\n";
            return 2;
        }

        const ResolvedScenario rs = resolve_scenario(scenario);
        ArtifactWriter out(scenario.output_dir);
        out.append_log("subcommand " + subcommand + " config " + config_path);

        int code = 0;
        if (subcommand == "solve") code = run_solve(rs, out);
        else if (subcommand == "hardy") code = run_hardy(rs, out);
        else if (subcommand == "carleman-scan") code = run_carleman_scan(rs, out);
        else if (subcommand == "observability") code = run_observability(rs, out);
        else if (subcommand == "hum") code = run_hum(rs, out, false);
        else if (subcommand == "steer") code = run_hum(rs, out, true);
        else
            throw ValidationError("subcommand", "unknown subcommand '" + subcommand + "'");

        out.finalize_manifest();
        out.append_log("done");
        return code;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const InstabilityError& e) {
        std::cerr << "instability: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace degwave::cli
