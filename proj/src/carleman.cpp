#include "degwave/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degwave/errors.hpp"

namespace degwave {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}
}  // namespace

BetaWindow beta_window(const Domain& domain, double T, double epsilon,
                       double delta, bool for_observability) {
    BetaWindow w;
    const double ea = std::pow(epsilon, domain.alpha);
    w.upper = (2.0 - domain.alpha) / 5.0 * ea;
    w.binding = "(2-alpha)/5 * eps^alpha";
    if (for_observability) {
        if (ea / 5.0 < w.upper) {
            w.upper = ea / 5.0;
            w.binding = "eps^alpha / 5";
        }
        const double ea1 = std::pow(epsilon, domain.alpha + 1.0);
        if (ea1 < w.upper) {
            w.upper = ea1;
            w.binding = "eps^(alpha+1)";
        }
        const double r = domain.max_radius();
        w.lower = (4.0 * r * r + 4.0 * delta) / (T * T);
    }
    return w;
}

std::vector<std::string> CarlemanParams::violations(const Domain& domain, double T,
                                                    bool for_observability) const {
    std::vector<std::string> out;
    if (!(s >= 1.0)) out.push_back("carleman.s: must be >= 1");
    if (!(gamma >= 1.0)) out.push_back("carleman.gamma: must be >= 1");
    if (!(beta0 >= 0.0)) out.push_back("carleman.beta0: must be >= 0");
    if (!(t0 > 0.0 && t0 < T))
        out.push_back("carleman.t0: must lie in (0, T)");
    const BetaWindow w = beta_window(domain, T, epsilon, delta, for_observability);
    if (!(beta > 0.0 && beta < w.upper))
        out.push_back("carleman.beta: must lie in (0, " + std::to_string(w.upper) +
                      "), binding constraint " + w.binding);
    if (for_observability && !(beta * T * T > 4.0 * domain.max_radius() *
                                                  domain.max_radius() +
                                              4.0 * delta))
        out.push_back("carleman.beta: beta*T^2 must exceed 4 max|x|^2 + 4 delta");
    return out;
}

void CarlemanParams::validate(const Domain& domain, double T,
                              bool for_observability) const {
    const auto v = violations(domain, T, for_observability);
    if (!v.empty()) {
        const auto pos = v.front().find(':');
        throw ValidationError(v.front().substr(0, pos), v.front().substr(pos + 2));
    }
}

CarlemanParams default_params(const Domain& domain, double T, double epsilon,
                              double delta) {
    CarlemanParams p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.t0 = 0.5 * T;
    p.beta0 = 0.0;
    const BetaWindow w = beta_window(domain, T, epsilon, delta, true);
    if (w.lower > 0.0 && w.lower < w.upper)
        p.beta = std::sqrt(w.lower * w.upper);
    else
        p.beta = 0.5 * w.upper;
    return p;
}

double psi(const Domain& domain, const Point& p, double t,
           const CarlemanParams& params) {
    const double r = point_norm(domain, p);
    return r * r - params.beta * (t - params.t0) * (t - params.t0) + params.beta0;
}

double phi(const Domain& domain, const Point& p, double t,
           const CarlemanParams& params) {
    return std::exp(params.gamma * psi(domain, p, t, params));
}

Point phi_gradient(const Domain& domain, const Point& p, double t,
                   const CarlemanParams& params) {
    const double f = 2.0 * params.gamma * phi(domain, p, t, params);
    Point g{f * p[0], 0.0};
    if (domain.dim == 2) g[1] = f * p[1];
    return g;
}

double phi_time_derivative(const Domain& domain, const Point& p, double t,
                           const CarlemanParams& params) {
    return -2.0 * params.gamma * params.beta * (t - params.t0) *
           phi(domain, p, t, params);
}

bool psi_negative_at_start(const Grid& grid, const CarlemanParams& params,
                           double delta) {
    for (std::size_t k = 0; k < grid.node_count(); ++k)
        if (psi(grid.domain(), grid.node_point(k), 0.0, params) >= -delta)
            return false;
    return true;
}

double CarlemanSides::lhs() const { return std::exp(log_lhs); }
double CarlemanSides::rhs_control() const { return std::exp(log_rhs_control); }
double CarlemanSides::rhs_source() const { return std::exp(log_rhs_source); }

namespace {

/// Cell-centered values of z, z_t and grad z from nodal snapshots.
struct CellEval {
    double z;
    double zt;
    double grad_sq_weighted;  ///< |x|^alpha |grad z|^2 at the cell center
    double omega_weight;      ///< fraction of corners inside omega
    Point center;
};

}  // namespace

CarlemanSides carleman_sides(const SpaceTimeField& traj, const SourceTerm& F,
                             const ControlRegion& omega,
                             const CarlemanParams& params) {
    const Grid& g = *traj.grid;
    const Domain& dom = g.domain();
    const int n = g.cells();
    const int stride_nodes = g.nodes_per_axis();
    const int stored = traj.stored_count();
    const double dt_store = traj.dt * traj.stride;
    const double vol = g.cell_volume();
    const double s = params.s, gamma = params.gamma;

    // Common exponent offset: the largest 2 s phi over the evaluated points.
    double max_r2 = 0.0;
    if (g.dim() == 1) {
        for (int i = 0; i < n; ++i) {
            const double c = 0.5 * (g.node_coord(0, i) + g.node_coord(0, i + 1));
            max_r2 = std::max(max_r2, c * c);
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double cx = 0.5 * (g.node_coord(0, i) + g.node_coord(0, i + 1));
            for (int j = 0; j < n; ++j) {
                const double cy = 0.5 * (g.node_coord(1, j) + g.node_coord(1, j + 1));
                max_r2 = std::max(max_r2, cx * cx + cy * cy);
            }
        }
    }
    double min_t2 = std::numeric_limits<double>::infinity();
    for (int m = 0; m < stored; ++m) {
        const double t = traj.time_of(m) - params.t0;
        min_t2 = std::min(min_t2, t * t);
    }
    const double psi_max = max_r2 - params.beta * min_t2 + params.beta0;
    const double offset = 2.0 * s * std::exp(gamma * psi_max);

    double sum_lhs = 0.0, sum_ctrl = 0.0, sum_src = 0.0;

    std::vector<double> zt_nodal(g.node_count());
    std::vector<double> f_nodal(F.is_zero() ? 0 : g.node_count());

    for (int m = 0; m < stored; ++m) {
        const double t = traj.time_of(m);
        const double wt = ((m == 0 || m == stored - 1) ? 0.5 : 1.0) * dt_store;
        const std::vector<double>& z = traj.snapshots[m];

        if (m == 0) {
            zt_nodal = traj.state_at_0.v.values;
        } else if (m == stored - 1) {
            zt_nodal = traj.state_at_T.v.values;
        } else {
            const std::vector<double>& zp = traj.snapshots[m + 1];
            const std::vector<double>& zm = traj.snapshots[m - 1];
            const double inv2 = 1.0 / (2.0 * dt_store);
            for (std::size_t k = 0; k < zt_nodal.size(); ++k)
                zt_nodal[k] = (zp[k] - zm[k]) * inv2;
        }
        if (!F.is_zero()) F.sample(g, traj.step_of(m), t, f_nodal);

        auto accumulate_cell = [&](const CellEval& c) {
            const double ph = std::exp(gamma * psi(dom, c.center, t, params));
            const double w = std::exp(2.0 * s * ph - offset);
            const double density =
                s * gamma * ph *
                (c.grad_sq_weighted + c.zt * c.zt +
                 s * s * gamma * gamma * ph * ph * c.z * c.z);
            sum_lhs += wt * vol * w * density;
            sum_ctrl += wt * vol * w * density * c.omega_weight;
        };

        if (g.dim() == 1) {
            const double inv_h = 1.0 / g.spacing(0);
            for (int i = 0; i < n; ++i) {
                CellEval c;
                c.center = {0.5 * (g.node_coord(0, i) + g.node_coord(0, i + 1)), 0.0};
                c.z = 0.5 * (z[i] + z[i + 1]);
                c.zt = 0.5 * (zt_nodal[i] + zt_nodal[i + 1]);
                const double d = (z[i + 1] - z[i]) * inv_h;
                c.grad_sq_weighted = coefficient_at(dom, c.center) * d * d;
                c.omega_weight = 0.5 * (omega.indicator[i] + omega.indicator[i + 1]);
                accumulate_cell(c);
                if (!F.is_zero()) {
                    const double fc = 0.5 * (f_nodal[i] + f_nodal[i + 1]);
                    const double ps = psi(dom, c.center, t, params);
                    const double w = std::exp(2.0 * s * std::exp(gamma * ps) - offset);
                    sum_src += wt * vol * w * fc * fc;
                }
            }
        } else {
            const double inv_hx = 1.0 / g.spacing(0);
            const double inv_hy = 1.0 / g.spacing(1);
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    const std::size_t k = g.node_index(i, j);
                    const std::size_t kn = k + stride_nodes;
                    CellEval c;
                    c.center = {0.5 * (g.node_coord(0, i) + g.node_coord(0, i + 1)),
                                0.5 * (g.node_coord(1, j) + g.node_coord(1, j + 1))};
                    c.z = 0.25 * (z[k] + z[k + 1] + z[kn] + z[kn + 1]);
                    c.zt = 0.25 * (zt_nodal[k] + zt_nodal[k + 1] + zt_nodal[kn] +
                                   zt_nodal[kn + 1]);
                    const double dx =
                        0.5 * ((z[k + 1] - z[k]) + (z[kn + 1] - z[kn])) * inv_hx;
                    const double dy =
                        0.5 * ((z[kn] - z[k]) + (z[kn + 1] - z[k + 1])) * inv_hy;
                    c.grad_sq_weighted =
                        coefficient_at(dom, c.center) * (dx * dx + dy * dy);
                    c.omega_weight =
                        0.25 * (omega.indicator[k] + omega.indicator[k + 1] +
                                omega.indicator[kn] + omega.indicator[kn + 1]);
                    accumulate_cell(c);
                    if (!F.is_zero()) {
                        const double fc = 0.25 * (f_nodal[k] + f_nodal[k + 1] +
                                                  f_nodal[kn] + f_nodal[kn + 1]);
                        const double ps = psi(dom, c.center, t, params);
                        const double w =
                            std::exp(2.0 * s * std::exp(gamma * ps) - offset);
                        sum_src += wt * vol * w * fc * fc;
                    }
                }
            }
        }
    }

    CarlemanSides out;
    out.log_lhs = sum_lhs > 0.0 ? offset + std::log(sum_lhs) : kNegInf;
    out.log_rhs_control = sum_ctrl > 0.0 ? offset + std::log(sum_ctrl) : kNegInf;
    out.log_rhs_source = sum_src > 0.0 ? offset + std::log(sum_src) : kNegInf;
    const double log_denom = logaddexp(out.log_rhs_control, out.log_rhs_source);
    if (log_denom == kNegInf) {
        out.degenerate = true;
        out.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
        out.ratio = std::exp(out.log_lhs - log_denom);
    }
    return out;
}

ScanResult carleman_scan(const SpaceTimeField& traj, const SourceTerm& F,
                         const ControlRegion& omega, const CarlemanParams& base,
                         std::span<const double> s_list,
                         std::span<const double> gamma_list, double T,
                         bool for_observability) {
    if (s_list.empty() || gamma_list.empty())
        throw ValidationError("carleman.scan", "s and gamma lists must be nonempty");
    ScanResult result;
    for (double s : s_list) {
        for (double gamma : gamma_list) {
            CarlemanParams p = base;
            p.s = s;
            p.gamma = gamma;
            const auto v = p.violations(traj.grid->domain(), T, for_observability);
            if (!v.empty()) {
                result.skipped.push_back("(s=" + std::to_string(s) +
                                         ", gamma=" + std::to_string(gamma) +
                                         "): " + v.front());
                continue;
            }
            result.rows.push_back({s, gamma, carleman_sides(traj, F, omega, p)});
        }
    }
    return result;
}

bool monotone_trend_ok(std::span<const double> ratios) {
    if (ratios.size() < 2) return true;
    const std::size_t third = std::max<std::size_t>(1, ratios.size() / 3);
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < third; ++i) first += ratios[i];
    for (std::size_t i = ratios.size() - third; i < ratios.size(); ++i)
        last += ratios[i];
    return last <= first;
}

double calibrate_s(const SpaceTimeField& traj, const SourceTerm& F,
                   const ControlRegion& omega, const CarlemanParams& base,
                   double s0, int max_doublings) {
    CarlemanParams p = base;
    p.s = s0;
    double prev = carleman_sides(traj, F, omega, p).ratio;
    double s = s0;
    for (int k = 0; k < max_doublings; ++k) {
        p.s = 2.0 * s;
        const double cur = carleman_sides(traj, F, omega, p).ratio;
        if (std::abs(cur - prev) <= 0.25 * std::abs(prev)) return s;
        s = p.s;
        prev = cur;
    }
    return s;
}

}  // namespace degwave
