#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "degwave/geometry.hpp"

namespace degwave {

/// Nodal scalar field on a Grid. Fields representing elements of the
/// zero-trace weighted space carry zero boundary values, tracked by the flag.
struct ScalarField {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;
    bool zero_boundary = true;
};

ScalarField zero_field(std::shared_ptr<const Grid> grid);

/// Samples fn at the nodes; with zero_boundary the boundary nodes are
/// clamped to exactly 0 regardless of fn.
ScalarField make_field(std::shared_ptr<const Grid> grid,
                       const std::function<double(const Point&)>& fn,
                       bool zero_boundary = true);

/// Plain grid inner product h^dim * sum of nodal products. This is the
/// inner product under which the flux-form operator is symmetric.
double grid_inner(const ScalarField& a, const ScalarField& b);
double grid_norm(const ScalarField& a);

// In-place linear algebra used by the control iteration.
void scale(ScalarField& a, double c);
void axpy(ScalarField& y, double c, const ScalarField& x);  // y += c x

/// Midpoint-rule integral of |u|^2 over the cells.
double l2_norm_sq(const ScalarField& u);

/// Face-sampled weighted gradient energy: integral of |x|^alpha |grad u|^2
/// accumulated per face with the flux-form weights, so it matches the
/// discrete operator's quadratic form exactly.
double weighted_gradient_sq(const ScalarField& u);

/// The weighted H1 norm || |x|^(alpha/2) grad u ||_{L2} + ||u||_{L2}.
double weighted_h1_norm(const ScalarField& u);

/// Quadratic energy of a (displacement, velocity) snapshot at time t.
/// kinetic = ||ut||^2, potential = integral of |x|^alpha |grad u|^2; the
/// stored quantities are the squared sums, not their square roots.
struct EnergySnapshot {
    double time = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

EnergySnapshot energy(const ScalarField& u, const ScalarField& ut, double t);

/// Hardy-quotient evaluation. The singular weight |x|^(alpha-2) is
/// integrated by the midpoint rule with every cell whose closure contains
/// the origin excluded; the skipped mass is bounded analytically and
/// reported alongside the ratio.
struct HardyResult {
    double ratio = 0.0;          ///< (N-2+alpha) ||.|^(a/2-1) u|| / ||u||_H1
    double weighted_l2 = 0.0;    ///< || |x|^(alpha/2-1) u ||_{L2}, truncated
    double h1_norm = 0.0;
    int excluded_cells = 0;
    double excluded_mass_bound = 0.0;
};

HardyResult hardy_ratio(const ScalarField& u);

/// Midpoint-rule L^q norm.
double lq_norm(const ScalarField& u, double q);

/// ||u||_{L^q} / ||u||_{H1} for 1 <= q <= 2N/(N-2+alpha); rejects
/// exponents beyond the critical one.
double lq_embedding_ratio(const ScalarField& u, double q);
double critical_exponent(const Domain& domain);

/// Dirichlet eigenmode machinery of the alpha = 0 operator on the box,
/// used for band-limited data synthesis.
std::vector<std::array<int, 2>> lowest_modes(const Domain& domain, int count);
ScalarField mode_field(std::shared_ptr<const Grid> grid,
                       const std::array<int, 2>& mode);

/// The fixed 20-member suite of compactly supported fields the Hardy and
/// embedding diagnostics run against: centered and offset bumps, bumps
/// modulated by low polynomials, and two-bump combinations, all expressed
/// in box-normalized coordinates so the support stays interior.
std::vector<ScalarField> hardy_test_suite(std::shared_ptr<const Grid> grid);

}  // namespace degwave
