#pragma once

#include <span>
#include <string>
#include <vector>

#include "degwave/geometry.hpp"
#include "degwave/wavesolver.hpp"

namespace degwave {

/// Parameter bundle for the Carleman weight phi = exp(gamma * psi) with
/// psi(x,t) = |x|^2 - beta (t - t0)^2 + beta0.
///
/// Two windows constrain beta: (2-alpha)/5 * eps^alpha always, and for
/// horizon-coupled diagnostics additionally eps^alpha/5, beta < eps^(alpha+1)
/// and beta T^2 > 4 max|x|^2 + 4 delta. The intersection is enforced and the
/// binding constraint is named.
struct CarlemanParams {
    double s = 10.0;
    double gamma = 2.0;
    double beta = 0.0;
    double t0 = 0.0;
    double beta0 = 0.0;
    double epsilon = 0.1;
    double delta = 0.1;

    /// Empty when valid; otherwise one message per violated constraint.
    std::vector<std::string> violations(const Domain& domain, double T,
                                        bool for_observability) const;
    void validate(const Domain& domain, double T, bool for_observability) const;
};

struct BetaWindow {
    double lower = 0.0;       ///< (4 max|x|^2 + 4 delta) / T^2, horizon-coupled
    double upper = 0.0;
    std::string binding;      ///< which upper constraint is smallest
};

BetaWindow beta_window(const Domain& domain, double T, double epsilon,
                       double delta, bool for_observability);

/// Valid defaults for a scenario: t0 = T/2, beta0 = 0, beta the geometric
/// mean of its admissible window.
CarlemanParams default_params(const Domain& domain, double T, double epsilon,
                              double delta);

double psi(const Domain& domain, const Point& p, double t, const CarlemanParams& params);
double phi(const Domain& domain, const Point& p, double t, const CarlemanParams& params);
Point phi_gradient(const Domain& domain, const Point& p, double t,
                   const CarlemanParams& params);
double phi_time_derivative(const Domain& domain, const Point& p, double t,
                           const CarlemanParams& params);

/// True when psi(x, 0) < -delta on every grid node, the sign structure the
/// horizon constraints are designed to produce at t0 = T/2.
bool psi_negative_at_start(const Grid& grid, const CarlemanParams& params,
                           double delta);

/// Both sides of the weighted inequality, accumulated in log space with a
/// common exponent offset so large s never overflows; the ratio is
/// offset-invariant.
struct CarlemanSides {
    double log_lhs = 0.0;
    double log_rhs_control = 0.0;
    double log_rhs_source = 0.0;
    double ratio = 0.0;
    bool degenerate = false;  ///< trajectory and source both vanish

    double lhs() const;
    double rhs_control() const;
    double rhs_source() const;
};

/// Evaluates the interior integral of
///   exp(2 s phi) s gamma phi (|x|^alpha |grad z|^2 + z_t^2 + s^2 g^2 phi^2 z^2)
/// over the whole cylinder (lhs) and over omega x (0,T) (rhs_control),
/// plus the source integral of exp(2 s phi) F^2, by midpoint-in-space and
/// trapezoid-in-time quadrature on the stored stride.
CarlemanSides carleman_sides(const SpaceTimeField& traj, const SourceTerm& F,
                             const ControlRegion& omega,
                             const CarlemanParams& params);

struct ScanRow {
    double s = 0.0;
    double gamma = 0.0;
    CarlemanSides sides;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::vector<std::string> skipped;  ///< "(s, gamma): reason" per invalid pair
};

/// Sweeps the (s, gamma) lists in the given order; invalid pairs are
/// skipped with a recorded reason.
ScanResult carleman_scan(const SpaceTimeField& traj, const SourceTerm& F,
                         const ControlRegion& omega, const CarlemanParams& base,
                         std::span<const double> s_list,
                         std::span<const double> gamma_list, double T,
                         bool for_observability = true);

/// Trend check over increasing s: mean of the last third of the ratios
/// must not exceed the mean of the first third.
bool monotone_trend_ok(std::span<const double> ratios);

/// Doubles s starting from s0 until consecutive ratios change by less
/// than 25%; returns the stabilized s (at most max_doublings doublings).
double calibrate_s(const SpaceTimeField& traj, const SourceTerm& F,
                   const ControlRegion& omega, const CarlemanParams& base,
                   double s0, int max_doublings = 4);

}  // namespace degwave
