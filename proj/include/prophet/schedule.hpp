#pragma once

// Acceptance-probability schedule of the known-distribution 0.745 algorithm.
//
// y solves  y' = y (ln y - 1) - (beta - 1),  y(0) = 1  on [0, 1]. The rule
// accepts X_i, conditional on reaching it, with probability
// eps_i = 1 - y(i/n)^(1/(n-1)).

#include <vector>

namespace prophet {

inline constexpr double kHillKertzBeta = 1.3414;
inline constexpr double kDefaultOdeStep = 1e-5;
/// Below this y, the y ln y term is taken as its limit 0.
inline constexpr double kYFloor = 1e-14;

/// Solution of the ODE sampled on a uniform grid t_j = j*h, j = 0..N.
struct YCurve {
    double beta = 0.0;
    double h = 0.0;
    std::vector<double> y;

    /// Linear interpolation; t is clamped to [0, 1].
    double at(double t) const;
    double terminal() const { return y.back(); }
};

/// Right-hand side of the ODE with the floor convention applied.
double hill_kertz_rhs(double y, double beta);

/// Classical RK4 with post-step clamping to [0, 1]. The step is rounded so
/// that it divides [0, 1] evenly. Requires 0 < step <= 1e-3 and 1 < beta < 2.
YCurve solve_hill_kertz(double beta, double step = kDefaultOdeStep);

/// Bisection for the beta at which y first reaches 0 exactly at t = 1.
/// Bracket [1.30, 1.40]; throws ComputationError if the bracket fails or the
/// result falls outside [1.34, 1.35].
double calibrate_beta(double tol, double step = kDefaultOdeStep);

/// eps[0..n]: eps[0] = 0, eps[n] = 1, strictly increasing.
struct QuantileSchedule {
    int n = 0;
    std::vector<double> eps;

    /// Acceptance threshold expressed as a quantile level, 1 - eps_i.
    double threshold_quantile(int i) const { return 1.0 - eps[static_cast<std::size_t>(i)]; }
};

QuantileSchedule quantile_schedule(int n, const YCurve& curve);

} // namespace prophet
