#pragma once

// Exact and quadrature reference values for the closed-form quantities of
// the sample-based prophet rules.

#include <boost/multiprecision/cpp_int.hpp>
#include <string_view>

#include "prophet/distributions.hpp"

namespace prophet {

enum class OracleMethod { ClosedForm, ExactRational, Quadrature, GridSearch };

std::string_view method_name(OracleMethod m) noexcept;

struct ExactValue {
    double value = 0.0;
    OracleMethod method = OracleMethod::ClosedForm;
    double error_bound = 0.0;  // absolute; 0 for closed forms
};

using Rational = boost::multiprecision::cpp_rational;

/// Euler-Mascheroni constant to 20 significant digits.
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// H_n summed smallest term first.
ExactValue harmonic(int n);

/// sum_{i=1}^{n-1} (n-1) / ((n-1+i)(n-2+i)) in exact arithmetic.
Rational single_threshold_stop_prob_exact(int n);
ExactValue single_threshold_stop_prob(int n);

/// E[X_tau] of the single-threshold rule on Exponential(1):
/// sum_{i=1}^{n-1} H_{n-1+i} / (n-1+i) * (n-1)/(n-2+i) + 1/2.
/// Cross-checked against the digamma form; throws ComputationError if the
/// two routes differ by more than 1e-10.
ExactValue single_threshold_exp_value(int n);

/// psi(n) - H_{2n-2}/2 + gamma_EM + 1 with psi(n) = H_{n-1} - gamma_EM.
double single_threshold_exp_value_digamma(int n);

/// 1 - (1 - 1/n)^n.
ExactValue fresh_samples_guarantee(int n);

/// (1+g)/e when 1/e >= g/(1+g), else -g ln(g/(1+g)).
ExactValue b_gamma(double gamma);

/// Value V_1 of backward induction, V_{n+1} = 0, V_i = E[max(X, V_{i+1})].
ExactValue dp_value(const Distribution& spec, int n);

struct ThreePointOptimum {
    double alpha_star = 0.0;
    double ratio_star = 0.0;
};

/// E[X_tau_alpha] / E[max] on the three-point instance for the rule that
/// accepts the middle atom with probability alpha, maximised over the grid
/// alpha*sqrt(n) = j*span/grid_size, j = 1..grid_size.
double three_point_ratio(int n, double alpha);
ThreePointOptimum three_point_best_ratio(int n, int grid_size = 10000, double span = 10.0);

/// n(n-1) * int_0^1 (1-q)^(n-2) R(q) dq with R(q) = int_0^q F^-1(1-theta) dtheta,
/// by nested adaptive quadrature. Continuous specs only.
ExactValue expected_max_via_rq(const Distribution& spec, int n);

} // namespace prophet
