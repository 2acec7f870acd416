#include "prophet/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>
#include <vector>

#include "prophet/errors.hpp"
#include "prophet/rules.hpp"

namespace prophet {

namespace {

// H_0..H_max by forward recurrence.
std::vector<double> harmonic_table(int max) {
    std::vector<double> h(static_cast<std::size_t>(max) + 1, 0.0);
    for (int j = 1; j <= max; ++j) h[static_cast<std::size_t>(j)] = h[static_cast<std::size_t>(j) - 1] + 1.0 / j;
    return h;
}

} // namespace

std::string_view method_name(OracleMethod m) noexcept {
    switch (m) {
    case OracleMethod::ClosedForm: return "closed_form";
    case OracleMethod::ExactRational: return "exact_rational";
    case OracleMethod::Quadrature: return "quadrature";
    case OracleMethod::GridSearch: return "grid_search";
    }
    return "unknown";
}

ExactValue harmonic(int n) {
    if (n < 1) throw DomainError("harmonic: n must be >= 1");
    double s = 0.0;
    for (int j = n; j >= 1; --j) s += 1.0 / j;
    return {s, OracleMethod::ClosedForm};
}

Rational single_threshold_stop_prob_exact(int n) {
    if (n < 2) throw DomainError("single_threshold_stop_prob: n must be >= 2");
    Rational sum = 0;
    for (int i = 1; i <= n - 1; ++i) sum += Rational(n - 1, static_cast<long long>(n - 1 + i) * (n - 2 + i));
    return sum;
}

ExactValue single_threshold_stop_prob(int n) {
    return {static_cast<double>(single_threshold_stop_prob_exact(n)), OracleMethod::ExactRational};
}

double single_threshold_exp_value_digamma(int n) {
    if (n < 2) throw DomainError("single_threshold_exp_value: n must be >= 2");
    const double digamma = harmonic(n - 1).value - kEulerGamma;
    return digamma - 0.5 * harmonic(2 * n - 2).value + kEulerGamma + 1.0;
}

ExactValue single_threshold_exp_value(int n) {
    if (n < 2) throw DomainError("single_threshold_exp_value: n must be >= 2");
    const auto h = harmonic_table(2 * n - 1);
    double sum = 0.0;
    for (int i = 1; i <= n - 1; ++i) {
        const double stop = (1.0 / (n - 1 + i)) * ((n - 1.0) / (n - 2 + i));
        sum += h[static_cast<std::size_t>(n - 1 + i)] * stop;
    }
    sum += 0.5;  // Pr[tau = n] * E[X_n]
    const double other = single_threshold_exp_value_digamma(n);
    if (std::abs(sum - other) > 1e-10) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "single_threshold_exp_value: sum form " << sum << " and digamma form " << other << " disagree";
        throw ComputationError(msg.str());
    }
    return {sum, OracleMethod::ClosedForm};
}

ExactValue fresh_samples_guarantee(int n) {
    if (n < 1) throw DomainError("fresh_samples_guarantee: n must be >= 1");
    return {-std::expm1(n * std::log1p(-1.0 / n)), OracleMethod::ClosedForm};
}

ExactValue b_gamma(double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("b_gamma: gamma must be non-negative");
    const double x = gamma / (1.0 + gamma);
    if (1.0 / std::numbers::e >= x) return {(1.0 + gamma) / std::numbers::e, OracleMethod::ClosedForm};
    return {-gamma * std::log(x), OracleMethod::ClosedForm};
}

ExactValue dp_value(const Distribution& spec, int n) {
    return {dp_thresholds(spec, n)[1], OracleMethod::ClosedForm};
}

namespace {

struct ThreePointTerms {
    double p_top;
    double p_mid;
    double top;
    double expected_max;
};

ThreePointTerms three_point_terms(int n) {
    const double root = std::sqrt(static_cast<double>(n));
    return {1.0 / (n * root), 1.0 / root, root / (std::numbers::e - 2.0),
            exact_expected_max(adversarial_instance(AdversarialKind::ThreePoint, n), n)};
}

// Each index stops independently with probability p_stop, so
// E[X_tau] = E[X_tau | X_tau > 0] * (1 - (1 - p_stop)^n).
double ratio_at(const ThreePointTerms& t, int n, double alpha) {
    const double p_stop = t.p_top + alpha * t.p_mid;
    if (!(p_stop > 0.0)) return 0.0;
    const double reach_positive = -std::expm1(n * std::log1p(-std::min(p_stop, 1.0)));
    const double conditional = (t.p_top * t.top + alpha * t.p_mid) / p_stop;
    return conditional * reach_positive / t.expected_max;
}

} // namespace

double three_point_ratio(int n, double alpha) {
    if (n < 4) throw DomainError("three_point_ratio: n must be >= 4");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("three_point_ratio: alpha must lie in [0, 1]");
    return ratio_at(three_point_terms(n), n, alpha);
}

ThreePointOptimum three_point_best_ratio(int n, int grid_size, double span) {
    if (n < 4) throw DomainError("three_point_best_ratio: n must be >= 4");
    if (grid_size < 1 || !(span > 0.0)) throw DomainError("three_point_best_ratio: empty grid");
    const auto terms = three_point_terms(n);
    const double root = std::sqrt(static_cast<double>(n));
    const double h = span / grid_size;
    ThreePointOptimum best{0.0, -1.0};
    for (int j = 1; j <= grid_size; ++j) {
        const double alpha = j * h / root;
        if (alpha > 1.0) break;
        const double ratio = ratio_at(terms, n, alpha);
        if (ratio > best.ratio_star) best = {alpha, ratio};
    }
    return best;
}

ExactValue expected_max_via_rq(const Distribution& spec, int n) {
    if (n < 2) throw DomainError("expected_max_via_rq: n must be >= 2");
    if (std::holds_alternative<DiscreteWeighted>(spec))
        throw DomainError("expected_max_via_rq: requires a continuous distribution");

    using boost::math::quadrature::tanh_sinh;
    constexpr double kInnerTol = 1e-13;
    constexpr double kOuterTol = 1e-12;
    constexpr double kBound = 1e-8;

    tanh_sinh<double> inner;
    double worst_inner = 0.0;
    auto revenue = [&](double q) {
        if (q <= 0.0) return 0.0;
        double err = 0.0;
        const double r = inner.integrate([&](double theta) { return upper_quantile(spec, theta); }, 0.0, q,
                                         kInnerTol, &err);
        worst_inner = std::max(worst_inner, err);
        return r;
    };
    const double nd = n;
    auto integrand = [&](double q) { return nd * (nd - 1.0) * std::pow(1.0 - q, nd - 2.0) * revenue(q); };

    double outer_err = 0.0;
    tanh_sinh<double> outer;
    const double value = outer.integrate(integrand, 0.0, 1.0, kOuterTol, &outer_err);
    // The outer weight integrates to n, so inner errors are amplified at most n-fold.
    const double bound = outer_err + nd * worst_inner;
    if (!std::isfinite(value) || !(bound <= kBound)) {
        std::ostringstream msg;
        msg << "expected_max_via_rq: quadrature did not converge (value " << value << ", outer error " << outer_err
            << ", worst inner error " << worst_inner << ", n " << n << ")";
        throw ComputationError(msg.str());
    }
    return {value, OracleMethod::Quadrature, bound};
}

} // namespace prophet
