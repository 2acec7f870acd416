#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "prophet/random.hpp"

namespace prophet {

struct Uniform01 {};

struct Exponential {
    double rate = 1.0;
};

/// Finite distribution on strictly ascending non-negative atoms.
class DiscreteWeighted {
public:
    /// Throws DomainError unless values ascend strictly, are non-negative,
    /// probs are positive, lengths match and probs sum to 1 within 1e-12.
    DiscreteWeighted(std::vector<double> values, std::vector<double> probs);

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    /// cumulative()[j] = P[X <= values()[j]]; the last entry is exactly 1.
    const std::vector<double>& cumulative() const noexcept { return cumulative_; }

    bool operator==(const DiscreteWeighted&) const = default;

private:
    std::vector<double> values_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

/// Value distribution F of the i.i.d. draws. Immutable; share freely.
using Distribution = std::variant<Uniform01, Exponential, DiscreteWeighted>;

Distribution make_exponential(double rate = 1.0);

std::string_view kind_name(const Distribution& spec) noexcept;

/// One draw by inversion. Consumes exactly one 64-bit variate.
double sample_one(const Distribution& spec, CounterStream& stream);

/// Fills `out` with i.i.d. draws; equivalent to repeated sample_one.
void sample_into(const Distribution& spec, std::span<double> out, CounterStream& stream);

std::vector<double> sample_many(const Distribution& spec, std::size_t count, CounterStream& stream);

/// P[X <= x].
double cdf(const Distribution& spec, double x);

/// P[X < x]; equals cdf for the continuous kinds.
double cdf_left(const Distribution& spec, double x);

/// Generalized inverse: smallest x with cdf(x) >= q. q = 0 maps to the
/// essential infimum. Throws DomainError for q outside [0, 1].
double quantile(const Distribution& spec, double q);

/// quantile(spec, 1 - tail) without forming 1 - tail, so small tails keep
/// full precision.
double upper_quantile(const Distribution& spec, double tail);

/// E[max(X, c)], the backward-induction step.
double expected_max_with_constant(const Distribution& spec, double c);

/// E[max of n i.i.d. draws] in closed form (atom sum for discrete).
double exact_expected_max(const Distribution& spec, int n);

double mean(const Distribution& spec);

/// Largest atom of a discrete spec, nullopt for the continuous kinds.
std::optional<double> top_atom(const Distribution& spec);

enum class AdversarialKind { SecretaryLike, ThreePoint, RareBernoulli };

/// Worst-case instances from the upper-bound constructions.
///
/// SecretaryLike: atoms 1..n^3, each with mass (1 - 1/n^2)/n^3, plus a top
/// atom u = n^6 + 1 with mass 1/n^2 (so u >= n^3 * max of the low atoms).
/// ThreePoint: {0, 1, sqrt(n)/(e-2)} with masses
/// {1 - n^-1/2 - n^-3/2, n^-1/2, n^-3/2}.
/// RareBernoulli: {0, 1} with masses {1 - eps/n, eps/n}.
DiscreteWeighted adversarial_instance(AdversarialKind kind, int n,
                                      std::optional<double> eps = std::nullopt);

} // namespace prophet
