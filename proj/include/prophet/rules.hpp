#pragma once

// Stopping rules as causal state machines.
//
// A rule is built from its k samples and the horizon n, then fed X_1..X_n
// one value at a time. The stepping interface only ever exposes the current
// value, so a rule cannot look ahead.

#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "prophet/distributions.hpp"
#include "prophet/empirical.hpp"
#include "prophet/random.hpp"
#include "prophet/schedule.hpp"

namespace prophet {

enum class Decision { Continue, Stop };

class StoppingRule {
public:
    StoppingRule(int horizon, std::size_t sample_budget);
    virtual ~StoppingRule() = default;

    StoppingRule(const StoppingRule&) = delete;
    StoppingRule& operator=(const StoppingRule&) = delete;

    /// Consumes the next value. Throws UsageError after Stop or past n.
    Decision advance(double value, CounterStream& stream);

    int horizon() const noexcept { return horizon_; }
    std::size_t sample_budget() const noexcept { return sample_budget_; }
    /// Number of values consumed so far.
    int position() const noexcept { return position_; }
    bool stopped() const noexcept { return stop_index_.has_value(); }
    bool exhausted() const noexcept { return stopped() || position_ == horizon_; }
    /// 1-based stop index; nullopt while running or when tau is infinite.
    std::optional<int> stop_index() const noexcept { return stop_index_; }

    /// Threshold the next value is compared against, for rules that keep one.
    virtual std::optional<double> next_threshold() const { return std::nullopt; }

protected:
    /// index is 1-based.
    virtual Decision decide(int index, double value, CounterStream& stream) = 0;

private:
    int horizon_;
    std::size_t sample_budget_;
    int position_ = 0;
    std::optional<int> stop_index_;
};

/// Rejects the first floor(cutoff*n) values, then stops at the first value
/// strictly above everything seen. Uses no samples.
std::unique_ptr<StoppingRule> make_secretary_rule(int n, double cutoff_fraction = 1.0 / std::numbers::e);

/// Treats the gamma*n samples as a rejected prefix of a combined sequence of
/// length (1+gamma)n and applies the cutoff rule with
/// x = max(1/e, gamma/(1+gamma)). Throws DomainError unless gamma*n is integral
/// and matches samples.size().
std::unique_ptr<StoppingRule> make_secretary_with_samples_rule(int n, double gamma,
                                                               std::vector<double> samples);

/// Maximum of the n-1 samples as a fixed threshold (X_i >= T) for i < n;
/// unconditional stop at i = n.
std::unique_ptr<StoppingRule> make_single_threshold_rule(int n, std::vector<double> samples);

/// Pool of n-1 samples; stop iff X_t >= max(pool), otherwise insert X_t and
/// evict one of the n elements uniformly at random (one 64-bit variate).
std::unique_ptr<StoppingRule> make_fresh_samples_rule(int n, std::vector<double> samples);

/// Where the quantile-schedule rule reads its thresholds from.
using QuantileSource = std::variant<std::shared_ptr<const Distribution>, EmpiricalCdf>;

/// First index with eps_i >= delta/n; values up to and including it are skipped.
int skip_phase_length(const QuantileSchedule& schedule, double delta);

/// Skips i <= kskip, then stops iff X_i > Q(1 - eps_i). With an empirical
/// source, the level 0 threshold (eps_n = 1) accepts everything.
std::unique_ptr<StoppingRule> make_quantile_schedule_rule(int n, std::shared_ptr<const QuantileSchedule> schedule,
                                                          QuantileSource source, double delta,
                                                          std::size_t sample_budget = 0);

/// Backward-induction values V_1..V_{n+1} (index 0 unused), V_{n+1} = 0.
std::vector<double> dp_thresholds(const Distribution& spec, int n);

/// Optimal known-distribution rule: stop at i iff X_i >= V_{i+1}.
std::unique_ptr<StoppingRule> make_dp_rule(const Distribution& spec, int n);
std::unique_ptr<StoppingRule> make_dp_rule(std::shared_ptr<const std::vector<double>> thresholds, int n);

/// For three-point instances: always accept high_value, accept the middle
/// atom 1 with probability alpha, never accept 0.
std::unique_ptr<StoppingRule> make_constant_alpha_rule(int n, double alpha, double high_value);

// --- configuration surface -------------------------------------------------

struct SecretarySpec {
    double cutoff = 1.0 / std::numbers::e;
};
struct SecretarySamplesSpec {
    double gamma = 0.0;
};
struct SingleThresholdSpec {};
struct FreshSamplesSpec {};
enum class QuantileSourceKind { Exact, Empirical };
struct QuantileScheduleSpec {
    QuantileSourceKind source = QuantileSourceKind::Exact;
    double delta = 0.1;
    std::optional<double> beta;       // defaults to kHillKertzBeta
    bool calibrate = false;           // run calibrate_beta instead
    double step = kDefaultOdeStep;
    std::optional<std::size_t> samples;  // empirical sample count m
    double sample_factor = 10.0;         // m = sample_factor * n^2 when samples unset
};
struct DpSpec {};
struct ConstantAlphaSpec {
    std::optional<double> alpha;       // defaults to 1/sqrt(n)
    std::optional<double> high_value;  // defaults to the distribution's top atom
};

using RuleSpec = std::variant<SecretarySpec, SecretarySamplesSpec, SingleThresholdSpec, FreshSamplesSpec,
                              QuantileScheduleSpec, DpSpec, ConstantAlphaSpec>;

std::string_view rule_name(const RuleSpec& spec) noexcept;

/// True for rules whose decisions depend only on comparisons between
/// samples and values.
bool comparison_only(const RuleSpec& spec) noexcept;

/// Per-configuration precomputation (schedule, DP values) shared by every
/// trial. Immutable after construction.
class RulePlan {
public:
    RulePlan(RuleSpec spec, Distribution dist, int n);

    const RuleSpec& spec() const noexcept { return spec_; }
    int n() const noexcept { return n_; }
    std::size_t sample_count() const noexcept { return sample_count_; }
    const std::shared_ptr<const QuantileSchedule>& schedule() const noexcept { return schedule_; }

    std::unique_ptr<StoppingRule> instantiate(std::vector<double> samples) const;

private:
    RuleSpec spec_;
    std::shared_ptr<const Distribution> dist_;
    int n_;
    std::size_t sample_count_ = 0;
    std::shared_ptr<const QuantileSchedule> schedule_;
    std::shared_ptr<const std::vector<double>> dp_;
    double alpha_ = 0.0;
    double high_value_ = 0.0;
};

} // namespace prophet
