#pragma once

// Monte Carlo estimation of E[X_tau], E[max] and their ratio.
//
// Trial t draws its samples, values and rule randomness from three Philox
// substreams keyed by (seed, t), so a trial's outcome does not depend on
// which worker runs it. Trials are grouped into fixed blocks of
// kTrialsPerBlock; block sums are reduced in block order, which makes
// evaluate() bit-identical to evaluate_serial() for any worker count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "prophet/distributions.hpp"
#include "prophet/rules.hpp"

namespace prophet {

inline constexpr std::int64_t kTrialsPerBlock = 1024;

struct EvalConfig {
    RuleSpec rule;
    Distribution dist;
    int n = 1;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct TrialOutcome {
    std::optional<int> stop_index;  // 1-based; nullopt when tau is infinite
    double reward = 0.0;            // X_tau, 0 when never stopped
    double realized_max = 0.0;      // max(X_1..X_n)
    double sample_max = 0.0;        // max of the k samples, -inf when k = 0
};

struct EvalReport {
    std::int64_t trials = 0;
    int n = 0;
    std::size_t k = 0;
    double mean_reward = 0.0;
    double mean_max = 0.0;
    double ratio = 0.0;
    double ci_halfwidth = 0.0;  // 95%, delta method on mean_reward / mean_max
    double reward_std_error = 0.0;
    double stop_probability = 0.0;
    double hit_max_probability = 0.0;           // stopped on max(X_1..X_n)
    double hit_combined_max_probability = 0.0;  // stopped on the max over samples and values
    std::optional<double> exact_max;
    std::optional<double> ratio_vs_exact;
    /// Entry i-1 counts stops at index i; the last entry counts tau = infinity.
    std::vector<std::int64_t> stop_histogram;

    bool operator==(const EvalReport&) const = default;
};

/// Runs one trial. Builds a RulePlan; prefer the overload below in loops.
TrialOutcome run_trial(const EvalConfig& config, std::int64_t trial_index);
TrialOutcome run_trial(const RulePlan& plan, const Distribution& dist, std::uint64_t seed,
                       std::int64_t trial_index);

/// OpenMP over blocks of trials, config.workers threads.
EvalReport evaluate(const EvalConfig& config);

/// Single-threaded reference for evaluate().
EvalReport evaluate_serial(const EvalConfig& config);

struct StopProfileEntry {
    int index = 0;
    std::int64_t reached = 0;
    std::optional<double> probability;  // Pr[stop at i | reached i]
    std::optional<double> std_error;
};

std::vector<StopProfileEntry> stop_profile(const EvalConfig& config);
std::vector<StopProfileEntry> stop_profile(const EvalReport& report);

struct ProbabilityEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t hits = 0;
    std::int64_t trials = 0;
};

/// Pr[|median of m Uniform01 draws - 1/2| <= 1/n]; even m is bumped to m+1.
ProbabilityEstimate median_experiment(int n, std::int64_t m, std::int64_t trials, std::uint64_t seed,
                                      int workers = 1);

/// Fraction of `reps` empirical CDFs of m Uniform01 draws whose sup distance
/// exceeds dkw_epsilon(m, alpha).
ProbabilityEstimate dkw_violation_frequency(std::size_t m, double alpha, std::int64_t reps, std::uint64_t seed,
                                            int workers = 1);

} // namespace prophet
