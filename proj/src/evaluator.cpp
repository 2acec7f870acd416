#include "prophet/evaluator.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <variant>

#include "prophet/empirical.hpp"
#include "prophet/errors.hpp"

namespace prophet {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct BlockSums {
    double reward = 0.0;
    double max = 0.0;
    double reward_sq = 0.0;
    double max_sq = 0.0;
    double cross = 0.0;
    std::int64_t stops = 0;
    std::int64_t hits = 0;
    std::int64_t combined_hits = 0;
};

void validate(const EvalConfig& config) {
    if (config.n < 1) throw DomainError("evaluate: n must be >= 1");
    if (config.trials < 1) throw DomainError("evaluate: trials must be >= 1");
    if (config.workers < 1) throw DomainError("evaluate: workers must be >= 1");
}

TrialOutcome run_trial_with(const RulePlan& plan, const Distribution& dist, std::uint64_t seed,
                            std::int64_t trial_index, std::vector<double>& values) {
    const auto t = static_cast<std::uint64_t>(trial_index);
    CounterStream sample_stream(seed, t, StreamPurpose::Samples);
    CounterStream value_stream(seed, t, StreamPurpose::Values);
    CounterStream rule_stream(seed, t, StreamPurpose::RuleRandomness);

    TrialOutcome out;
    std::vector<double> samples = sample_many(dist, plan.sample_count(), sample_stream);
    out.sample_max = samples.empty() ? -std::numeric_limits<double>::infinity()
                                     : *std::max_element(samples.begin(), samples.end());

    values.resize(static_cast<std::size_t>(plan.n()));
    sample_into(dist, values, value_stream);
    out.realized_max = *std::max_element(values.begin(), values.end());

    auto rule = plan.instantiate(std::move(samples));
    for (int i = 0; i < plan.n(); ++i) {
        if (rule->advance(values[static_cast<std::size_t>(i)], rule_stream) == Decision::Stop) {
            out.stop_index = i + 1;
            out.reward = values[static_cast<std::size_t>(i)];
            break;
        }
    }
    return out;
}

// The shared kernel: trials [begin, end) accumulated in index order.
BlockSums run_block(const RulePlan& plan, const Distribution& dist, std::uint64_t seed, std::int64_t begin,
                    std::int64_t end, std::vector<std::int64_t>& histogram, std::vector<double>& values) {
    BlockSums s;
    for (std::int64_t t = begin; t < end; ++t) {
        const TrialOutcome o = run_trial_with(plan, dist, seed, t, values);
        s.reward += o.reward;
        s.max += o.realized_max;
        s.reward_sq += o.reward * o.reward;
        s.max_sq += o.realized_max * o.realized_max;
        s.cross += o.reward * o.realized_max;
        if (o.stop_index) {
            ++s.stops;
            ++histogram[static_cast<std::size_t>(*o.stop_index - 1)];
            if (o.reward >= o.realized_max) ++s.hits;
            if (o.reward >= std::max(o.realized_max, o.sample_max)) ++s.combined_hits;
        } else {
            ++histogram.back();
        }
    }
    return s;
}

EvalReport finish(const EvalConfig& config, const RulePlan& plan, const std::vector<BlockSums>& blocks,
                  std::vector<std::int64_t> histogram) {
    BlockSums total;
    for (const auto& b : blocks) {
        total.reward += b.reward;
        total.max += b.max;
        total.reward_sq += b.reward_sq;
        total.max_sq += b.max_sq;
        total.cross += b.cross;
        total.stops += b.stops;
        total.hits += b.hits;
        total.combined_hits += b.combined_hits;
    }
    const double N = static_cast<double>(config.trials);

    EvalReport r;
    r.trials = config.trials;
    r.n = config.n;
    r.k = plan.sample_count();
    r.mean_reward = total.reward / N;
    r.mean_max = total.max / N;
    // 0/0 happens only when every draw is 0; any rule is then optimal.
    r.ratio = r.mean_max > 0.0 ? r.mean_reward / r.mean_max : 1.0;
    r.stop_probability = static_cast<double>(total.stops) / N;
    r.hit_max_probability = static_cast<double>(total.hits) / N;
    r.hit_combined_max_probability = static_cast<double>(total.combined_hits) / N;

    if (config.trials > 1) {
        const double var_r = std::max(0.0, (total.reward_sq - N * r.mean_reward * r.mean_reward) / (N - 1.0));
        const double var_m = std::max(0.0, (total.max_sq - N * r.mean_max * r.mean_max) / (N - 1.0));
        const double cov = (total.cross - N * r.mean_reward * r.mean_max) / (N - 1.0);
        r.reward_std_error = std::sqrt(var_r / N);
        if (r.mean_max > 0.0) {
            const double var_ratio =
                std::max(0.0, var_r - 2.0 * r.ratio * cov + r.ratio * r.ratio * var_m) / (N * r.mean_max * r.mean_max);
            r.ci_halfwidth = kZ95 * std::sqrt(var_ratio);
        }
    } else {
        r.reward_std_error = std::numeric_limits<double>::infinity();
        r.ci_halfwidth = std::numeric_limits<double>::infinity();
    }

    try {
        r.exact_max = exact_expected_max(config.dist, config.n);
        if (*r.exact_max > 0.0) r.ratio_vs_exact = r.mean_reward / *r.exact_max;
    } catch (const NotImplementedError&) {
    }
    r.stop_histogram = std::move(histogram);
    return r;
}

std::int64_t block_count(std::int64_t trials) { return (trials + kTrialsPerBlock - 1) / kTrialsPerBlock; }

} // namespace

TrialOutcome run_trial(const RulePlan& plan, const Distribution& dist, std::uint64_t seed,
                       std::int64_t trial_index) {
    if (trial_index < 0) throw DomainError("run_trial: trial_index must be non-negative");
    std::vector<double> values;
    return run_trial_with(plan, dist, seed, trial_index, values);
}

TrialOutcome run_trial(const EvalConfig& config, std::int64_t trial_index) {
    validate(config);
    if (trial_index < 0 || trial_index >= config.trials)
        throw UsageError("run_trial: trial_index must lie in [0, trials)");
    const RulePlan plan(config.rule, config.dist, config.n);
    return run_trial(plan, config.dist, config.seed, trial_index);
}

EvalReport evaluate_serial(const EvalConfig& config) {
    validate(config);
    const RulePlan plan(config.rule, config.dist, config.n);
    const std::int64_t nblocks = block_count(config.trials);
    std::vector<BlockSums> blocks(static_cast<std::size_t>(nblocks));
    std::vector<std::int64_t> histogram(static_cast<std::size_t>(config.n) + 1, 0);
    std::vector<double> values;
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const std::int64_t begin = b * kTrialsPerBlock;
        const std::int64_t end = std::min(config.trials, begin + kTrialsPerBlock);
        blocks[static_cast<std::size_t>(b)] = run_block(plan, config.dist, config.seed, begin, end, histogram, values);
    }
    return finish(config, plan, blocks, std::move(histogram));
}

EvalReport evaluate(const EvalConfig& config) {
    validate(config);
    const RulePlan plan(config.rule, config.dist, config.n);
    const std::int64_t nblocks = block_count(config.trials);
    std::vector<BlockSums> blocks(static_cast<std::size_t>(nblocks));
    std::vector<std::int64_t> histogram(static_cast<std::size_t>(config.n) + 1, 0);
    std::exception_ptr failure;

#pragma omp parallel num_threads(config.workers)
    {
        std::vector<std::int64_t> local(histogram.size(), 0);
        std::vector<double> values;
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t b = 0; b < nblocks; ++b) {
            try {
                const std::int64_t begin = b * kTrialsPerBlock;
                const std::int64_t end = std::min(config.trials, begin + kTrialsPerBlock);
                blocks[static_cast<std::size_t>(b)] = run_block(plan, config.dist, config.seed, begin, end, local, values);
            } catch (...) {
#pragma omp critical(prophet_eval_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        // Integer counts: merge order does not matter.
#pragma omp critical(prophet_eval_histogram)
        for (std::size_t i = 0; i < histogram.size(); ++i) histogram[i] += local[i];
    }
    if (failure) std::rethrow_exception(failure);
    return finish(config, plan, blocks, std::move(histogram));
}

std::vector<StopProfileEntry> stop_profile(const EvalReport& report) {
    std::vector<StopProfileEntry> out;
    out.reserve(static_cast<std::size_t>(report.n));
    std::int64_t reached = report.trials;
    for (int i = 1; i <= report.n; ++i) {
        StopProfileEntry e;
        e.index = i;
        e.reached = reached;
        const std::int64_t stopped = report.stop_histogram[static_cast<std::size_t>(i - 1)];
        if (reached > 0) {
            const double p = static_cast<double>(stopped) / static_cast<double>(reached);
            e.probability = p;
            e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(reached));
        }
        out.push_back(e);
        reached -= stopped;
    }
    return out;
}

std::vector<StopProfileEntry> stop_profile(const EvalConfig& config) { return stop_profile(evaluate(config)); }

ProbabilityEstimate median_experiment(int n, std::int64_t m, std::int64_t trials, std::uint64_t seed, int workers) {
    if (n < 1) throw DomainError("median_experiment: n must be >= 1");
    if (m < 1) throw DomainError("median_experiment: m must be >= 1");
    if (trials < 1) throw DomainError("median_experiment: trials must be >= 1");
    if (workers < 1) throw DomainError("median_experiment: workers must be >= 1");
    if (m % 2 == 0) ++m;
    const double band = 1.0 / n;
    std::int64_t hits = 0;

#pragma omp parallel num_threads(workers) reduction(+ : hits)
    {
        std::vector<double> draws(static_cast<std::size_t>(m));
#pragma omp for schedule(static)
        for (std::int64_t t = 0; t < trials; ++t) {
            CounterStream stream(seed, static_cast<std::uint64_t>(t), StreamPurpose::Auxiliary);
            for (double& x : draws) x = stream.uniform();
            const auto mid = draws.begin() + m / 2;
            std::nth_element(draws.begin(), mid, draws.end());
            if (std::abs(*mid - 0.5) <= band) ++hits;
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), hits, trials};
}

ProbabilityEstimate dkw_violation_frequency(std::size_t m, double alpha, std::int64_t reps, std::uint64_t seed,
                                            int workers) {
    if (reps < 1) throw DomainError("dkw_violation_frequency: reps must be >= 1");
    if (workers < 1) throw DomainError("dkw_violation_frequency: workers must be >= 1");
    const double band = dkw_epsilon(m, alpha);
    const Distribution uniform = Uniform01{};
    std::int64_t hits = 0;

#pragma omp parallel for num_threads(workers) schedule(static) reduction(+ : hits)
    for (std::int64_t r = 0; r < reps; ++r) {
        CounterStream stream(seed, static_cast<std::uint64_t>(r), StreamPurpose::Auxiliary);
        const EmpiricalCdf ecdf = build_empirical(sample_many(uniform, m, stream));
        if (sup_distance(ecdf, uniform) > band) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(reps);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(reps)), hits, reps};
}

} // namespace prophet
