#include "prophet/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "prophet/errors.hpp"

namespace prophet {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Guards floor()/comparisons of products such as 0.7 * 10 against rounding.
constexpr double kIndexSlack = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

void require_horizon(int n, const char* who) {
    if (n < 1) throw DomainError(std::string(who) + ": n must be >= 1");
}

void require_sample_count(const std::vector<double>& samples, std::size_t expected, const char* who) {
    if (samples.size() != expected)
        throw DomainError(std::string(who) + ": expected " + std::to_string(expected) + " samples, got " +
                          std::to_string(samples.size()));
}

double max_or_neg_inf(const std::vector<double>& xs) {
    return xs.empty() ? kNegInf : *std::max_element(xs.begin(), xs.end());
}

class SecretaryRule final : public StoppingRule {
public:
    SecretaryRule(int n, int rejected) : StoppingRule(n, 0), rejected_(rejected) {}

    std::optional<double> next_threshold() const override { return best_; }

protected:
    Decision decide(int index, double value, CounterStream&) override {
        if (index > rejected_ && value > best_) return Decision::Stop;
        best_ = std::max(best_, value);
        return Decision::Continue;
    }

private:
    int rejected_;
    double best_ = kNegInf;
};

class SecretaryWithSamplesRule final : public StoppingRule {
public:
    SecretaryWithSamplesRule(int n, double cutoff_position, std::vector<double> samples)
        : StoppingRule(n, samples.size()),
          offset_(static_cast<int>(samples.size())),
          cutoff_position_(cutoff_position),
          best_(max_or_neg_inf(samples)) {}

    std::optional<double> next_threshold() const override { return best_; }

protected:
    Decision decide(int index, double value, CounterStream&) override {
        const double combined = offset_ + index;
        if (combined >= cutoff_position_ - kIndexSlack && value > best_) return Decision::Stop;
        best_ = std::max(best_, value);
        return Decision::Continue;
    }

private:
    int offset_;
    double cutoff_position_;
    double best_;
};

class SingleThresholdRule final : public StoppingRule {
public:
    SingleThresholdRule(int n, std::vector<double> samples)
        : StoppingRule(n, samples.size()), threshold_(max_or_neg_inf(samples)) {}

    std::optional<double> next_threshold() const override {
        return position() + 1 < horizon() ? threshold_ : kNegInf;
    }

protected:
    Decision decide(int index, double value, CounterStream&) override {
        if (index == horizon() || value >= threshold_) return Decision::Stop;
        return Decision::Continue;
    }

private:
    double threshold_;
};

class FreshSamplesRule final : public StoppingRule {
public:
    FreshSamplesRule(int n, std::vector<double> samples)
        : StoppingRule(n, samples.size()), pool_(std::move(samples)) {
        pool_.reserve(pool_.size() + 1);
        refresh_max();
    }

    std::optional<double> next_threshold() const override { return max_; }

protected:
    Decision decide(int, double value, CounterStream& stream) override {
        if (value >= max_) return Decision::Stop;
        pool_.push_back(value);
        const auto evict = static_cast<std::size_t>(stream.below(pool_.size()));
        const bool evicted_max = evict == argmax_;
        pool_[evict] = pool_.back();
        pool_.pop_back();
        // The slot refilled from the back held X_t, which is below the max, so
        // argmax_ only moves when the max itself was evicted.
        if (evicted_max) refresh_max();
        return Decision::Continue;
    }

private:
    void refresh_max() {
        if (pool_.empty()) {
            max_ = kNegInf;
            argmax_ = 0;
            return;
        }
        const auto it = std::max_element(pool_.begin(), pool_.end());
        argmax_ = static_cast<std::size_t>(it - pool_.begin());
        max_ = *it;
    }

    std::vector<double> pool_;
    double max_ = kNegInf;
    std::size_t argmax_ = 0;
};

class QuantileScheduleRule final : public StoppingRule {
public:
    QuantileScheduleRule(int n, std::shared_ptr<const QuantileSchedule> schedule, QuantileSource source,
                         int skip, std::size_t sample_budget)
        : StoppingRule(n, sample_budget), schedule_(std::move(schedule)), source_(std::move(source)), skip_(skip) {}

    std::optional<double> next_threshold() const override {
        const int i = position() + 1;
        if (i > horizon()) return std::nullopt;
        if (i <= skip_) return std::numeric_limits<double>::infinity();
        return threshold(i);
    }

protected:
    Decision decide(int index, double value, CounterStream&) override {
        if (index <= skip_) return Decision::Continue;
        return value > threshold(index) ? Decision::Stop : Decision::Continue;
    }

private:
    double threshold(int i) const {
        const double level = schedule_->threshold_quantile(i);
        return std::visit(Overloaded{
                              [&](const std::shared_ptr<const Distribution>& d) { return quantile(*d, level); },
                              [&](const EmpiricalCdf& e) { return level > 0.0 ? e.quantile(level) : kNegInf; },
                          },
                          source_);
    }

    std::shared_ptr<const QuantileSchedule> schedule_;
    QuantileSource source_;
    int skip_;
};

class DpRule final : public StoppingRule {
public:
    DpRule(int n, std::shared_ptr<const std::vector<double>> values)
        : StoppingRule(n, 0), values_(std::move(values)) {}

    std::optional<double> next_threshold() const override {
        if (position() >= horizon()) return std::nullopt;
        return (*values_)[static_cast<std::size_t>(position()) + 2];
    }

protected:
    Decision decide(int index, double value, CounterStream&) override {
        return value >= (*values_)[static_cast<std::size_t>(index) + 1] ? Decision::Stop : Decision::Continue;
    }

private:
    std::shared_ptr<const std::vector<double>> values_;
};

class ConstantAlphaRule final : public StoppingRule {
public:
    ConstantAlphaRule(int n, double alpha, double high_value)
        : StoppingRule(n, 0), alpha_(alpha), high_value_(high_value) {}

protected:
    Decision decide(int, double value, CounterStream& stream) override {
        if (value >= high_value_) return Decision::Stop;
        if (value == 1.0) return stream.uniform() < alpha_ ? Decision::Stop : Decision::Continue;
        return Decision::Continue;
    }

private:
    double alpha_;
    double high_value_;
};

std::size_t integral_sample_count(int n, double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw DomainError("secretary_with_samples_rule: gamma must be non-negative");
    const double k = gamma * n;
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > kIndexSlack)
        throw DomainError("secretary_with_samples_rule: gamma * n = " + std::to_string(k) + " is not integral");
    return static_cast<std::size_t>(rounded);
}

} // namespace

StoppingRule::StoppingRule(int horizon, std::size_t sample_budget)
    : horizon_(horizon), sample_budget_(sample_budget) {
    require_horizon(horizon, "stopping rule");
}

Decision StoppingRule::advance(double value, CounterStream& stream) {
    if (stopped()) throw UsageError("advance: rule has already stopped");
    if (position_ >= horizon_) throw UsageError("advance: all n values already consumed");
    ++position_;
    const Decision d = decide(position_, value, stream);
    if (d == Decision::Stop) stop_index_ = position_;
    return d;
}

std::unique_ptr<StoppingRule> make_secretary_rule(int n, double cutoff_fraction) {
    require_horizon(n, "secretary_rule");
    if (!(cutoff_fraction >= 0.0 && cutoff_fraction < 1.0))
        throw DomainError("secretary_rule: cutoff fraction must lie in [0, 1)");
    const int rejected = static_cast<int>(std::floor(cutoff_fraction * n + kIndexSlack));
    return std::make_unique<SecretaryRule>(n, rejected);
}

std::unique_ptr<StoppingRule> make_secretary_with_samples_rule(int n, double gamma, std::vector<double> samples) {
    require_horizon(n, "secretary_with_samples_rule");
    require_sample_count(samples, integral_sample_count(n, gamma), "secretary_with_samples_rule");
    const double x = std::max(1.0 / std::numbers::e, gamma / (1.0 + gamma));
    const double cutoff_position = x * (1.0 + gamma) * n;
    return std::make_unique<SecretaryWithSamplesRule>(n, cutoff_position, std::move(samples));
}

std::unique_ptr<StoppingRule> make_single_threshold_rule(int n, std::vector<double> samples) {
    require_horizon(n, "single_threshold_rule");
    require_sample_count(samples, static_cast<std::size_t>(n - 1), "single_threshold_rule");
    return std::make_unique<SingleThresholdRule>(n, std::move(samples));
}

std::unique_ptr<StoppingRule> make_fresh_samples_rule(int n, std::vector<double> samples) {
    require_horizon(n, "fresh_samples_rule");
    require_sample_count(samples, static_cast<std::size_t>(n - 1), "fresh_samples_rule");
    return std::make_unique<FreshSamplesRule>(n, std::move(samples));
}

int skip_phase_length(const QuantileSchedule& schedule, double delta) {
    const double target = delta / schedule.n;
    for (int i = 0; i <= schedule.n; ++i)
        if (schedule.eps[static_cast<std::size_t>(i)] >= target) return i;
    return schedule.n;
}

std::unique_ptr<StoppingRule> make_quantile_schedule_rule(int n, std::shared_ptr<const QuantileSchedule> schedule,
                                                          QuantileSource source, double delta,
                                                          std::size_t sample_budget) {
    require_horizon(n, "quantile_schedule_rule");
    if (!schedule || schedule->n != n)
        throw DomainError("quantile_schedule_rule: schedule was built for a different n");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("quantile_schedule_rule: delta must lie in (0, 1)");
    if (const auto* d = std::get_if<std::shared_ptr<const Distribution>>(&source); d && !*d)
        throw DomainError("quantile_schedule_rule: null distribution");
    const int skip = skip_phase_length(*schedule, delta);
    return std::make_unique<QuantileScheduleRule>(n, std::move(schedule), std::move(source), skip, sample_budget);
}

std::vector<double> dp_thresholds(const Distribution& spec, int n) {
    require_horizon(n, "dp_rule");
    std::vector<double> v(static_cast<std::size_t>(n) + 2, 0.0);
    for (int i = n; i >= 1; --i)
        v[static_cast<std::size_t>(i)] = expected_max_with_constant(spec, v[static_cast<std::size_t>(i) + 1]);
    return v;
}

std::unique_ptr<StoppingRule> make_dp_rule(const Distribution& spec, int n) {
    return make_dp_rule(std::make_shared<const std::vector<double>>(dp_thresholds(spec, n)), n);
}

std::unique_ptr<StoppingRule> make_dp_rule(std::shared_ptr<const std::vector<double>> thresholds, int n) {
    require_horizon(n, "dp_rule");
    if (!thresholds || thresholds->size() != static_cast<std::size_t>(n) + 2)
        throw DomainError("dp_rule: threshold table does not match n");
    return std::make_unique<DpRule>(n, std::move(thresholds));
}

std::unique_ptr<StoppingRule> make_constant_alpha_rule(int n, double alpha, double high_value) {
    require_horizon(n, "constant_alpha_rule");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("constant_alpha_rule: alpha must lie in [0, 1]");
    return std::make_unique<ConstantAlphaRule>(n, alpha, high_value);
}

std::string_view rule_name(const RuleSpec& spec) noexcept {
    return std::visit(Overloaded{
                          [](const SecretarySpec&) { return std::string_view("secretary"); },
                          [](const SecretarySamplesSpec&) { return std::string_view("secretary_samples"); },
                          [](const SingleThresholdSpec&) { return std::string_view("single_threshold"); },
                          [](const FreshSamplesSpec&) { return std::string_view("fresh_samples"); },
                          [](const QuantileScheduleSpec&) { return std::string_view("quantile_schedule"); },
                          [](const DpSpec&) { return std::string_view("dp"); },
                          [](const ConstantAlphaSpec&) { return std::string_view("constant_alpha"); },
                      },
                      spec);
}

bool comparison_only(const RuleSpec& spec) noexcept {
    return std::holds_alternative<SecretarySpec>(spec) || std::holds_alternative<SecretarySamplesSpec>(spec) ||
           std::holds_alternative<SingleThresholdSpec>(spec) || std::holds_alternative<FreshSamplesSpec>(spec);
}

RulePlan::RulePlan(RuleSpec spec, Distribution dist, int n)
    : spec_(std::move(spec)), dist_(std::make_shared<const Distribution>(std::move(dist))), n_(n) {
    require_horizon(n, "rule plan");
    std::visit(Overloaded{
                   [&](const SecretarySpec& s) {
                       if (!(s.cutoff >= 0.0 && s.cutoff < 1.0))
                           throw DomainError("secretary: cutoff must lie in [0, 1)");
                   },
                   [&](const SecretarySamplesSpec& s) { sample_count_ = integral_sample_count(n, s.gamma); },
                   [&](const SingleThresholdSpec&) { sample_count_ = static_cast<std::size_t>(n - 1); },
                   [&](const FreshSamplesSpec&) { sample_count_ = static_cast<std::size_t>(n - 1); },
                   [&](const QuantileScheduleSpec& s) {
                       if (n < 2) throw DomainError("quantile_schedule: n must be >= 2");
                       if (!(s.delta > 0.0 && s.delta < 1.0))
                           throw DomainError("quantile_schedule: delta must lie in (0, 1)");
                       const double beta = s.calibrate ? calibrate_beta(1e-9, s.step) : s.beta.value_or(kHillKertzBeta);
                       schedule_ = std::make_shared<const QuantileSchedule>(
                           quantile_schedule(n, solve_hill_kertz(beta, s.step)));
                       if (s.source == QuantileSourceKind::Empirical) {
                           const double m = s.samples ? static_cast<double>(*s.samples)
                                                      : std::ceil(s.sample_factor * n * static_cast<double>(n));
                           if (!(m >= 1.0)) throw DomainError("quantile_schedule: empirical source needs m >= 1");
                           sample_count_ = static_cast<std::size_t>(m);
                       }
                   },
                   [&](const DpSpec&) { dp_ = std::make_shared<const std::vector<double>>(dp_thresholds(*dist_, n)); },
                   [&](const ConstantAlphaSpec& s) {
                       alpha_ = s.alpha.value_or(1.0 / std::sqrt(static_cast<double>(n)));
                       if (!(alpha_ >= 0.0 && alpha_ <= 1.0))
                           throw DomainError("constant_alpha: alpha must lie in [0, 1]");
                       const auto top = s.high_value ? s.high_value : top_atom(*dist_);
                       if (!top) throw DomainError("constant_alpha: high_value required for continuous distributions");
                       high_value_ = *top;
                   },
               },
               spec_);
}

std::unique_ptr<StoppingRule> RulePlan::instantiate(std::vector<double> samples) const {
    return std::visit(
        Overloaded{
            [&](const SecretarySpec& s) {
                require_sample_count(samples, 0, "secretary");
                return make_secretary_rule(n_, s.cutoff);
            },
            [&](const SecretarySamplesSpec& s) {
                return make_secretary_with_samples_rule(n_, s.gamma, std::move(samples));
            },
            [&](const SingleThresholdSpec&) { return make_single_threshold_rule(n_, std::move(samples)); },
            [&](const FreshSamplesSpec&) { return make_fresh_samples_rule(n_, std::move(samples)); },
            [&](const QuantileScheduleSpec& s) {
                require_sample_count(samples, sample_count_, "quantile_schedule");
                if (s.source == QuantileSourceKind::Exact)
                    return make_quantile_schedule_rule(n_, schedule_, QuantileSource{dist_}, s.delta);
                const std::size_t m = samples.size();
                return make_quantile_schedule_rule(n_, schedule_, QuantileSource{build_empirical(std::move(samples))},
                                                   s.delta, m);
            },
            [&](const DpSpec&) {
                require_sample_count(samples, 0, "dp");
                return make_dp_rule(dp_, n_);
            },
            [&](const ConstantAlphaSpec&) {
                require_sample_count(samples, 0, "constant_alpha");
                return make_constant_alpha_rule(n_, alpha_, high_value_);
            },
        },
        spec_);
}

} // namespace prophet
