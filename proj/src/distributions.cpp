#include "prophet/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "prophet/errors.hpp"

namespace prophet {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

double draw_discrete(const DiscreteWeighted& d, double u) {
    const auto& cum = d.cumulative();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const auto j = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
    return d.values()[j];
}

// Number of atoms with value <= x.
std::size_t atoms_at_most(const DiscreteWeighted& d, double x) {
    return static_cast<std::size_t>(
        std::upper_bound(d.values().begin(), d.values().end(), x) - d.values().begin());
}

} // namespace

DiscreteWeighted::DiscreteWeighted(std::vector<double> values, std::vector<double> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
    if (values_.empty() || values_.size() != probs_.size())
        throw DomainError("discrete distribution: values and probs must be non-empty and of equal length");
    double total = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (!(values_[j] >= 0.0) || !std::isfinite(values_[j]))
            throw DomainError("discrete distribution: values must be finite and non-negative");
        if (j > 0 && !(values_[j] > values_[j - 1]))
            throw DomainError("discrete distribution: values must be strictly ascending");
        if (!(probs_[j] > 0.0))
            throw DomainError("discrete distribution: probs must be positive");
        total += probs_[j];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("discrete distribution: probs sum to " + std::to_string(total) + ", not 1");
    cumulative_.resize(probs_.size());
    double run = 0.0;
    for (std::size_t j = 0; j < probs_.size(); ++j) {
        run += probs_[j];
        cumulative_[j] = std::min(run, 1.0);
    }
    cumulative_.back() = 1.0;
}

Distribution make_exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("exponential: rate must be positive");
    return Exponential{rate};
}

std::string_view kind_name(const Distribution& spec) noexcept {
    return std::visit(Overloaded{
                          [](const Uniform01&) { return std::string_view("uniform01"); },
                          [](const Exponential&) { return std::string_view("exponential"); },
                          [](const DiscreteWeighted&) { return std::string_view("discrete"); },
                      },
                      spec);
}

double sample_one(const Distribution& spec, CounterStream& stream) {
    return std::visit(Overloaded{
                          [&](const Uniform01&) { return stream.uniform(); },
                          [&](const Exponential& e) { return -std::log(stream.uniform_positive()) / e.rate; },
                          [&](const DiscreteWeighted& d) { return draw_discrete(d, stream.uniform()); },
                      },
                      spec);
}

void sample_into(const Distribution& spec, std::span<double> out, CounterStream& stream) {
    std::visit(Overloaded{
                   [&](const Uniform01&) {
                       for (double& x : out) x = stream.uniform();
                   },
                   [&](const Exponential& e) {
                       for (double& x : out) x = -std::log(stream.uniform_positive()) / e.rate;
                   },
                   [&](const DiscreteWeighted& d) {
                       for (double& x : out) x = draw_discrete(d, stream.uniform());
                   },
               },
               spec);
}

std::vector<double> sample_many(const Distribution& spec, std::size_t count, CounterStream& stream) {
    std::vector<double> out(count);
    sample_into(spec, out, stream);
    return out;
}

double cdf(const Distribution& spec, double x) {
    return std::visit(Overloaded{
                          [&](const Uniform01&) { return std::clamp(x, 0.0, 1.0); },
                          [&](const Exponential& e) { return x >= 0.0 ? -std::expm1(-e.rate * x) : 0.0; },
                          [&](const DiscreteWeighted& d) {
                              const auto k = atoms_at_most(d, x);
                              return k == 0 ? 0.0 : d.cumulative()[k - 1];
                          },
                      },
                      spec);
}

double cdf_left(const Distribution& spec, double x) {
    if (const auto* d = std::get_if<DiscreteWeighted>(&spec)) {
        const auto k = static_cast<std::size_t>(
            std::lower_bound(d->values().begin(), d->values().end(), x) - d->values().begin());
        return k == 0 ? 0.0 : d->cumulative()[k - 1];
    }
    return cdf(spec, x);
}

double quantile(const Distribution& spec, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q must lie in [0, 1]");
    return std::visit(Overloaded{
                          [&](const Uniform01&) { return q; },
                          [&](const Exponential& e) { return -std::log1p(-q) / e.rate; },
                          [&](const DiscreteWeighted& d) {
                              const auto& cum = d.cumulative();
                              const auto it = std::lower_bound(cum.begin(), cum.end(), q);
                              return d.values()[static_cast<std::size_t>(it - cum.begin())];
                          },
                      },
                      spec);
}

double upper_quantile(const Distribution& spec, double tail) {
    if (!(tail >= 0.0 && tail <= 1.0)) throw DomainError("upper_quantile: tail must lie in [0, 1]");
    return std::visit(Overloaded{
                          [&](const Uniform01&) { return 1.0 - tail; },
                          [&](const Exponential& e) { return -std::log(tail) / e.rate; },
                          [&](const DiscreteWeighted&) { return quantile(spec, 1.0 - tail); },
                      },
                      spec);
}

double expected_max_with_constant(const Distribution& spec, double c) {
    return std::visit(Overloaded{
                          [&](const Uniform01&) {
                              if (c <= 0.0) return 0.5;
                              if (c >= 1.0) return c;
                              return 0.5 * (1.0 + c * c);
                          },
                          [&](const Exponential& e) {
                              if (c <= 0.0) return 1.0 / e.rate;
                              return c + std::exp(-e.rate * c) / e.rate;
                          },
                          [&](const DiscreteWeighted& d) {
                              double s = 0.0;
                              for (std::size_t j = 0; j < d.values().size(); ++j)
                                  s += d.probs()[j] * std::max(d.values()[j], c);
                              return s;
                          },
                      },
                      spec);
}

double exact_expected_max(const Distribution& spec, int n) {
    if (n < 1) throw DomainError("exact_expected_max: n must be >= 1");
    return std::visit(Overloaded{
                          [&](const Uniform01&) { return static_cast<double>(n) / (n + 1.0); },
                          [&](const Exponential& e) {
                              double h = 0.0;
                              for (int j = n; j >= 1; --j) h += 1.0 / j;
                              return h / e.rate;
                          },
                          [&](const DiscreteWeighted& d) {
                              // sum_x x * (F(x)^n - F(x-)^n), written as the tail sum
                              // sum_j (v_j - v_{j-1}) * (1 - F(v_{j-1})^n) to avoid
                              // cancellation when the top atoms are rare.
                              const auto& v = d.values();
                              const auto& p = d.probs();
                              double tail_mass = 0.0;
                              double s = 0.0;
                              for (std::size_t j = v.size() - 1; j >= 1; --j) {
                                  tail_mass += p[j];
                                  const double hit = -std::expm1(n * std::log1p(-std::min(tail_mass, 1.0)));
                                  s += (v[j] - v[j - 1]) * hit;
                              }
                              s += v[0];
                              return s;
                          },
                      },
                      spec);
}

double mean(const Distribution& spec) { return exact_expected_max(spec, 1); }

std::optional<double> top_atom(const Distribution& spec) {
    if (const auto* d = std::get_if<DiscreteWeighted>(&spec)) return d->values().back();
    return std::nullopt;
}

DiscreteWeighted adversarial_instance(AdversarialKind kind, int n, std::optional<double> eps) {
    if (n < 2) throw DomainError("adversarial_instance: n must be >= 2");
    const double nd = n;
    switch (kind) {
    case AdversarialKind::SecretaryLike: {
        const long long low = static_cast<long long>(n) * n * n;
        if (low > 50'000'000) throw DomainError("adversarial_instance: secretary_like n too large");
        std::vector<double> values(static_cast<std::size_t>(low) + 1);
        std::vector<double> probs(values.size());
        const double each = (1.0 - 1.0 / (nd * nd)) / static_cast<double>(low);
        for (long long j = 1; j <= low; ++j) {
            values[static_cast<std::size_t>(j - 1)] = static_cast<double>(j);
            probs[static_cast<std::size_t>(j - 1)] = each;
        }
        values.back() = static_cast<double>(low) * static_cast<double>(low) + 1.0;
        probs.back() = 1.0 / (nd * nd);
        return DiscreteWeighted(std::move(values), std::move(probs));
    }
    case AdversarialKind::ThreePoint: {
        const double root = std::sqrt(nd);
        const double mid = 1.0 / root;
        const double top = 1.0 / (nd * root);
        if (mid + top >= 1.0)
            throw DomainError("adversarial_instance: three_point needs n^-1/2 + n^-3/2 < 1");
        return DiscreteWeighted({0.0, 1.0, root / (std::numbers::e - 2.0)}, {1.0 - mid - top, mid, top});
    }
    case AdversarialKind::RareBernoulli: {
        if (!eps) throw DomainError("adversarial_instance: rare_bernoulli requires eps");
        if (!(*eps > 0.0 && *eps <= 1.0)) throw DomainError("adversarial_instance: eps must lie in (0, 1]");
        const double p = *eps / nd;
        return DiscreteWeighted({0.0, 1.0}, {1.0 - p, p});
    }
    }
    throw DomainError("adversarial_instance: unknown kind");
}

} // namespace prophet
