#include "prophet/json_io.hpp"

#include <cmath>
#include <set>
#include <string>

#include "prophet/errors.hpp"

namespace prophet {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

void require_object(const Json& j, const char* what) {
    if (!j.is_object()) throw DomainError(std::string(what) + ": expected a JSON object");
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw DomainError(where + "." + key + ": unknown field");
}

double number_field(const Json& j, const std::string& key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw DomainError(where + "." + key + ": expected a number");
    return v.get<double>();
}

std::optional<double> optional_number(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return number_field(j, key, where);
}

// JSON has no infinities; undefined intervals are written as null.
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

int require_n(std::optional<int> n, const std::string& kind) {
    if (!n) throw DomainError("dist.kind: " + kind + " needs n");
    return *n;
}

} // namespace

Json to_json(const Distribution& spec) {
    return std::visit(Overloaded{
                          [](const Uniform01&) { return Json{{"kind", "uniform01"}}; },
                          [](const Exponential& e) { return Json{{"kind", "exponential"}, {"rate", e.rate}}; },
                          [](const DiscreteWeighted& d) {
                              return Json{{"kind", "discrete"}, {"values", d.values()}, {"probs", d.probs()}};
                          },
                      },
                      spec);
}

Distribution distribution_from_json(const Json& j, std::optional<int> n) {
    require_object(j, "dist");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw DomainError("dist.kind: missing or not a string");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "uniform01") {
        reject_unknown(j, {"kind"}, "dist");
        return Uniform01{};
    }
    if (kind == "exponential") {
        reject_unknown(j, {"kind", "rate"}, "dist");
        const double rate = optional_number(j, "rate", "dist").value_or(1.0);
        if (!(rate > 0.0)) throw DomainError("dist.rate: must be positive");
        return Exponential{rate};
    }
    if (kind == "discrete") {
        reject_unknown(j, {"kind", "values", "probs"}, "dist");
        for (const char* key : {"values", "probs"}) {
            if (!j.contains(key) || !j.at(key).is_array())
                throw DomainError(std::string("dist.") + key + ": expected an array of numbers");
            for (const auto& x : j.at(key))
                if (!x.is_number()) throw DomainError(std::string("dist.") + key + ": expected an array of numbers");
        }
        return DiscreteWeighted(j.at("values").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>());
    }
    if (kind == "secretary_like") {
        reject_unknown(j, {"kind"}, "dist");
        return adversarial_instance(AdversarialKind::SecretaryLike, require_n(n, kind));
    }
    if (kind == "three_point") {
        reject_unknown(j, {"kind"}, "dist");
        return adversarial_instance(AdversarialKind::ThreePoint, require_n(n, kind));
    }
    if (kind == "rare_bernoulli") {
        reject_unknown(j, {"kind", "eps"}, "dist");
        return adversarial_instance(AdversarialKind::RareBernoulli, require_n(n, kind),
                                    optional_number(j, "eps", "dist").value_or(1.0));
    }
    throw DomainError("dist.kind: unknown distribution '" + kind + "'");
}

Json to_json(const RuleSpec& spec) {
    Json j{{"rule", std::string(rule_name(spec))}};
    std::visit(Overloaded{
                   [&](const SecretarySpec& s) { j["cutoff"] = s.cutoff; },
                   [&](const SecretarySamplesSpec& s) { j["gamma"] = s.gamma; },
                   [](const SingleThresholdSpec&) {},
                   [](const FreshSamplesSpec&) {},
                   [&](const QuantileScheduleSpec& s) {
                       j["source"] = s.source == QuantileSourceKind::Exact ? "exact" : "empirical";
                       j["delta"] = s.delta;
                       if (s.beta) j["beta"] = *s.beta;
                       j["calibrate"] = s.calibrate;
                       j["step"] = s.step;
                       if (s.samples) j["samples"] = *s.samples;
                       j["sample_factor"] = s.sample_factor;
                   },
                   [](const DpSpec&) {},
                   [&](const ConstantAlphaSpec& s) {
                       if (s.alpha) j["alpha"] = *s.alpha;
                       if (s.high_value) j["high_value"] = *s.high_value;
                   },
               },
               spec);
    return j;
}

RuleSpec rule_from_json(const Json& j) {
    require_object(j, "rule");
    if (!j.contains("rule") || !j.at("rule").is_string()) throw DomainError("rule.rule: missing or not a string");
    const auto name = j.at("rule").get<std::string>();
    if (name == "secretary") {
        reject_unknown(j, {"rule", "cutoff"}, "rule");
        SecretarySpec s;
        s.cutoff = optional_number(j, "cutoff", "rule").value_or(s.cutoff);
        return s;
    }
    if (name == "secretary_samples") {
        reject_unknown(j, {"rule", "gamma"}, "rule");
        return SecretarySamplesSpec{optional_number(j, "gamma", "rule").value_or(0.0)};
    }
    if (name == "single_threshold") {
        reject_unknown(j, {"rule"}, "rule");
        return SingleThresholdSpec{};
    }
    if (name == "fresh_samples") {
        reject_unknown(j, {"rule"}, "rule");
        return FreshSamplesSpec{};
    }
    if (name == "quantile_schedule") {
        reject_unknown(j, {"rule", "source", "delta", "beta", "calibrate", "step", "samples", "sample_factor"}, "rule");
        QuantileScheduleSpec s;
        if (j.contains("source")) {
            const auto& src = j.at("source");
            if (src == "exact")
                s.source = QuantileSourceKind::Exact;
            else if (src == "empirical")
                s.source = QuantileSourceKind::Empirical;
            else
                throw DomainError("rule.source: expected \"exact\" or \"empirical\"");
        }
        s.delta = optional_number(j, "delta", "rule").value_or(s.delta);
        s.beta = optional_number(j, "beta", "rule");
        if (j.contains("calibrate")) {
            if (!j.at("calibrate").is_boolean()) throw DomainError("rule.calibrate: expected a boolean");
            s.calibrate = j.at("calibrate").get<bool>();
        }
        s.step = optional_number(j, "step", "rule").value_or(s.step);
        if (const auto m = optional_number(j, "samples", "rule")) {
            if (!(*m >= 1.0)) throw DomainError("rule.samples: must be >= 1");
            s.samples = static_cast<std::size_t>(*m);
        }
        s.sample_factor = optional_number(j, "sample_factor", "rule").value_or(s.sample_factor);
        return s;
    }
    if (name == "dp") {
        reject_unknown(j, {"rule"}, "rule");
        return DpSpec{};
    }
    if (name == "constant_alpha") {
        reject_unknown(j, {"rule", "alpha", "high_value"}, "rule");
        return ConstantAlphaSpec{optional_number(j, "alpha", "rule"), optional_number(j, "high_value", "rule")};
    }
    throw DomainError("rule.rule: unknown rule '" + name + "'");
}

Json to_json(const EvalReport& r) {
    Json j{
        {"trials", r.trials},
        {"n", r.n},
        {"k", r.k},
        {"mean_reward", r.mean_reward},
        {"mean_max", r.mean_max},
        {"ratio", r.ratio},
        {"ci_halfwidth", finite_or_null(r.ci_halfwidth)},
        {"reward_std_error", finite_or_null(r.reward_std_error)},
        {"stop_probability", r.stop_probability},
        {"hit_max_probability", r.hit_max_probability},
        {"hit_combined_max_probability", r.hit_combined_max_probability},
        {"exact_max", r.exact_max ? Json(*r.exact_max) : Json(nullptr)},
        {"ratio_vs_exact", r.ratio_vs_exact ? Json(*r.ratio_vs_exact) : Json(nullptr)},
        {"stop_histogram", r.stop_histogram},
    };
    return j;
}

Json to_json(const ExactValue& v) {
    return Json{{"value", v.value}, {"method", std::string(method_name(v.method))}, {"error_bound", v.error_bound}};
}

} // namespace prophet
