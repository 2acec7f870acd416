#pragma once

#include <optional>

#include "json.hpp"
#include "prophet/distributions.hpp"
#include "prophet/evaluator.hpp"
#include "prophet/oracles.hpp"
#include "prophet/rules.hpp"

namespace prophet {

using Json = nlohmann::json;

/// {"kind": "uniform01"} | {"kind": "exponential", "rate": r} |
/// {"kind": "discrete", "values": [...], "probs": [...]}.
Json to_json(const Distribution& spec);

/// Also accepts the adversarial kinds "secretary_like", "three_point" and
/// "rare_bernoulli" (with "eps"); those need n. Throws DomainError naming the
/// offending field.
Distribution distribution_from_json(const Json& j, std::optional<int> n = std::nullopt);

/// {"rule": name, params...}.
Json to_json(const RuleSpec& spec);
RuleSpec rule_from_json(const Json& j);

Json to_json(const EvalReport& report);
Json to_json(const ExactValue& value);

} // namespace prophet
