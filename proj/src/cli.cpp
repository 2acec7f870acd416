#include "prophet/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "prophet/distributions.hpp"
#include "prophet/errors.hpp"
#include "prophet/evaluator.hpp"
#include "prophet/json_io.hpp"
#include "prophet/oracles.hpp"
#include "prophet/schedule.hpp"

namespace prophet {

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
    std::string config;
};

struct RuleOpts {
    std::string rule = "fresh_samples";
    std::optional<double> cutoff;
    std::optional<double> gamma;
    std::string source = "exact";
    std::optional<double> delta;
    std::optional<double> beta;
    bool calibrate = false;
    std::optional<double> step;
    std::optional<std::int64_t> samples;
    std::optional<double> sample_factor;
    std::optional<double> alpha;
    std::optional<double> high_value;
};

struct DistOpts {
    std::string dist = "uniform01";
    double rate = 1.0;
    double eps = 1.0;
};

struct SimOpts {
    int n = 0;
    std::int64_t trials = 10000;
    bool json = false;
    std::vector<int> ns;
    std::vector<double> gammas;
    std::vector<std::string> rules;
};

struct ScheduleOpts {
    int n = 0;
    std::optional<double> beta;
    bool calibrate = false;
    double step = kDefaultOdeStep;
};

struct OracleOpts {
    std::string name;
    std::optional<int> n;
    std::optional<double> gamma;
    int grid = 10000;
    double span = 10.0;
};

struct MedianOpts {
    int n = 0;
    std::int64_t m = 0;
    std::int64_t trials = 10000;
};

// Raised for invalid flag values and config fields; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string stamp(std::uint64_t seed, const Json& resolved) {
    std::ostringstream s;
    s << "# prophet-sim version=" << kVersion << " seed=" << seed << " config_hash=" << std::hex
      << std::setw(16) << std::setfill('0') << fnv1a(resolved.dump()) << '\n';
    return s.str();
}

std::optional<Json> parse_inline_json(const std::string& text) {
    if (text.empty() || text.front() != '{') return std::nullopt;
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("invalid inline JSON: ") + e.what());
    }
}

RuleSpec build_rule(const RuleOpts& o, const std::string& name) {
    if (auto j = parse_inline_json(name)) return rule_from_json(*j);
    Json j{{"rule", name}};
    auto put = [&](const char* key, const auto& v) {
        if (v) j[key] = *v;
    };
    if (name == "secretary") put("cutoff", o.cutoff);
    if (name == "secretary_samples") put("gamma", o.gamma);
    if (name == "quantile_schedule") {
        j["source"] = o.source;
        put("delta", o.delta);
        put("beta", o.beta);
        j["calibrate"] = o.calibrate;
        put("step", o.step);
        put("samples", o.samples);
        put("sample_factor", o.sample_factor);
    }
    if (name == "constant_alpha") {
        put("alpha", o.alpha);
        put("high_value", o.high_value);
    }
    return rule_from_json(j);
}

std::string dist_label(const DistOpts& o) {
    if (auto j = parse_inline_json(o.dist)) return j->value("kind", "discrete");
    return o.dist;
}

Distribution build_dist(const DistOpts& o, int n) {
    if (auto j = parse_inline_json(o.dist)) return distribution_from_json(*j, n);
    Json j{{"kind", o.dist}};
    if (o.dist == "exponential") j["rate"] = o.rate;
    if (o.dist == "rare_bernoulli") j["eps"] = o.eps;
    return distribution_from_json(j, n);
}

void add_rule_options(CLI::App* sub, RuleOpts& r) {
    sub->add_option("--rule", r.rule, "secretary|secretary_samples|single_threshold|fresh_samples|"
                                      "quantile_schedule|dp|constant_alpha, or a RuleSpec JSON object");
    sub->add_option("--cutoff", r.cutoff, "secretary: rejected fraction (default 1/e)");
    sub->add_option("--gamma", r.gamma, "secretary_samples: samples per value (gamma*n must be integral)");
    sub->add_option("--source", r.source, "quantile_schedule: exact|empirical")
        ->check(CLI::IsMember({"exact", "empirical"}));
    sub->add_option("--delta", r.delta, "quantile_schedule: skip until eps_i >= delta/n (default 0.1)");
    sub->add_option("--beta", r.beta, "quantile_schedule: ODE constant (default 1.3414)");
    sub->add_flag("--calibrate", r.calibrate, "quantile_schedule: calibrate beta so that y(1) = 0");
    sub->add_option("--step", r.step, "quantile_schedule: RK4 step (default 1e-5)");
    sub->add_option("--samples", r.samples, "quantile_schedule: empirical sample count m")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sample-factor", r.sample_factor, "quantile_schedule: m = factor * n^2 (default 10)");
    sub->add_option("--alpha", r.alpha, "constant_alpha: middle-atom acceptance probability");
    sub->add_option("--high-value", r.high_value, "constant_alpha: top atom (default: largest atom)");
}

void add_dist_options(CLI::App* sub, DistOpts& d) {
    sub->add_option("--dist", d.dist, "uniform01|exponential|secretary_like|three_point|rare_bernoulli, "
                                      "or a distribution JSON object");
    sub->add_option("--rate", d.rate, "exponential rate")->check(CLI::PositiveNumber);
    sub->add_option("--eps", d.eps, "rare_bernoulli mass parameter")->check(CLI::Range(0.0, 1.0));
}

std::string csv_header() { return "rule,dist,n,k,trials,seed,mean_reward,mean_max,ratio,ci_halfwidth,stop_prob\n"; }

std::string csv_row(std::string_view rule, std::string_view dist, const EvalReport& r, std::uint64_t seed) {
    std::ostringstream s;
    s << rule << ',' << dist << ',' << r.n << ',' << r.k << ',' << r.trials << ',' << seed << ','
      << format_number(r.mean_reward) << ',' << format_number(r.mean_max) << ',' << format_number(r.ratio) << ','
      << format_number(r.ci_halfwidth) << ',' << format_number(r.stop_probability) << '\n';
    return s.str();
}

Json rule_opts_json(const RuleOpts& r) {
    Json j{{"rule", r.rule}, {"source", r.source}, {"calibrate", r.calibrate}};
    auto put = [&](const char* key, const auto& v) {
        if (v) j[key] = *v;
    };
    put("cutoff", r.cutoff);
    put("gamma", r.gamma);
    put("delta", r.delta);
    put("beta", r.beta);
    put("step", r.step);
    put("samples", r.samples);
    put("sample_factor", r.sample_factor);
    put("alpha", r.alpha);
    put("high_value", r.high_value);
    return j;
}

Json dist_opts_json(const DistOpts& d) { return Json{{"dist", d.dist}, {"rate", d.rate}, {"eps", d.eps}}; }

// Appends config-file values for every flag not already on the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App& app) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    Json cfg;
    try {
        cfg = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config: invalid JSON in '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config: top level must be an object");

    CLI::App* sub = nullptr;
    for (const auto& a : args) {
        if (a.empty() || a.front() == '-') continue;
        for (auto* s : app.get_subcommands({})) {
            if (s->get_name() == a) {
                sub = s;
                break;
            }
        }
        if (sub) break;
    }

    auto on_command_line = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };

    std::vector<std::string> merged = args;
    for (const auto& [key, value] : cfg.items()) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        if (name == "config") continue;
        const std::string flag = "--" + name;
        const bool known = app.get_option_no_throw(flag) != nullptr ||
                           (sub != nullptr && sub->get_option_no_throw(flag) != nullptr);
        if (!known) throw ConfigError("config: unknown field '" + key + "'");
        if (on_command_line(flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) merged.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& x : value) {
                if (!joined.empty()) joined += ',';
                joined += x.is_string() ? x.get<std::string>() : x.dump();
            }
            merged.push_back(flag);
            merged.push_back(joined);
        } else if (value.is_string()) {
            merged.push_back(flag);
            merged.push_back(value.get<std::string>());
        } else if (value.is_number() || value.is_object()) {
            merged.push_back(flag);
            merged.push_back(value.dump());
        } else {
            throw ConfigError("config: field '" + key + "' has an unsupported type");
        }
    }
    return merged;
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("--out: cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

} // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sample-based prophet inequality simulator", "prophet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    GlobalOpts g;
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--workers", g.workers, "worker threads for Monte Carlo")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "write the artifact here instead of stdout");
    app.add_option("--config", g.config, "JSON file whose keys mirror the flags (flags win)");

    RuleOpts rule;
    DistOpts dist;
    SimOpts sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation of one rule");
    add_rule_options(simulate, rule);
    add_dist_options(simulate, dist);
    simulate->add_option("--n", sim.n, "number of values")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--trials", sim.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    simulate->add_flag("--json", sim.json, "emit the full report as JSON instead of a CSV row");

    auto* sweep = app.add_subcommand("sweep", "one CSV row per configuration along one axis");
    add_rule_options(sweep, rule);
    add_dist_options(sweep, dist);
    sweep->add_option("--n", sim.n, "number of values (fixed axes)")->check(CLI::PositiveNumber);
    sweep->add_option("--trials", sim.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    sweep->add_option("--ns", sim.ns, "axis: list of n")->delimiter(',')->check(CLI::PositiveNumber);
    sweep->add_option("--gammas", sim.gammas, "axis: list of gamma (secretary_samples)")->delimiter(',');
    sweep->add_option("--rules", sim.rules, "axis: list of rule names")->delimiter(',');

    ScheduleOpts sched;
    auto* schedule = app.add_subcommand("schedule", "acceptance-probability schedule as CSV");
    schedule->add_option("--n", sched.n, "number of values")->required()->check(CLI::Range(2, 100000000));
    schedule->add_option("--beta", sched.beta, "ODE constant (default 1.3414)");
    schedule->add_flag("--calibrate", sched.calibrate, "calibrate beta so that y(1) = 0");
    schedule->add_option("--step", sched.step, "RK4 step");

    OracleOpts orc;
    DistOpts orc_dist;
    auto* oracle = app.add_subcommand("oracle", "print a reference value as JSON");
    oracle->add_option("--name", orc.name, "oracle name")
        ->required()
        ->check(CLI::IsMember({"harmonic", "single_threshold_stop_prob", "single_threshold_exp_value",
                               "fresh_samples_guarantee", "b_gamma", "dp_value", "three_point_best_ratio",
                               "expected_max_via_rq", "exact_expected_max", "calibrate_beta"}));
    oracle->add_option("--n", orc.n, "n")->check(CLI::PositiveNumber);
    oracle->add_option("--gamma", orc.gamma, "gamma (b_gamma)")->check(CLI::NonNegativeNumber);
    oracle->add_option("--grid", orc.grid, "grid points (three_point_best_ratio)")->check(CLI::PositiveNumber);
    oracle->add_option("--span", orc.span, "grid span of alpha*sqrt(n)")->check(CLI::PositiveNumber);
    add_dist_options(oracle, orc_dist);

    MedianOpts med;
    auto* median = app.add_subcommand("median-experiment", "concentration of the sample median");
    median->add_option("--n", med.n, "band is 1/n")->required()->check(CLI::PositiveNumber);
    median->add_option("--m", med.m, "samples per median (bumped to odd)")->required()->check(CLI::PositiveNumber);
    median->add_option("--trials", med.trials, "repetitions")->check(CLI::PositiveNumber);

    for (auto* s : {simulate, sweep, schedule, oracle, median}) s->fallthrough();

    try {
        auto merged = merge_config(args, app);
        std::reverse(merged.begin(), merged.end());
        app.parse(merged);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    // Specs are validated before any computation so that bad input is a
    // usage error rather than a computation error.
    try {
        if (simulate->parsed() || sweep->parsed()) {
            const bool is_sweep = sweep->parsed();
            const int axes = !sim.ns.empty() + !sim.gammas.empty() + !sim.rules.empty();
            if (is_sweep && axes != 1) throw ConfigError("sweep: give exactly one of --ns, --gammas, --rules");
            if (is_sweep && sim.ns.empty() && sim.n < 1) throw ConfigError("sweep: --n is required unless --ns is the axis");
            if (is_sweep && !sim.gammas.empty() && rule.rule != "secretary_samples")
                throw ConfigError("sweep: --gammas requires --rule secretary_samples");

            struct Job {
                std::string rule_name;
                RuleSpec rule;
                Distribution dist;
                int n;
            };
            std::vector<Job> jobs;
            auto add_job = [&](const std::string& rule_name, const RuleOpts& opts, int n) {
                RuleSpec spec = build_rule(opts, rule_name);
                jobs.push_back({std::string(prophet::rule_name(spec)), spec, build_dist(dist, n), n});
            };
            if (!is_sweep) {
                add_job(rule.rule, rule, sim.n);
            } else if (!sim.ns.empty()) {
                for (int n : sim.ns) add_job(rule.rule, rule, n);
            } else if (!sim.gammas.empty()) {
                for (double gm : sim.gammas) {
                    RuleOpts r = rule;
                    r.gamma = gm;
                    add_job(rule.rule, r, sim.n);
                }
            } else {
                for (const auto& name : sim.rules) add_job(name, rule, sim.n);
            }
            for (const auto& job : jobs) RulePlan(job.rule, job.dist, job.n);  // validation only

            Json resolved{{"command", is_sweep ? "sweep" : "simulate"}, {"rule", rule_opts_json(rule)},
                          {"dist", dist_opts_json(dist)}, {"n", sim.n}, {"trials", sim.trials},
                          {"ns", sim.ns}, {"gammas", sim.gammas}, {"rules", sim.rules}, {"json", sim.json}};
            Output sink(g.out, out);
            auto& os = sink.stream();
            os << stamp(g.seed, resolved);
            if (sim.json && !is_sweep) {
                const auto& job = jobs.front();
                const auto report = evaluate({job.rule, job.dist, job.n, sim.trials, g.seed, g.workers});
                Json j = to_json(report);
                j["rule"] = to_json(job.rule);
                j["dist"] = to_json(job.dist);
                j["seed"] = g.seed;
                os << j.dump(2) << '\n';
            } else {
                os << csv_header();
                for (const auto& job : jobs) {
                    const auto report = evaluate({job.rule, job.dist, job.n, sim.trials, g.seed, g.workers});
                    os << csv_row(job.rule_name, dist_label(dist), report, g.seed);
                }
            }
            return kExitOk;
        }

        if (schedule->parsed()) {
            if (!(sched.step > 0.0 && sched.step <= 1e-3)) throw ConfigError("--step: must lie in (0, 1e-3]");
            const double beta = sched.calibrate ? calibrate_beta(1e-9, sched.step) : sched.beta.value_or(kHillKertzBeta);
            if (!(beta > 1.0 && beta < 2.0)) throw ConfigError("--beta: must lie in (1, 2)");
            const auto s = quantile_schedule(sched.n, solve_hill_kertz(beta, sched.step));
            Json resolved{{"command", "schedule"}, {"n", sched.n}, {"beta", beta}, {"step", sched.step}};
            Output sink(g.out, out);
            auto& os = sink.stream();
            os << stamp(g.seed, resolved);
            os << "i,eps_i,threshold_quantile\n";
            for (int i = 1; i <= sched.n; ++i)
                os << i << ',' << format_number(s.eps[static_cast<std::size_t>(i)]) << ','
                   << format_number(s.threshold_quantile(i)) << '\n';
            return kExitOk;
        }

        if (oracle->parsed()) {
            Json params = Json::object();
            auto need_n = [&](int min) {
                if (!orc.n) throw ConfigError("oracle " + orc.name + ": --n is required");
                if (*orc.n < min) throw ConfigError("--n: must be >= " + std::to_string(min));
                params["n"] = *orc.n;
                return *orc.n;
            };
            auto with_dist = [&](int n) {
                params["dist"] = dist_label(orc_dist);
                if (orc_dist.dist == "exponential") params["rate"] = orc_dist.rate;
                return build_dist(orc_dist, n);
            };
            Json result{{"name", orc.name}};
            ExactValue v;
            if (orc.name == "harmonic") {
                v = harmonic(need_n(1));
            } else if (orc.name == "single_threshold_stop_prob") {
                const int n = need_n(2);
                v = single_threshold_stop_prob(n);
                result["exact"] = single_threshold_stop_prob_exact(n).str();
            } else if (orc.name == "single_threshold_exp_value") {
                v = single_threshold_exp_value(need_n(2));
            } else if (orc.name == "fresh_samples_guarantee") {
                v = fresh_samples_guarantee(need_n(1));
            } else if (orc.name == "b_gamma") {
                if (!orc.gamma) throw ConfigError("oracle b_gamma: --gamma is required");
                params["gamma"] = *orc.gamma;
                v = b_gamma(*orc.gamma);
            } else if (orc.name == "dp_value") {
                const int n = need_n(1);
                v = dp_value(with_dist(n), n);
            } else if (orc.name == "exact_expected_max") {
                const int n = need_n(1);
                v = {exact_expected_max(with_dist(n), n), OracleMethod::ClosedForm};
            } else if (orc.name == "expected_max_via_rq") {
                const int n = need_n(2);
                v = expected_max_via_rq(with_dist(n), n);
            } else if (orc.name == "three_point_best_ratio") {
                const int n = need_n(4);
                params["grid"] = orc.grid;
                params["span"] = orc.span;
                const auto best = three_point_best_ratio(n, orc.grid, orc.span);
                v = {best.ratio_star, OracleMethod::GridSearch};
                result["alpha_star"] = best.alpha_star;
            } else if (orc.name == "calibrate_beta") {
                v = {calibrate_beta(1e-9), OracleMethod::GridSearch};
            }
            result["params"] = params;
            result["value"] = v.value;
            result["method"] = std::string(method_name(v.method));
            if (v.error_bound > 0.0) result["error_bound"] = v.error_bound;
            Output sink(g.out, out);
            auto& os = sink.stream();
            os << stamp(g.seed, Json{{"command", "oracle"}, {"name", orc.name}, {"params", params}});
            os << result.dump(2) << '\n';
            return kExitOk;
        }

        if (median->parsed()) {
            const auto est = median_experiment(med.n, med.m, med.trials, g.seed, g.workers);
            const std::int64_t m_used = med.m % 2 == 0 ? med.m + 1 : med.m;
            Output sink(g.out, out);
            auto& os = sink.stream();
            os << stamp(g.seed, Json{{"command", "median-experiment"}, {"n", med.n}, {"m", med.m}, {"trials", med.trials}});
            os << "n,m,trials,seed,estimate,std_error\n";
            os << med.n << ',' << m_used << ',' << med.trials << ',' << g.seed << ',' << format_number(est.estimate)
               << ',' << format_number(est.std_error) << '\n';
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: invalid configuration: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }
    err << app.help();
    return kExitUsage;
}

} // namespace prophet
