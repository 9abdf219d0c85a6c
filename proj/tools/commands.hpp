#pragma once

#include "bundlex/bundlex.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bundlex::cli {

enum ExitCode : int { ok = 0, invalid_input = 1, audit_failed = 2, internal_error = 3 };

enum class Format { json, text };

struct RunConfig {
    std::string input;
    std::string output;  // empty: stdout
    std::vector<std::string> priority;
    bool trace = false;
    Format format = Format::json;
};

struct AuditConfig {
    std::string input;
    std::string matching;  // file with a matching; empty means audit the mechanism
    std::vector<std::string> priority;
    bool sp = false;
    std::string domain = "trichotomous";
    bool truncation = false;
    bool obvious = false;
    bool core = false;
    bool strict_acceptability = false;
    std::size_t max_objects = default_enumeration_bound;
    Format format = Format::json;
};

struct GenerateConfig {
    GeneratorConfig gen;
    std::string output;
};

struct BenchConfig {
    std::vector<std::pair<std::size_t, std::size_t>> grid{{5, 20}, {10, 40}, {20, 80}, {30, 120}, {40, 160}, {50, 200}};
    std::uint64_t seed = 1;
    std::size_t repeats = 3;
    double p_attractive = 0.3;
    double p_bearable = 0.3;
};

struct FixtureConfig {
    std::string name;
    bool list = false;
    bool verify = false;
};

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw input_error("cannot write '" + path + "'");
    f << text;
}

inline std::string render_matching_text(const Instance& inst, const Matching& m) {
    std::ostringstream os;
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        os << inst.agent_name(i) << ':';
        for_each_member(m[i], [&](ObjectIndex o) { os << ' ' << inst.object_name(o); });
        os << '\n';
    }
    return os.str();
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ','))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

inline const TrichotomousProfile& require_trichotomous(const Document& doc) {
    if (!doc.trichotomous) throw input_error("this command needs trichotomous preferences");
    return *doc.trichotomous;
}

inline MechanismResult run_mechanism(const Document& doc, const std::vector<std::string>& priority) {
    const auto& prefs = require_trichotomous(doc);
    if (priority.empty()) return run_ir_priority(doc.instance, prefs);
    return run_ir_priority(doc.instance, prefs, priority);
}

inline int cmd_run(const RunConfig& cfg, std::ostream& out) {
    auto doc = read_document(cfg.input);
    auto result = run_mechanism(doc, cfg.priority);
    const auto& inst = doc.instance;
    if (cfg.format == Format::text) {
        std::ostringstream os;
        os << render_matching_text(inst, result.matching);
        if (cfg.trace) {
            for (const auto& r : result.trace.rounds) {
                os << "round " << r.round << ": non-improvable";
                for (auto i : r.non_improvable) os << ' ' << inst.agent_name(i);
                os << '\n';
            }
            os << "flow queries: " << result.trace.flow_queries << '\n';
        }
        emit(cfg.output, os.str(), out);
        return ok;
    }
    Json j;
    j["matching"] = matching_to_json(inst, result.matching);
    if (cfg.trace) j["trace"] = trace_to_json(inst, result.trace);
    emit(cfg.output, j.dump(2) + "\n", out);
    return ok;
}

inline DomainSpec domain_by_name(const std::string& name) {
    if (name == "trichotomous") return DomainSpec::trichotomous();
    if (name == "strongly-trichotomous") return DomainSpec::strongly_trichotomous();
    throw input_error("unknown domain '" + name + "' (expected trichotomous or strongly-trichotomous)");
}

/// Audit report as JSON plus a pass/fail flag.
inline std::pair<Json, bool> audit_report(const Document& doc, const AuditConfig& cfg) {
    const auto& inst = doc.instance;
    if (!doc.marginal) throw input_error("auditing needs preferences");
    const auto& marginal = *doc.marginal;
    Matching mu;
    Json report;
    if (cfg.matching.empty()) {
        mu = run_mechanism(doc, cfg.priority).matching;
        report["subject"] = "mechanism";
    } else {
        mu = matching_from_json(inst, read_json_file(cfg.matching));
        report["subject"] = "matching";
    }
    report["matching"] = matching_to_json(inst, mu);
    bool passed = true;
    const bool enumerable = inst.num_objects() <= cfg.max_objects;

    Json cir;
    auto violation = find_cir_violation(inst, mu, marginal);
    cir["verdict"] = !violation.has_value();
    if (violation) {
        passed = false;
        const auto i = violation->agent;
        auto ext = build_punishing_extension(marginal[i], violation->pivot, inst.quota(i));
        cir["witness"] = Json{{"agent", inst.agent_name(i)},
                              {"pivot", inst.object_name(violation->pivot)},
                              {"extension", extension_to_json(inst, ext)},
                              {"endowment_score", rational_to_string(ext.score(inst.endowment(i)))},
                              {"bundle_score", rational_to_string(ext.score(mu[i]))}};
    }
    report["cir"] = cir;

    Json eff;
    if (!violation && doc.trichotomous) {
        eff["mode"] = "cycle";
        auto c = find_cir_pareto_improving_cycle(inst, mu, *doc.trichotomous);
        eff["verdict"] = !c.has_value();
        if (c) eff["witness"] = cycle_to_json(inst, *c);
    } else if (enumerable) {
        eff["mode"] = "brute";
        auto nu = find_pareto_improvement(inst, mu, marginal, cfg.max_objects);
        eff["verdict"] = !nu.has_value();
        if (nu) eff["witness"] = matching_to_json(inst, *nu);
    } else {
        eff["mode"] = "skipped";
        eff["verdict"] = nullptr;
    }
    if (eff["verdict"] == false) passed = false;
    report["efficiency"] = eff;

    if (cfg.core) {
        if (!enumerable) throw too_large_error("core audit is limited to " + std::to_string(cfg.max_objects) + " objects");
        if (cfg.strict_acceptability && !doc.trichotomous)
            throw input_error("strict acceptability needs trichotomous preferences");
        auto w = cfg.strict_acceptability
                     ? unambiguously_in_weak_core(inst, mu, *doc.trichotomous, true, cfg.max_objects)
                     : unambiguously_in_weak_core(inst, mu, marginal, cfg.max_objects);
        Json core{{"strict_acceptability", cfg.strict_acceptability}, {"verdict", !w.has_value()}};
        if (w) {
            core["witness"] = block_to_json(inst, *w);
            passed = false;
        }
        report["core"] = core;
    }

    auto mechanism_only = [&](const char* what) {
        if (!cfg.matching.empty()) throw input_error(std::string(what) + " audits apply to the mechanism, not to a fixed matching");
        require_trichotomous(doc);
        if (!cfg.priority.empty()) throw input_error(std::string(what) + " audits use the instance's own priority order");
    };
    if (cfg.sp) {
        mechanism_only("strategy-proofness");
        auto w = check_strategy_proofness(inst, *doc.trichotomous, domain_by_name(cfg.domain));
        Json sp{{"domain", cfg.domain}, {"verdict", !w.has_value()}};
        if (w) {
            sp["witness"] = manipulation_to_json(inst, *w);
            passed = false;
        }
        report["strategy_proofness"] = sp;
    }
    if (cfg.truncation) {
        mechanism_only("truncation-proofness");
        auto w = check_truncation_proofness(inst, *doc.trichotomous);
        Json tp{{"verdict", !w.has_value()}};
        if (w) {
            tp["witness"] = manipulation_to_json(inst, *w);
            passed = false;
        }
        report["truncation_proofness"] = tp;
    }
    if (cfg.obvious) {
        mechanism_only("obvious-manipulability");
        auto w = check_obvious_manipulability(inst, *doc.trichotomous);
        Json om{{"verdict", !w.has_value()}};
        if (w) {
            om["witness"] = Json{{"agent", inst.agent_name(w->agent)},
                                 {"case", to_string(w->kind)},
                                 {"misreport", trichotomous_to_json(inst, w->misreport)},
                                 {"truthful_bundle", set_to_json(inst, w->truthful_bundle)},
                                 {"misreport_bundle", set_to_json(inst, w->misreport_bundle)}};
            passed = false;
        }
        report["obvious_manipulability"] = om;
    }
    report["passed"] = passed;
    return {report, passed};
}

inline std::string verdict_word(const Json& v) {
    if (v.is_null()) return "skipped";
    return v.get<bool>() ? "ok" : "FAIL";
}

inline std::string render_report_text(const Json& r) {
    std::ostringstream os;
    os << "subject: " << r["subject"].get<std::string>() << '\n';
    os << "cir: " << verdict_word(r["cir"]["verdict"]);
    if (r["cir"].contains("witness"))
        os << " (agent " << r["cir"]["witness"]["agent"].get<std::string>() << ", pivot "
           << r["cir"]["witness"]["pivot"].get<std::string>() << ')';
    os << '\n';
    os << "efficiency (" << r["efficiency"]["mode"].get<std::string>()
       << "): " << verdict_word(r["efficiency"]["verdict"]) << '\n';
    for (const char* key : {"core", "strategy_proofness", "truncation_proofness", "obvious_manipulability"}) {
        if (!r.contains(key)) continue;
        os << key << ": " << verdict_word(r[key]["verdict"]);
        if (r[key].contains("witness") && r[key]["witness"].contains("agent"))
            os << " (agent " << r[key]["witness"]["agent"].get<std::string>() << ')';
        if (r[key].contains("witness") && r[key]["witness"].contains("coalition"))
            os << " (coalition " << r[key]["witness"]["coalition"].dump() << ')';
        os << '\n';
    }
    if (r.contains("strategy_proofness") && r["strategy_proofness"]["verdict"] == true)
        os << "no manipulation found\n";
    os << (r["passed"].get<bool>() ? "all checks passed" : "audit failed") << '\n';
    return os.str();
}

inline int cmd_audit(const AuditConfig& cfg, std::ostream& out) {
    auto doc = read_document(cfg.input);
    auto [report, passed] = audit_report(doc, cfg);
    out << (cfg.format == Format::json ? report.dump(2) + "\n" : render_report_text(report));
    return passed ? ok : audit_failed;
}

inline int cmd_generate(const GenerateConfig& cfg, std::ostream& out) {
    auto doc = generate_document(cfg.gen);
    emit(cfg.output, document_to_json(doc).dump(2) + "\n", out);
    return ok;
}

inline int cmd_bench(const BenchConfig& cfg, std::ostream& out) {
    if (cfg.repeats == 0) throw input_error("repeats must be positive");
    out << "agents,objects,seed,rounds,flow_queries,ms\n";
    for (const auto& [n, m] : cfg.grid) {
        for (std::size_t r = 0; r < cfg.repeats; ++r) {
            GeneratorConfig g;
            g.agents = n;
            g.total_objects = m;
            g.seed = cfg.seed + r;
            g.p_attractive = cfg.p_attractive;
            g.p_bearable = cfg.p_bearable;
            auto doc = generate_document(g);
            auto t0 = std::chrono::steady_clock::now();
            auto result = run_ir_priority(doc.instance, *doc.trichotomous);
            double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            out << n << ',' << m << ',' << g.seed << ',' << result.trace.rounds.size() - 1 << ','
                << result.trace.flow_queries << ',' << ms << '\n';
        }
    }
    return ok;
}

inline Json fixture_expected(const Fixture& f) {
    const auto& inst = f.instance;
    Json claims = Json::array();
    for (const auto& c : f.claims) {
        Json jc{{"label", c.label}, {"matching", matching_to_json(inst, c.matching)}};
        if (c.cir) jc["cir"] = *c.cir;
        if (c.efficient) jc["efficient"] = *c.efficient;
        if (c.in_weak_core) {
            jc["in_weak_core"] = *c.in_weak_core;
            jc["strict_acceptability"] = c.strict_acceptability;
        }
        claims.push_back(std::move(jc));
    }
    Json e;
    e["claims"] = claims;
    if (f.efficient_ir_set) {
        Json set = Json::array();
        for (const auto& m : *f.efficient_ir_set) set.push_back(matching_to_json(inst, m));
        e["efficient_ir_set"] = set;
    }
    if (f.cir_count) e["cir_count"] = *f.cir_count;
    if (f.mechanism_output) e["mechanism_output"] = matching_to_json(inst, *f.mechanism_output);
    return e;
}

/// Recomputes every expected artifact of a fixture; returns the observations and whether all match.
inline std::pair<Json, bool> verify_fixture(const Fixture& f) {
    const auto& inst = f.instance;
    Json obs = Json::array();
    bool all = true;
    auto record = [&](const std::string& what, const Json& expected, const Json& observed) {
        bool match = expected == observed;
        all = all && match;
        obs.push_back(Json{{"check", what}, {"expected", expected}, {"observed", observed}, {"match", match}});
    };
    for (const auto& c : f.claims) {
        if (c.cir) record(c.label + ".cir", *c.cir, is_component_wise_IR(inst, c.matching, f.marginal));
        if (c.efficient)
            record(c.label + ".efficient", *c.efficient,
                   unambiguously_efficient(inst, c.matching, f.marginal, f.enumeration_bound));
        if (c.in_weak_core) {
            bool in = c.strict_acceptability
                          ? !unambiguously_in_weak_core(inst, c.matching, *f.trichotomous, true, f.enumeration_bound)
                          : !unambiguously_in_weak_core(inst, c.matching, f.marginal, f.enumeration_bound);
            record(c.label + ".in_weak_core", *c.in_weak_core, in);
        }
    }
    if (f.efficient_ir_set) {
        Json expected = Json::array();
        Json observed = Json::array();
        for (const auto& m : *f.efficient_ir_set) expected.push_back(matching_to_json(inst, m));
        for (const auto& m : efficient_ir_matchings(inst, f.marginal, f.enumeration_bound))
            observed.push_back(matching_to_json(inst, m));
        record("efficient_ir_set", expected, observed);
    }
    if (f.cir_count) {
        std::size_t count = 0;
        for_each_matching(
            inst, [&](const Matching& m) { count += is_component_wise_IR(inst, m, f.marginal); }, f.enumeration_bound);
        record("cir_count", *f.cir_count, count);
    }
    if (f.mechanism_output)
        record("mechanism_output", matching_to_json(inst, *f.mechanism_output),
               matching_to_json(inst, run_ir_priority(inst, *f.trichotomous).matching));
    return {obs, all};
}

inline int cmd_fixture(const FixtureConfig& cfg, std::ostream& out) {
    if (cfg.list) {
        for (const auto& n : fixture_names()) out << n << '\n';
        return ok;
    }
    auto f = load_fixture(cfg.name);
    Document doc{f.instance, f.marginal, f.trichotomous, Json{{"fixture", f.name}}};
    Json j;
    j["name"] = f.name;
    j["description"] = f.description;
    j["instance"] = document_to_json(doc);
    j["expected"] = fixture_expected(f);
    bool passed = true;
    if (cfg.verify) {
        auto [obs, all] = verify_fixture(f);
        j["verification"] = obs;
        passed = all || !f.asserted;
    }
    out << j.dump(2) << '\n';
    return passed ? ok : audit_failed;
}

/// Maps library exceptions to exit codes, printing the message to `err`.
template <typename F>
int guarded(F&& f, std::ostream& err) {
    try {
        return f();
    } catch (const invariant_error& e) {
        err << "internal invariant violated: " << e.what() << '\n';
        return internal_error;
    } catch (const too_large_error& e) {
        err << "instance too large: " << e.what() << '\n';
        return invalid_input;
    } catch (const input_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return invalid_input;
    } catch (const Json::exception& e) {
        err << "invalid input: " << e.what() << '\n';
        return invalid_input;
    }
}

}  // namespace bundlex::cli
