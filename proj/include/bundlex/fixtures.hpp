#pragma once

#include "bundlex/model.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace bundlex {

/// A property asserted for one specific matching of a fixture.
struct MatchingClaim {
    std::string label;
    Matching matching;
    std::optional<bool> cir;
    std::optional<bool> efficient;
    std::optional<bool> in_weak_core;
    bool strict_acceptability = false;
};

struct Fixture {
    std::string name;
    std::string description;
    Instance instance;
    MarginalProfile marginal;
    std::optional<TrichotomousProfile> trichotomous;
    std::vector<MatchingClaim> claims;
    std::optional<std::vector<Matching>> efficient_ir_set;  // exact set, canonical order
    std::optional<std::size_t> cir_count;
    std::optional<Matching> mechanism_output;
    std::size_t enumeration_bound = 10;
    bool asserted = true;  // false: profile needed index repairs, kept out of hard checks
};

namespace detail {

struct FixtureBuilder {
    Instance inst;

    FixtureBuilder(std::vector<std::string> agents, std::vector<std::pair<std::string, std::vector<std::string>>> own) {
        RawInstance raw;
        raw.agents = std::move(agents);
        for (auto& [agent, objects] : own) {
            raw.objects.insert(raw.objects.end(), objects.begin(), objects.end());
            raw.endowments[agent] = objects;
        }
        inst = validate_instance(raw);
    }

    ObjectSet set(const std::vector<std::string>& names) const { return inst.objects_named(names); }

    TrichotomousPreference tri(const std::vector<std::string>& a, const std::vector<std::string>& b) const {
        return {set(a), set(b)};
    }

    /// Listed classes first, every unlisted object in one final class.
    MarginalPreference classes(const std::vector<std::vector<std::string>>& listed) const {
        std::vector<ObjectSet> cls;
        ObjectSet rest = full_set(inst.num_objects());
        for (const auto& c : listed) {
            cls.push_back(set(c));
            rest -= cls.back();
        }
        if (rest.any()) cls.push_back(rest);
        return MarginalPreference(cls);
    }

    Matching matching(const std::vector<std::vector<std::string>>& bundles) const {
        Matching m;
        for (const auto& b : bundles) m.bundles.push_back(set(b));
        validate_matching(inst, m);
        return m;
    }
};

inline Fixture tri_fixture(std::string name, std::string description, const FixtureBuilder& b,
                           TrichotomousProfile prefs) {
    Fixture f;
    f.name = std::move(name);
    f.description = std::move(description);
    f.instance = b.inst;
    check_profile(b.inst, prefs);
    f.marginal = to_marginal(prefs);
    f.trichotomous = std::move(prefs);
    return f;
}

inline FixtureBuilder four_agent_market() {
    return FixtureBuilder({"1", "2", "3", "4"}, {{"1", {"o"}}, {"2", {"p"}}, {"3", {"q1", "q2"}}, {"4", {"r"}}});
}

inline Fixture four_agent(const std::string& name, const std::string& description, bool agent2_narrowed,
                    int agent3_variant) {
    auto b = four_agent_market();
    TrichotomousProfile p{
        b.tri({"q1"}, {"o", "r"}),
        agent2_narrowed ? b.tri({"q1"}, {"p"}) : b.tri({"q1"}, {"p", "r"}),
        agent3_variant == 0   ? b.tri({"o", "p"}, {"q1", "q2"})
        : agent3_variant == 1 ? b.tri({"p"}, {"q1", "q2", "o"})
                              : b.tri({"p"}, {"q1", "q2"}),
        b.tri({"q2"}, {"r"}),
    };
    return tri_fixture(name, description, b, std::move(p));
}

}  // namespace detail

inline std::vector<std::string> fixture_names() {
    return {"endowment-only",    "three-agent-nu2-1",   "three-agent-nu2-0", "four-agent", "four-agent-2",
            "four-agent-3", "four-agent-3b", "core-unit-demand", "no-pe-core", "core-trichotomous-counterexample"};
}

namespace detail {

inline Fixture build_fixture(const std::string& name) {
    using detail::FixtureBuilder;
    if (name == "endowment-only") {
        FixtureBuilder b({"1", "2"}, {{"1", {"o1", "o2"}}, {"2", {"p1", "p2"}}});
        Fixture f;
        f.name = name;
        f.description = "two agents with identical marginals o1 > p1 > p2 > o2; only the endowment is CIR";
        f.instance = b.inst;
        auto pref = b.classes({{"o1"}, {"p1"}, {"p2"}, {"o2"}});
        f.marginal = {pref, pref};
        const auto omega = Matching::endowment(b.inst);
        f.claims.push_back({"endowment", omega, true, false, std::nullopt});
        f.claims.push_back({"swap", b.matching({{"p1", "p2"}, {"o1", "o2"}}), false, std::nullopt, std::nullopt});
        f.claims.push_back({"split", b.matching({{"o1", "p1"}, {"o2", "p2"}}), false, std::nullopt, std::nullopt});
        f.efficient_ir_set = std::vector<Matching>{};
        f.cir_count = 1;
        return f;
    }
    if (name == "three-agent-nu2-1") {
        std::vector<std::pair<std::string, std::vector<std::string>>> own;
        for (int i = 1; i <= 3; ++i) {
            auto s = std::to_string(i);
            own.push_back({s, {"o" + s, "p" + s, "pp" + s, "q" + s}});
        }
        FixtureBuilder b({"1", "2", "3"}, own);
        Fixture f;
        f.name = name;
        f.description = "three agents endowed with o,p,p',q; others' o first, others' p second, endowment third";
        f.instance = b.inst;
        for (int i = 1; i <= 3; ++i) {
            std::vector<std::string> o;
            std::vector<std::string> p;
            for (int j = 1; j <= 3; ++j) {
                if (j == i) continue;
                auto s = std::to_string(j);
                o.push_back("o" + s);
                p.push_back("p" + s);
                p.push_back("pp" + s);
            }
            auto s = std::to_string(i);
            f.marginal.push_back(b.classes({o, p, {"o" + s, "p" + s, "pp" + s, "q" + s}}));
        }
        f.efficient_ir_set = std::vector<Matching>{};
        f.enumeration_bound = 12;
        return f;
    }
    if (name == "three-agent-nu2-0") {
        FixtureBuilder b({"1", "2", "3"}, {{"1", {"o1", "o2", "o3", "q1"}},
                                           {"2", {"p1", "p2", "p3", "q2"}},
                                           {"3", {"a1", "a2", "a3"}}});
        Fixture f;
        f.name = name;
        f.description = "endowments ranked in a third class, no non-endowment in the second";
        f.instance = b.inst;
        f.marginal = {b.classes({{"a1", "a2", "a3"}, {"o1", "o2", "o3"}, {"q1"}}),
                      b.classes({{"a1", "a2", "a3"}, {"p1", "p2", "p3"}, {"q2"}}),
                      b.classes({{"o1", "o2", "o3", "p1", "p2", "p3"}, {"a1", "a2", "a3"}})};
        f.efficient_ir_set = std::vector<Matching>{};
        f.enumeration_bound = 12;
        return f;
    }
    if (name == "four-agent") {
        auto b = detail::four_agent_market();
        auto f = detail::four_agent(name, "four-agent trichotomous profile with two efficient IR matchings", false, 0);
        auto mu1 = b.matching({{"q1"}, {"r"}, {"o", "p"}, {"q2"}});
        auto mu2 = b.matching({{"r"}, {"q1"}, {"o", "p"}, {"q2"}});
        f.claims.push_back({"mu1", mu1, true, true, std::nullopt});
        f.claims.push_back({"mu2", mu2, true, true, std::nullopt});
        f.efficient_ir_set = std::vector<Matching>{mu1, mu2};
        f.mechanism_output = mu1;
        return f;
    }
    if (name == "four-agent-2") {
        auto b = detail::four_agent_market();
        auto f = detail::four_agent(name, "agent 2 narrows its bearable set to its endowment", true, 0);
        auto mu3 = b.matching({{"q1"}, {"p"}, {"o", "q2"}, {"r"}});
        auto mu4 = b.matching({{"r"}, {"p"}, {"o", "q1"}, {"q2"}});
        f.claims.push_back({"mu3", mu3, true, true, std::nullopt});
        // agents 2 and 3 can still swap p and q1 here
        f.claims.push_back({"mu4", mu4, true, false, std::nullopt});
        return f;
    }
    if (name == "four-agent-3") {
        auto b = detail::four_agent_market();
        auto f = detail::four_agent(name, "agent 3 then reports p attractive and o bearable", true, 1);
        auto mu3 = b.matching({{"q1"}, {"p"}, {"o", "q2"}, {"r"}});
        f.claims.push_back({"mu3", mu3, true, true, std::nullopt});
        f.claims.push_back({"endowment", Matching::endowment(b.inst), true, false, std::nullopt});
        return f;
    }
    if (name == "four-agent-3b") {
        auto b = detail::four_agent_market();
        auto f = detail::four_agent(name, "agent 3 then reports p attractive and only its endowment bearable", true, 2);
        f.claims.push_back({"endowment", Matching::endowment(b.inst), true, false, std::nullopt});
        return f;
    }
    if (name == "core-unit-demand") {
        FixtureBuilder b({"1", "2", "3"}, {{"1", {"o"}}, {"2", {"p"}}, {"3", {"q"}}});
        auto f = detail::tri_fixture(name, "unit demand; the endowment is in the weak core but not efficient", b,
                                     {b.tri({"o", "p", "q"}, {}), b.tri({"o"}, {"p", "q"}), b.tri({"o"}, {"p", "q"})});
        f.claims.push_back({"endowment", Matching::endowment(b.inst), true, false, true});
        return f;
    }
    if (name == "no-pe-core") {
        FixtureBuilder b({"1", "2", "3"}, {{"1", {"o1", "o2"}}, {"2", {"p1", "p2"}}, {"3", {"q1", "q2"}}});
        auto f = detail::tri_fixture(name, "strongly trichotomous; no efficient IR matching is in the weak core", b,
                                     {b.tri({"p1"}, {"o1", "o2"}), b.tri({"o1", "o2", "q1", "q2"}, {"p1", "p2"}),
                                      b.tri({"p1"}, {"q1", "q2"})});
        auto mu11 = b.matching({{"o1", "p1"}, {"o2", "p2"}, {"q1", "q2"}});
        auto mu12 = b.matching({{"o2", "p1"}, {"o1", "p2"}, {"q1", "q2"}});
        auto mu21 = b.matching({{"o1", "o2"}, {"p2", "q2"}, {"p1", "q1"}});
        auto mu22 = b.matching({{"o1", "o2"}, {"p2", "q1"}, {"p1", "q2"}});
        for (auto& [label, m] : std::vector<std::pair<std::string, Matching>>{
                 {"mu11", mu11}, {"mu12", mu12}, {"mu21", mu21}, {"mu22", mu22}})
            f.claims.push_back({label, m, true, true, false});
        f.efficient_ir_set = std::vector<Matching>{mu11, mu12, mu21, mu22};
        return f;
    }
    if (name == "core-trichotomous-counterexample") {
        FixtureBuilder b({"1", "2", "3", "4"}, {{"1", {"o"}}, {"2", {"p"}}, {"3", {"q"}}, {"4", {"r"}}});
        auto f = detail::tri_fixture(
            name, "unit demand trichotomous; efficient but blocked by agents 3 and 4 swapping endowments", b,
            {b.tri({"q"}, {"o"}), b.tri({"r"}, {"p"}), b.tri({"r"}, {"o", "q"}), b.tri({"q"}, {"p", "r"})});
        f.claims.push_back({"mu", b.matching({{"q"}, {"r"}, {"o"}, {"p"}}), true, true, false, true});
        f.asserted = false;
        return f;
    }
    throw input_error("unknown fixture '" + name + "'");
}

}  // namespace detail

inline Fixture load_fixture(const std::string& name) {
    auto f = detail::build_fixture(name);
    if (f.efficient_ir_set)
        std::sort(f.efficient_ir_set->begin(), f.efficient_ir_set->end(),
                  [](const Matching& a, const Matching& b) { return lex_less(a, b); });
    return f;
}

}  // namespace bundlex
