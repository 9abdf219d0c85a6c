#include "support.hpp"

#include <gtest/gtest.h>

using namespace bundlex;
using namespace bundlex::testing;

namespace {

Matching named(const Instance& inst, const std::vector<std::vector<std::string>>& bundles) {
    Matching m;
    for (const auto& b : bundles) m.bundles.push_back(inst.objects_named(b));
    return m;
}

AgentSets named_sets(const Instance& inst, const std::vector<std::vector<std::string>>& sets) {
    AgentSets out;
    for (const auto& s : sets) out.push_back(inst.objects_named(s));
    return out;
}

}  // namespace

TEST(Mechanism, FourAgentTrace) {
    auto f = load_fixture("four-agent");
    const auto& inst = f.instance;
    auto r = run_ir_priority(inst, *f.trichotomous);
    EXPECT_EQ(r.matching, named(inst, {{"q1"}, {"r"}, {"o", "p"}, {"q2"}}));
    EXPECT_EQ(r.matching, *f.mechanism_output);
    const auto& t = r.trace;
    ASSERT_EQ(t.rounds.size(), 3u);

    EXPECT_EQ(t.rounds[0].mu, Matching::endowment(inst));
    EXPECT_TRUE(t.rounds[0].promises.empty());
    EXPECT_TRUE(t.rounds[0].non_improvable.empty());
    EXPECT_EQ(t.rounds[0].bearable, named_sets(inst, {{"o"}, {"p"}, {"q1", "q2"}, {"r"}}));
    EXPECT_EQ(t.rounds[0].bearable_bar,
              named_sets(inst, {{"o", "p", "q2", "r"}, {"o", "p", "q2", "r"}, {"q1", "q2", "r"}, {"o", "p", "q1", "r"}}));

    EXPECT_EQ(t.rounds[1].mu, named(inst, {{"q1"}, {"p"}, {"o", "q2"}, {"r"}}));
    EXPECT_EQ(t.rounds[1].promises, (std::vector<std::size_t>{1, 0, 1, 0}));
    EXPECT_EQ(t.rounds[1].non_improvable, (std::vector<AgentIndex>{0, 1}));
    EXPECT_EQ(t.rounds[1].bearable, named_sets(inst, {{"o", "r"}, {"p", "r"}, {"q1", "q2"}, {"r"}}));

    EXPECT_EQ(t.rounds[2].mu, r.matching);
    EXPECT_EQ(t.rounds[2].promises, (std::vector<std::size_t>{1, 0, 2, 1}));
    EXPECT_EQ(t.rounds[2].non_improvable, (std::vector<AgentIndex>{0, 1, 2, 3}));

    EXPECT_EQ(t.elicited_at, (std::vector<std::optional<std::size_t>>{1, 1, 2, 2}));
    EXPECT_EQ(t.final, r.matching);
    EXPECT_EQ(t.final_promises, (std::vector<std::size_t>{1, 0, 2, 1}));
    EXPECT_EQ(t.flow_queries, 16u);
}

TEST(Mechanism, ReversedPriorityGivesTheOtherEfficientMatching) {
    auto f = load_fixture("four-agent");
    const auto& inst = f.instance;
    auto r = run_ir_priority(inst, *f.trichotomous, {"4", "3", "2", "1"});
    EXPECT_EQ(r.matching, named(inst, {{"r"}, {"q1"}, {"o", "p"}, {"q2"}}));
    validate_matching(inst, r.trace.final);
    EXPECT_EQ(r.trace.final, r.matching);
    EXPECT_THROW(run_ir_priority(inst, *f.trichotomous, {"4", "3", "2"}), input_error);
}

TEST(Mechanism, SingleAgentKeepsEndowment) {
    auto inst = market({3});
    TrichotomousProfile prefs{{inst.objects_named({"a1"}), inst.objects_named({"a2", "a3"})}};
    auto r = run_ir_priority(inst, prefs);
    EXPECT_EQ(r.matching, Matching::endowment(inst));
}

TEST(Mechanism, NobodyFindsAnythingAttractive) {
    auto inst = market({1, 2, 1});
    TrichotomousProfile prefs;
    for (AgentIndex i = 0; i < 3; ++i) prefs.push_back({inst.empty_set(), full_set(4)});
    auto r = run_ir_priority(inst, prefs);
    EXPECT_TRUE(cir_trichotomous(inst, r.matching, prefs));
    EXPECT_EQ(r.trace.final_promises, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(Mechanism, RejectsBadProfiles) {
    auto inst = market({1, 1});
    TrichotomousProfile prefs{{inst.objects_named({"b1"}), inst.empty_set()}};
    EXPECT_THROW(run_ir_priority(inst, prefs), input_error);
    prefs.push_back({inst.empty_set(), inst.empty_set()});
    EXPECT_THROW(run_ir_priority(inst, prefs), input_error);
}

// Output is CIR, has no welfare-improving CIR alternative, and promises match welfare.
TEST(Mechanism, RandomInstancesAgainstOracle) {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 250; ++trial) {
        auto inst = random_market(rng, 4, 2, 7);
        auto prefs = random_profile(inst, rng, trial % 3 == 0);
        auto r = run_ir_priority(inst, prefs);
        ASSERT_TRUE(cir_trichotomous(inst, r.matching, prefs));
        for (AgentIndex i = 0; i < inst.num_agents(); ++i)
            EXPECT_EQ(r.trace.final_promises[i], prefs[i].welfare(r.matching[i]));
        EXPECT_LE(r.trace.rounds.size(), inst.num_agents() + 1);
        EXPECT_LE(r.trace.flow_queries, 2 * inst.num_agents() * r.trace.rounds.size());
        bool improvable = false;
        for_each_matching(inst, [&](const Matching& nu) {
            if (!cir_trichotomous(inst, nu, prefs)) return;
            if (weakly_improves(nu, r.matching, prefs) && !weakly_improves(r.matching, nu, prefs)) improvable = true;
        });
        EXPECT_FALSE(improvable) << "trial " << trial;
        // non-improvable sets only grow
        for (std::size_t k = 1; k < r.trace.rounds.size(); ++k) {
            const auto& prev = r.trace.rounds[k - 1].non_improvable;
            const auto& cur = r.trace.rounds[k].non_improvable;
            EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
            EXPECT_GT(cur.size(), prev.size());
        }
        EXPECT_EQ(run_ir_priority(inst, prefs).matching, r.matching);
    }
}

// Agents in the non-improvable set have their true bearable set read no later than that round.
TEST(Mechanism, ElicitationIsLazy) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = random_market(rng, 4, 2, 7);
        auto prefs = random_profile(inst, rng);
        auto r = run_ir_priority(inst, prefs);
        for (const auto& round : r.trace.rounds) {
            for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
                const bool in = std::find(round.non_improvable.begin(), round.non_improvable.end(), i) !=
                                round.non_improvable.end();
                if (in) {
                    ASSERT_TRUE(r.trace.elicited_at[i]);
                    EXPECT_LE(*r.trace.elicited_at[i], round.round);
                    EXPECT_EQ(round.bearable[i], prefs[i].bearable);
                    EXPECT_EQ(round.bearable_bar[i], prefs[i].bearable);
                } else {
                    EXPECT_EQ(round.bearable[i], inst.endowment(i) - prefs[i].attractive);
                }
            }
        }
    }
}

TEST(SerialRefine, FromEndowmentAtTrueSets) {
    auto f = load_fixture("four-agent");
    const auto& inst = f.instance;
    auto r = serial_refine(inst, attractive_sets(*f.trichotomous), bearable_sets(*f.trichotomous),
                           Matching::endowment(inst));
    EXPECT_EQ(r.promises, (std::vector<std::size_t>{1, 0, 2, 1}));
    EXPECT_EQ(r.matching, named(inst, {{"q1"}, {"r"}, {"o", "p"}, {"q2"}}));
    EXPECT_GT(r.flow_queries, 0u);
}

TEST(SerialRefine, MatchesLexicographicOracle) {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 150; ++trial) {
        auto inst = random_market(rng, 4, 2, 6);
        auto prefs = random_profile(inst, rng);
        auto a = attractive_sets(prefs);
        auto b = bearable_sets(prefs);
        auto omega = Matching::endowment(inst);
        auto r = serial_refine(inst, a, b, omega);
        // oracle: lexicographically best welfare vector over CIR matchings improving omega, then lex-min matching
        std::optional<std::vector<std::size_t>> best;
        std::optional<Matching> best_m;
        for_each_matching(inst, [&](const Matching& nu) {
            if (!cir_trichotomous(inst, nu, prefs) || !weakly_improves(nu, omega, prefs)) return;
            std::vector<std::size_t> w;
            for (AgentIndex i = 0; i < inst.num_agents(); ++i) w.push_back(prefs[i].welfare(nu[i]));
            if (!best || w > *best) {
                best = w;
                best_m = nu;
            }
        });
        ASSERT_TRUE(best);
        EXPECT_EQ(r.promises, *best);
        EXPECT_EQ(r.matching, *best_m);
    }
}

TEST(NonImprovable, FourAgentRounds) {
    auto f = load_fixture("four-agent");
    const auto& inst = f.instance;
    auto a = attractive_sets(*f.trichotomous);
    auto b = bearable_sets(*f.trichotomous);
    auto final = named(inst, {{"q1"}, {"r"}, {"o", "p"}, {"q2"}});
    EXPECT_EQ(non_improvable_set(inst, a, b, final), (std::vector<AgentIndex>{0, 1, 2, 3}));
    auto omega = Matching::endowment(inst);
    std::size_t queries = 0;
    auto at_omega = non_improvable_set(inst, a, b, omega, &queries);
    EXPECT_TRUE(at_omega.empty() || at_omega.size() < 4);
    EXPECT_GT(queries, 0u);
    auto bad = named(inst, {{"p"}, {"o"}, {"q1", "q2"}, {"r"}});
    EXPECT_THROW(non_improvable_set(inst, a, b, bad), input_error);
}
