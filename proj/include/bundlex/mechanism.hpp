#pragma once

#include "bundlex/model.hpp"
#include "bundlex/optimize.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace bundlex {

using AgentSets = std::vector<ObjectSet>;

struct RefineResult {
    Matching matching;
    std::vector<std::size_t> promises;  // K^1..K^n, indexed by agent
    std::size_t flow_queries = 0;
};

struct RoundState {
    std::size_t round = 0;
    Matching mu;
    std::vector<std::size_t> promises;  // empty for round 0
    AgentSets bearable;                 // B^t
    AgentSets bearable_bar;             // B̄^t
    std::vector<AgentIndex> non_improvable;
};

struct MechanismTrace {
    std::vector<RoundState> rounds;
    std::vector<std::optional<std::size_t>> elicited_at;  // round in which B_i was first read
    Matching final;
    std::vector<std::size_t> final_promises;
    std::size_t flow_queries = 0;
};

struct MechanismResult {
    Matching matching;
    MechanismTrace trace;
};

namespace detail {

inline void check_sets(const Instance& inst, const AgentSets& a, const AgentSets& b) {
    if (a.size() != inst.num_agents() || b.size() != inst.num_agents())
        throw input_error("attractive and bearable sets must cover every agent");
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        if (a[i].size() != inst.num_objects() || b[i].size() != inst.num_objects())
            throw input_error("object set over the wrong universe");
        if (a[i].intersects(b[i])) throw input_error("attractive and bearable sets overlap for " + inst.agent_name(i));
    }
}

inline bool cir_at(const Instance& inst, const AgentSets& a, const AgentSets& b, const Matching& mu) {
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        if (!mu[i].is_subset_of(a[i] | b[i])) return false;
        if ((mu[i] & a[i]).count() < (inst.endowment(i) & a[i]).count()) return false;
    }
    return true;
}

}  // namespace detail

/**
 * Serial dictatorship over the CIR matchings at (A, B) that weakly improve
 * every attractive count of `mu`: agents in priority order raise their count
 * as far as possible and are then held to it. Returns the lexicographically
 * least matching meeting every promise.
 */
inline RefineResult serial_refine(const Instance& inst, const AgentSets& attractive, const AgentSets& bearable,
                                  const Matching& mu) {
    detail::check_sets(inst, attractive, bearable);
    validate_matching(inst, mu);
    if (!detail::cir_at(inst, attractive, bearable, mu))
        throw input_error("serial refinement needs a component-wise individually rational start");
    ConstraintNetwork net(inst, cir_constraints(inst, attractive, bearable, mu));
    if (!net.load(mu)) throw invariant_error("start matching rejected by its constraint network");
    RefineResult r;
    r.promises.resize(inst.num_agents());
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        r.promises[i] = net.maximize(i);
        net.fix(i);
        ++r.flow_queries;
    }
    net.canonicalize();
    r.matching = net.matching();
    return r;
}

/// Agents whose attractive count cannot rise above mu's over CIR matchings at (A, B̄) improving mu.
inline std::vector<AgentIndex> non_improvable_set(const Instance& inst, const AgentSets& attractive,
                                                  const AgentSets& bearable_bar, const Matching& mu,
                                                  std::size_t* flow_queries = nullptr) {
    detail::check_sets(inst, attractive, bearable_bar);
    validate_matching(inst, mu);
    if (!detail::cir_at(inst, attractive, bearable_bar, mu))
        throw input_error("improvability check needs a component-wise individually rational matching");
    ConstraintNetwork net(inst, cir_constraints(inst, attractive, bearable_bar, mu));
    if (!net.load(mu)) throw invariant_error("matching rejected by its constraint network");
    std::vector<AgentIndex> out;
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        const auto ceiling = std::min(attractive[i].count(), inst.quota(i));
        if (net.attractive_count(i) >= ceiling) {
            out.push_back(i);
            continue;
        }
        if (flow_queries) ++*flow_queries;
        if (!net.can_improve(i)) out.push_back(i);
    }
    return out;
}

/**
 * The individually rational priority mechanism.
 *
 * Bearable sets are read lazily: an agent's true B_i enters the computation
 * only once the agent can no longer improve, and the trace records when.
 */
inline MechanismResult run_ir_priority(const Instance& inst, const TrichotomousProfile& prefs) {
    check_profile(inst, prefs);
    const auto n = inst.num_agents();
    AgentSets a(n);
    AgentSets true_b(n);
    AgentSets b0(n);
    AgentSets bbar0(n);
    const auto everything = full_set(inst.num_objects());
    for (AgentIndex i = 0; i < n; ++i) {
        a[i] = prefs[i].attractive;
        true_b[i] = prefs[i].bearable;
        b0[i] = inst.endowment(i) - a[i];
        bbar0[i] = everything - a[i];
    }

    MechanismTrace trace;
    trace.elicited_at.assign(n, std::nullopt);
    trace.rounds.push_back({0, Matching::endowment(inst), {}, b0, bbar0, {}});

    std::vector<AgentIndex> all(n);
    for (AgentIndex i = 0; i < n; ++i) all[i] = i;

    for (std::size_t t = 1;; ++t) {
        if (t > n) throw invariant_error("elicitation loop exceeded one round per agent");
        const auto& prev = trace.rounds.back();
        auto refined = serial_refine(inst, a, prev.bearable, prev.mu);
        trace.flow_queries += refined.flow_queries;
        auto improvable_left =
            non_improvable_set(inst, a, prev.bearable_bar, refined.matching, &trace.flow_queries);

        const auto& before = prev.non_improvable;
        if (!std::includes(improvable_left.begin(), improvable_left.end(), before.begin(), before.end()))
            throw invariant_error("round " + std::to_string(t) + " lost a previously non-improvable agent");
        if (improvable_left.size() == before.size())
            throw invariant_error("round " + std::to_string(t) + " elicited no new agent");

        RoundState s;
        s.round = t;
        s.mu = std::move(refined.matching);
        s.promises = std::move(refined.promises);
        s.bearable = b0;
        s.bearable_bar = bbar0;
        for (AgentIndex i : improvable_left) {
            s.bearable[i] = true_b[i];
            s.bearable_bar[i] = true_b[i];
            if (!trace.elicited_at[i]) trace.elicited_at[i] = t;
        }
        s.non_improvable = std::move(improvable_left);
        const bool done = s.non_improvable == all;
        trace.rounds.push_back(std::move(s));
        if (done) break;
    }

    const auto& last = trace.rounds.back();
    auto final_pass = serial_refine(inst, a, last.bearable, last.mu);
    trace.flow_queries += final_pass.flow_queries;
    trace.final = final_pass.matching;
    trace.final_promises = std::move(final_pass.promises);
    return {std::move(final_pass.matching), std::move(trace)};
}

/// Runs the mechanism with agents re-ordered by `order`; the result is reported in the original agent indices.
inline MechanismResult run_ir_priority(const Instance& inst, const TrichotomousProfile& prefs,
                                       const std::vector<std::string>& order) {
    auto permuted = inst.with_priority(order);
    TrichotomousProfile p;
    std::vector<AgentIndex> original;
    for (const auto& name : order) {
        original.push_back(inst.agent(name));
        p.push_back(prefs[original.back()]);
    }
    auto r = run_ir_priority(permuted, p);
    auto unpermute = [&](const Matching& m) {
        Matching out;
        out.bundles.resize(inst.num_agents());
        for (AgentIndex k = 0; k < original.size(); ++k) out.bundles[original[k]] = m[k];
        return out;
    };
    auto unpermute_counts = [&](const std::vector<std::size_t>& v) {
        std::vector<std::size_t> out(v.size());
        for (AgentIndex k = 0; k < original.size(); ++k) out[original[k]] = v[k];
        return out;
    };
    auto unpermute_sets = [&](const AgentSets& v) {
        AgentSets out(v.size());
        for (AgentIndex k = 0; k < original.size(); ++k) out[original[k]] = v[k];
        return out;
    };
    MechanismResult out;
    out.matching = unpermute(r.matching);
    auto& tr = out.trace;
    tr.flow_queries = r.trace.flow_queries;
    tr.final = out.matching;
    tr.final_promises = unpermute_counts(r.trace.final_promises);
    tr.elicited_at.resize(inst.num_agents());
    for (AgentIndex k = 0; k < original.size(); ++k) tr.elicited_at[original[k]] = r.trace.elicited_at[k];
    for (const auto& s : r.trace.rounds) {
        RoundState u;
        u.round = s.round;
        u.mu = unpermute(s.mu);
        u.promises = s.promises.empty() ? s.promises : unpermute_counts(s.promises);
        u.bearable = unpermute_sets(s.bearable);
        u.bearable_bar = unpermute_sets(s.bearable_bar);
        for (AgentIndex k : s.non_improvable) u.non_improvable.push_back(original[k]);
        std::sort(u.non_improvable.begin(), u.non_improvable.end());
        tr.rounds.push_back(std::move(u));
    }
    return out;
}

}  // namespace bundlex
