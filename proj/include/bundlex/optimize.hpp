#pragma once

#include "bundlex/enumerate.hpp"
#include "bundlex/flow.hpp"
#include "bundlex/model.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bundlex {

/// Per-agent restriction on the matchings considered by a welfare query.
struct AgentConstraint {
    ObjectSet allowed;     // S_i
    ObjectSet attractive;  // A_i, defines the welfare count
    std::size_t min_attractive = 0;
    std::optional<std::size_t> exact_attractive;
};

struct WelfareConstraints {
    std::vector<AgentConstraint> agents;
};

struct MaxResult {
    std::size_t count;
    Matching witness;
};

inline void validate_constraints(const Instance& inst, const WelfareConstraints& c) {
    if (c.agents.size() != inst.num_agents()) throw input_error("constraints must cover every agent");
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        const auto& a = c.agents[i];
        if (a.allowed.size() != inst.num_objects() || a.attractive.size() != inst.num_objects())
            throw input_error("constraint sets over the wrong universe");
        if (a.min_attractive > inst.quota(i)) throw input_error("min_attractive exceeds the endowment size");
        if (a.exact_attractive && (*a.exact_attractive < a.min_attractive || *a.exact_attractive > inst.quota(i)))
            throw input_error("exact_attractive outside [min_attractive, endowment size]");
    }
}

/// Constraints that encode component-wise individual rationality at (A, B) plus weak welfare improvement on `base`.
inline WelfareConstraints cir_constraints(const Instance& inst, const std::vector<ObjectSet>& attractive,
                                          const std::vector<ObjectSet>& bearable, const Matching& base) {
    WelfareConstraints c;
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        AgentConstraint a;
        a.allowed = attractive[i] | bearable[i];
        a.attractive = attractive[i];
        a.min_attractive = (base[i] & attractive[i]).count();
        c.agents.push_back(std::move(a));
    }
    return c;
}

/**
 * The flow encoding of a WelfareConstraints query.
 *
 *   sink -> source        [|O|, |O|]
 *   source -> agent i     [|Omega_i|, |Omega_i|]
 *   agent i -> A-tier i   [min or exact, |Omega_i| or exact]
 *   agent i -> B-tier i   [0, |Omega_i|]
 *   tier -> object o      [0, 1] for o in S_i, A-tier iff o in A_i
 *   object o -> sink      [1, 1]
 *
 * Integral circulations are exactly the matchings satisfying the constraints.
 */
class ConstraintNetwork {
public:
    ConstraintNetwork(const Instance& inst, const WelfareConstraints& c) : inst_(&inst) {
        validate_constraints(inst, c);
        const auto n = inst.num_agents();
        const auto m = inst.num_objects();
        source_ = net_.add_node();
        sink_ = net_.add_node();
        std::vector<FlowNetwork::Node> object_node(m);
        for (ObjectIndex o = 0; o < m; ++o) object_node[o] = net_.add_node();
        net_.add_edge(sink_, source_, static_cast<int>(m), static_cast<int>(m));
        agent_edge_.resize(n);
        tier_a_.resize(n);
        tier_b_.resize(n);
        pair_edge_.assign(n, std::vector<FlowNetwork::EdgeId>(m, -1));
        for (AgentIndex i = 0; i < n; ++i) {
            const auto& ac = c.agents[i];
            attractive_.push_back(ac.attractive);
            const int k = static_cast<int>(inst.quota(i));
            auto agent = net_.add_node();
            auto a_tier = net_.add_node();
            auto b_tier = net_.add_node();
            agent_edge_[i] = net_.add_edge(source_, agent, k, k);
            int lo = static_cast<int>(ac.exact_attractive.value_or(ac.min_attractive));
            int hi = ac.exact_attractive ? lo : k;
            tier_a_[i] = net_.add_edge(agent, a_tier, lo, hi);
            tier_b_[i] = net_.add_edge(agent, b_tier, 0, k);
            for_each_member(ac.allowed, [&](ObjectIndex o) {
                pair_edge_[i][o] = net_.add_edge(ac.attractive.test(o) ? a_tier : b_tier, object_node[o], 0, 1);
            });
        }
        object_edge_.resize(m);
        for (ObjectIndex o = 0; o < m; ++o) object_edge_[o] = net_.add_edge(object_node[o], sink_, 1, 1);
    }

    bool solve() { return net_.solve_feasible(); }

    /// Loads `mu` as the current flow; false (and the flow left unspecified) if it violates the constraints.
    bool load(const Matching& mu) {
        const auto m = inst_->num_objects();
        net_.set_flow(0, static_cast<int>(m));
        for (AgentIndex i = 0; i < inst_->num_agents(); ++i) {
            net_.set_flow(agent_edge_[i], static_cast<int>(inst_->quota(i)));
            int a = 0;
            int b = 0;
            for (ObjectIndex o = 0; o < m; ++o) {
                auto e = pair_edge_[i][o];
                const bool held = mu[i].test(o);
                if (e < 0) {
                    if (held) return false;
                    continue;
                }
                net_.set_flow(e, held ? 1 : 0);
                if (held) (attractive_[i].test(o) ? a : b)++;
            }
            net_.set_flow(tier_a_[i], a);
            net_.set_flow(tier_b_[i], b);
        }
        for (ObjectIndex o = 0; o < m; ++o) net_.set_flow(object_edge_[o], 1);
        return net_.is_feasible();
    }

    std::size_t attractive_count(AgentIndex i) const { return static_cast<std::size_t>(net_.flow(tier_a_[i])); }

    /// Raises agent i's attractive count as far as the constraints allow.
    std::size_t maximize(AgentIndex i) {
        while (net_.increase(tier_a_[i])) {
        }
        return attractive_count(i);
    }

    bool can_improve(AgentIndex i) { return net_.can_increase(tier_a_[i]); }

    /// Pins agent i's attractive count to its current value.
    void fix(AgentIndex i) {
        int f = net_.flow(tier_a_[i]);
        net_.set_bounds(tier_a_[i], f, f);
    }

    /**
     * Moves the flow to the lexicographically least matching still allowed by
     * the current bounds, agent by agent in priority order, and pins it.
     */
    void canonicalize() {
        const auto m = inst_->num_objects();
        for (AgentIndex i = 0; i < inst_->num_agents(); ++i) {
            std::size_t chosen = 0;
            const auto k = inst_->quota(i);
            for (ObjectIndex o = 0; o < m && chosen < k; ++o) {
                auto e = pair_edge_[i][o];
                if (e < 0) continue;
                if (net_.flow(e) == 1 || net_.increase(e)) {
                    net_.set_bounds(e, 1, 1);
                    ++chosen;
                } else {
                    net_.set_bounds(e, 0, 0);
                }
            }
        }
    }

    Matching matching() const {
        Matching mu;
        for (AgentIndex i = 0; i < inst_->num_agents(); ++i) {
            ObjectSet b(inst_->num_objects());
            for (ObjectIndex o = 0; o < inst_->num_objects(); ++o)
                if (pair_edge_[i][o] >= 0 && net_.flow(pair_edge_[i][o]) == 1) b.set(o);
            mu.bundles.push_back(std::move(b));
        }
        return mu;
    }

    const FlowNetwork& network() const { return net_; }

private:
    const Instance* inst_;
    std::vector<ObjectSet> attractive_;
    FlowNetwork net_;
    FlowNetwork::Node source_ = 0;
    FlowNetwork::Node sink_ = 0;
    std::vector<FlowNetwork::EdgeId> agent_edge_;
    std::vector<FlowNetwork::EdgeId> tier_a_;
    std::vector<FlowNetwork::EdgeId> tier_b_;
    std::vector<std::vector<FlowNetwork::EdgeId>> pair_edge_;
    std::vector<FlowNetwork::EdgeId> object_edge_;
};

/// Some matching satisfying the constraints (the canonical one), or none.
inline std::optional<Matching> feasible(const Instance& inst, const WelfareConstraints& c) {
    ConstraintNetwork net(inst, c);
    if (!net.solve()) return std::nullopt;
    net.canonicalize();
    return net.matching();
}

/// Largest attractive count `target` can get under the constraints, with the canonical witness attaining it.
inline MaxResult max_attractive(const Instance& inst, const WelfareConstraints& c, AgentIndex target) {
    ConstraintNetwork net(inst, c);
    if (!net.solve()) throw input_error("infeasible constraint set");
    auto k = net.maximize(target);
    net.fix(target);
    net.canonicalize();
    return {k, net.matching()};
}

/// Exhaustive counterpart of max_attractive; the first maximizer in canonical order is the witness.
inline MaxResult brute_force_max(const Instance& inst, const WelfareConstraints& c, AgentIndex target,
                                 std::size_t max_objects = default_enumeration_bound) {
    validate_constraints(inst, c);
    require_enumerable(inst, max_objects);
    const auto n = inst.num_objects();
    std::vector<std::uint64_t> allowed;
    std::vector<std::uint64_t> attractive;
    for (const auto& a : c.agents) {
        allowed.push_back(to_mask(a.allowed));
        attractive.push_back(to_mask(a.attractive));
    }
    auto accept = [&](std::size_t i, std::uint64_t bundle) {
        if ((bundle & ~allowed[i]) != 0) return false;
        auto w = static_cast<std::size_t>(__builtin_popcountll(bundle & attractive[i]));
        const auto& a = c.agents[i];
        if (w < a.min_attractive) return false;
        return !a.exact_attractive || w == *a.exact_attractive;
    };
    std::optional<MaxResult> best;
    for_each_mask_assignment(quotas(inst), universe_mask(n), accept, [&](const std::vector<std::uint64_t>& masks) {
        auto w = static_cast<std::size_t>(__builtin_popcountll(masks[target] & attractive[target]));
        if (!best || w > best->count) best = MaxResult{w, matching_from_masks(n, masks)};
        return true;
    });
    if (!best) throw input_error("infeasible constraint set");
    return *best;
}

inline void dump_network(std::ostream& os, const Instance& inst, const WelfareConstraints& c) {
    ConstraintNetwork net(inst, c);
    net.network().dump(os);
}

}  // namespace bundlex
