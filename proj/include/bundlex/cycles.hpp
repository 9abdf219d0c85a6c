#pragma once

#include "bundlex/model.hpp"
#include "bundlex/optimize.hpp"
#include "bundlex/responsive.hpp"

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

namespace bundlex {

/**
 * A reallocation cycle (i_1, o_1), ..., (i_L, o_L) of a base matching: agent
 * i_l receives o_l and gives up o_{l-1}; i_1 gives up o_L.
 */
struct Cycle {
    std::vector<std::pair<AgentIndex, ObjectIndex>> steps;

    std::size_t length() const { return steps.size(); }
    friend bool operator==(const Cycle&, const Cycle&) = default;
};

inline void validate_cycle(const Matching& base, const Cycle& c) {
    const auto len = c.steps.size();
    if (len < 2) throw input_error("a cycle needs at least two agents");
    std::vector<AgentIndex> agents;
    std::vector<ObjectIndex> objects;
    for (const auto& [i, o] : c.steps) {
        if (i >= base.num_agents() || o >= base[0].size()) throw input_error("cycle refers to an unknown agent or object");
        agents.push_back(i);
        objects.push_back(o);
    }
    std::sort(agents.begin(), agents.end());
    std::sort(objects.begin(), objects.end());
    if (std::adjacent_find(agents.begin(), agents.end()) != agents.end()) throw input_error("cycle repeats an agent");
    if (std::adjacent_find(objects.begin(), objects.end()) != objects.end()) throw input_error("cycle repeats an object");
    for (std::size_t l = 0; l < len; ++l) {
        const auto [agent, receives] = c.steps[l];
        const auto gives = c.steps[(l + len - 1) % len].second;
        if (!base[agent].test(gives)) throw input_error("cycle agent does not hold the object it gives away");
        if (base[agent].test(receives)) throw input_error("cycle agent already holds the object it receives");
    }
}

/// Builds a cycle and checks it against `base` right away.
inline Cycle make_cycle(const Matching& base, std::vector<std::pair<AgentIndex, ObjectIndex>> steps) {
    Cycle c{std::move(steps)};
    validate_cycle(base, c);
    return c;
}

/// Number of bundle slots filled differently by the two matchings.
inline std::size_t distance(const Matching& mu, const Matching& nu) {
    std::size_t d = 0;
    for (AgentIndex i = 0; i < mu.num_agents(); ++i) d += mu[i].count() - (mu[i] & nu[i]).count();
    return d;
}

inline Matching apply_cycle(const Matching& mu, const Cycle& c) {
    validate_cycle(mu, c);
    Matching out = mu;
    const auto len = c.steps.size();
    for (std::size_t l = 0; l < len; ++l) {
        const auto [agent, receives] = c.steps[l];
        out.bundles[agent].reset(c.steps[(l + len - 1) % len].second);
        out.bundles[agent].set(receives);
    }
    return out;
}

/// (i_1, o_L), (i_L, o_{L-1}), ..., (i_2, o_1): undoes every trade of `c`.
inline Cycle reverse_cycle(const Cycle& c) {
    Cycle r;
    const auto len = c.steps.size();
    if (len == 0) return r;
    r.steps.emplace_back(c.steps[0].first, c.steps[len - 1].second);
    for (std::size_t l = len - 1; l >= 1; --l) r.steps.emplace_back(c.steps[l].first, c.steps[l - 1].second);
    return r;
}

/// Rotates a cycle so that its first agent has the smallest index.
inline Cycle canonical_rotation(Cycle c) {
    auto it = std::min_element(c.steps.begin(), c.steps.end(),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    std::rotate(c.steps.begin(), it, c.steps.end());
    return c;
}

/**
 * Object-disjoint cycles whose execution from `mu` yields `nu`.
 *
 * Walks the difference graph (agent -> object it gains -> the agent holding
 * that object in mu -> ...) until an agent repeats and peels off the loop.
 */
inline std::vector<Cycle> decompose(const Matching& nu, const Matching& mu) {
    const auto n = mu.num_agents();
    if (n == 0) return {};
    const auto m = mu[0].size();
    auto holder = holders(mu, m);
    std::vector<ObjectSet> gains(n);
    for (AgentIndex i = 0; i < n; ++i) gains[i] = nu[i] - mu[i];

    std::vector<Cycle> out;
    std::vector<std::ptrdiff_t> position(n, -1);
    for (AgentIndex start = 0; start < n; ++start) {
        while (gains[start].any()) {
            std::vector<std::pair<AgentIndex, ObjectIndex>> walk;
            AgentIndex a = start;
            while (position[a] < 0) {
                position[a] = static_cast<std::ptrdiff_t>(walk.size());
                auto o = static_cast<ObjectIndex>(gains[a].find_first());
                walk.emplace_back(a, o);
                a = holder[o];
            }
            Cycle c;
            c.steps.assign(walk.begin() + position[a], walk.end());
            for (const auto& [i, _] : walk) position[i] = -1;
            for (const auto& [i, o] : c.steps) gains[i].reset(o);
            out.push_back(std::move(c));
        }
    }
    return out;
}

struct CycleClassification {
    bool cir = false;
    std::vector<AgentIndex> increases;
    std::vector<AgentIndex> decreases;
    bool pareto_improving = false;
};

inline CycleClassification classify_cycle(const Cycle& c, const Matching& mu, const TrichotomousProfile& prefs) {
    validate_cycle(mu, c);
    CycleClassification r;
    r.cir = std::all_of(c.steps.begin(), c.steps.end(),
                        [&](const auto& s) { return prefs[s.first].acceptable().test(s.second); });
    const auto len = c.steps.size();
    for (std::size_t l = 0; l < len; ++l) {
        const auto [agent, receives] = c.steps[l];
        const auto gives = c.steps[(l + len - 1) % len].second;
        const auto& a = prefs[agent].attractive;
        int delta = static_cast<int>(a.test(receives)) - static_cast<int>(a.test(gives));
        if (delta > 0) r.increases.push_back(agent);
        if (delta < 0) r.decreases.push_back(agent);
    }
    std::sort(r.increases.begin(), r.increases.end());
    std::sort(r.decreases.begin(), r.decreases.end());
    r.pareto_improving = !r.increases.empty() && r.decreases.empty();
    return r;
}

namespace detail {

/**
 * Extracts a component-wise IR, Pareto-improving cycle of `mu` from a CIR
 * matching `nu` that weakly improves every agent's attractive count and
 * strictly improves someone's.
 *
 * Each moved agent points at its best gained object (attractive first), each
 * object at its holder in mu. The loop found this way never hurts anyone; if
 * it helps nobody, undo it in nu and look again. Each pass shrinks the
 * distance to mu while nu stays a strict improvement.
 */
inline Cycle improving_cycle_from(const Matching& mu, Matching nu, const TrichotomousProfile& prefs) {
    const auto n = mu.num_agents();
    const auto m = mu[0].size();
    auto holder = holders(mu, m);
    while (true) {
        std::vector<std::ptrdiff_t> position(n, -1);
        AgentIndex a = 0;
        while (a < n && mu[a] == nu[a]) ++a;
        if (a == n) throw invariant_error("improving matching collapsed onto the base matching");
        std::vector<std::pair<AgentIndex, ObjectIndex>> walk;
        while (position[a] < 0) {
            position[a] = static_cast<std::ptrdiff_t>(walk.size());
            ObjectSet gained = nu[a] - mu[a];
            ObjectSet good = gained & prefs[a].attractive;
            auto o = static_cast<ObjectIndex>(good.any() ? good.find_first() : gained.find_first());
            walk.emplace_back(a, o);
            a = holder[o];
        }
        Cycle c;
        c.steps.assign(walk.begin() + position[a], walk.end());
        c = canonical_rotation(std::move(c));
        auto cls = classify_cycle(c, mu, prefs);
        if (!cls.decreases.empty()) throw invariant_error("extracted cycle lowers an agent's welfare");
        if (cls.pareto_improving) return c;
        // c is also a cycle of nu's difference to mu; peel it off nu.
        Matching next = nu;
        const auto len = c.steps.size();
        for (std::size_t l = 0; l < len; ++l) {
            const auto [agent, received] = c.steps[l];
            next.bundles[agent].reset(received);
            next.bundles[agent].set(c.steps[(l + len - 1) % len].second);
        }
        nu = std::move(next);
    }
}

}  // namespace detail

/**
 * Some component-wise IR, Pareto-improving cycle of a CIR matching, or none.
 * None holds exactly when `mu` is unambiguously efficient.
 *
 * One flow query per agent (priority order) asks whether that agent's
 * attractive count can rise without lowering anyone else's; the first
 * improvement found is reduced to a single cycle.
 */
inline std::optional<Cycle> find_cir_pareto_improving_cycle(const Instance& inst, const Matching& mu,
                                                            const TrichotomousProfile& prefs) {
    if (!cir_trichotomous(inst, mu, prefs))
        throw input_error("improving-cycle search needs a component-wise individually rational matching");
    std::vector<ObjectSet> a(inst.num_agents());
    std::vector<ObjectSet> b(inst.num_agents());
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        a[i] = prefs[i].attractive;
        b[i] = prefs[i].bearable;
    }
    ConstraintNetwork net(inst, cir_constraints(inst, a, b, mu));
    if (!net.load(mu)) throw invariant_error("CIR matching rejected by its own constraint network");
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        if (!net.can_improve(i)) continue;
        net.maximize(i);
        return detail::improving_cycle_from(mu, net.matching(), prefs);
    }
    return std::nullopt;
}

}  // namespace bundlex
