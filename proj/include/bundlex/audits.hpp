#pragma once

#include "bundlex/cycles.hpp"
#include "bundlex/enumerate.hpp"
#include "bundlex/mechanism.hpp"
#include "bundlex/model.hpp"
#include "bundlex/responsive.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bundlex {

using MechanismFn = std::function<Matching(const Instance&, const TrichotomousProfile&)>;

inline MechanismFn ir_priority_mechanism() {
    return [](const Instance& inst, const TrichotomousProfile& prefs) { return run_ir_priority(inst, prefs).matching; };
}

// ---------------------------------------------------------------------------
// Preference universes

/// Every trichotomous report of agent i, in a fixed order; `domain` filters when given.
inline std::vector<TrichotomousPreference> trichotomous_preferences(const Instance& inst, AgentIndex i,
                                                                    const DomainSpec* domain = nullptr) {
    const auto m = inst.num_objects();
    if (m > 20) throw too_large_error("too many objects to enumerate preferences");
    const auto& own = inst.endowment(i);
    std::vector<TrichotomousPreference> out;
    std::vector<int> digit(m, 0);  // 0 attractive, 1 bearable, 2 unacceptable
    while (true) {
        TrichotomousPreference p{ObjectSet(m), ObjectSet(m)};
        for (ObjectIndex o = 0; o < m; ++o) {
            if (digit[o] == 0) p.attractive.set(o);
            if (digit[o] == 1) p.bearable.set(o);
        }
        if (!domain || domain_membership(to_marginal(p), *domain, own)) out.push_back(std::move(p));
        ObjectIndex o = 0;
        for (; o < m; ++o) {
            const int top = own.test(o) ? 1 : 2;
            if (digit[o] < top) {
                ++digit[o];
                break;
            }
            digit[o] = 0;
        }
        if (o == m) break;
    }
    return out;
}

/// Strongly trichotomous reports: any attractive set, bearable = endowment minus attractive.
inline std::vector<TrichotomousPreference> strongly_trichotomous_preferences(const Instance& inst, AgentIndex i) {
    const auto m = inst.num_objects();
    if (m > 20) throw too_large_error("too many objects to enumerate preferences");
    std::vector<TrichotomousPreference> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        auto a = from_mask(m, mask);
        out.push_back({a, inst.endowment(i) - a});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Efficiency

enum class EfficiencyMode { cycle, brute };

namespace detail {

// Per-agent table over bundles (as masks) of that agent's size: may the agent
// weakly gain / strictly gain by moving from mu(i) to the bundle, under some extension.
struct GainTable {
    const Instance* inst;
    const MarginalProfile* prefs;
    std::vector<std::uint64_t> base;
    std::vector<std::vector<std::int8_t>> cache;  // -1 unknown, else bit0 weak, bit1 strict

    GainTable(const Instance& i, const MarginalProfile& p, const Matching& mu) : inst(&i), prefs(&p) {
        for (AgentIndex a = 0; a < i.num_agents(); ++a) base.push_back(to_mask(mu[a]));
        cache.assign(i.num_agents(), std::vector<std::int8_t>(std::size_t{1} << i.num_objects(), -1));
    }

    std::int8_t flags(AgentIndex i, std::uint64_t bundle) {
        auto& c = cache[i][bundle];
        if (c < 0) {
            const auto m = inst->num_objects();
            auto x = from_mask(m, bundle);
            auto y = from_mask(m, base[i]);
            auto cmp = compare_unambiguous(x, y, (*prefs)[i]);
            const bool weak = cmp != BundleComparison::always_weakly_worse;
            const bool strict = cmp == BundleComparison::always_weakly_better || cmp == BundleComparison::ambiguous;
            c = static_cast<std::int8_t>((weak ? 1 : 0) | (strict ? 2 : 0));
        }
        return c;
    }
};

}  // namespace detail

/**
 * A matching that Pareto-improves `mu` under some responsive extension of
 * every agent's marginal: nobody is unambiguously worse off and somebody can
 * be strictly better off. The first one in canonical order, or none.
 */
inline std::optional<Matching> find_pareto_improvement(const Instance& inst, const Matching& mu,
                                                       const MarginalProfile& prefs,
                                                       std::size_t max_objects = default_enumeration_bound) {
    check_profile(inst, prefs);
    validate_matching(inst, mu);
    require_enumerable(inst, max_objects);
    detail::GainTable table(inst, prefs, mu);
    std::optional<Matching> found;
    for_each_mask_assignment(
        quotas(inst), universe_mask(inst.num_objects()),
        [&](std::size_t i, std::uint64_t bundle) { return (table.flags(i, bundle) & 1) != 0; },
        [&](const std::vector<std::uint64_t>& masks) {
            for (AgentIndex i = 0; i < masks.size(); ++i)
                if (table.flags(i, masks[i]) & 2) {
                    found = matching_from_masks(inst.num_objects(), masks);
                    return false;
                }
            return true;
        });
    return found;
}

inline bool unambiguously_efficient(const Instance& inst, const Matching& mu, const MarginalProfile& prefs,
                                    std::size_t max_objects = default_enumeration_bound) {
    return !find_pareto_improvement(inst, mu, prefs, max_objects);
}

/// Cycle mode needs a CIR matching; brute mode enumerates every matching.
inline bool unambiguously_efficient(const Instance& inst, const Matching& mu, const TrichotomousProfile& prefs,
                                    EfficiencyMode mode, std::size_t max_objects = default_enumeration_bound) {
    check_profile(inst, prefs);
    validate_matching(inst, mu);
    if (mode == EfficiencyMode::cycle) {
        if (!cir_trichotomous(inst, mu, prefs))
            throw input_error("cycle-mode efficiency applies to component-wise individually rational matchings only");
        return !find_cir_pareto_improving_cycle(inst, mu, prefs);
    }
    return unambiguously_efficient(inst, mu, to_marginal(prefs), max_objects);
}

/// Every matching that is both component-wise IR and unambiguously efficient, in canonical order.
inline std::vector<Matching> efficient_ir_matchings(const Instance& inst, const MarginalProfile& prefs,
                                                    std::size_t max_objects = default_enumeration_bound) {
    std::vector<Matching> out;
    for_each_matching(
        inst,
        [&](const Matching& m) {
            if (is_component_wise_IR(inst, m, prefs) && unambiguously_efficient(inst, m, prefs, max_objects))
                out.push_back(m);
        },
        max_objects);
    return out;
}

// ---------------------------------------------------------------------------
// Manipulation

struct ManipulationWitness {
    AgentIndex agent = 0;
    TrichotomousPreference truthful;
    TrichotomousPreference misreport;
    ObjectSet truthful_bundle;
    ObjectSet misreport_bundle;
    ResponsiveExtension certificate;
};

/// Memoized mechanism outcomes keyed by the reported profile.
class OutcomeCache {
public:
    explicit OutcomeCache(MechanismFn mechanism = ir_priority_mechanism()) : mechanism_(std::move(mechanism)) {}

    const Matching& outcome(const Instance& inst, const TrichotomousProfile& prefs) {
        std::vector<std::uint64_t> key;
        key.reserve(2 * prefs.size());
        for (const auto& p : prefs) {
            key.push_back(to_mask(p.attractive));
            key.push_back(to_mask(p.bearable));
        }
        auto it = memo_.find(key);
        if (it == memo_.end()) it = memo_.emplace(std::move(key), mechanism_(inst, prefs)).first;
        return it->second;
    }

    std::size_t size() const { return memo_.size(); }

private:
    MechanismFn mechanism_;
    std::map<std::vector<std::uint64_t>, Matching> memo_;
};

namespace detail {

inline std::optional<ManipulationWitness> search_misreports(
    const Instance& inst, const TrichotomousProfile& prefs, OutcomeCache& cache,
    const std::function<std::vector<TrichotomousPreference>(AgentIndex)>& universe) {
    const auto& truth = cache.outcome(inst, prefs);
    const std::vector<Matching> truthful_outcome{truth};
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        const auto marginal = to_marginal(prefs[i]);
        const auto& truthful_bundle = truthful_outcome[0][i];
        auto reported = prefs;
        for (auto& mis : universe(i)) {
            if (mis == prefs[i]) continue;
            reported[i] = mis;
            const auto& bundle = cache.outcome(inst, reported)[i];
            if (!exists_strict_preference(bundle, truthful_bundle, marginal)) continue;
            auto cert = strict_preference_certificate(bundle, truthful_bundle, marginal);
            if (!cert) throw invariant_error("strict preference without a certificate");
            return ManipulationWitness{i, prefs[i], std::move(mis), truthful_bundle, bundle, std::move(*cert)};
        }
    }
    return std::nullopt;
}

}  // namespace detail

/**
 * First profitable misreport within `domain`, or none. A misreport counts when
 * the resulting bundle is strictly better than the truthful one under some
 * responsive extension of the true marginal.
 */
inline std::optional<ManipulationWitness> check_strategy_proofness(const Instance& inst,
                                                                   const TrichotomousProfile& prefs,
                                                                   const DomainSpec& domain, OutcomeCache& cache) {
    check_profile(inst, prefs);
    domain.validate();
    return detail::search_misreports(inst, prefs, cache,
                                     [&](AgentIndex i) { return trichotomous_preferences(inst, i, &domain); });
}

inline std::optional<ManipulationWitness> check_strategy_proofness(const Instance& inst,
                                                                   const TrichotomousProfile& prefs,
                                                                   const DomainSpec& domain) {
    OutcomeCache cache;
    return check_strategy_proofness(inst, prefs, domain, cache);
}

/// Misreports of the bearable set only; any valid report must keep Ω_i \ A_i bearable.
inline std::vector<TrichotomousPreference> truncation_misreports(const Instance& inst, AgentIndex i,
                                                                 const TrichotomousPreference& truth) {
    const auto m = inst.num_objects();
    const ObjectSet forced = inst.endowment(i) - truth.attractive;
    const auto free = members((full_set(m) - truth.attractive) - forced);
    if (free.size() > 20) throw too_large_error("too many bearable-set misreports to enumerate");
    std::vector<TrichotomousPreference> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
        ObjectSet b = forced;
        for (std::size_t k = 0; k < free.size(); ++k)
            if (mask >> k & 1) b.set(free[k]);
        out.push_back({truth.attractive, std::move(b)});
    }
    return out;
}

inline std::optional<ManipulationWitness> check_truncation_proofness(const Instance& inst,
                                                                     const TrichotomousProfile& prefs,
                                                                     OutcomeCache& cache) {
    check_profile(inst, prefs);
    return detail::search_misreports(inst, prefs, cache,
                                     [&](AgentIndex i) { return truncation_misreports(inst, i, prefs[i]); });
}

inline std::optional<ManipulationWitness> check_truncation_proofness(const Instance& inst,
                                                                     const TrichotomousProfile& prefs) {
    OutcomeCache cache;
    return check_truncation_proofness(inst, prefs, cache);
}

enum class WorstOrBest { best, worst };

inline std::string to_string(WorstOrBest c) { return c == WorstOrBest::best ? "best-case" : "worst-case"; }

struct ObviousManipulationWitness {
    AgentIndex agent = 0;
    WorstOrBest kind = WorstOrBest::best;
    TrichotomousPreference truthful;
    TrichotomousPreference misreport;
    ObjectSet truthful_bundle;   // truth's best (or worst) case
    ObjectSet misreport_bundle;  // the misreport outcome that beats it
};

/// All profiles of the other agents' reports, agent i's slot left as given.
inline std::vector<TrichotomousProfile> opponent_profiles(const Instance& inst, AgentIndex i,
                                                          const TrichotomousProfile& base,
                                                          std::size_t limit = 200000) {
    std::vector<std::vector<TrichotomousPreference>> options(inst.num_agents());
    std::size_t total = 1;
    for (AgentIndex j = 0; j < inst.num_agents(); ++j) {
        options[j] = j == i ? std::vector<TrichotomousPreference>{base[i]} : trichotomous_preferences(inst, j);
        total *= options[j].size();
        if (total > limit) throw too_large_error("opponent profile space exceeds " + std::to_string(limit));
    }
    std::vector<TrichotomousProfile> out;
    std::vector<std::size_t> idx(inst.num_agents(), 0);
    while (true) {
        TrichotomousProfile p;
        for (AgentIndex j = 0; j < inst.num_agents(); ++j) p.push_back(options[j][idx[j]]);
        out.push_back(std::move(p));
        AgentIndex j = 0;
        for (; j < inst.num_agents(); ++j) {
            if (++idx[j] < options[j].size()) break;
            idx[j] = 0;
        }
        if (j == inst.num_agents()) break;
    }
    return out;
}

/**
 * Searches trichotomous misreports whose best case beats truth's best case, or
 * whose worst case beats truth's worst case, under some responsive extension.
 * Cases range over `opponents` (agent i's own entry is ignored); when empty,
 * every trichotomous profile of the others is used. Outcomes are memoized only
 * in `shared`. Throws too_large_error when more than `max_runs` mechanism runs
 * would be needed.
 */
inline std::optional<ObviousManipulationWitness> check_obvious_manipulability(
    const Instance& inst, const TrichotomousProfile& prefs, std::vector<TrichotomousProfile> opponents = {},
    OutcomeCache* shared = nullptr, std::size_t max_runs = 2000000) {
    check_profile(inst, prefs);
    const auto mechanism = ir_priority_mechanism();
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        auto universe = opponents.empty() ? opponent_profiles(inst, i, prefs) : opponents;
        const auto reports = trichotomous_preferences(inst, i);
        if (universe.size() * reports.size() > max_runs)
            throw too_large_error("obvious-manipulation search needs more than " + std::to_string(max_runs) +
                                  " mechanism runs");
        // distinct outcome types under the true preference, each with the first bundle that produced it
        auto outcomes = [&](const TrichotomousPreference& report) {
            std::vector<std::pair<BundleType, ObjectSet>> seen;
            for (auto p : universe) {
                p[i] = report;
                auto b = shared ? shared->outcome(inst, p)[i] : mechanism(inst, p)[i];
                auto t = bundle_type(prefs[i], b);
                if (std::none_of(seen.begin(), seen.end(), [&](const auto& s) { return s.first == t; }))
                    seen.emplace_back(t, std::move(b));
            }
            return seen;
        };
        const auto truth = outcomes(prefs[i]);
        for (const auto& mis : reports) {
            if (mis == prefs[i]) continue;
            const auto lie = outcomes(mis);
            for (const auto& [x, bundle] : lie) {
                // no truthful outcome is weakly above this one under every extension
                if (std::none_of(truth.begin(), truth.end(), [&](const auto& y) { return type_dominates(y.first, x); }))
                    return ObviousManipulationWitness{i, WorstOrBest::best, prefs[i], mis, truth[0].second, bundle};
            }
            for (const auto& [y, bundle] : truth) {
                if (std::none_of(lie.begin(), lie.end(), [&](const auto& x) { return type_dominates(y, x.first); }))
                    return ObviousManipulationWitness{i, WorstOrBest::worst, prefs[i], mis, bundle, lie[0].second};
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Weak core

struct BlockWitness {
    std::vector<AgentIndex> coalition;
    std::vector<ObjectSet> reallocation;  // parallel to coalition
    std::vector<std::optional<ResponsiveExtension>> certificates;
};

namespace detail {

// can_gain(i, bundle): some admissible extension ranks bundle strictly above mu(i).
template <typename CanGain>
std::optional<BlockWitness> find_block(const Instance& inst, CanGain&& can_gain) {
    const auto n = inst.num_agents();
    if (n > 20) throw too_large_error("too many agents for coalition enumeration");
    const auto m = inst.num_objects();
    for (std::size_t size = 1; size <= n; ++size) {
        for (std::uint64_t coalition = 0; coalition < (std::uint64_t{1} << n); ++coalition) {
            if (static_cast<std::size_t>(__builtin_popcountll(coalition)) != size) continue;
            std::vector<AgentIndex> members_of;
            std::vector<std::size_t> q;
            std::uint64_t pool = 0;
            for (AgentIndex i = 0; i < n; ++i)
                if (coalition >> i & 1) {
                    members_of.push_back(i);
                    q.push_back(inst.quota(i));
                    pool |= to_mask(inst.endowment(i));
                }
            std::optional<BlockWitness> found;
            for_each_mask_assignment(
                q, pool, [&](std::size_t k, std::uint64_t bundle) { return can_gain(members_of[k], bundle); },
                [&](const std::vector<std::uint64_t>& masks) {
                    BlockWitness w;
                    w.coalition = members_of;
                    for (auto mask : masks) w.reallocation.push_back(from_mask(m, mask));
                    found = std::move(w);
                    return false;
                });
            if (found) return found;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/**
 * A coalition and a reallocation of its own endowments under which every
 * member is strictly better off for some responsive extension, or none.
 */
inline std::optional<BlockWitness> unambiguously_in_weak_core(const Instance& inst, const Matching& mu,
                                                              const MarginalProfile& prefs,
                                                              std::size_t max_objects = default_enumeration_bound) {
    check_profile(inst, prefs);
    validate_matching(inst, mu);
    require_enumerable(inst, max_objects);
    const auto m = inst.num_objects();
    auto w = detail::find_block(inst, [&](AgentIndex i, std::uint64_t bundle) {
        return exists_strict_preference(from_mask(m, bundle), mu[i], prefs[i]);
    });
    if (w)
        for (std::size_t k = 0; k < w->coalition.size(); ++k)
            w->certificates.push_back(
                strict_preference_certificate(w->reallocation[k], mu[w->coalition[k]], prefs[w->coalition[k]]));
    return w;
}

/// With `strict_acceptability`, only extensions that rank every bundle with an unacceptable object below the endowment count.
inline std::optional<BlockWitness> unambiguously_in_weak_core(const Instance& inst, const Matching& mu,
                                                              const TrichotomousProfile& prefs,
                                                              bool strict_acceptability,
                                                              std::size_t max_objects = default_enumeration_bound) {
    if (!strict_acceptability) return unambiguously_in_weak_core(inst, mu, to_marginal(prefs), max_objects);
    check_profile(inst, prefs);
    validate_matching(inst, mu);
    require_enumerable(inst, max_objects);
    const auto m = inst.num_objects();
    auto w = detail::find_block(inst, [&](AgentIndex i, std::uint64_t bundle) {
        return exists_strict_preference_strictly_acceptable(from_mask(m, bundle), mu[i], prefs[i], inst.endowment(i));
    });
    if (w)
        for (std::size_t k = 0; k < w->coalition.size(); ++k) {
            const auto i = w->coalition[k];
            w->certificates.push_back(
                strictly_acceptable_certificate(w->reallocation[k], mu[i], prefs[i], inst.endowment(i)));
        }
    return w;
}

/**
 * Some matching that is unambiguously efficient and unambiguously in the weak
 * core under strict acceptability; the mechanism's output is tried first,
 * then every matching in canonical order.
 */
inline std::optional<Matching> find_efficient_core_matching(const Instance& inst, const TrichotomousProfile& prefs,
                                                            std::size_t max_objects = default_enumeration_bound) {
    check_profile(inst, prefs);
    require_enumerable(inst, max_objects);
    const auto marginal = to_marginal(prefs);
    auto qualifies = [&](const Matching& m) {
        if (unambiguously_in_weak_core(inst, m, prefs, true, max_objects)) return false;
        if (cir_trichotomous(inst, m, prefs)) return !find_cir_pareto_improving_cycle(inst, m, prefs);
        return unambiguously_efficient(inst, m, marginal, max_objects);
    };
    auto first = run_ir_priority(inst, prefs).matching;
    if (qualifies(first)) return first;
    std::optional<Matching> found;
    for_each_matching(
        inst,
        [&](const Matching& m) {
            if (!qualifies(m)) return true;
            found = m;
            return false;
        },
        max_objects);
    return found;
}

}  // namespace bundlex
