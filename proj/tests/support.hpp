#pragma once

#include "bundlex/bundlex.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bundlex::testing {

/// Market with agents "1".."n"; agent i owns objects "<letter><k>".
inline Instance market(const std::vector<std::size_t>& sizes) {
    RawInstance raw;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        auto name = std::to_string(i + 1);
        raw.agents.push_back(name);
        for (std::size_t k = 0; k < sizes[i]; ++k) {
            std::string obj(1, static_cast<char>('a' + i));
            obj += std::to_string(k + 1);
            raw.objects.push_back(obj);
            raw.endowments[name].push_back(obj);
        }
    }
    return validate_instance(raw);
}

inline TrichotomousPreference random_trichotomous(const Instance& inst, AgentIndex i, std::mt19937_64& rng,
                                                  bool strongly = false) {
    std::uniform_int_distribution<int> pick(0, 2);
    TrichotomousPreference p{inst.empty_set(), inst.empty_set()};
    for (ObjectIndex o = 0; o < inst.num_objects(); ++o) {
        int c = pick(rng);
        if (inst.endowment(i).test(o) && c == 2) c = 1;
        if (c == 0) p.attractive.set(o);
        if (c == 1 && !strongly) p.bearable.set(o);
    }
    if (strongly) p.bearable = inst.endowment(i) - p.attractive;
    return p;
}

inline TrichotomousProfile random_profile(const Instance& inst, std::mt19937_64& rng, bool strongly = false) {
    TrichotomousProfile prefs;
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) prefs.push_back(random_trichotomous(inst, i, rng, strongly));
    return prefs;
}

inline Instance random_market(std::mt19937_64& rng, std::size_t max_agents, std::size_t max_endowment,
                              std::size_t max_objects) {
    std::uniform_int_distribution<std::size_t> agents(1, max_agents);
    std::uniform_int_distribution<std::size_t> size(1, max_endowment);
    while (true) {
        std::vector<std::size_t> sizes(agents(rng));
        std::size_t total = 0;
        for (auto& s : sizes) total += (s = size(rng));
        if (total <= max_objects) return market(sizes);
    }
}

inline Matching random_matching(const Instance& inst, std::mt19937_64& rng) {
    std::vector<ObjectIndex> objs(inst.num_objects());
    for (ObjectIndex o = 0; o < objs.size(); ++o) objs[o] = o;
    std::shuffle(objs.begin(), objs.end(), rng);
    Matching m;
    std::size_t next = 0;
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        ObjectSet b = inst.empty_set();
        for (std::size_t k = 0; k < inst.quota(i); ++k) b.set(objs[next++]);
        m.bundles.push_back(std::move(b));
    }
    return m;
}

/// Random marginal preference with up to `max_classes` classes, empty classes allowed.
inline MarginalPreference random_marginal(std::size_t universe, std::size_t max_classes, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, max_classes - 1);
    std::vector<ObjectSet> classes(max_classes, ObjectSet(universe));
    for (ObjectIndex o = 0; o < universe; ++o) classes[pick(rng)].set(o);
    return MarginalPreference(classes);
}

/// Random additive extension: strictly decreasing class values with random gaps.
inline ResponsiveExtension random_extension(const MarginalPreference& pref, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int64_t> gap(1, 40);
    std::vector<Rational> value(pref.num_classes());
    std::int64_t v = 0;
    for (std::size_t c = pref.num_classes(); c-- > 0;) value[c] = (v += gap(rng));
    ResponsiveExtension ext;
    for (ObjectIndex o = 0; o < pref.universe(); ++o) ext.utility.push_back(value[pref.rank(o)]);
    return ext;
}

/// X weakly beats Y for every responsive extension iff each object of Y can be paired with a
/// distinct object of X that is at least as good.
inline bool replacement_dominates(const ObjectSet& x, const ObjectSet& y, const MarginalPreference& pref) {
    std::vector<std::size_t> rx;
    std::vector<std::size_t> ry;
    for_each_member(x, [&](ObjectIndex o) { rx.push_back(pref.rank(o)); });
    for_each_member(y, [&](ObjectIndex o) { ry.push_back(pref.rank(o)); });
    std::vector<bool> used(rx.size(), false);
    std::sort(ry.begin(), ry.end());
    for (auto r : ry) {
        // take the worst x object that is still at least as good
        std::ptrdiff_t best = -1;
        for (std::size_t k = 0; k < rx.size(); ++k)
            if (!used[k] && rx[k] <= r && (best < 0 || rx[k] > rx[static_cast<std::size_t>(best)])) best = static_cast<std::ptrdiff_t>(k);
        if (best < 0) return false;
        used[static_cast<std::size_t>(best)] = true;
    }
    return true;
}

/// CIR oracle by extensions: some punishing extension ranks the endowment above the bundle.
inline bool punished(const Instance& inst, const Matching& mu, const MarginalProfile& prefs) {
    for (AgentIndex i = 0; i < inst.num_agents(); ++i)
        for (ObjectIndex pivot = 0; pivot < inst.num_objects(); ++pivot) {
            auto ext = build_punishing_extension(prefs[i], pivot, inst.quota(i));
            if (ext.score(inst.endowment(i)) > ext.score(mu[i])) return true;
        }
    return false;
}

/// Brute-force welfare oracle: largest |nu(i) ∩ A_i| over matchings satisfying the constraints.
inline std::optional<std::size_t> oracle_max(const Instance& inst, const WelfareConstraints& c, AgentIndex target) {
    std::optional<std::size_t> best;
    for_each_matching(inst, [&](const Matching& m) {
        for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
            const auto& a = c.agents[i];
            if (!m[i].is_subset_of(a.allowed)) return;
            auto w = (m[i] & a.attractive).count();
            if (w < a.min_attractive) return;
            if (a.exact_attractive && w != *a.exact_attractive) return;
        }
        auto w = (m[target] & c.agents[target].attractive).count();
        if (!best || w > *best) best = w;
    });
    return best;
}

inline std::vector<ObjectSet> attractive_sets(const TrichotomousProfile& p) {
    std::vector<ObjectSet> out;
    for (const auto& x : p) out.push_back(x.attractive);
    return out;
}

inline std::vector<ObjectSet> bearable_sets(const TrichotomousProfile& p) {
    std::vector<ObjectSet> out;
    for (const auto& x : p) out.push_back(x.bearable);
    return out;
}

/// Welfare-count view of Pareto improvement used for trichotomous CIR matchings.
inline bool weakly_improves(const Matching& nu, const Matching& mu, const TrichotomousProfile& p) {
    for (AgentIndex i = 0; i < mu.num_agents(); ++i)
        if (p[i].welfare(nu[i]) < p[i].welfare(mu[i])) return false;
    return true;
}

}  // namespace bundlex::testing
