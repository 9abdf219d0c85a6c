#pragma once

#include "bundlex/errors.hpp"
#include "bundlex/object_set.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bundlex {

/// Instance data as read from a file, before any consistency checks.
struct RawInstance {
    std::vector<std::string> agents;   // priority order
    std::vector<std::string> objects;
    std::map<std::string, std::vector<std::string>> endowments;
};

/**
 * A validated exchange market.
 *
 * Agents are indexed in priority order. Objects are indexed in lexicographic
 * order of their identifiers, which is the canonical order used for every
 * tie-break in the library. Endowments are non-empty, pairwise disjoint, and
 * cover the object universe.
 */
class Instance {
public:
    Instance() = default;

    std::size_t num_agents() const { return agents_.size(); }
    std::size_t num_objects() const { return objects_.size(); }

    const std::string& agent_name(AgentIndex i) const { return agents_.at(i); }
    const std::string& object_name(ObjectIndex o) const { return objects_.at(o); }
    const std::vector<std::string>& agent_names() const { return agents_; }
    const std::vector<std::string>& object_names() const { return objects_; }

    std::optional<AgentIndex> find_agent(std::string_view name) const {
        auto it = std::find(agents_.begin(), agents_.end(), name);
        if (it == agents_.end()) return std::nullopt;
        return static_cast<AgentIndex>(it - agents_.begin());
    }

    std::optional<ObjectIndex> find_object(std::string_view name) const {
        auto it = std::lower_bound(objects_.begin(), objects_.end(), name);
        if (it == objects_.end() || *it != name) return std::nullopt;
        return static_cast<ObjectIndex>(it - objects_.begin());
    }

    AgentIndex agent(std::string_view name) const {
        if (auto i = find_agent(name)) return *i;
        throw input_error("unknown agent '" + std::string(name) + "'");
    }

    ObjectIndex object(std::string_view name) const {
        if (auto o = find_object(name)) return *o;
        throw input_error("unknown object '" + std::string(name) + "'");
    }

    ObjectSet objects_named(const std::vector<std::string>& names) const {
        ObjectSet s(num_objects());
        for (const auto& n : names) s.set(object(n));
        return s;
    }

    const ObjectSet& endowment(AgentIndex i) const { return endowments_.at(i); }
    std::size_t quota(AgentIndex i) const { return endowments_.at(i).count(); }
    AgentIndex owner(ObjectIndex o) const { return owner_.at(o); }
    ObjectSet empty_set() const { return ObjectSet(num_objects()); }

    /// Same market with agents re-ranked; `order` must be a permutation of the agent names.
    Instance with_priority(const std::vector<std::string>& order) const;

    friend Instance validate_instance(const RawInstance& raw);

private:
    std::vector<std::string> agents_;
    std::vector<std::string> objects_;
    std::vector<ObjectSet> endowments_;
    std::vector<AgentIndex> owner_;
};

inline Instance validate_instance(const RawInstance& raw) {
    Instance inst;
    if (raw.agents.empty()) throw input_error("instance has no agents");
    inst.agents_ = raw.agents;
    {
        auto sorted = raw.agents;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw input_error("duplicate agent identifier");
    }
    inst.objects_ = raw.objects;
    std::sort(inst.objects_.begin(), inst.objects_.end());
    if (std::adjacent_find(inst.objects_.begin(), inst.objects_.end()) != inst.objects_.end())
        throw input_error("duplicate object identifier");

    for (const auto& [agent, _] : raw.endowments)
        if (!inst.find_agent(agent)) throw input_error("endowment for unknown agent '" + agent + "'");

    constexpr AgentIndex unowned = static_cast<AgentIndex>(-1);
    inst.owner_.assign(inst.objects_.size(), unowned);
    for (AgentIndex i = 0; i < inst.agents_.size(); ++i) {
        const auto& name = inst.agents_[i];
        auto it = raw.endowments.find(name);
        if (it == raw.endowments.end() || it->second.empty())
            throw input_error("agent '" + name + "' has an empty endowment");
        ObjectSet own(inst.objects_.size());
        for (const auto& obj : it->second) {
            auto o = inst.object(obj);
            if (inst.owner_[o] != unowned)
                throw input_error("overlapping endowments: object '" + obj + "' is owned by '" +
                                  inst.agents_[inst.owner_[o]] + "' and '" + name + "'");
            inst.owner_[o] = i;
            own.set(o);
        }
        inst.endowments_.push_back(std::move(own));
    }
    for (ObjectIndex o = 0; o < inst.objects_.size(); ++o)
        if (inst.owner_[o] == unowned)
            throw input_error("object '" + inst.objects_[o] + "' is owned by nobody");
    return inst;
}

inline Instance Instance::with_priority(const std::vector<std::string>& order) const {
    if (order.size() != agents_.size()) throw input_error("priority order must list every agent once");
    RawInstance raw;
    raw.agents = order;
    raw.objects = objects_;
    for (const auto& name : order) {
        auto i = agent(name);
        for_each_member(endowments_[i], [&](ObjectIndex o) { raw.endowments[name].push_back(objects_[o]); });
    }
    return validate_instance(raw);
}

// ---------------------------------------------------------------------------
// Matchings

/// Assignment of a bundle to every agent, indexed like the instance's agents.
struct Matching {
    std::vector<ObjectSet> bundles;

    const ObjectSet& operator[](AgentIndex i) const { return bundles[i]; }
    std::size_t num_agents() const { return bundles.size(); }

    friend bool operator==(const Matching&, const Matching&) = default;

    static Matching endowment(const Instance& inst) {
        Matching m;
        for (AgentIndex i = 0; i < inst.num_agents(); ++i) m.bundles.push_back(inst.endowment(i));
        return m;
    }
};

/// Canonical order: agent by agent, comparing ascending member lists.
inline bool lex_less(const Matching& a, const Matching& b) {
    for (std::size_t i = 0; i < a.bundles.size(); ++i) {
        if (lex_less(a.bundles[i], b.bundles[i])) return true;
        if (lex_less(b.bundles[i], a.bundles[i])) return false;
    }
    return false;
}

/// Throws input_error unless `m` is a balanced, disjoint, covering assignment for `inst`.
inline void validate_matching(const Instance& inst, const Matching& m) {
    if (m.bundles.size() != inst.num_agents()) throw input_error("matching must assign a bundle to every agent");
    ObjectSet seen(inst.num_objects());
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        const auto& b = m.bundles[i];
        if (b.size() != inst.num_objects()) throw input_error("bundle over the wrong object universe");
        if (b.count() != inst.quota(i))
            throw input_error("agent '" + inst.agent_name(i) + "' receives " + std::to_string(b.count()) +
                              " objects but is endowed with " + std::to_string(inst.quota(i)));
        if (seen.intersects(b)) throw input_error("matching assigns an object to two agents");
        seen |= b;
    }
    if (!seen.all()) throw input_error("matching leaves an object unassigned");
}

/// holder[o] = agent holding o under m.
inline std::vector<AgentIndex> holders(const Matching& m, std::size_t num_objects) {
    std::vector<AgentIndex> h(num_objects, 0);
    for (AgentIndex i = 0; i < m.bundles.size(); ++i) for_each_member(m.bundles[i], [&](ObjectIndex o) { h[o] = i; });
    return h;
}

// ---------------------------------------------------------------------------
// Preferences

/**
 * A weak order over objects, stored as indifference classes from best to worst.
 * Empty classes are kept so that class ranks line up with a DomainSpec.
 */
class MarginalPreference {
public:
    MarginalPreference() = default;

    explicit MarginalPreference(std::vector<ObjectSet> classes) : classes_(std::move(classes)) {
        if (classes_.empty()) throw input_error("marginal preference needs at least one class");
        const auto n = classes_.front().size();
        rank_.assign(n, 0);
        ObjectSet seen(n);
        for (std::size_t k = 0; k < classes_.size(); ++k) {
            if (classes_[k].size() != n) throw input_error("indifference classes over different universes");
            if (seen.intersects(classes_[k])) throw input_error("indifference classes overlap");
            seen |= classes_[k];
            for_each_member(classes_[k], [&](ObjectIndex o) { rank_[o] = k; });
        }
        if (!seen.all()) throw input_error("indifference classes do not cover every object");
    }

    const std::vector<ObjectSet>& classes() const { return classes_; }
    std::size_t num_classes() const { return classes_.size(); }
    std::size_t universe() const { return rank_.size(); }

    /// 0 is the best class.
    std::size_t rank(ObjectIndex o) const { return rank_[o]; }
    bool weakly_prefers(ObjectIndex a, ObjectIndex b) const { return rank_[a] <= rank_[b]; }
    bool strictly_prefers(ObjectIndex a, ObjectIndex b) const { return rank_[a] < rank_[b]; }

    friend bool operator==(const MarginalPreference& a, const MarginalPreference& b) {
        return a.rank_ == b.rank_ && a.classes_.size() == b.classes_.size();
    }

private:
    std::vector<ObjectSet> classes_;
    std::vector<std::size_t> rank_;
};

/// Trichotomous marginal: attractive set A, bearable set B, everything else unacceptable.
struct TrichotomousPreference {
    ObjectSet attractive;
    ObjectSet bearable;

    ObjectSet acceptable() const { return attractive | bearable; }
    std::size_t welfare(const ObjectSet& bundle) const { return (bundle & attractive).count(); }

    friend bool operator==(const TrichotomousPreference&, const TrichotomousPreference&) = default;
};

using MarginalProfile = std::vector<MarginalPreference>;
using TrichotomousProfile = std::vector<TrichotomousPreference>;

inline void check_trichotomous(const Instance& inst, AgentIndex i, const TrichotomousPreference& p) {
    const auto n = inst.num_objects();
    if (p.attractive.size() != n || p.bearable.size() != n)
        throw input_error("preference of '" + inst.agent_name(i) + "' is over the wrong universe");
    if (p.attractive.intersects(p.bearable))
        throw input_error("attractive and bearable sets of '" + inst.agent_name(i) + "' overlap");
    if (!inst.endowment(i).is_subset_of(p.acceptable()))
        throw input_error("endowment of '" + inst.agent_name(i) + "' is not within its attractive and bearable sets");
}

inline void check_profile(const Instance& inst, const TrichotomousProfile& prefs) {
    if (prefs.size() != inst.num_agents()) throw input_error("profile must give a preference for every agent");
    for (AgentIndex i = 0; i < prefs.size(); ++i) check_trichotomous(inst, i, prefs[i]);
}

inline void check_profile(const Instance& inst, const MarginalProfile& prefs) {
    if (prefs.size() != inst.num_agents()) throw input_error("profile must give a preference for every agent");
    for (const auto& p : prefs)
        if (p.universe() != inst.num_objects()) throw input_error("marginal preference over the wrong universe");
}

/// Three-class encoding [A, B, rest].
inline MarginalPreference to_marginal(const TrichotomousPreference& p) {
    ObjectSet rest = ~(p.attractive | p.bearable);
    return MarginalPreference({p.attractive, p.bearable, rest});
}

inline MarginalProfile to_marginal(const TrichotomousProfile& prefs) {
    MarginalProfile out;
    out.reserve(prefs.size());
    for (const auto& p : prefs) out.push_back(to_marginal(p));
    return out;
}

/// First class becomes A, second becomes B; lower classes collapse to "unacceptable".
inline TrichotomousPreference to_trichotomous(const MarginalPreference& pref, const ObjectSet& endowment) {
    const auto& cls = pref.classes();
    for (std::size_t k = 2; k < cls.size(); ++k)
        if (cls[k].intersects(endowment))
            throw input_error("not trichotomous: an endowed object sits in class " + std::to_string(k + 1));
    TrichotomousPreference t{cls[0], cls.size() > 1 ? cls[1] : ObjectSet(pref.universe())};
    return t;
}

// ---------------------------------------------------------------------------
// Preference domains

/**
 * Which indifference classes may hold endowed (epsilon) and non-endowed (nu)
 * objects. Ranks are 1-based; ranks past the stored prefix take the tail value.
 */
struct DomainSpec {
    std::vector<bool> epsilon;
    std::vector<bool> nu;
    bool epsilon_tail = false;
    bool nu_tail = false;

    bool eps(std::size_t k) const { return k - 1 < epsilon.size() ? epsilon[k - 1] : epsilon_tail; }
    bool nu_at(std::size_t k) const { return k - 1 < nu.size() ? nu[k - 1] : nu_tail; }

    void validate() const {
        if (!nu_at(1)) throw input_error("domain must allow non-endowed objects in the first class");
        bool any_eps = epsilon_tail || std::find(epsilon.begin(), epsilon.end(), true) != epsilon.end();
        if (!any_eps) throw input_error("domain must allow endowed objects somewhere");
        const auto horizon = std::max(epsilon.size(), nu.size()) + 1;
        for (std::size_t k = 2; k <= horizon; ++k) {
            if (!(eps(k) || nu_at(k))) continue;
            for (std::size_t j = 1; j < k; ++j)
                if (!(eps(j) || nu_at(j))) throw input_error("domain forces an intermediate class to be empty");
        }
    }

    static DomainSpec all_weak_orders() { return {{}, {}, true, true}; }
    static DomainSpec dichotomous() { return {{true, true}, {true, true}, false, false}; }
    static DomainSpec m_chotomous(std::size_t m) {
        return {std::vector<bool>(m, true), std::vector<bool>(m, true), false, false};
    }
    /// Endowments in the top two classes only; any number of lower classes for non-endowments.
    static DomainSpec trichotomous() { return {{true, true}, {true, true}, false, true}; }
    static DomainSpec strongly_trichotomous() { return {{true, true}, {true, false}, false, true}; }
};

inline bool domain_membership(const MarginalPreference& pref, const DomainSpec& spec, const ObjectSet& endowment) {
    const auto& cls = pref.classes();
    for (std::size_t k = 0; k < cls.size(); ++k) {
        if (cls[k].intersects(endowment) && !spec.eps(k + 1)) return false;
        if ((cls[k] - endowment).any() && !spec.nu_at(k + 1)) return false;
    }
    return true;
}

enum class DomainKind { strongly_trichotomous, trichotomous, dichotomous, m_chotomous, general };

struct DomainLabel {
    DomainKind kind;
    std::size_t m = 0;  // number of classes up to the last non-empty one (for m_chotomous)
};

inline std::string to_string(const DomainLabel& l) {
    switch (l.kind) {
        case DomainKind::strongly_trichotomous: return "strongly-trichotomous";
        case DomainKind::trichotomous: return "trichotomous";
        case DomainKind::dichotomous: return "dichotomous";
        case DomainKind::m_chotomous: return "m-chotomous(" + std::to_string(l.m) + ")";
        case DomainKind::general: return "general";
    }
    return "general";
}

/**
 * Most specific named domain containing `pref`. Strongly trichotomous wins over
 * dichotomous when both apply; every finite weak order is m-chotomous for its
 * number of non-trailing classes, so `general` is only reported for a
 * preference with no non-empty class.
 */
inline DomainLabel classify_domain(const MarginalPreference& pref, const ObjectSet& endowment) {
    if (domain_membership(pref, DomainSpec::strongly_trichotomous(), endowment))
        return {DomainKind::strongly_trichotomous};
    std::size_t m = 0;
    for (std::size_t k = 0; k < pref.num_classes(); ++k)
        if (pref.classes()[k].any()) m = k + 1;
    if (m == 0) return {DomainKind::general};
    if (m <= 2) return {DomainKind::dichotomous, m};
    if (domain_membership(pref, DomainSpec::trichotomous(), endowment)) return {DomainKind::trichotomous, m};
    return {DomainKind::m_chotomous, m};
}

}  // namespace bundlex
