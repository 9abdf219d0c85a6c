#pragma once

#include "bundlex/model.hpp"

#include <boost/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bundlex {

using Rational = boost::rational<std::int64_t>;

/**
 * An additive bundle ranking: a bundle scores the sum of its objects'
 * utilities. Order-consistent with a marginal preference when strictly
 * preferred objects get strictly larger utility and indifferent objects get
 * equal utility; such an extension is responsive to that marginal.
 */
struct ResponsiveExtension {
    std::vector<Rational> utility;  // indexed by object

    Rational score(const ObjectSet& bundle) const {
        Rational s = 0;
        for_each_member(bundle, [&](ObjectIndex o) { s += utility[o]; });
        return s;
    }

    bool consistent_with(const MarginalPreference& pref) const {
        if (utility.size() != pref.universe()) return false;
        for (ObjectIndex a = 0; a < utility.size(); ++a)
            for (ObjectIndex b = 0; b < utility.size(); ++b) {
                if (pref.strictly_prefers(a, b) && !(utility[a] > utility[b])) return false;
                if (pref.rank(a) == pref.rank(b) && utility[a] != utility[b]) return false;
            }
        return true;
    }
};

enum class BundleComparison { always_weakly_better, always_weakly_worse, equivalent, ambiguous };

inline std::string to_string(BundleComparison c) {
    switch (c) {
        case BundleComparison::always_weakly_better: return "always-weakly-better";
        case BundleComparison::always_weakly_worse: return "always-weakly-worse";
        case BundleComparison::equivalent: return "equivalent";
        case BundleComparison::ambiguous: return "ambiguous";
    }
    return "ambiguous";
}

namespace detail {

inline std::vector<std::size_t> sorted_ranks(const ObjectSet& s, const MarginalPreference& pref) {
    std::vector<std::size_t> r;
    r.reserve(s.count());
    for_each_member(s, [&](ObjectIndex o) { r.push_back(pref.rank(o)); });
    std::sort(r.begin(), r.end());
    return r;
}

// x dominates y iff the k-th best of x is weakly better than the k-th best of y for every k.
inline bool rank_dominates(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] > y[k]) return false;
    return true;
}

inline void require_equal_size(const ObjectSet& x, const ObjectSet& y) {
    if (x.count() != y.count()) throw input_error("bundles of unequal cardinality cannot be compared");
}

}  // namespace detail

/**
 * Verdict of X against Y over every responsive extension of `pref`.
 *
 * X is always weakly better iff some bijection maps each object of Y\X to a
 * weakly preferred object of X\Y. For a weak order this is the sorted-rank
 * dominance test below: pairing both difference sets best-to-best is optimal.
 */
inline BundleComparison compare_unambiguous(const ObjectSet& x, const ObjectSet& y, const MarginalPreference& pref) {
    detail::require_equal_size(x, y);
    auto rx = detail::sorted_ranks(x - y, pref);
    auto ry = detail::sorted_ranks(y - x, pref);
    if (rx == ry) return BundleComparison::equivalent;
    if (detail::rank_dominates(rx, ry)) return BundleComparison::always_weakly_better;
    if (detail::rank_dominates(ry, rx)) return BundleComparison::always_weakly_worse;
    return BundleComparison::ambiguous;
}

/// True iff Y is weakly preferred to X under every responsive extension.
inline bool unambiguously_weakly_prefers(const ObjectSet& y, const ObjectSet& x, const MarginalPreference& pref) {
    auto c = compare_unambiguous(y, x, pref);
    return c == BundleComparison::always_weakly_better || c == BundleComparison::equivalent;
}

/// True iff some responsive extension of `pref` ranks X strictly above Y.
inline bool exists_strict_preference(const ObjectSet& x, const ObjectSet& y, const MarginalPreference& pref) {
    return !unambiguously_weakly_prefers(y, x, pref);
}

/**
 * An additive extension under which X scores strictly above Y, if one exists.
 *
 * Picks the first position k where the k-th best object of X\Y beats the k-th
 * best of Y\X and gives every object at least that good a large bonus.
 */
inline std::optional<ResponsiveExtension> strict_preference_certificate(const ObjectSet& x, const ObjectSet& y,
                                                                        const MarginalPreference& pref) {
    detail::require_equal_size(x, y);
    auto rx = detail::sorted_ranks(x - y, pref);
    auto ry = detail::sorted_ranks(y - x, pref);
    std::optional<std::size_t> threshold;
    for (std::size_t k = 0; k < rx.size(); ++k)
        if (rx[k] < ry[k]) {
            threshold = rx[k];
            break;
        }
    if (!threshold) return std::nullopt;
    const auto m = static_cast<std::int64_t>(pref.num_classes());
    const auto bonus = m * static_cast<std::int64_t>(x.count()) + 1;
    ResponsiveExtension ext;
    ext.utility.resize(pref.universe());
    for (ObjectIndex o = 0; o < pref.universe(); ++o) {
        auto r = static_cast<std::int64_t>(pref.rank(o));
        ext.utility[o] = Rational((r <= static_cast<std::int64_t>(*threshold) ? bonus : 0) + (m - 1 - r));
    }
    return ext;
}

/**
 * The additive extension that punishes everything strictly below `pivot`:
 * objects weakly above the pivot get utilities in [0,1), objects below it get
 * utilities in (-T-1, -T), both order-consistent. With T = |endowment| and a
 * pivot where component-wise individual rationality fails, the endowment
 * scores strictly above the assigned bundle.
 */
inline ResponsiveExtension build_punishing_extension(const MarginalPreference& pref, ObjectIndex pivot,
                                                     std::size_t endowment_size) {
    const auto p = static_cast<std::int64_t>(pref.rank(pivot));
    const auto m = static_cast<std::int64_t>(pref.num_classes());
    const auto t = static_cast<std::int64_t>(endowment_size);
    ResponsiveExtension ext;
    ext.utility.resize(pref.universe());
    for (ObjectIndex o = 0; o < pref.universe(); ++o) {
        auto r = static_cast<std::int64_t>(pref.rank(o));
        if (r <= p)
            ext.utility[o] = Rational(p - r, p + 1);
        else
            ext.utility[o] = Rational(-t) - Rational(r - p, m - p);
    }
    return ext;
}

// ---------------------------------------------------------------------------
// Component-wise individual rationality

struct CirViolation {
    AgentIndex agent;
    ObjectIndex pivot;  // endowed object whose upper contour set shrank
};

inline std::optional<ObjectIndex> cir_violation_for(const ObjectSet& bundle, const ObjectSet& endowment,
                                                    const MarginalPreference& pref) {
    std::optional<ObjectIndex> found;
    for_each_member(endowment, [&](ObjectIndex w) {
        if (found) return;
        std::size_t have = 0;
        std::size_t had = 0;
        for_each_member(bundle, [&](ObjectIndex o) { have += pref.weakly_prefers(o, w); });
        for_each_member(endowment, [&](ObjectIndex o) { had += pref.weakly_prefers(o, w); });
        if (have < had) found = w;
    });
    return found;
}

/// First agent (priority order) and pivot at which `mu` fails component-wise individual rationality.
inline std::optional<CirViolation> find_cir_violation(const Instance& inst, const Matching& mu,
                                                      const MarginalProfile& prefs) {
    for (AgentIndex i = 0; i < inst.num_agents(); ++i)
        if (auto w = cir_violation_for(mu[i], inst.endowment(i), prefs[i])) return CirViolation{i, *w};
    return std::nullopt;
}

inline bool is_component_wise_IR(const Instance& inst, const Matching& mu, const MarginalProfile& prefs) {
    return !find_cir_violation(inst, mu, prefs);
}

/// Same verdict as is_component_wise_IR on the [A, B, rest] encoding.
inline bool cir_trichotomous(const Instance& inst, const Matching& mu, const TrichotomousProfile& prefs) {
    for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
        const auto& p = prefs[i];
        if (!mu[i].is_subset_of(p.acceptable())) return false;
        if (p.welfare(mu[i]) < p.welfare(inst.endowment(i))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Trichotomous bundle types

/// Counts of attractive, bearable and unacceptable objects in a bundle.
struct BundleType {
    std::size_t attractive = 0;
    std::size_t bearable = 0;
    std::size_t unacceptable = 0;

    friend bool operator==(const BundleType&, const BundleType&) = default;
    friend auto operator<=>(const BundleType&, const BundleType&) = default;
};

inline BundleType bundle_type(const TrichotomousPreference& p, const ObjectSet& bundle) {
    BundleType t;
    t.attractive = (bundle & p.attractive).count();
    t.bearable = (bundle & p.bearable).count();
    t.unacceptable = bundle.count() - t.attractive - t.bearable;
    return t;
}

/// y is weakly preferred to x under every responsive extension of the three-class marginal.
inline bool type_dominates(const BundleType& y, const BundleType& x) {
    return y.attractive >= x.attractive && y.attractive + y.bearable >= x.attractive + x.bearable;
}

/**
 * Whether some responsive extension that also satisfies strict acceptability
 * (every bundle with an unacceptable object is strictly worse than the
 * endowment) ranks X strictly above Y.
 *
 * Such an extension exists unless Y is forced weakly above X, and the only
 * forcing chains are plain dominance or dominance through the endowment when
 * X holds an unacceptable object.
 */
inline bool exists_strict_preference_strictly_acceptable(const ObjectSet& x, const ObjectSet& y,
                                                         const TrichotomousPreference& p, const ObjectSet& endowment) {
    detail::require_equal_size(x, y);
    auto tx = bundle_type(p, x);
    auto ty = bundle_type(p, y);
    if (type_dominates(ty, tx)) return false;
    if (tx.unacceptable > 0 && type_dominates(ty, bundle_type(p, endowment))) return false;
    return true;
}

namespace detail {

// Largest attractive count over feasible bundle types of size k holding exactly u unacceptable objects.
inline std::optional<std::size_t> max_attractive_with(std::size_t k, std::size_t u, std::size_t na, std::size_t nb,
                                                      std::size_t nu) {
    if (u > nu || u > k) return std::nullopt;
    auto a = std::min(na, k - u);
    if (k - u - a > nb) return std::nullopt;
    return a;
}

}  // namespace detail

/**
 * Additive witness for exists_strict_preference_strictly_acceptable.
 *
 * Utilities are 1 on A, 0 on B and -x on the rest; the constraints on x are
 * linear, so the feasible x form an open interval that is solved exactly.
 * Additive extensions are a strict subset of responsive ones, so this can be
 * empty even when the combinatorial test says a preference exists.
 */
inline std::optional<ResponsiveExtension> strictly_acceptable_certificate(const ObjectSet& x, const ObjectSet& y,
                                                                          const TrichotomousPreference& p,
                                                                          const ObjectSet& endowment) {
    detail::require_equal_size(x, y);
    const auto n = p.attractive.size();
    auto tx = bundle_type(p, x);
    auto ty = bundle_type(p, y);
    auto tw = bundle_type(p, endowment);
    const auto k = endowment.count();
    const auto na = p.attractive.count();
    const auto nb = p.bearable.count();
    const auto nu = n - na - nb;

    std::optional<Rational> lo = Rational(0);  // strict lower bound
    std::optional<Rational> hi;                // strict upper bound
    auto raise = [&](Rational v) { lo = std::max(*lo, v); };
    auto lower = [&](Rational v) { hi = hi ? std::min(*hi, v) : v; };

    // score(X) - score(Y) = dA - x * dU > 0
    const auto d_a = static_cast<std::int64_t>(tx.attractive) - static_cast<std::int64_t>(ty.attractive);
    const auto d_u = static_cast<std::int64_t>(tx.unacceptable) - static_cast<std::int64_t>(ty.unacceptable);
    if (d_u == 0) {
        if (d_a <= 0) return std::nullopt;
    } else if (d_u > 0) {
        if (d_a <= 0) return std::nullopt;
        lower(Rational(d_a, d_u));
    } else {
        raise(Rational(-d_a, -d_u));
    }
    // every bundle with u >= 1 unacceptable objects scores below the endowment: a_u - x u < a_w
    for (std::size_t u = 1; u <= k; ++u) {
        auto a = detail::max_attractive_with(k, u, na, nb, nu);
        if (!a) continue;
        raise(Rational(static_cast<std::int64_t>(*a) - static_cast<std::int64_t>(tw.attractive),
                       static_cast<std::int64_t>(u)));
    }
    if (hi && !(*lo < *hi)) return std::nullopt;
    Rational penalty = hi ? (*lo + *hi) / 2 : *lo + 1;

    ResponsiveExtension ext;
    ext.utility.resize(n);
    for (ObjectIndex o = 0; o < n; ++o) {
        if (p.attractive.test(o))
            ext.utility[o] = 1;
        else if (p.bearable.test(o))
            ext.utility[o] = 0;
        else
            ext.utility[o] = -penalty;
    }
    return ext;
}

}  // namespace bundlex
