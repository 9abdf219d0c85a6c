#pragma once

#include "bundlex/model.hpp"

#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

namespace bundlex {

inline constexpr std::size_t default_enumeration_bound = 10;

namespace detail {

// Calls visit(mask) for every k-subset of `pool`, in lexicographic order of member lists.
template <typename Visit>
bool for_each_subset(std::uint64_t pool, std::size_t k, std::uint64_t chosen, Visit& visit) {
    if (k == 0) return visit(chosen);
    if (static_cast<std::size_t>(__builtin_popcountll(pool)) < k) return true;
    for (std::uint64_t rest = pool; rest != 0;) {
        std::uint64_t low = rest & (~rest + 1);
        rest &= rest - 1;
        if (static_cast<std::size_t>(__builtin_popcountll(rest)) < k - 1) break;
        if (!for_each_subset(rest, k - 1, chosen | low, visit)) return false;
    }
    return true;
}

template <typename Accept, typename Visit>
bool assign_from(const std::vector<std::size_t>& quotas, std::size_t agent, std::uint64_t remaining,
                 std::vector<std::uint64_t>& masks, Accept& accept, Visit& visit) {
    if (agent == quotas.size()) return visit(static_cast<const std::vector<std::uint64_t>&>(masks));
    auto step = [&](std::uint64_t bundle) {
        if (!accept(agent, bundle)) return true;
        masks[agent] = bundle;
        return assign_from(quotas, agent + 1, remaining & ~bundle, masks, accept, visit);
    };
    return for_each_subset(remaining, quotas[agent], 0, step);
}

}  // namespace detail

/**
 * Enumerates balanced assignments of the objects in `universe` to agents with
 * the given quotas, as per-agent 64-bit masks, in canonical order.
 *
 * accept(agent, mask) prunes partial assignments; visit(masks) returns false
 * to stop early. Returns false iff stopped early.
 */
template <typename Accept, typename Visit>
bool for_each_mask_assignment(const std::vector<std::size_t>& quotas, std::uint64_t universe, Accept&& accept,
                              Visit&& visit) {
    std::vector<std::uint64_t> masks(quotas.size(), 0);
    return detail::assign_from(quotas, 0, universe, masks, accept, visit);
}

inline void require_enumerable(const Instance& inst, std::size_t max_objects) {
    if (max_objects > 64) max_objects = 64;
    if (inst.num_objects() > max_objects)
        throw too_large_error("instance has " + std::to_string(inst.num_objects()) +
                              " objects; exhaustive enumeration is limited to " + std::to_string(max_objects));
}

inline std::vector<std::size_t> quotas(const Instance& inst) {
    std::vector<std::size_t> q(inst.num_agents());
    for (AgentIndex i = 0; i < q.size(); ++i) q[i] = inst.quota(i);
    return q;
}

inline std::uint64_t universe_mask(std::size_t n) { return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

inline Matching matching_from_masks(std::size_t num_objects, const std::vector<std::uint64_t>& masks) {
    Matching m;
    m.bundles.reserve(masks.size());
    for (auto mask : masks) m.bundles.push_back(from_mask(num_objects, mask));
    return m;
}

/// Calls f(matching) for every matching of `inst` in canonical order; f may return false to stop.
template <typename F>
void for_each_matching(const Instance& inst, F&& f, std::size_t max_objects = default_enumeration_bound) {
    require_enumerable(inst, max_objects);
    const auto n = inst.num_objects();
    for_each_mask_assignment(
        quotas(inst), universe_mask(n), [](std::size_t, std::uint64_t) { return true; },
        [&](const std::vector<std::uint64_t>& masks) {
            auto m = matching_from_masks(n, masks);
            if constexpr (std::is_same_v<decltype(f(m)), bool>)
                return f(m);
            else {
                f(m);
                return true;
            }
        });
}

inline std::vector<Matching> enumerate_matchings(const Instance& inst,
                                                 std::size_t max_objects = default_enumeration_bound) {
    std::vector<Matching> out;
    for_each_matching(inst, [&](const Matching& m) { out.push_back(m); }, max_objects);
    return out;
}

}  // namespace bundlex
