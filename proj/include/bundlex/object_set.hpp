#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace bundlex {

using AgentIndex = std::size_t;
using ObjectIndex = std::size_t;

/// A subset of the object universe, one bit per object in canonical order.
using ObjectSet = boost::dynamic_bitset<>;

inline constexpr std::size_t npos = ObjectSet::npos;

inline ObjectSet make_set(std::size_t universe, std::initializer_list<ObjectIndex> members) {
    ObjectSet s(universe);
    for (auto o : members) s.set(o);
    return s;
}

inline ObjectSet make_set(std::size_t universe, const std::vector<ObjectIndex>& members) {
    ObjectSet s(universe);
    for (auto o : members) s.set(o);
    return s;
}

inline ObjectSet full_set(std::size_t universe) {
    ObjectSet s(universe);
    s.set();
    return s;
}

template <typename F>
void for_each_member(const ObjectSet& s, F&& f) {
    for (auto o = s.find_first(); o != npos; o = s.find_next(o)) f(static_cast<ObjectIndex>(o));
}

inline std::vector<ObjectIndex> members(const ObjectSet& s) {
    std::vector<ObjectIndex> out;
    out.reserve(s.count());
    for_each_member(s, [&](ObjectIndex o) { out.push_back(o); });
    return out;
}

/// Lexicographic order on the ascending member lists.
inline bool lex_less(const ObjectSet& a, const ObjectSet& b) {
    auto x = a.find_first();
    auto y = b.find_first();
    while (x != npos && y != npos) {
        if (x != y) return x < y;
        x = a.find_next(x);
        y = b.find_next(y);
    }
    return x == npos && y != npos;
}

/// Packs a set into a 64-bit mask. Only valid for universes of at most 64 objects.
inline std::uint64_t to_mask(const ObjectSet& s) {
    std::uint64_t m = 0;
    for_each_member(s, [&](ObjectIndex o) { m |= std::uint64_t{1} << o; });
    return m;
}

inline ObjectSet from_mask(std::size_t universe, std::uint64_t m) {
    ObjectSet s(universe);
    for (std::size_t o = 0; o < universe; ++o)
        if (m >> o & 1U) s.set(o);
    return s;
}

}  // namespace bundlex
