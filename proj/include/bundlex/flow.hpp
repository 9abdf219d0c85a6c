#pragma once

#include "bundlex/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace bundlex {

/**
 * Integer circulation with lower and upper bounds on every edge.
 *
 * A feasible circulation is found once with the standard excess transformation
 * and Dinic's algorithm. Afterwards the flow is edited in place: an edge's flow
 * can be raised by one unit along a residual cycle through it, and bounds can
 * be tightened to pin decisions. Residual capacity of an edge is hi - flow
 * forward and flow - lo backward, so every edit keeps all bounds satisfied.
 */
class FlowNetwork {
public:
    using Node = int;
    using EdgeId = int;

    Node add_node() {
        out_.emplace_back();
        return static_cast<Node>(out_.size() - 1);
    }

    EdgeId add_edge(Node from, Node to, int lo, int hi) {
        if (lo > hi) throw input_error("flow edge with lower bound above upper bound");
        edges_.push_back({from, to, lo, hi, lo});
        auto id = static_cast<EdgeId>(edges_.size() - 1);
        out_[from].push_back(id);
        out_[to].push_back(id);
        return id;
    }

    std::size_t num_nodes() const { return out_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    int flow(EdgeId e) const { return edges_[e].flow; }
    int lower(EdgeId e) const { return edges_[e].lo; }
    int upper(EdgeId e) const { return edges_[e].hi; }

    /// Overwrites the flow on an edge; the caller is responsible for conservation.
    void set_flow(EdgeId e, int f) { edges_[e].flow = f; }

    void set_bounds(EdgeId e, int lo, int hi) {
        auto& ed = edges_[e];
        if (ed.flow < lo || ed.flow > hi) throw invariant_error("bounds would exclude the current flow");
        ed.lo = lo;
        ed.hi = hi;
    }

    /// True iff the current flow satisfies conservation and every bound.
    bool is_feasible() const {
        std::vector<long> balance(out_.size(), 0);
        for (const auto& e : edges_) {
            if (e.flow < e.lo || e.flow > e.hi) return false;
            balance[e.from] -= e.flow;
            balance[e.to] += e.flow;
        }
        return std::all_of(balance.begin(), balance.end(), [](long b) { return b == 0; });
    }

    /// Replaces the current flow with some feasible circulation; false if none exists.
    bool solve_feasible();

    /// Pushes one more unit through `e` along a residual cycle; false if `e` is already at its maximum.
    bool increase(EdgeId e) { return reroute(e, true, true); }

    /// Whether `increase(e)` would succeed, without changing the flow.
    bool can_increase(EdgeId e) { return reroute(e, true, false); }

    void dump(std::ostream& os) const {
        os << "nodes " << out_.size() << " edges " << edges_.size() << '\n';
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const auto& e = edges_[i];
            os << i << ' ' << e.from << "->" << e.to << " [" << e.lo << ',' << e.hi << "] flow " << e.flow << '\n';
        }
    }

private:
    struct Edge {
        Node from;
        Node to;
        int lo;
        int hi;
        int flow;
    };

    bool reroute(EdgeId e, bool up, bool apply);

    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> out_;  // incident edges, both directions
    std::vector<int> parent_edge_;
    std::vector<char> parent_forward_;
};

inline bool FlowNetwork::reroute(EdgeId target, bool up, bool apply) {
    const auto& t = edges_[target];
    if (up ? t.flow >= t.hi : t.flow <= t.lo) return false;
    // Raising flow on from->to needs a residual path to -> from (the reverse for lowering).
    const Node source = up ? t.to : t.from;
    const Node sink = up ? t.from : t.to;
    parent_edge_.assign(out_.size(), -1);
    parent_forward_.assign(out_.size(), 0);
    std::vector<char> seen(out_.size(), 0);
    std::deque<Node> queue{source};
    seen[source] = 1;
    while (!queue.empty() && !seen[sink]) {
        Node u = queue.front();
        queue.pop_front();
        for (EdgeId id : out_[u]) {
            if (id == target) continue;
            const auto& e = edges_[id];
            if (e.from == u && e.flow < e.hi && !seen[e.to]) {
                seen[e.to] = 1;
                parent_edge_[e.to] = id;
                parent_forward_[e.to] = 1;
                queue.push_back(e.to);
            } else if (e.to == u && e.flow > e.lo && !seen[e.from]) {
                seen[e.from] = 1;
                parent_edge_[e.from] = id;
                parent_forward_[e.from] = 0;
                queue.push_back(e.from);
            }
        }
    }
    if (!seen[sink]) return false;
    if (!apply) return true;
    for (Node v = sink; v != source;) {
        auto& e = edges_[parent_edge_[v]];
        if (parent_forward_[v]) {
            ++e.flow;
            v = e.from;
        } else {
            --e.flow;
            v = e.to;
        }
    }
    edges_[target].flow += up ? 1 : -1;
    return true;
}

inline bool FlowNetwork::solve_feasible() {
    // Dinic on the excess-transformed network.
    struct Arc {
        int to;
        int cap;
    };
    const int n = static_cast<int>(out_.size());
    const int super_source = n;
    const int super_sink = n + 1;
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> adj(n + 2);
    auto add_arc = [&](int u, int v, int cap) {
        adj[u].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({v, cap});
        adj[v].push_back(static_cast<int>(arcs.size()));
        arcs.push_back({u, 0});
    };
    std::vector<long> excess(n, 0);
    std::vector<int> arc_of(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        arc_of[i] = static_cast<int>(arcs.size());
        add_arc(e.from, e.to, e.hi - e.lo);
        excess[e.to] += e.lo;
        excess[e.from] -= e.lo;
    }
    long required = 0;
    for (int v = 0; v < n; ++v) {
        if (excess[v] > 0) {
            add_arc(super_source, v, static_cast<int>(excess[v]));
            required += excess[v];
        } else if (excess[v] < 0) {
            add_arc(v, super_sink, static_cast<int>(-excess[v]));
        }
    }

    std::vector<int> level(n + 2);
    std::vector<std::size_t> next(n + 2);
    auto bfs = [&] {
        std::fill(level.begin(), level.end(), -1);
        std::deque<int> q{super_source};
        level[super_source] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int a : adj[u])
                if (arcs[a].cap > 0 && level[arcs[a].to] < 0) {
                    level[arcs[a].to] = level[u] + 1;
                    q.push_back(arcs[a].to);
                }
        }
        return level[super_sink] >= 0;
    };
    auto dfs = [&](auto&& self, int u, int pushed) -> int {
        if (u == super_sink) return pushed;
        for (auto& i = next[u]; i < adj[u].size(); ++i) {
            int a = adj[u][i];
            int v = arcs[a].to;
            if (arcs[a].cap <= 0 || level[v] != level[u] + 1) continue;
            int got = self(self, v, std::min(pushed, arcs[a].cap));
            if (got > 0) {
                arcs[a].cap -= got;
                arcs[a ^ 1].cap += got;
                return got;
            }
        }
        return 0;
    };
    long total = 0;
    while (bfs()) {
        std::fill(next.begin(), next.end(), 0);
        while (int f = dfs(dfs, super_source, std::numeric_limits<int>::max())) total += f;
    }
    if (total != required) return false;
    for (std::size_t i = 0; i < edges_.size(); ++i) edges_[i].flow = edges_[i].lo + arcs[arc_of[i] ^ 1].cap;
    return true;
}

}  // namespace bundlex
