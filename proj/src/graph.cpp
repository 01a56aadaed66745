#include "mspt/graph.hpp"

#include <deque>
#include <stdexcept>

namespace mspt::graph {

std::size_t DependencyGraph::out_degree(const ShardId& v) const {
    std::size_t n = 0;
    for (const auto& [from, to] : edges)
        if (from == v) ++n;
    return n;
}

DependencyGraph induce(const std::map<ShardId, DependencySet>& requests, std::size_t n_hashes) {
    DependencyGraph g;
    g.n_hashes = n_hashes ? n_hashes : requests.size();
    for (const auto& [shard, deps] : requests) {
        g.vertices.insert(shard);
        for (const auto& d : deps) g.vertices.insert(d.shard);
    }
    for (const auto& [shard, deps] : requests) {
        for (const auto& d : deps) {
            if (d.shard == shard) continue;  // no self-loops
            if (dep_is_contact(d.sign)) g.edges.insert({shard, d.shard});
            if (dep_is_caller(d.sign)) g.edges.insert({d.shard, shard});
        }
    }
    return g;
}

namespace {

std::map<ShardId, std::vector<ShardId>> adjacency(const DependencyGraph& g) {
    std::map<ShardId, std::vector<ShardId>> adj;
    for (const auto& v : g.vertices) adj[v];
    for (const auto& [from, to] : g.edges) adj[from].push_back(to);
    return adj;
}

}  // namespace

std::set<ShardId> forward_closure(const DependencyGraph& g, const ShardId& s) {
    if (!g.vertices.count(s)) throw std::invalid_argument("unknown shard: " + s.value);
    auto adj = adjacency(g);
    std::set<ShardId> seen{s};
    std::deque<ShardId> work{s};
    while (!work.empty()) {
        ShardId v = work.front();
        work.pop_front();
        for (const auto& next : adj[v])
            if (seen.insert(next).second) work.push_back(next);
    }
    return seen;
}

std::map<ShardId, bool> decision_oracle(const DependencyGraph& g,
                                        const std::map<ShardId, bool>& initial_beliefs) {
    for (const auto& v : g.vertices)
        if (!initial_beliefs.count(v))
            throw std::invalid_argument("missing initial belief for " + v.value);
    std::map<ShardId, bool> out;
    for (const auto& v : g.vertices) {
        bool commit = true;
        for (const auto& r : forward_closure(g, v)) commit = commit && initial_beliefs.at(r);
        out[v] = commit;
    }
    return out;
}

std::map<ShardId, std::size_t> bfs_distances(const DependencyGraph& g, const ShardId& source) {
    if (!g.vertices.count(source)) throw std::invalid_argument("unknown shard: " + source.value);
    auto adj = adjacency(g);
    std::map<ShardId, std::size_t> dist{{source, 0}};
    std::deque<ShardId> work{source};
    while (!work.empty()) {
        ShardId v = work.front();
        work.pop_front();
        for (const auto& next : adj[v]) {
            if (!dist.count(next)) {
                dist[next] = dist[v] + 1;
                work.push_back(next);
            }
        }
    }
    return dist;
}

RoundBounds round_bounds(const DependencyGraph& g) {
    if (g.vertices.empty()) throw std::invalid_argument("round_bounds on empty graph");
    RoundBounds b;
    std::size_t min_out = SIZE_MAX;
    for (const auto& v : g.vertices) {
        std::size_t deg = g.out_degree(v);
        min_out = std::min(min_out, deg);
        b.per_shard_upper[v] = g.n_hashes - deg;
        for (const auto& [u, d] : bfs_distances(g, v))
            if (u != v) b.l_star = std::max(b.l_star, d);
    }
    b.global_upper = g.n_hashes - min_out;
    return b;
}

}  // namespace mspt::graph
