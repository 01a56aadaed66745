#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "mspt/model.hpp"

namespace mspt::graph {

// Directed graph induced by the signed dependency sets of one transaction.
// Edge (X -> Y) means X queries Y's belief during the commit protocol.
struct DependencyGraph {
    std::set<ShardId> vertices;
    std::set<std::pair<ShardId, ShardId>> edges;
    std::size_t n_hashes = 0;  // transaction entry count, not distinct shards

    bool has_edge(const ShardId& from, const ShardId& to) const {
        return edges.count({from, to}) > 0;
    }
    std::size_t out_degree(const ShardId& v) const;
};

// Merged dependency sets, one per shard. n_hashes defaults to the number of
// requests when not given (bogus padding makes it larger).
DependencyGraph induce(const std::map<ShardId, DependencySet>& requests,
                       std::size_t n_hashes = 0);

// All vertices reachable from s along edges, including s itself: the shards
// s transitively depends on. Throws on unknown shard.
std::set<ShardId> forward_closure(const DependencyGraph& g, const ShardId& s);

// Ground-truth decision: a shard commits iff every shard in its forward
// closure holds an initial commit belief. Requires a belief for every vertex.
// true = commit, false = discard.
std::map<ShardId, bool> decision_oracle(const DependencyGraph& g,
                                        const std::map<ShardId, bool>& initial_beliefs);

struct RoundBounds {
    // Longest shortest path over ordered connected pairs; 0 when no pair is
    // connected. Lower bound on global finalization rounds.
    std::size_t l_star = 0;
    // n_hashes - min out-degree: upper bound for every shard.
    std::size_t global_upper = 0;
    // n_hashes - out_degree(S): per-shard finalization budget.
    std::map<ShardId, std::size_t> per_shard_upper;
};

RoundBounds round_bounds(const DependencyGraph& g);

// BFS shortest-path distances from `source` along edges; unreachable
// vertices are absent from the result.
std::map<ShardId, std::size_t> bfs_distances(const DependencyGraph& g, const ShardId& source);

}  // namespace mspt::graph
