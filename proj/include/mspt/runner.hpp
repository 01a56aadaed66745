#pragma once

#include <memory>

#include "mspt/graph.hpp"
#include "mspt/scenario.hpp"
#include "mspt/simnet.hpp"
#include "mspt/world.hpp"

namespace mspt {

struct SessionOutcome {
    std::string tx_name;
    Bytes request_id;
    std::string shard;  // display name
    int node = 0;
    bool node_crashed = false;
    BeliefValue initial = BeliefValue::TentativeCommit;
    bool finalized = false;
    BeliefValue decision = BeliefValue::TentativeCommit;
    std::uint32_t finalize_round = 0;
    std::optional<std::uint32_t> discard_round;
    std::uint32_t round_budget = 0;
    std::size_t hash_count = 0;
    std::size_t contact_count = 0;
};

struct TxReport {
    std::string name;
    Bytes request_id;
    graph::DependencyGraph graph;  // display-keyed
    std::map<std::string, bool> initial_beliefs;  // display -> commit
    bool beliefs_complete = false;
    bool aborted = false;
};

struct RunResult {
    World world;
    sim::Trace trace;
    std::vector<SessionOutcome> outcomes;
    std::vector<TxReport> tx_reports;
    // (shard display, node) -> account -> balance
    std::map<std::pair<std::string, int>, std::map<std::string, std::int64_t>> balances;
    std::map<std::pair<std::string, int>, bool> crashed_nodes;
    std::map<sim::MsgKind, std::size_t> send_counts;
    std::map<std::pair<int, int>, int> response_counts;  // (tx, request) -> responses
    std::uint64_t end_time = 0;
    std::uint64_t ledger_accepted = 0;
    std::uint64_t ledger_rejected = 0;
    bool any_incomplete = false;
    bool horizon_reached = false;
};

// Deterministic identity material: tokens, keys, ids and nonces are a pure
// function of the scenario, so audits and bound checks can re-derive them.
World build_world(const Scenario& scenario);

RunResult run_scenario(const Scenario& scenario);

// Compares every finalized decision against the protocol-appropriate ground
// truth: the closure-conjunction oracle for the pull protocol, the global
// conjunction for 2PC. Also checks cross-node agreement per shard.
std::vector<std::string> decision_violations(const RunResult& result);

// Metrics CSV: one row per session outcome.
std::string metrics_csv(const RunResult& result);

struct BenchRow {
    int shards_per_tx = 0;
    std::string protocol;
    std::uint32_t rounds = 0;        // max finalization round across shards
    std::uint64_t virtual_latency = 0;  // first block delivery to last finalize
    std::size_t messages = 0;        // commit-protocol messages sent
};

BenchRow bench_row(const RunResult& result);
std::vector<BenchRow> bench_chain_suite(int max_shards, const std::vector<CommitProtocol>& kinds,
                                        int repetitions = 1);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace mspt
