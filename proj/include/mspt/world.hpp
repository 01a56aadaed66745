#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mspt/crypto.hpp"
#include "mspt/model.hpp"

namespace mspt {

// XO simulates a request when it arrives and validates freshness at ordering
// time; OX executes only once the transaction is ordered.
enum class ExecuteMode : std::uint8_t { ExecuteOnRequest = 0, ExecuteOnOrder = 1 };

enum class CommitProtocol : std::uint8_t { Ppac = 0, TwoPc = 1 };

struct StakeholderPolicy {
    std::vector<Bytes> owner_pks;
    std::size_t threshold = 0;  // 0 means all owners
};

struct ShardStatic {
    std::string display;
    ShardId token;
    crypto::KeyPair keys;
    std::map<std::string, std::int64_t> initial_balances;
    std::map<std::string, StakeholderPolicy> policies;
    bool stall = false;
};

// Static identity material and per-transaction plans, all derived
// deterministically from the scenario before the simulation starts. Actors
// hold a reference; nothing here mutates during a run.
struct World {
    crypto::Scheme scheme = crypto::Scheme::Ed25519;
    CommitProtocol protocol = CommitProtocol::Ppac;
    bool optimize = true;
    ExecuteMode mode = ExecuteOnRequest;
    int replication = 1;
    std::uint64_t gc_timeout = 0;  // 0 disables session reclamation
    std::uint64_t block_max_txs = 10;
    std::uint64_t block_timeout = 100;
    std::uint64_t horizon = 1'000'000;

    std::vector<ShardStatic> shards;
    std::map<std::string, int> shard_by_display;
    std::map<std::string, int> shard_by_token;
    std::vector<std::vector<int>> shard_nodes;  // actor ids, filled at setup

    struct StakeholderInfo {
        std::string name;
        Bytes seed;
        crypto::KeyPair long_term;
        int actor = -1;
    };
    std::vector<StakeholderInfo> stakeholders;
    std::map<std::string, int> stakeholder_by_name;

    struct ClientInfo {
        std::string name;
        Bytes seed;
        int actor = -1;
    };
    std::vector<ClientInfo> clients;

    int ledger_actor = -1;

    struct RequestPlan {
        int shard_index = -1;
        Payload payload;
        DependencySet deps;  // tokens
        Bytes nonce;
    };
    struct BogusEntry {
        Bytes epk_seed;
        crypto::Digest hash{};
    };
    struct TxPlan {
        std::string name;
        Bytes request_id;
        std::uint64_t submit_at = 0;
        std::vector<RequestPlan> requests;
        std::vector<std::string> stakeholder_names;  // sorted; first one leads
        int client_index = 0;
        std::set<int> discard_shards;  // forced validation outcome per shard
        std::vector<BogusEntry> bogus;
    };
    std::vector<TxPlan> txs;
    std::map<Bytes, int> tx_by_request_id;

    // Full participant sets per transaction, handed to shards only when the
    // baseline protocol runs; 2PC makes no attempt to hide them.
    std::map<Bytes, std::vector<ShardId>> tx_participants;

    const ShardStatic& shard_of_token(const std::string& token) const {
        return shards.at(shard_by_token.at(token));
    }
    std::string display_of_token(const std::string& token) const {
        return shard_of_token(token).display;
    }
};

}  // namespace mspt
