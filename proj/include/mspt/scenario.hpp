#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mspt/model.hpp"
#include "mspt/world.hpp"

namespace mspt {

// Declarative scenario description; see README for the file format. Parsed
// from a small TOML subset: [section], [[array-section]], key = value with
// strings, integers, booleans and single-line arrays.

struct ShardSpec {
    std::string id;
    std::map<std::string, std::int64_t> accounts;            // account -> balance
    std::map<std::string, std::vector<std::string>> owners;  // account -> owner names
    std::vector<std::pair<int, std::uint64_t>> crashes;      // node index, crash tick
    bool stall = false;
};

struct RequestSpec {
    std::string shard;
    Payload payload;
    std::vector<std::pair<std::string, DepSign>> deps;  // display name + sign
};

struct TxSpec {
    std::string name = "tx";
    std::uint64_t submit_at = 0;
    std::vector<RequestSpec> requests;
    std::set<std::string> discard_shards;  // forced validation failures
};

struct NetworkSpec {
    std::uint64_t seed = 1;
    std::uint32_t delta_max = 5;
    std::uint64_t block_max_txs = 10;
    std::uint64_t block_timeout = 100;
    std::uint64_t horizon = 1'000'000;
    std::uint64_t gc_timeout = 0;
};

struct ProtocolSpec {
    CommitProtocol kind = CommitProtocol::Ppac;
    bool optimize = true;
    ExecuteMode mode = ExecuteOnRequest;
    int replication = 1;
    crypto::Scheme scheme = crypto::Scheme::Ed25519;
    int clients = 1;
    std::size_t pad_entries = 0;  // bogus-entry padding target per transaction
};

struct Scenario {
    std::string name = "scenario";
    NetworkSpec network;
    ProtocolSpec protocol;
    std::vector<ShardSpec> shards;
    std::vector<TxSpec> txs;
};

class ScenarioParseError : public std::runtime_error {
public:
    ScenarioParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// "S2", "S2+" or "S2-"
std::pair<std::string, DepSign> parse_dep_token(const std::string& token);
std::string dep_token_string(const std::string& shard, DepSign sign);

// "SHARD | acct=+5 acct2=-5 | S2+ S3"
RequestSpec parse_request_line(const std::string& line);

// ---- built-in scenarios ------------------------------------------------

Scenario scenario_single();
Scenario scenario_figure1a();  // unsigned mutual 4-cycle, budget exactness
Scenario scenario_figure1b();  // directed 3-chain
Scenario scenario_figure2();   // directed diamond with one initial discard
Scenario scenario_chain(int k, bool all_commit = true);
Scenario scenario_stall();     // one stalling shard plus an unaffected tx

struct RandomScenarioParams {
    int max_shards = 8;
    std::uint32_t max_delta = 20;
    bool force_all_commit = false;
};

// Seeded generator used by the oracle-equivalence and bound suites: random
// reciprocal signed dependency sets (disconnected components included),
// random initial beliefs, random delta.
Scenario random_scenario(std::uint64_t seed, const RandomScenarioParams& params = {});

}  // namespace mspt
