#pragma once

#include <deque>
#include <optional>

#include "mspt/simnet.hpp"
#include "mspt/wire.hpp"
#include "mspt/world.hpp"

namespace mspt {

enum class RequestError : std::uint8_t {
    DuplicateRequest = 1,
    PolicyViolation = 2,
    InvalidSignature = 3,
    SimulationFailure = 4,
    SelfDependency = 5,
    MalformedRequest = 6,
};

std::string request_error_name(RequestError e);

struct RequestOutcome {
    std::optional<ShardResponse> response;
    std::optional<RequestError> error;
    std::string detail;

    bool ok() const { return response.has_value(); }
};

struct AccountState {
    std::int64_t balance = 0;
    std::uint64_t version = 0;
};

struct WriteSet {
    std::map<std::string, std::int64_t> new_balances;
    std::map<std::string, std::uint64_t> read_versions;
};

struct PendingRequest {
    UpdateRequest req;
    std::optional<WriteSet> writes;  // filled at request time in XO mode
    bool consumed = false;           // matched to an ordered transaction
    bool reclaimed = false;
};

struct DeferredPull {
    int caller_actor = -1;
    std::string caller_token;
};

// Per-session protocol state. Rounds follow the pull-based commit algorithm:
// round r stores the belief held at its start, pulls each contact once, and
// conjoins the replies; any discard reply finalizes immediately.
struct SessionState {
    Bytes request_id;
    std::vector<crypto::Digest> hashes;  // this shard's entries, tx order
    std::size_t hash_count = 0;          // entries in the whole transaction
    CommitProtocol engine = CommitProtocol::Ppac;

    Belief belief;
    BeliefValue initial_value = BeliefValue::TentativeCommit;
    std::uint32_t round = 0;  // last started round
    std::uint32_t round_budget = 0;
    std::vector<ShardId> contacts;            // deps with + or no sign, sorted
    std::set<std::string> expected_callers;   // deps with - or no sign
    std::vector<Belief> snapshots;            // belief at the start of round r
    std::map<int, std::uint32_t> call_counts;   // per caller node
    std::map<int, std::uint32_t> reply_counts;  // per callee node
    std::set<std::string> round_got;            // contacts answered this round
    std::size_t next_contact = 0;
    bool round_all_final = true;

    bool finalized = false;
    std::uint32_t finalize_round = 0;
    std::optional<std::uint32_t> discard_round;  // round the value turned discard

    WriteSet writes;
    std::vector<std::string> locked_accounts;
    std::vector<DeferredPull> deferred;
    std::set<std::string> final_informed;  // caller shards that saw a final reply
    bool reclaimed = false;

    // 2PC
    std::vector<ShardId> participants;
    bool is_coordinator = false;
    std::map<std::string, bool> votes;  // voter token -> commit
};

// One shard node: transient request store, private state database, block
// scanning and the commit engines. Single-node shards are the replication=1
// special case.
class ShardNodeActor : public sim::Actor {
public:
    ShardNodeActor(World& world, int shard_index, int node_index);

    void on_message(sim::Scheduler& net, const sim::Message& msg) override;
    void on_timer(sim::Scheduler& net, std::uint64_t tag) override;

    // Validation plus storage for one update request; exposed for unit tests.
    RequestOutcome handle_update_request(const UpdateRequest& req);

    int shard_index() const { return shard_index_; }
    int node_index() const { return node_index_; }
    const ShardStatic& config() const { return world_.shards[shard_index_]; }
    const std::map<std::string, AccountState>& accounts() const { return accounts_; }
    const std::map<Bytes, SessionState>& sessions() const { return sessions_; }
    const std::map<Bytes, Belief>& tombstones() const { return tombstones_; }

private:
    struct StartInfo {
        Bytes request_id;
        std::vector<crypto::Digest> hashes;
        std::size_t hash_count = 0;
        bool sigs_ok = true;
    };

    void on_update_request(sim::Scheduler& net, const sim::Message& msg, bool direct);
    void on_block(sim::Scheduler& net, const sim::Message& msg);
    void scan_block(sim::Scheduler& net, const wire::BlockMsg& block);
    void try_start_session(sim::Scheduler& net, StartInfo info);
    void start_session(sim::Scheduler& net, const StartInfo& info,
                       std::vector<std::string> accounts_in_order);
    void start_waiting_sessions(sim::Scheduler& net);

    // PPAC engine
    void ppac_start(sim::Scheduler& net, SessionState& s);
    void begin_round(sim::Scheduler& net, SessionState& s, std::uint32_t r);
    void send_pulls(sim::Scheduler& net, SessionState& s);
    void end_of_round(sim::Scheduler& net, SessionState& s);
    void on_pull(sim::Scheduler& net, const sim::Message& msg);
    void on_pull_reply(sim::Scheduler& net, const sim::Message& msg);
    void flush_deferred(sim::Scheduler& net, SessionState& s);

    // 2PC engine
    void twopc_start(sim::Scheduler& net, SessionState& s);
    void twopc_check_votes(sim::Scheduler& net, SessionState& s);
    void on_vote(sim::Scheduler& net, const sim::Message& msg);
    void on_decision(sim::Scheduler& net, const sim::Message& msg);

    void set_discard(sim::Scheduler& net, SessionState& s, std::uint32_t round);
    void finalize(sim::Scheduler& net, SessionState& s, std::uint32_t round);
    void maybe_reclaim(sim::Scheduler& net, SessionState& s);
    void reclaim(sim::Scheduler& net, SessionState& s);

    std::optional<WriteSet> simulate(const std::vector<Bytes>& payloads,
                                     std::string* error) const;
    std::vector<std::string> touched_accounts(const StartInfo& info) const;
    std::string session_summary(const SessionState& s, std::uint32_t round) const;
    void halt(sim::Scheduler& net, const std::string& why);

    World& world_;
    int shard_index_;
    int node_index_;

    std::map<std::string, AccountState> accounts_;
    std::set<std::pair<Bytes, Bytes>> seen_id_nonce_;
    std::map<crypto::Digest, PendingRequest> store_;
    std::map<crypto::Digest, RequestOutcome> processed_;
    std::set<crypto::Digest> responded_;
    sim::RbDedupe rb_;
    std::uint64_t expected_height_ = 0;

    std::map<Bytes, SessionState> sessions_;
    std::map<Bytes, Belief> tombstones_;
    std::map<std::string, Bytes> account_locks_;
    std::deque<StartInfo> waiting_;
    std::map<Bytes, std::vector<DeferredPull>> unknown_pulls_;
    std::map<Bytes, std::vector<wire::VoteMsg>> unknown_votes_;
    std::map<Bytes, wire::DecisionMsg> unknown_decisions_;
    std::map<std::uint64_t, Bytes> gc_timers_;
    std::uint64_t gc_tag_ = 0;
};

}  // namespace mspt
