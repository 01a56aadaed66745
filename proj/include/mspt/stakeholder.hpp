#pragma once

#include <optional>

#include "mspt/simnet.hpp"
#include "mspt/wire.hpp"
#include "mspt/world.hpp"

namespace mspt {

// Ephemeral keys are derived per (identity, transaction id): fresh for every
// transaction, never reused across ids, reproducible from the world seeds.
crypto::KeyPair stakeholder_ephemeral_key(crypto::Scheme scheme, const Bytes& identity_seed,
                                          const Bytes& request_id);
crypto::KeyPair client_ephemeral_key(crypto::Scheme scheme, const Bytes& client_seed,
                                     const Bytes& entries_bytes);

// Response checks: the hash must match the locally recomputed request hash
// and the shard signature must verify under the expected shard's key.
// Responses are matched positionally to requests. Returns one message per
// failure; empty result means the transaction can be assembled.
std::vector<std::string> collect_and_verify(const std::vector<UpdateRequest>& requests,
                                            const std::vector<ShardResponse>& responses,
                                            const std::vector<Bytes>& shard_pks,
                                            crypto::Scheme scheme);

// Orders entries by hash bytes and attaches each part's signature list.
std::vector<TransactionEntry> assemble_entries(
    std::vector<std::pair<crypto::Digest, std::vector<Bytes>>> parts);

Transaction make_transaction(std::vector<TransactionEntry> entries,
                             const crypto::KeyPair& client_key);

// Drives the transactions it leads through negotiation, request broadcast,
// response collection, assembly and delegated submission; co-signs
// transactions led by others.
class StakeholderActor : public sim::Actor {
public:
    StakeholderActor(World& world, int index);

    void on_message(sim::Scheduler& net, const sim::Message& msg) override;
    void on_timer(sim::Scheduler& net, std::uint64_t tag) override;

    // responses seen per (tx index, request index), errors included
    const std::map<std::pair<int, int>, int>& response_counts() const { return response_counts_; }
    const std::set<int>& aborted_txs() const { return aborted_; }

private:
    struct LeadState {
        int tx_index = -1;
        std::vector<std::string> co_names;
        std::map<std::string, Bytes> co_epks;
        std::vector<UpdateRequest> requests;
        std::vector<crypto::Digest> expected_hashes;
        std::map<std::string, std::vector<Bytes>> co_lt_sigs;
        std::vector<std::optional<ShardResponse>> responses;
        Bytes hash_list;
        std::map<std::string, Bytes> co_eph_sigs;
        bool broadcast_done = false;
        bool relayed = false;
        bool aborted = false;
    };

    void start_lead(sim::Scheduler& net, int tx_index);
    void on_negotiation(sim::Scheduler& net, const sim::Message& msg);
    void on_update_response(sim::Scheduler& net, const sim::Message& msg);
    void on_update_error(sim::Scheduler& net, const sim::Message& msg);
    void build_and_broadcast(sim::Scheduler& net, LeadState& lead);
    void maybe_assemble(sim::Scheduler& net, LeadState& lead);
    void relay_to_client(sim::Scheduler& net, LeadState& lead);
    void abort_tx(sim::Scheduler& net, LeadState& lead, const std::string& why);

    const World::StakeholderInfo& info() const { return world_.stakeholders[index_]; }
    crypto::KeyPair my_ephemeral(const Bytes& request_id) const;

    World& world_;
    int index_;
    std::map<Bytes, LeadState> leads_;
    std::map<Bytes, crypto::KeyPair> co_ephemerals_;
    std::map<std::pair<int, int>, int> response_counts_;
    std::set<int> aborted_;
};

class ClientActor : public sim::Actor {
public:
    ClientActor(World& world, int index);
    void on_message(sim::Scheduler& net, const sim::Message& msg) override;

private:
    World& world_;
    int index_;
};

}  // namespace mspt
