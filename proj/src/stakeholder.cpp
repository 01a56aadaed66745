#include "mspt/stakeholder.hpp"

#include <algorithm>

namespace mspt {

namespace {

constexpr std::uint8_t kPhaseTerms = 1;
constexpr std::uint8_t kPhaseEpk = 2;
constexpr std::uint8_t kPhaseSignRequests = 3;
constexpr std::uint8_t kPhaseLtSigs = 4;
constexpr std::uint8_t kPhaseHashList = 5;
constexpr std::uint8_t kPhaseEphSig = 6;

Bytes negotiation_body(std::uint8_t phase, const Bytes& request_id, const Bytes& payload) {
    ByteWriter w;
    w.u8(phase);
    w.bytes(request_id);
    w.bytes(payload);
    return w.take();
}

struct NegotiationView {
    std::uint8_t phase;
    Bytes request_id;
    Bytes payload;
};

NegotiationView parse_negotiation(const Bytes& bytes) {
    ByteReader r(bytes);
    NegotiationView v;
    v.phase = r.u8();
    v.request_id = r.bytes();
    v.payload = r.bytes();
    r.expect_done();
    return v;
}

Bytes derive_seed(std::string_view label, const Bytes& seed, const Bytes& context) {
    ByteWriter w;
    w.str(label);
    w.bytes(seed);
    w.bytes(context);
    crypto::Digest d = crypto::hash(w.data());
    return Bytes(d.begin(), d.end());
}

// Union of the dependency sets across one shard's requests; a shard listed
// with conflicting signs is reported as a violation.
bool merge_dep_sets(const std::vector<World::RequestPlan>& requests,
                    const std::vector<ShardStatic>& shards,
                    std::map<ShardId, DependencySet>* merged, std::string* error) {
    std::map<ShardId, std::map<ShardId, DepSign>> by_shard;
    for (const auto& r : requests) {
        const ShardId& target = shards[r.shard_index].token;
        by_shard.try_emplace(target);
        for (const auto& d : r.deps) {
            auto [it, inserted] = by_shard[target].try_emplace(d.shard, d.sign);
            if (!inserted && it->second != d.sign) {
                if (error)
                    *error = "conflicting signs for " + d.shard.value + " in requests of " +
                             shards[r.shard_index].display;
                return false;
            }
        }
    }
    for (const auto& [shard, deps] : by_shard) {
        DependencySet set;
        for (const auto& [dep, sign] : deps) set.push_back({dep, sign});
        (*merged)[shard] = make_dependency_set(std::move(set));
    }
    return true;
}

}  // namespace

crypto::KeyPair stakeholder_ephemeral_key(crypto::Scheme scheme, const Bytes& identity_seed,
                                          const Bytes& request_id) {
    return crypto::keygen(scheme, crypto::KeyKind::Ephemeral,
                          derive_seed("mspt.epk", identity_seed, request_id));
}

crypto::KeyPair client_ephemeral_key(crypto::Scheme scheme, const Bytes& client_seed,
                                     const Bytes& entries_bytes) {
    return crypto::keygen(scheme, crypto::KeyKind::Ephemeral,
                          derive_seed("mspt.client", client_seed, entries_bytes));
}

std::vector<std::string> collect_and_verify(const std::vector<UpdateRequest>& requests,
                                            const std::vector<ShardResponse>& responses,
                                            const std::vector<Bytes>& shard_pks,
                                            crypto::Scheme scheme) {
    std::vector<std::string> errors;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        crypto::Digest expect = request_hash(requests[i]);
        if (responses[i].request_hash != expect) {
            errors.push_back("HashMismatch: request " + std::to_string(i));
            continue;
        }
        if (!crypto::verify(scheme, shard_pks[i], crypto::digest_bytes(responses[i].request_hash),
                            responses[i].shard_signature))
            errors.push_back("BadShardSignature: request " + std::to_string(i));
    }
    return errors;
}

std::vector<TransactionEntry> assemble_entries(
    std::vector<std::pair<crypto::Digest, std::vector<Bytes>>> parts) {
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<TransactionEntry> entries;
    entries.reserve(parts.size());
    for (auto& [hash, sigs] : parts) entries.push_back({hash, std::move(sigs)});
    return entries;
}

Transaction make_transaction(std::vector<TransactionEntry> entries,
                             const crypto::KeyPair& client_key) {
    Transaction tx;
    tx.entries = std::move(entries);
    tx.client_epk = client_key.public_key;
    tx.client_sig = crypto::sign(client_key, entries_view(tx.entries));
    return tx;
}

// ---- StakeholderActor -------------------------------------------------------

StakeholderActor::StakeholderActor(World& world, int index) : world_(world), index_(index) {
    name = "stakeholder:" + world_.stakeholders[index_].name;
}

crypto::KeyPair StakeholderActor::my_ephemeral(const Bytes& request_id) const {
    return stakeholder_ephemeral_key(world_.scheme, info().seed, request_id);
}

void StakeholderActor::on_timer(sim::Scheduler& net, std::uint64_t tag) {
    start_lead(net, static_cast<int>(tag));
}

void StakeholderActor::on_message(sim::Scheduler& net, const sim::Message& msg) {
    switch (msg.kind) {
        case sim::MsgKind::Negotiation: on_negotiation(net, msg); break;
        case sim::MsgKind::UpdateResponse: on_update_response(net, msg); break;
        case sim::MsgKind::UpdateError: on_update_error(net, msg); break;
        default: break;
    }
}

void StakeholderActor::start_lead(sim::Scheduler& net, int tx_index) {
    const World::TxPlan& plan = world_.txs[tx_index];
    LeadState& lead = leads_[plan.request_id];
    lead.tx_index = tx_index;
    lead.responses.assign(plan.requests.size(), std::nullopt);

    // Reciprocity is checked before any shard is contacted.
    std::map<ShardId, DependencySet> merged;
    std::string merge_error;
    if (!merge_dep_sets(plan.requests, world_.shards, &merged, &merge_error)) {
        abort_tx(net, lead, merge_error);
        return;
    }
    std::vector<std::string> violations = validate_dependency_consistency(merged);
    if (!violations.empty()) {
        abort_tx(net, lead, "inconsistent-deps: " + violations.front());
        return;
    }

    for (const auto& name : plan.stakeholder_names)
        if (name != info().name) lead.co_names.push_back(name);

    if (lead.co_names.empty()) {
        build_and_broadcast(net, lead);
        return;
    }

    // terms: target, payload and dependency set of each request
    ByteWriter terms;
    terms.u32(static_cast<std::uint32_t>(plan.requests.size()));
    for (const auto& r : plan.requests) {
        terms.str(world_.shards[r.shard_index].token.value);
        terms.bytes(canonical_encode(r.payload));
        write_dependency_set(terms, r.deps);
    }
    Bytes body = negotiation_body(kPhaseTerms, plan.request_id, terms.data());
    for (const auto& co : lead.co_names)
        net.send(actor_id, world_.stakeholders[world_.stakeholder_by_name.at(co)].actor,
                 sim::MsgKind::Negotiation, body, "phase=terms tx=" + plan.name);
}

void StakeholderActor::on_negotiation(sim::Scheduler& net, const sim::Message& msg) {
    NegotiationView view = parse_negotiation(msg.bytes);
    switch (view.phase) {
        case kPhaseTerms: {
            crypto::KeyPair eph = my_ephemeral(view.request_id);
            co_ephemerals_.emplace(view.request_id, eph);
            net.send(actor_id, msg.from, sim::MsgKind::Negotiation,
                     negotiation_body(kPhaseEpk, view.request_id, eph.public_key), "phase=epk");
            return;
        }
        case kPhaseSignRequests: {
            ByteReader r(view.payload);
            std::uint32_t n = r.u32();
            ByteWriter sigs;
            sigs.u32(n);
            for (std::uint32_t i = 0; i < n; ++i)
                sigs.bytes(crypto::sign(info().long_term, r.bytes()));
            net.send(actor_id, msg.from, sim::MsgKind::Negotiation,
                     negotiation_body(kPhaseLtSigs, view.request_id, sigs.data()),
                     "phase=lt-sigs");
            return;
        }
        case kPhaseHashList: {
            auto it = co_ephemerals_.find(view.request_id);
            crypto::KeyPair eph =
                it != co_ephemerals_.end() ? it->second : my_ephemeral(view.request_id);
            net.send(actor_id, msg.from, sim::MsgKind::Negotiation,
                     negotiation_body(kPhaseEphSig, view.request_id,
                                      crypto::sign(eph, view.payload)),
                     "phase=eph-sig");
            return;
        }
        default: break;
    }

    // lead side replies
    auto lit = leads_.find(view.request_id);
    if (lit == leads_.end()) return;
    LeadState& lead = lit->second;
    if (lead.aborted) return;
    std::string co;
    for (const auto& s : world_.stakeholders)
        if (s.actor == msg.from) co = s.name;
    if (co.empty()) return;

    if (view.phase == kPhaseEpk) {
        lead.co_epks[co] = view.payload;
        if (lead.co_epks.size() == lead.co_names.size()) build_and_broadcast(net, lead);
    } else if (view.phase == kPhaseLtSigs) {
        ByteReader r(view.payload);
        std::uint32_t n = r.u32();
        std::vector<Bytes> sigs;
        for (std::uint32_t i = 0; i < n; ++i) sigs.push_back(r.bytes());
        lead.co_lt_sigs[co] = std::move(sigs);
        if (lead.co_lt_sigs.size() == lead.co_names.size()) build_and_broadcast(net, lead);
    } else if (view.phase == kPhaseEphSig) {
        lead.co_eph_sigs[co] = view.payload;
        if (lead.co_eph_sigs.size() == lead.co_names.size()) maybe_assemble(net, lead);
    }
}

void StakeholderActor::build_and_broadcast(sim::Scheduler& net, LeadState& lead) {
    const World::TxPlan& plan = world_.txs[lead.tx_index];
    if (lead.requests.empty()) {
        if (lead.co_epks.size() < lead.co_names.size()) return;
        for (const auto& r : plan.requests) {
            UpdateRequest req;
            req.id = plan.request_id;
            req.nonce = r.nonce;
            req.payload = canonical_encode(r.payload);
            req.deps = r.deps;
            for (const auto& name : plan.stakeholder_names) {
                req.stakeholder_pks.push_back(
                    world_.stakeholders[world_.stakeholder_by_name.at(name)].long_term.public_key);
                req.stakeholder_epks.push_back(name == info().name
                                                   ? my_ephemeral(plan.request_id).public_key
                                                   : lead.co_epks.at(name));
            }
            lead.requests.push_back(std::move(req));
        }
        if (!lead.co_names.empty()) {
            ByteWriter views;
            views.u32(static_cast<std::uint32_t>(lead.requests.size()));
            for (const auto& req : lead.requests) views.bytes(request_signing_view(req));
            Bytes body = negotiation_body(kPhaseSignRequests, plan.request_id, views.data());
            for (const auto& co : lead.co_names)
                net.send(actor_id, world_.stakeholders[world_.stakeholder_by_name.at(co)].actor,
                         sim::MsgKind::Negotiation, body, "phase=sign-requests");
            return;
        }
    }
    if (lead.broadcast_done || lead.co_lt_sigs.size() < lead.co_names.size()) return;

    for (auto& req : lead.requests) {
        Bytes view = request_signing_view(req);
        std::size_t request_index = &req - lead.requests.data();
        for (const auto& name : plan.stakeholder_names) {
            req.signatures.push_back(name == info().name
                                         ? crypto::sign(info().long_term, view)
                                         : lead.co_lt_sigs.at(name).at(request_index));
        }
        lead.expected_hashes.push_back(request_hash(req));
    }
    lead.broadcast_done = true;
    for (std::size_t i = 0; i < lead.requests.size(); ++i) {
        int shard_index = plan.requests[i].shard_index;
        sim::reliable_broadcast(net, actor_id, world_.shard_nodes[shard_index],
                                sim::MsgKind::UpdateRequest, canonical_encode(lead.requests[i]),
                                "tx=" + plan.name + " target=" +
                                    world_.shards[shard_index].display);
    }
}

void StakeholderActor::on_update_response(sim::Scheduler& net, const sim::Message& msg) {
    ShardResponse resp = decode_shard_response(msg.bytes);
    for (auto& [id, lead] : leads_) {
        if (lead.aborted || !lead.broadcast_done) continue;
        const World::TxPlan& plan = world_.txs[lead.tx_index];
        for (std::size_t i = 0; i < lead.expected_hashes.size(); ++i) {
            if (lead.expected_hashes[i] != resp.request_hash) continue;
            ++response_counts_[{lead.tx_index, static_cast<int>(i)}];
            if (!lead.responses[i]) {
                const ShardStatic& shard = world_.shards[plan.requests[i].shard_index];
                if (crypto::verify(world_.scheme, shard.keys.public_key,
                                   crypto::digest_bytes(resp.request_hash), resp.shard_signature))
                    lead.responses[i] = resp;
            }
            maybe_assemble(net, lead);
            return;
        }
    }
}

void StakeholderActor::on_update_error(sim::Scheduler& net, const sim::Message& msg) {
    wire::UpdateErrorMsg err = wire::decode_update_error(msg.bytes);
    for (auto& [id, lead] : leads_) {
        if (lead.aborted) continue;
        for (const auto& h : lead.expected_hashes) {
            if (h == err.request_hash) {
                abort_tx(net, lead, "shard-error code=" + std::to_string(err.code) + " " +
                                        err.detail);
                return;
            }
        }
    }
}

void StakeholderActor::maybe_assemble(sim::Scheduler& net, LeadState& lead) {
    if (lead.relayed || lead.aborted) return;
    for (const auto& r : lead.responses)
        if (!r) return;

    const World::TxPlan& plan = world_.txs[lead.tx_index];
    if (lead.hash_list.empty()) {
        std::vector<ShardResponse> responses;
        std::vector<Bytes> shard_pks;
        for (std::size_t i = 0; i < lead.requests.size(); ++i) {
            responses.push_back(*lead.responses[i]);
            shard_pks.push_back(world_.shards[plan.requests[i].shard_index].keys.public_key);
        }
        std::vector<std::string> errors =
            collect_and_verify(lead.requests, responses, shard_pks, world_.scheme);
        if (!errors.empty()) {
            abort_tx(net, lead, errors.front());
            return;
        }
        std::vector<crypto::Digest> all_hashes = lead.expected_hashes;
        for (const auto& bogus : plan.bogus) all_hashes.push_back(bogus.hash);
        std::sort(all_hashes.begin(), all_hashes.end());
        std::vector<TransactionEntry> skeleton;
        for (const auto& h : all_hashes) skeleton.push_back({h, {}});
        lead.hash_list = hash_list_view(skeleton);

        if (!lead.co_names.empty()) {
            Bytes body = negotiation_body(kPhaseHashList, plan.request_id, lead.hash_list);
            for (const auto& co : lead.co_names)
                net.send(actor_id, world_.stakeholders[world_.stakeholder_by_name.at(co)].actor,
                         sim::MsgKind::Negotiation, body, "phase=hash-list");
            return;
        }
    }
    if (lead.co_eph_sigs.size() < lead.co_names.size()) return;
    relay_to_client(net, lead);
}

void StakeholderActor::relay_to_client(sim::Scheduler& net, LeadState& lead) {
    const World::TxPlan& plan = world_.txs[lead.tx_index];
    Bytes my_sig = crypto::sign(my_ephemeral(plan.request_id), lead.hash_list);

    std::vector<std::pair<crypto::Digest, std::vector<Bytes>>> parts;
    for (std::size_t i = 0; i < lead.requests.size(); ++i) {
        std::vector<Bytes> sigs;
        for (const auto& name : plan.stakeholder_names)
            sigs.push_back(name == info().name ? my_sig : lead.co_eph_sigs.at(name));
        parts.emplace_back(lead.expected_hashes[i], std::move(sigs));
    }
    for (const auto& bogus : plan.bogus) {
        crypto::KeyPair throwaway =
            crypto::keygen(world_.scheme, crypto::KeyKind::Ephemeral, bogus.epk_seed);
        parts.emplace_back(bogus.hash,
                           std::vector<Bytes>{crypto::sign(throwaway, lead.hash_list)});
    }
    std::vector<TransactionEntry> entries = assemble_entries(std::move(parts));
    lead.relayed = true;
    net.send(actor_id, world_.clients[plan.client_index].actor, sim::MsgKind::TxRelay,
             entries_view(entries), "tx=" + plan.name);
}

void StakeholderActor::abort_tx(sim::Scheduler& net, LeadState& lead, const std::string& why) {
    if (lead.aborted) return;
    lead.aborted = true;
    aborted_.insert(lead.tx_index);
    net.note(sim::EventKind::StateChange, actor_id,
             "tx-aborted tx=" + world_.txs[lead.tx_index].name + " why=" + why);
}

// ---- ClientActor -------------------------------------------------------------

ClientActor::ClientActor(World& world, int index) : world_(world), index_(index) {
    name = "client:" + world_.clients[index_].name;
}

void ClientActor::on_message(sim::Scheduler& net, const sim::Message& msg) {
    if (msg.kind != sim::MsgKind::TxRelay) return;
    std::vector<TransactionEntry> entries = decode_entries(msg.bytes);
    crypto::KeyPair key =
        client_ephemeral_key(world_.scheme, world_.clients[index_].seed, msg.bytes);
    Transaction tx = make_transaction(std::move(entries), key);
    net.send(actor_id, world_.ledger_actor, sim::MsgKind::Submit, canonical_encode(tx),
             "entries=" + std::to_string(tx.entries.size()));
}

}  // namespace mspt
