#include "mspt/shard.hpp"

#include <algorithm>
#include <cassert>

namespace mspt {

namespace {

std::string short_id(const Bytes& id) { return to_hex(id); }

}  // namespace

std::string request_error_name(RequestError e) {
    switch (e) {
        case RequestError::DuplicateRequest: return "DuplicateRequest";
        case RequestError::PolicyViolation: return "PolicyViolation";
        case RequestError::InvalidSignature: return "InvalidSignature";
        case RequestError::SimulationFailure: return "SimulationFailure";
        case RequestError::SelfDependency: return "SelfDependency";
        case RequestError::MalformedRequest: return "MalformedRequest";
    }
    return "?";
}

ShardNodeActor::ShardNodeActor(World& world, int shard_index, int node_index)
    : world_(world), shard_index_(shard_index), node_index_(node_index) {
    const ShardStatic& cfg = world_.shards[shard_index_];
    name = "shard:" + cfg.display + "." + std::to_string(node_index_);
    for (const auto& [account, balance] : cfg.initial_balances)
        accounts_[account] = AccountState{balance, 0};
}

void ShardNodeActor::on_message(sim::Scheduler& net, const sim::Message& msg) {
    switch (msg.kind) {
        case sim::MsgKind::UpdateRequest: on_update_request(net, msg, true); break;
        case sim::MsgKind::UpdateRequestEcho: on_update_request(net, msg, false); break;
        case sim::MsgKind::Block: on_block(net, msg); break;
        case sim::MsgKind::Pull: on_pull(net, msg); break;
        case sim::MsgKind::PullReply: on_pull_reply(net, msg); break;
        case sim::MsgKind::Vote: on_vote(net, msg); break;
        case sim::MsgKind::Decision: on_decision(net, msg); break;
        default: break;
    }
}

void ShardNodeActor::on_timer(sim::Scheduler& net, std::uint64_t tag) {
    auto it = gc_timers_.find(tag);
    if (it == gc_timers_.end()) return;
    Bytes id = it->second;
    gc_timers_.erase(it);
    auto sit = sessions_.find(id);
    if (sit != sessions_.end() && sit->second.finalized && !sit->second.reclaimed)
        reclaim(net, sit->second);
}

// ---- pre-ordering: update requests ----------------------------------------

RequestOutcome ShardNodeActor::handle_update_request(const UpdateRequest& req) {
    const ShardStatic& cfg = config();
    RequestOutcome out;
    if (auto shape_error = validate_request_shape(req, cfg.token)) {
        out.error = shape_error->find("target shard") != std::string::npos
                        ? RequestError::SelfDependency
                        : RequestError::MalformedRequest;
        out.detail = *shape_error;
        return out;
    }
    if (seen_id_nonce_.count({req.id, req.nonce})) {
        out.error = RequestError::DuplicateRequest;
        out.detail = "id and nonce already seen";
        return out;
    }
    Bytes view = request_signing_view(req);
    for (std::size_t i = 0; i < req.signatures.size(); ++i) {
        if (!crypto::verify(world_.scheme, req.stakeholder_pks[i], view, req.signatures[i])) {
            out.error = RequestError::InvalidSignature;
            out.detail = "stakeholder signature " + std::to_string(i) + " invalid";
            return out;
        }
    }
    Payload payload;
    try {
        payload = decode_payload(req.payload);
    } catch (const CodecError&) {
        out.error = RequestError::MalformedRequest;
        out.detail = "payload does not decode";
        return out;
    }
    if (payload.ops.empty()) {
        out.error = RequestError::MalformedRequest;
        out.detail = "empty payload";
        return out;
    }
    for (const auto& op : payload.ops) {
        auto pit = cfg.policies.find(op.account);
        if (pit == cfg.policies.end()) {
            out.error = RequestError::PolicyViolation;
            out.detail = "unknown account " + op.account;
            return out;
        }
        const StakeholderPolicy& policy = pit->second;
        std::size_t need = policy.threshold ? policy.threshold : policy.owner_pks.size();
        std::size_t have = 0;
        for (const auto& owner : policy.owner_pks)
            if (std::find(req.stakeholder_pks.begin(), req.stakeholder_pks.end(), owner) !=
                req.stakeholder_pks.end())
                ++have;
        if (have < need) {
            out.error = RequestError::PolicyViolation;
            out.detail = "policy for " + op.account + " needs " + std::to_string(need) +
                         " owner signatures, got " + std::to_string(have);
            return out;
        }
    }
    PendingRequest pending;
    pending.req = req;
    if (world_.mode == ExecuteOnRequest) {
        std::string sim_error;
        auto writes = simulate({req.payload}, &sim_error);
        if (!writes) {
            out.error = RequestError::SimulationFailure;
            out.detail = sim_error;
            return out;
        }
        pending.writes = std::move(writes);
    }
    crypto::Digest hreq = request_hash(req);
    seen_id_nonce_.insert({req.id, req.nonce});
    store_[hreq] = std::move(pending);

    ShardResponse resp;
    resp.request_hash = hreq;
    resp.shard_signature = crypto::sign(cfg.keys, crypto::digest_bytes(hreq));
    out.response = std::move(resp);
    return out;
}

std::optional<WriteSet> ShardNodeActor::simulate(const std::vector<Bytes>& payloads,
                                                 std::string* error) const {
    WriteSet ws;
    std::map<std::string, std::int64_t> scratch;
    for (const auto& raw : payloads) {
        Payload p = decode_payload(raw);
        for (const auto& op : p.ops) {
            auto ait = accounts_.find(op.account);
            if (ait == accounts_.end()) {
                if (error) *error = "unknown account " + op.account;
                return std::nullopt;
            }
            if (!scratch.count(op.account)) {
                scratch[op.account] = ait->second.balance;
                ws.read_versions[op.account] = ait->second.version;
            }
            std::int64_t next = scratch[op.account] + op.delta;
            if (next < 0) {
                if (error)
                    *error = "insufficient balance on " + op.account + " (" +
                             std::to_string(scratch[op.account]) + " " +
                             std::to_string(op.delta) + ")";
                return std::nullopt;
            }
            scratch[op.account] = next;
        }
    }
    ws.new_balances = std::move(scratch);
    return ws;
}

void ShardNodeActor::on_update_request(sim::Scheduler& net, const sim::Message& msg, bool direct) {
    crypto::Digest digest = crypto::hash(msg.bytes);
    if (rb_.first_delivery(msg.bytes)) {
        // Echo to sibling nodes before processing, so delivery at one correct
        // node implies delivery at every correct node of the shard.
        for (int sibling : world_.shard_nodes[shard_index_])
            if (sibling != actor_id)
                net.send(actor_id, sibling, sim::MsgKind::UpdateRequestEcho, msg.bytes,
                         "echo");
        RequestOutcome outcome;
        try {
            outcome = handle_update_request(decode_update_request(msg.bytes));
        } catch (const CodecError& e) {
            outcome.error = RequestError::MalformedRequest;
            outcome.detail = e.what();
        }
        processed_[digest] = std::move(outcome);
    }
    if (!direct) return;
    if (responded_.count(digest)) {
        // A second direct copy of the same request is a replay.
        wire::UpdateErrorMsg err;
        err.request_hash = digest;
        err.code = static_cast<std::uint8_t>(RequestError::DuplicateRequest);
        err.detail = "request replayed";
        net.send(actor_id, msg.from, sim::MsgKind::UpdateError, wire::encode(err),
                 "error=DuplicateRequest");
        return;
    }
    responded_.insert(digest);
    const RequestOutcome& outcome = processed_.at(digest);
    if (outcome.ok()) {
        net.send(actor_id, msg.from, sim::MsgKind::UpdateResponse,
                 canonical_encode(*outcome.response),
                 "hash=" + to_hex(outcome.response->request_hash));
    } else {
        wire::UpdateErrorMsg err;
        err.request_hash = digest;
        err.code = static_cast<std::uint8_t>(*outcome.error);
        err.detail = outcome.detail;
        net.send(actor_id, msg.from, sim::MsgKind::UpdateError, wire::encode(err),
                 "error=" + request_error_name(*outcome.error));
    }
}

// ---- post-ordering: block scanning -----------------------------------------

void ShardNodeActor::on_block(sim::Scheduler& net, const sim::Message& msg) {
    wire::BlockMsg block = wire::decode_block(msg.bytes);
    assert(block.height == expected_height_);
    expected_height_ = block.height + 1;
    scan_block(net, block);
}

void ShardNodeActor::scan_block(sim::Scheduler& net, const wire::BlockMsg& block) {
    for (const auto& tx : block.txs) {
        // Recognized hashes grouped by request id, preserving entry order.
        std::vector<StartInfo> groups;
        std::map<Bytes, std::size_t> group_index;
        Bytes hash_list = hash_list_view(tx.entries);
        for (const auto& entry : tx.entries) {
            auto sit = store_.find(entry.request_hash);
            if (sit == store_.end() || sit->second.consumed || sit->second.reclaimed)
                continue;  // not ours; ignore
            PendingRequest& pending = sit->second;
            if (config().stall) {
                halt(net, "stall");
                return;
            }
            pending.consumed = true;
            const UpdateRequest& req = pending.req;
            bool entry_ok = entry.ephemeral_sigs.size() == req.stakeholder_epks.size();
            for (std::size_t k = 0; entry_ok && k < entry.ephemeral_sigs.size(); ++k)
                entry_ok = crypto::verify(world_.scheme, req.stakeholder_epks[k], hash_list,
                                          entry.ephemeral_sigs[k]);
            auto [git, inserted] = group_index.try_emplace(req.id, groups.size());
            if (inserted) {
                StartInfo info;
                info.request_id = req.id;
                info.hash_count = tx.entries.size();
                groups.push_back(std::move(info));
            }
            StartInfo& info = groups[git->second];
            info.hashes.push_back(entry.request_hash);
            info.sigs_ok = info.sigs_ok && entry_ok;
        }
        for (auto& info : groups) {
            if (sessions_.count(info.request_id) || tombstones_.count(info.request_id))
                continue;  // decided or running sessions never restart
            try_start_session(net, std::move(info));
        }
    }
}

std::vector<std::string> ShardNodeActor::touched_accounts(const StartInfo& info) const {
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const auto& h : info.hashes) {
        Payload p = decode_payload(store_.at(h).req.payload);
        for (const auto& op : p.ops)
            if (seen.insert(op.account).second) order.push_back(op.account);
    }
    return order;
}

void ShardNodeActor::try_start_session(sim::Scheduler& net, StartInfo info) {
    std::vector<std::string> accounts = touched_accounts(info);
    for (const auto& a : accounts) {
        if (account_locks_.count(a)) {
            // Overlapping write sets serialize in ledger order.
            waiting_.push_back(std::move(info));
            return;
        }
    }
    start_session(net, info, std::move(accounts));
}

void ShardNodeActor::start_waiting_sessions(sim::Scheduler& net) {
    std::deque<StartInfo> pending = std::move(waiting_);
    waiting_.clear();
    for (auto& info : pending) try_start_session(net, std::move(info));
}

void ShardNodeActor::start_session(sim::Scheduler& net, const StartInfo& info,
                                   std::vector<std::string> accounts_in_order) {
    const ShardStatic& cfg = config();
    SessionState s;
    s.request_id = info.request_id;
    s.hashes = info.hashes;
    s.hash_count = info.hash_count;
    s.engine = world_.protocol;
    s.locked_accounts = accounts_in_order;
    for (const auto& a : s.locked_accounts) account_locks_[a] = s.request_id;

    bool commit = info.sigs_ok;
    std::string why = commit ? "" : "bad-ephemeral-signatures";

    if (commit) {
        if (world_.mode == ExecuteOnRequest) {
            // Re-check the stored write sets against current versions; a
            // version moved since simulation means the result is stale.
            std::map<std::string, std::int64_t> balances;
            std::map<std::string, std::uint64_t> versions;
            for (const auto& h : s.hashes) {
                const PendingRequest& pending = store_.at(h);
                const WriteSet& ws = *pending.writes;
                for (const auto& [account, version] : ws.read_versions) {
                    if (!versions.count(account)) {
                        versions[account] = accounts_.at(account).version;
                        balances[account] = accounts_.at(account).balance;
                    }
                    if (versions[account] != version) {
                        commit = false;
                        why = "stale-write-set account=" + account;
                        break;
                    }
                }
                if (!commit) break;
                for (const auto& [account, balance] : ws.new_balances) {
                    balances[account] = balance;
                    versions[account] += 1;
                }
            }
            if (commit)
                for (const auto& [account, balance] : balances)
                    s.writes.new_balances[account] = balance;
        } else {
            // Order-execute: run the payloads now, in transaction order.
            std::vector<Bytes> payloads;
            for (const auto& h : s.hashes) payloads.push_back(store_.at(h).req.payload);
            std::string sim_error;
            auto writes = simulate(payloads, &sim_error);
            if (writes) {
                s.writes = std::move(*writes);
            } else {
                commit = false;
                why = "simulation-failed " + sim_error;
            }
        }
    }

    auto tx_it = world_.tx_by_request_id.find(s.request_id);
    if (tx_it != world_.tx_by_request_id.end() &&
        world_.txs[tx_it->second].discard_shards.count(shard_index_)) {
        commit = false;
        why = "belief-override";
    }

    s.belief.value = commit ? BeliefValue::TentativeCommit : BeliefValue::Discard;
    s.initial_value = s.belief.value;
    if (!commit) s.discard_round = 0;

    // Contacts and expected callers from the union of this shard's requests.
    std::set<ShardId> contact_set;
    for (const auto& h : s.hashes) {
        for (const auto& d : store_.at(h).req.deps) {
            if (dep_is_contact(d.sign)) contact_set.insert(d.shard);
            if (dep_is_caller(d.sign)) s.expected_callers.insert(d.shard.value);
        }
    }
    s.contacts.assign(contact_set.begin(), contact_set.end());
    s.round_budget = s.hash_count > s.contacts.size()
                         ? static_cast<std::uint32_t>(s.hash_count - s.contacts.size())
                         : 0;

    auto [it, inserted] = sessions_.emplace(s.request_id, std::move(s));
    SessionState& session = it->second;
    net.note(sim::EventKind::RoundAdvance, actor_id,
             session_summary(session, 0) + (why.empty() ? "" : " why=" + why));

    // Pulls and 2PC messages that raced ahead of our block delivery.
    auto up = unknown_pulls_.find(session.request_id);
    if (up != unknown_pulls_.end()) {
        for (auto& d : up->second) session.deferred.push_back(std::move(d));
        unknown_pulls_.erase(up);
    }

    if (session.engine == CommitProtocol::TwoPc)
        twopc_start(net, session);
    else
        ppac_start(net, session);
}

// ---- PPAC ------------------------------------------------------------------

void ShardNodeActor::ppac_start(sim::Scheduler& net, SessionState& s) {
    if (s.contacts.empty() || s.belief.value == BeliefValue::Discard) {
        finalize(net, s, 0);
        return;
    }
    begin_round(net, s, 1);
}

void ShardNodeActor::begin_round(sim::Scheduler& net, SessionState& s, std::uint32_t r) {
    s.round = r;
    s.snapshots.push_back(s.belief);
    s.round_got.clear();
    s.round_all_final = true;
    s.next_contact = 0;
    net.note(sim::EventKind::RoundAdvance, actor_id, session_summary(s, r));
    flush_deferred(net, s);
    send_pulls(net, s);
}

void ShardNodeActor::send_pulls(sim::Scheduler& net, SessionState& s) {
    const ShardId& contact = s.contacts[s.next_contact];
    wire::PullMsg pull{s.request_id, config().token};
    Bytes bytes = wire::encode(pull);
    const auto& nodes = world_.shard_nodes[world_.shard_by_token.at(contact.value)];
    for (int node : nodes)
        net.send(actor_id, node, sim::MsgKind::Pull, bytes, "id=" + short_id(s.request_id));
}

void ShardNodeActor::on_pull_reply(sim::Scheduler& net, const sim::Message& msg) {
    wire::PullReplyMsg reply = wire::decode_pull_reply(msg.bytes);
    auto it = sessions_.find(reply.request_id);
    if (it == sessions_.end()) return;
    SessionState& s = it->second;
    std::uint32_t reply_round = ++s.reply_counts[msg.from];
    if (s.finalized || s.engine != CommitProtocol::Ppac) return;
    if (reply_round != s.round) return;  // a slower sibling answered an old round
    const ShardNodeActor& sender = dynamic_cast<const ShardNodeActor&>(net.actor(msg.from));
    const std::string& token = sender.config().token.value;
    if (s.round_got.count(token)) return;  // a sibling node answered first
    if (s.next_contact >= s.contacts.size() || s.contacts[s.next_contact].value != token) return;
    s.round_got.insert(token);
    s.round_all_final = s.round_all_final && reply.belief.is_final;
    if (reply.belief.value == BeliefValue::Discard) {
        set_discard(net, s, s.round);
        finalize(net, s, s.round);
        return;
    }
    ++s.next_contact;
    if (s.next_contact < s.contacts.size()) {
        send_pulls(net, s);
    } else {
        end_of_round(net, s);
    }
}

void ShardNodeActor::end_of_round(sim::Scheduler& net, SessionState& s) {
    if (world_.optimize && s.round_all_final) {
        // All dependencies final: their beliefs can never change again.
        finalize(net, s, s.round);
        return;
    }
    if (s.round >= s.round_budget) {
        finalize(net, s, s.round);
        return;
    }
    begin_round(net, s, s.round + 1);
}

void ShardNodeActor::on_pull(sim::Scheduler& net, const sim::Message& msg) {
    wire::PullMsg pull = wire::decode_pull(msg.bytes);
    auto it = sessions_.find(pull.request_id);
    if (it == sessions_.end()) {
        auto tomb = tombstones_.find(pull.request_id);
        if (tomb != tombstones_.end()) {
            wire::PullReplyMsg reply{pull.request_id, tomb->second};
            net.send(actor_id, msg.from, sim::MsgKind::PullReply, wire::encode(reply),
                     "id=" + short_id(pull.request_id));
            return;
        }
        // The transaction has not reached this node yet; the caller waits.
        unknown_pulls_[pull.request_id].push_back({msg.from, pull.caller.value});
        return;
    }
    SessionState& s = it->second;
    if (!s.expected_callers.count(pull.caller.value)) {
        wire::PullDeniedMsg denied{pull.request_id};
        net.send(actor_id, msg.from, sim::MsgKind::PullDenied, wire::encode(denied),
                 "id=" + short_id(pull.request_id) + " denied=" +
                     world_.display_of_token(pull.caller.value));
        return;
    }
    if (s.reclaimed) {
        wire::PullReplyMsg reply{s.request_id, Belief{s.belief.value, true}};
        net.send(actor_id, msg.from, sim::MsgKind::PullReply, wire::encode(reply),
                 "id=" + short_id(s.request_id));
        return;
    }
    s.deferred.push_back({msg.from, pull.caller.value});
    flush_deferred(net, s);
}

void ShardNodeActor::flush_deferred(sim::Scheduler& net, SessionState& s) {
    std::vector<DeferredPull> keep;
    for (const auto& d : s.deferred) {
        std::uint32_t r_q = s.call_counts[d.caller_actor] + 1;
        if (r_q <= s.round) {
            // The caller's r-th query observes the belief held at the start
            // of our round r: information moves one edge per round.
            s.call_counts[d.caller_actor] = r_q;
            Belief snap = s.snapshots[r_q - 1];
            wire::PullReplyMsg reply{s.request_id, snap};
            net.send(actor_id, d.caller_actor, sim::MsgKind::PullReply, wire::encode(reply),
                     "id=" + short_id(s.request_id));
            if (snap.is_final) s.final_informed.insert(d.caller_token);
        } else if (s.finalized) {
            s.call_counts[d.caller_actor] = r_q;
            wire::PullReplyMsg reply{s.request_id, Belief{s.belief.value, true}};
            net.send(actor_id, d.caller_actor, sim::MsgKind::PullReply, wire::encode(reply),
                     "id=" + short_id(s.request_id));
            s.final_informed.insert(d.caller_token);
        } else {
            keep.push_back(d);
        }
    }
    s.deferred = std::move(keep);
    maybe_reclaim(net, s);
}

// ---- 2PC -------------------------------------------------------------------

void ShardNodeActor::twopc_start(sim::Scheduler& net, SessionState& s) {
    auto pit = world_.tx_participants.find(s.request_id);
    s.participants = pit == world_.tx_participants.end() ? std::vector<ShardId>{config().token}
                                                         : pit->second;
    if (s.participants.size() <= 1) {
        finalize(net, s, 0);
        return;
    }
    const ShardId& coordinator = s.participants.front();  // minimum shard id
    s.is_coordinator = coordinator == config().token;
    s.round = 1;
    s.snapshots.push_back(s.belief);
    net.note(sim::EventKind::RoundAdvance, actor_id, session_summary(s, 1));

    if (s.is_coordinator) {
        s.votes[config().token.value] = s.belief.value == BeliefValue::TentativeCommit;
        auto uv = unknown_votes_.find(s.request_id);
        if (uv != unknown_votes_.end()) {
            for (const auto& v : uv->second)
                if (!s.votes.count(v.voter.value)) s.votes[v.voter.value] = v.commit;
            unknown_votes_.erase(uv);
        }
        twopc_check_votes(net, s);
    } else {
        wire::VoteMsg vote{s.request_id, config().token,
                           s.belief.value == BeliefValue::TentativeCommit};
        Bytes bytes = wire::encode(vote);
        const auto& nodes = world_.shard_nodes[world_.shard_by_token.at(coordinator.value)];
        for (int node : nodes)
            net.send(actor_id, node, sim::MsgKind::Vote, bytes,
                     "id=" + short_id(s.request_id) + " vote=" +
                         (vote.commit ? "commit" : "discard"));
        auto ud = unknown_decisions_.find(s.request_id);
        if (ud != unknown_decisions_.end()) {
            wire::DecisionMsg decision = ud->second;
            unknown_decisions_.erase(ud);
            if (!decision.commit) set_discard(net, s, 1);
            finalize(net, s, 1);
        }
    }
}

void ShardNodeActor::twopc_check_votes(sim::Scheduler& net, SessionState& s) {
    if (s.finalized || s.votes.size() < s.participants.size()) return;
    bool commit = true;
    for (const auto& [voter, v] : s.votes) commit = commit && v;
    wire::DecisionMsg decision{s.request_id, commit};
    Bytes bytes = wire::encode(decision);
    for (const auto& p : s.participants) {
        if (p == config().token) continue;
        for (int node : world_.shard_nodes[world_.shard_by_token.at(p.value)])
            net.send(actor_id, node, sim::MsgKind::Decision, bytes,
                     "id=" + short_id(s.request_id) + " decision=" +
                         (commit ? "commit" : "discard"));
    }
    if (!commit) set_discard(net, s, 1);
    finalize(net, s, 1);
}

void ShardNodeActor::on_vote(sim::Scheduler& net, const sim::Message& msg) {
    wire::VoteMsg vote = wire::decode_vote(msg.bytes);
    auto it = sessions_.find(vote.request_id);
    if (it == sessions_.end()) {
        unknown_votes_[vote.request_id].push_back(vote);
        return;
    }
    SessionState& s = it->second;
    if (s.engine != CommitProtocol::TwoPc || !s.is_coordinator || s.finalized) return;
    if (!s.votes.count(vote.voter.value)) s.votes[vote.voter.value] = vote.commit;
    twopc_check_votes(net, s);
}

void ShardNodeActor::on_decision(sim::Scheduler& net, const sim::Message& msg) {
    wire::DecisionMsg decision = wire::decode_decision(msg.bytes);
    auto it = sessions_.find(decision.request_id);
    if (it == sessions_.end()) {
        unknown_decisions_.emplace(decision.request_id, decision);
        return;
    }
    SessionState& s = it->second;
    if (s.engine != CommitProtocol::TwoPc || s.finalized) return;
    if (!decision.commit) set_discard(net, s, 1);
    finalize(net, s, 1);
}

// ---- shared ----------------------------------------------------------------

void ShardNodeActor::set_discard(sim::Scheduler& net, SessionState& s, std::uint32_t round) {
    if (s.belief.value == BeliefValue::Discard) return;
    s.belief.value = BeliefValue::Discard;
    s.discard_round = round;
    net.note(sim::EventKind::StateChange, actor_id,
             "id=" + short_id(s.request_id) + " round=" + std::to_string(round) +
                 " value=discard");
}

void ShardNodeActor::finalize(sim::Scheduler& net, SessionState& s, std::uint32_t round) {
    if (s.finalized) return;
    s.finalized = true;
    s.finalize_round = round;
    s.belief.is_final = true;
    net.note(sim::EventKind::Finalize, actor_id, session_summary(s, round));
    if (s.belief.value == BeliefValue::TentativeCommit) {
        for (const auto& [account, balance] : s.writes.new_balances) {
            AccountState& st = accounts_.at(account);
            st.balance = balance;
            st.version += 1;
        }
    }
    for (const auto& account : s.locked_accounts) account_locks_.erase(account);
    flush_deferred(net, s);
    if (world_.gc_timeout > 0) {
        gc_timers_[++gc_tag_] = s.request_id;
        net.schedule_timer(actor_id, world_.gc_timeout, gc_tag_);
    }
    maybe_reclaim(net, s);
    start_waiting_sessions(net);
}

void ShardNodeActor::maybe_reclaim(sim::Scheduler& net, SessionState& s) {
    if (!s.finalized || s.reclaimed) return;
    for (const auto& caller : s.expected_callers)
        if (!s.final_informed.count(caller)) return;
    reclaim(net, s);
}

void ShardNodeActor::reclaim(sim::Scheduler& net, SessionState& s) {
    if (s.reclaimed) return;
    s.reclaimed = true;
    tombstones_[s.request_id] = Belief{s.belief.value, true};
    for (const auto& h : s.hashes) {
        auto it = store_.find(h);
        if (it != store_.end()) {
            it->second.req = UpdateRequest{};
            it->second.writes.reset();
            it->second.reclaimed = true;
        }
    }
    s.snapshots.clear();
    s.writes = WriteSet{};
    s.deferred.clear();
}

std::string ShardNodeActor::session_summary(const SessionState& s, std::uint32_t round) const {
    std::string summary = "id=" + short_id(s.request_id) + " round=" + std::to_string(round) +
                          " belief=" +
                          (s.belief.value == BeliefValue::TentativeCommit ? "commit" : "discard");
    if (round == 0) {
        summary += " engine=";
        summary += s.engine == CommitProtocol::Ppac ? "ppac" : "2pc";
        summary += " n=" + std::to_string(s.hash_count) +
                   " budget=" + std::to_string(s.round_budget) +
                   " contacts=" + std::to_string(s.contacts.size());
    }
    return summary;
}

void ShardNodeActor::halt(sim::Scheduler& net, const std::string& why) {
    net.note(sim::EventKind::Crash, actor_id, why);
    crashed = true;
}

}  // namespace mspt
