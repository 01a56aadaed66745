#include "mspt/runner.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "mspt/ledger.hpp"
#include "mspt/shard.hpp"
#include "mspt/stakeholder.hpp"

namespace mspt {

namespace {

Bytes draw_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 0xff);
    return out;
}

std::string draw_token(std::mt19937_64& rng) { return to_hex(draw_bytes(rng, 16)); }

}  // namespace

World build_world(const Scenario& scenario) {
    World world;
    world.scheme = scenario.protocol.scheme;
    world.protocol = scenario.protocol.kind;
    world.optimize = scenario.protocol.optimize;
    world.mode = scenario.protocol.mode;
    world.replication = scenario.protocol.replication;
    world.gc_timeout = scenario.network.gc_timeout;
    world.block_max_txs = scenario.network.block_max_txs;
    world.block_timeout = scenario.network.block_timeout;
    world.horizon = scenario.network.horizon;

    std::mt19937_64 setup(scenario.network.seed ^ 0xa5a5a5a55a5a5a5aULL);

    // All owner names, sorted, before any key material is drawn.
    std::set<std::string> owner_names;
    for (const auto& shard : scenario.shards)
        for (const auto& [account, owners] : shard.owners)
            for (const auto& owner : owners) owner_names.insert(owner);
    if (owner_names.empty()) owner_names.insert("st");

    for (const auto& spec : scenario.shards) {
        ShardStatic shard;
        shard.display = spec.id;
        shard.token = ShardId{draw_token(setup)};
        shard.keys = crypto::keygen(world.scheme, crypto::KeyKind::LongTerm, draw_bytes(setup, 16));
        shard.initial_balances = spec.accounts;
        shard.stall = spec.stall;
        world.shard_by_display[shard.display] = static_cast<int>(world.shards.size());
        world.shard_by_token[shard.token.value] = static_cast<int>(world.shards.size());
        world.shards.push_back(std::move(shard));
    }

    for (const auto& name : owner_names) {
        World::StakeholderInfo info;
        info.name = name;
        info.seed = draw_bytes(setup, 16);
        info.long_term = crypto::keygen(world.scheme, crypto::KeyKind::LongTerm, info.seed);
        world.stakeholder_by_name[name] = static_cast<int>(world.stakeholders.size());
        world.stakeholders.push_back(std::move(info));
    }

    // Policies need all stakeholder keys; default owner set is {"st"}.
    for (std::size_t i = 0; i < scenario.shards.size(); ++i) {
        const ShardSpec& spec = scenario.shards[i];
        for (const auto& [account, balance] : spec.accounts) {
            StakeholderPolicy policy;
            auto oit = spec.owners.find(account);
            std::vector<std::string> owners =
                oit != spec.owners.end() ? oit->second : std::vector<std::string>{"st"};
            for (const auto& owner : owners)
                policy.owner_pks.push_back(
                    world.stakeholders[world.stakeholder_by_name.at(owner)].long_term.public_key);
            world.shards[i].policies[account] = std::move(policy);
        }
    }

    for (int c = 0; c < scenario.protocol.clients; ++c) {
        World::ClientInfo client;
        client.name = "c" + std::to_string(c);
        client.seed = draw_bytes(setup, 16);
        world.clients.push_back(std::move(client));
    }

    for (const auto& spec : scenario.txs) {
        World::TxPlan plan;
        plan.name = spec.name;
        plan.request_id = draw_bytes(setup, 16);
        plan.submit_at = spec.submit_at;
        std::set<std::string> names;
        for (const auto& r : spec.requests) {
            World::RequestPlan req;
            int shard_index = world.shard_by_display.at(r.shard);
            req.shard_index = shard_index;
            req.payload = r.payload;
            std::vector<SignedDependency> deps;
            for (const auto& [display, sign] : r.deps)
                deps.push_back({world.shards[world.shard_by_display.at(display)].token, sign});
            req.deps = make_dependency_set(std::move(deps));
            req.nonce = draw_bytes(setup, 16);
            plan.requests.push_back(std::move(req));
            const ShardSpec& shard_spec = scenario.shards[shard_index];
            for (const auto& op : r.payload.ops) {
                auto oit = shard_spec.owners.find(op.account);
                if (oit != shard_spec.owners.end())
                    names.insert(oit->second.begin(), oit->second.end());
                else
                    names.insert("st");
            }
        }
        plan.stakeholder_names.assign(names.begin(), names.end());
        plan.client_index = static_cast<int>(setup() % world.clients.size());
        for (const auto& display : spec.discard_shards)
            plan.discard_shards.insert(world.shard_by_display.at(display));
        if (scenario.protocol.pad_entries > plan.requests.size()) {
            std::size_t extra = scenario.protocol.pad_entries - plan.requests.size();
            for (std::size_t b = 0; b < extra; ++b) {
                World::BogusEntry bogus;
                bogus.epk_seed = draw_bytes(setup, 16);
                Bytes h = draw_bytes(setup, 32);
                std::copy(h.begin(), h.end(), bogus.hash.begin());
                plan.bogus.push_back(std::move(bogus));
            }
        }
        world.tx_by_request_id[plan.request_id] = static_cast<int>(world.txs.size());
        if (world.protocol == CommitProtocol::TwoPc) {
            std::set<ShardId> participants;
            for (const auto& r : plan.requests)
                participants.insert(world.shards[r.shard_index].token);
            world.tx_participants[plan.request_id] =
                std::vector<ShardId>(participants.begin(), participants.end());
        }
        world.txs.push_back(std::move(plan));
    }
    return world;
}

RunResult run_scenario(const Scenario& scenario) {
    RunResult result;
    result.world = build_world(scenario);
    World& world = result.world;

    sim::Scheduler net(scenario.network.seed, scenario.network.delta_max);

    for (std::size_t i = 0; i < world.shards.size(); ++i) {
        std::vector<int> nodes;
        for (int r = 0; r < world.replication; ++r)
            nodes.push_back(
                net.add_actor(std::make_unique<ShardNodeActor>(world, static_cast<int>(i), r)));
        world.shard_nodes.push_back(std::move(nodes));
    }
    world.ledger_actor = net.add_actor(std::make_unique<LedgerActor>(world));
    for (std::size_t i = 0; i < world.stakeholders.size(); ++i)
        world.stakeholders[i].actor =
            net.add_actor(std::make_unique<StakeholderActor>(world, static_cast<int>(i)));
    for (std::size_t i = 0; i < world.clients.size(); ++i)
        world.clients[i].actor =
            net.add_actor(std::make_unique<ClientActor>(world, static_cast<int>(i)));

    for (std::size_t i = 0; i < scenario.shards.size(); ++i) {
        for (const auto& [node, at] : scenario.shards[i].crashes) {
            if (node < 0 || node >= world.replication)
                throw std::invalid_argument("crash entry for unknown node of " +
                                            scenario.shards[i].id);
            net.schedule_crash(world.shard_nodes[i][node], at);
        }
    }

    for (std::size_t t = 0; t < world.txs.size(); ++t) {
        const World::TxPlan& plan = world.txs[t];
        int lead = world.stakeholder_by_name.at(plan.stakeholder_names.front());
        net.schedule_timer(world.stakeholders[lead].actor, plan.submit_at, t);
    }

    net.run(world.horizon);

    result.trace = net.trace();
    result.horizon_reached = net.trace().horizon_reached;
    result.end_time = net.now();

    for (const auto& ev : result.trace.events)
        if (ev.kind == sim::EventKind::Send) ++result.send_counts[ev.msg];

    const auto& ledger = dynamic_cast<const LedgerActor&>(net.actor(world.ledger_actor));
    result.ledger_accepted = ledger.accepted();
    result.ledger_rejected = ledger.rejected();

    for (const auto& info : world.stakeholders) {
        const auto& actor = dynamic_cast<const StakeholderActor&>(net.actor(info.actor));
        for (const auto& [key, count] : actor.response_counts())
            result.response_counts[key] += count;
    }

    // Per-transaction reports: display-keyed graph plus initial beliefs.
    for (const auto& plan : world.txs) {
        TxReport report;
        report.name = plan.name;
        report.request_id = plan.request_id;
        std::map<ShardId, DependencySet> merged;
        std::map<ShardId, std::map<ShardId, DepSign>> by_shard;
        for (const auto& r : plan.requests) {
            const std::string& display = world.shards[r.shard_index].display;
            by_shard.try_emplace(ShardId{display});
            for (const auto& d : r.deps)
                by_shard[ShardId{display}][ShardId{world.display_of_token(d.shard.value)}] = d.sign;
        }
        for (const auto& [shard, deps] : by_shard) {
            DependencySet set;
            for (const auto& [dep, sign] : deps) set.push_back({dep, sign});
            merged[shard] = make_dependency_set(std::move(set));
        }
        report.graph = graph::induce(merged, plan.requests.size() + plan.bogus.size());
        result.tx_reports.push_back(std::move(report));
    }

    for (std::size_t i = 0; i < world.shards.size(); ++i) {
        for (int r = 0; r < world.replication; ++r) {
            const auto& node =
                dynamic_cast<const ShardNodeActor&>(net.actor(world.shard_nodes[i][r]));
            std::pair<std::string, int> key{world.shards[i].display, r};
            result.crashed_nodes[key] = node.crashed;
            auto& balances = result.balances[key];
            for (const auto& [account, state] : node.accounts())
                balances[account] = state.balance;
            for (const auto& [id, session] : node.sessions()) {
                SessionOutcome out;
                auto tx_it = world.tx_by_request_id.find(id);
                out.tx_name = tx_it == world.tx_by_request_id.end()
                                  ? "?"
                                  : world.txs[tx_it->second].name;
                out.request_id = id;
                out.shard = world.shards[i].display;
                out.node = r;
                out.node_crashed = node.crashed;
                out.initial = session.initial_value;
                out.finalized = session.finalized;
                out.decision = session.belief.value;
                out.finalize_round = session.finalize_round;
                out.discard_round = session.discard_round;
                out.round_budget = session.round_budget;
                out.hash_count = session.hash_count;
                out.contact_count = session.contacts.size();
                result.outcomes.push_back(std::move(out));
            }
        }
    }

    // Initial beliefs per shard for the oracle; a shard with no surviving
    // session leaves the transaction unresolved (stalled or crashed away).
    for (auto& report : result.tx_reports) {
        report.beliefs_complete = true;
        for (const auto& v : report.graph.vertices) {
            bool found = false;
            for (const auto& out : result.outcomes) {
                if (out.request_id == report.request_id && out.shard == v.value &&
                    !out.node_crashed) {
                    report.initial_beliefs[v.value] = out.initial == BeliefValue::TentativeCommit;
                    found = true;
                    break;
                }
            }
            if (!found) report.beliefs_complete = false;
        }
        for (const auto& info : world.stakeholders) {
            const auto& actor = dynamic_cast<const StakeholderActor&>(net.actor(info.actor));
            if (actor.aborted_txs().count(world.tx_by_request_id.at(report.request_id)))
                report.aborted = true;
        }
    }

    for (const auto& out : result.outcomes)
        if (!out.finalized && !out.node_crashed) result.any_incomplete = true;
    for (const auto& report : result.tx_reports)
        if (!report.beliefs_complete && !report.aborted) result.any_incomplete = true;

    return result;
}

std::vector<std::string> decision_violations(const RunResult& result) {
    std::vector<std::string> violations;
    for (const auto& report : result.tx_reports) {
        if (!report.beliefs_complete || report.aborted) continue;
        std::map<std::string, bool> expected;
        if (result.world.protocol == CommitProtocol::Ppac) {
            std::map<ShardId, bool> beliefs;
            for (const auto& [display, commit] : report.initial_beliefs)
                beliefs[ShardId{display}] = commit;
            for (const auto& [shard, commit] : graph::decision_oracle(report.graph, beliefs))
                expected[shard.value] = commit;
        } else {
            bool all = true;
            for (const auto& [display, commit] : report.initial_beliefs) all = all && commit;
            for (const auto& [display, commit] : report.initial_beliefs) expected[display] = all;
        }
        std::map<std::string, BeliefValue> per_shard;
        for (const auto& out : result.outcomes) {
            if (out.request_id != report.request_id || out.node_crashed || !out.finalized)
                continue;
            bool commit = out.decision == BeliefValue::TentativeCommit;
            if (expected.count(out.shard) && commit != expected.at(out.shard))
                violations.push_back("tx " + report.name + " shard " + out.shard + " node " +
                                     std::to_string(out.node) + ": decided " +
                                     (commit ? "commit" : "discard") + ", oracle says " +
                                     (expected.at(out.shard) ? "commit" : "discard"));
            auto [it, inserted] = per_shard.try_emplace(out.shard, out.decision);
            if (!inserted && it->second != out.decision)
                violations.push_back("tx " + report.name + " shard " + out.shard +
                                     ": nodes disagree on the decision");
        }
    }
    return violations;
}

std::string metrics_csv(const RunResult& result) {
    std::ostringstream os;
    os << "tx,shard,node,protocol,initial,finalized,decision,finalize_round,discard_round,"
          "budget,hash_count,contacts\n";
    for (const auto& out : result.outcomes) {
        os << out.tx_name << ',' << out.shard << ',' << out.node << ','
           << (result.world.protocol == CommitProtocol::Ppac ? "ppac" : "2pc") << ','
           << (out.initial == BeliefValue::TentativeCommit ? "commit" : "discard") << ','
           << (out.finalized ? "yes" : "no") << ','
           << (out.decision == BeliefValue::TentativeCommit ? "commit" : "discard") << ','
           << out.finalize_round << ','
           << (out.discard_round ? std::to_string(*out.discard_round) : "") << ','
           << out.round_budget << ',' << out.hash_count << ',' << out.contact_count << '\n';
    }
    return os.str();
}

BenchRow bench_row(const RunResult& result) {
    BenchRow row;
    row.protocol = result.world.protocol == CommitProtocol::Ppac ? "ppac" : "2pc";
    std::set<std::string> shards;
    for (const auto& out : result.outcomes) {
        shards.insert(out.shard);
        if (out.finalized) row.rounds = std::max(row.rounds, out.finalize_round);
    }
    row.shards_per_tx = static_cast<int>(shards.size());
    std::uint64_t first_block = 0, last_finalize = 0;
    bool saw_block = false;
    for (const auto& ev : result.trace.events) {
        if (ev.kind == sim::EventKind::Deliver && ev.msg == sim::MsgKind::Block && !saw_block) {
            first_block = ev.time;
            saw_block = true;
        }
        if (ev.kind == sim::EventKind::Finalize) last_finalize = std::max(last_finalize, ev.time);
        if (ev.kind == sim::EventKind::Send &&
            (ev.msg == sim::MsgKind::Pull || ev.msg == sim::MsgKind::PullReply ||
             ev.msg == sim::MsgKind::Vote || ev.msg == sim::MsgKind::Decision))
            ++row.messages;
    }
    row.virtual_latency = last_finalize > first_block ? last_finalize - first_block : 0;
    return row;
}

std::vector<BenchRow> bench_chain_suite(int max_shards, const std::vector<CommitProtocol>& kinds,
                                        int repetitions) {
    std::vector<BenchRow> rows;
    for (CommitProtocol kind : kinds) {
        for (int k = 1; k <= max_shards; ++k) {
            for (int rep = 0; rep < repetitions; ++rep) {
                Scenario sc = scenario_chain(k);
                sc.protocol.kind = kind;
                sc.network.seed += static_cast<std::uint64_t>(rep) * 7919;
                rows.push_back(bench_row(run_scenario(sc)));
            }
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "shards_per_tx,protocol,rounds,virtual_latency,messages\n";
    for (const auto& row : rows)
        os << row.shards_per_tx << ',' << row.protocol << ',' << row.rounds << ','
           << row.virtual_latency << ',' << row.messages << '\n';
    return os.str();
}

}  // namespace mspt
