#include "mspt/ledger.hpp"

namespace mspt {

void LedgerActor::on_message(sim::Scheduler& net, const sim::Message& msg) {
    if (msg.kind != sim::MsgKind::Submit) return;
    Transaction tx;
    try {
        tx = decode_transaction(msg.bytes);
    } catch (const CodecError&) {
        ++rejected_;
        net.note(sim::EventKind::StateChange, actor_id, "submit-rejected reason=malformed");
        return;
    }
    if (tx.entries.empty() ||
        !crypto::verify(world_.scheme, tx.client_epk, entries_view(tx.entries), tx.client_sig)) {
        ++rejected_;
        net.note(sim::EventKind::StateChange, actor_id, "submit-rejected reason=bad-client-signature");
        return;
    }
    ++accepted_;
    pending_.push_back(std::move(tx));
    if (pending_.size() >= world_.block_max_txs) {
        seal(net);
    } else if (!timer_armed_) {
        timer_armed_ = true;
        net.schedule_timer(actor_id, world_.block_timeout, 0);
    }
}

void LedgerActor::on_timer(sim::Scheduler& net, std::uint64_t) {
    timer_armed_ = false;
    if (!pending_.empty()) seal(net);
}

void LedgerActor::seal(sim::Scheduler& net) {
    wire::BlockMsg block;
    block.height = next_height_++;
    block.txs = std::move(pending_);
    pending_.clear();
    Bytes bytes = wire::encode(block);
    std::string summary =
        "height=" + std::to_string(block.height) + " txs=" + std::to_string(block.txs.size());
    for (const auto& nodes : world_.shard_nodes)
        for (int node : nodes) net.send(actor_id, node, sim::MsgKind::Block, bytes, summary);
    blocks_.push_back(std::move(block));
}

}  // namespace mspt
