#pragma once

#include "mspt/simnet.hpp"
#include "mspt/wire.hpp"
#include "mspt/world.hpp"

namespace mspt {

// Trusted total-order log: verifies client signatures, batches accepted
// transactions into blocks (size or timeout, whichever first) and
// disseminates each block to every shard node.
class LedgerActor : public sim::Actor {
public:
    explicit LedgerActor(World& world) : world_(world) { name = "ledger"; }

    void on_message(sim::Scheduler& net, const sim::Message& msg) override;
    void on_timer(sim::Scheduler& net, std::uint64_t tag) override;

    const std::vector<wire::BlockMsg>& blocks() const { return blocks_; }
    std::uint64_t accepted() const { return accepted_; }
    std::uint64_t rejected() const { return rejected_; }

private:
    void seal(sim::Scheduler& net);

    World& world_;
    std::vector<Transaction> pending_;
    std::vector<wire::BlockMsg> blocks_;
    std::uint64_t next_height_ = 0;
    std::uint64_t accepted_ = 0;
    std::uint64_t rejected_ = 0;
    bool timer_armed_ = false;
};

}  // namespace mspt
