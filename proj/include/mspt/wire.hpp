#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mspt/model.hpp"
#include "mspt/simnet.hpp"

namespace mspt::wire {

// Message bodies exchanged during the commit phase. Pull and PullReply are
// deliberately minimal: a pull names the session and the caller, a reply
// carries only the belief value and its finality flag.

struct PullMsg {
    Bytes request_id;
    ShardId caller;
};

struct PullReplyMsg {
    Bytes request_id;
    Belief belief;
};

struct PullDeniedMsg {
    Bytes request_id;
};

struct VoteMsg {
    Bytes request_id;
    ShardId voter;
    bool commit = false;
};

struct DecisionMsg {
    Bytes request_id;
    bool commit = false;
};

struct UpdateErrorMsg {
    crypto::Digest request_hash{};
    std::uint8_t code = 0;
    std::string detail;
};

struct BlockMsg {
    std::uint64_t height = 0;
    std::vector<Transaction> txs;
};

Bytes encode(const PullMsg& m);
Bytes encode(const PullReplyMsg& m);
Bytes encode(const PullDeniedMsg& m);
Bytes encode(const VoteMsg& m);
Bytes encode(const DecisionMsg& m);
Bytes encode(const UpdateErrorMsg& m);
Bytes encode(const BlockMsg& m);

PullMsg decode_pull(std::span<const std::uint8_t> data);
PullReplyMsg decode_pull_reply(std::span<const std::uint8_t> data);
PullDeniedMsg decode_pull_denied(std::span<const std::uint8_t> data);
VoteMsg decode_vote(std::span<const std::uint8_t> data);
DecisionMsg decode_decision(std::span<const std::uint8_t> data);
UpdateErrorMsg decode_update_error(std::span<const std::uint8_t> data);
BlockMsg decode_block(std::span<const std::uint8_t> data);

}  // namespace mspt::wire
