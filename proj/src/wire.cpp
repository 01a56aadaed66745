#include "mspt/wire.hpp"

namespace mspt::wire {

Bytes encode(const PullMsg& m) {
    ByteWriter w;
    w.bytes(m.request_id);
    w.str(m.caller.value);
    return w.take();
}

PullMsg decode_pull(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    PullMsg m;
    m.request_id = r.bytes();
    m.caller.value = r.str();
    r.expect_done();
    return m;
}

Bytes encode(const PullReplyMsg& m) {
    ByteWriter w;
    w.bytes(m.request_id);
    w.u8(static_cast<std::uint8_t>(m.belief.value));
    w.u8(m.belief.is_final ? 1 : 0);
    return w.take();
}

PullReplyMsg decode_pull_reply(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    PullReplyMsg m;
    m.request_id = r.bytes();
    std::uint8_t v = r.u8();
    if (v > 1) throw CodecError("bad belief byte");
    m.belief.value = static_cast<BeliefValue>(v);
    std::uint8_t f = r.u8();
    if (f > 1) throw CodecError("bad finality byte");
    m.belief.is_final = f == 1;
    r.expect_done();
    return m;
}

Bytes encode(const PullDeniedMsg& m) {
    ByteWriter w;
    w.bytes(m.request_id);
    return w.take();
}

PullDeniedMsg decode_pull_denied(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    PullDeniedMsg m;
    m.request_id = r.bytes();
    r.expect_done();
    return m;
}

Bytes encode(const VoteMsg& m) {
    ByteWriter w;
    w.bytes(m.request_id);
    w.str(m.voter.value);
    w.u8(m.commit ? 1 : 0);
    return w.take();
}

VoteMsg decode_vote(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    VoteMsg m;
    m.request_id = r.bytes();
    m.voter.value = r.str();
    m.commit = r.u8() == 1;
    r.expect_done();
    return m;
}

Bytes encode(const DecisionMsg& m) {
    ByteWriter w;
    w.bytes(m.request_id);
    w.u8(m.commit ? 1 : 0);
    return w.take();
}

DecisionMsg decode_decision(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    DecisionMsg m;
    m.request_id = r.bytes();
    m.commit = r.u8() == 1;
    r.expect_done();
    return m;
}

Bytes encode(const UpdateErrorMsg& m) {
    ByteWriter w;
    w.bytes(crypto::digest_bytes(m.request_hash));
    w.u8(m.code);
    w.str(m.detail);
    return w.take();
}

UpdateErrorMsg decode_update_error(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    UpdateErrorMsg m;
    Bytes h = r.bytes();
    if (h.size() != crypto::kDigestSize) throw CodecError("bad hash size");
    std::copy(h.begin(), h.end(), m.request_hash.begin());
    m.code = r.u8();
    m.detail = r.str();
    r.expect_done();
    return m;
}

Bytes encode(const BlockMsg& m) {
    ByteWriter w;
    w.u64(m.height);
    w.u32(static_cast<std::uint32_t>(m.txs.size()));
    for (const auto& tx : m.txs) w.bytes(canonical_encode(tx));
    return w.take();
}

BlockMsg decode_block(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    BlockMsg m;
    m.height = r.u64();
    std::uint32_t n = r.u32();
    m.txs.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Bytes raw = r.bytes();
        m.txs.push_back(decode_transaction(raw));
    }
    r.expect_done();
    return m;
}

}  // namespace mspt::wire
