#include "mspt/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace mspt {

DependencySet make_dependency_set(std::vector<SignedDependency> deps) {
    std::sort(deps.begin(), deps.end(),
              [](const SignedDependency& a, const SignedDependency& b) { return a.shard < b.shard; });
    for (std::size_t i = 1; i < deps.size(); ++i) {
        if (deps[i].shard == deps[i - 1].shard)
            throw std::invalid_argument("shard appears more than once in dependency set: " +
                                        deps[i].shard.value);
    }
    return deps;
}

const SignedDependency* find_dependency(const DependencySet& deps, const ShardId& shard) {
    for (const auto& d : deps)
        if (d.shard == shard) return &d;
    return nullptr;
}

void write_dependency_set(ByteWriter& w, const DependencySet& deps) {
    w.u32(static_cast<std::uint32_t>(deps.size()));
    for (const auto& d : deps) {
        w.str(d.shard.value);
        w.u8(static_cast<std::uint8_t>(d.sign));
    }
}

DependencySet read_dependency_set(ByteReader& r) {
    std::uint32_t n = r.u32();
    std::vector<SignedDependency> deps;
    deps.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        SignedDependency d;
        d.shard.value = r.str();
        std::uint8_t s = r.u8();
        if (s > 2) throw CodecError("bad dependency sign byte");
        d.sign = static_cast<DepSign>(s);
        deps.push_back(std::move(d));
    }
    return make_dependency_set(std::move(deps));
}

Bytes canonical_encode(const SignedDependency& d) {
    ByteWriter w;
    w.str(d.shard.value);
    w.u8(static_cast<std::uint8_t>(d.sign));
    return w.take();
}

SignedDependency decode_signed_dependency(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    SignedDependency d;
    d.shard.value = r.str();
    std::uint8_t s = r.u8();
    if (s > 2) throw CodecError("bad dependency sign byte");
    d.sign = static_cast<DepSign>(s);
    r.expect_done();
    return d;
}

Bytes canonical_encode(const DependencySet& deps) {
    ByteWriter w;
    write_dependency_set(w, deps);
    return w.take();
}

Bytes canonical_encode(const Payload& p) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(p.ops.size()));
    for (const auto& op : p.ops) {
        w.str(op.account);
        w.i64(op.delta);
    }
    return w.take();
}

Payload decode_payload(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Payload p;
    std::uint32_t n = r.u32();
    p.ops.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        PayloadOp op;
        op.account = r.str();
        op.delta = r.i64();
        p.ops.push_back(std::move(op));
    }
    r.expect_done();
    return p;
}

namespace {

void write_bytes_list(ByteWriter& w, const std::vector<Bytes>& items) {
    w.u32(static_cast<std::uint32_t>(items.size()));
    for (const auto& b : items) w.bytes(b);
}

std::vector<Bytes> read_bytes_list(ByteReader& r) {
    std::uint32_t n = r.u32();
    std::vector<Bytes> items;
    items.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) items.push_back(r.bytes());
    return items;
}

void write_request_body(ByteWriter& w, const UpdateRequest& r) {
    w.bytes(r.id);
    w.bytes(r.nonce);
    w.bytes(r.payload);
    write_dependency_set(w, r.deps);
    write_bytes_list(w, r.stakeholder_pks);
    write_bytes_list(w, r.stakeholder_epks);
}

}  // namespace

Bytes request_signing_view(const UpdateRequest& r) {
    ByteWriter w;
    write_request_body(w, r);
    return w.take();
}

Bytes canonical_encode(const UpdateRequest& r) {
    ByteWriter w;
    write_request_body(w, r);
    write_bytes_list(w, r.signatures);
    return w.take();
}

UpdateRequest decode_update_request(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    UpdateRequest req;
    req.id = r.bytes();
    req.nonce = r.bytes();
    req.payload = r.bytes();
    req.deps = read_dependency_set(r);
    req.stakeholder_pks = read_bytes_list(r);
    req.stakeholder_epks = read_bytes_list(r);
    req.signatures = read_bytes_list(r);
    r.expect_done();
    return req;
}

Bytes canonical_encode(const ShardResponse& resp) {
    ByteWriter w;
    w.bytes(crypto::digest_bytes(resp.request_hash));
    w.bytes(resp.shard_signature);
    return w.take();
}

ShardResponse decode_shard_response(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    ShardResponse resp;
    Bytes h = r.bytes();
    if (h.size() != crypto::kDigestSize) throw CodecError("bad request hash size");
    std::copy(h.begin(), h.end(), resp.request_hash.begin());
    resp.shard_signature = r.bytes();
    r.expect_done();
    return resp;
}

Bytes hash_list_view(const std::vector<TransactionEntry>& entries) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(entries.size()));
    for (const auto& e : entries) w.bytes(crypto::digest_bytes(e.request_hash));
    return w.take();
}

Bytes entries_view(const std::vector<TransactionEntry>& entries) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(entries.size()));
    for (const auto& e : entries) {
        w.bytes(crypto::digest_bytes(e.request_hash));
        write_bytes_list(w, e.ephemeral_sigs);
    }
    return w.take();
}

std::vector<TransactionEntry> decode_entries(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    std::uint32_t n = r.u32();
    std::vector<TransactionEntry> entries;
    entries.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        TransactionEntry e;
        Bytes h = r.bytes();
        if (h.size() != crypto::kDigestSize) throw CodecError("bad entry hash size");
        std::copy(h.begin(), h.end(), e.request_hash.begin());
        e.ephemeral_sigs = read_bytes_list(r);
        entries.push_back(std::move(e));
    }
    r.expect_done();
    return entries;
}

Bytes canonical_encode(const Transaction& t) {
    ByteWriter w;
    w.raw(entries_view(t.entries));
    w.bytes(t.client_epk);
    w.bytes(t.client_sig);
    return w.take();
}

Transaction decode_transaction(std::span<const std::uint8_t> data) {
    ByteReader r(data);
    Transaction t;
    std::uint32_t n = r.u32();
    t.entries.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        TransactionEntry e;
        Bytes h = r.bytes();
        if (h.size() != crypto::kDigestSize) throw CodecError("bad entry hash size");
        std::copy(h.begin(), h.end(), e.request_hash.begin());
        e.ephemeral_sigs = read_bytes_list(r);
        t.entries.push_back(std::move(e));
    }
    t.client_epk = r.bytes();
    t.client_sig = r.bytes();
    r.expect_done();
    return t;
}

crypto::Digest request_hash(const UpdateRequest& r) {
    return crypto::hash(canonical_encode(r));
}

std::optional<std::string> validate_request_shape(const UpdateRequest& r, const ShardId& target) {
    if (r.id.size() != 16) return "request id must be 16 bytes";
    if (r.nonce.size() != 16) return "request nonce must be 16 bytes";
    if (r.stakeholder_pks.empty()) return "request needs at least one stakeholder";
    if (r.stakeholder_pks.size() != r.stakeholder_epks.size() ||
        r.stakeholder_pks.size() != r.signatures.size())
        return "stakeholder key and signature lists must have equal length";
    if (find_dependency(r.deps, target))
        return "dependency set must not contain the target shard " + target.value;
    return std::nullopt;
}

std::vector<std::string> validate_dependency_consistency(
    const std::map<ShardId, DependencySet>& requests) {
    std::vector<std::string> violations;
    for (const auto& [from, deps] : requests) {
        for (const auto& d : deps) {
            auto peer = requests.find(d.shard);
            // Contact expectation: `from` will contact d.shard, so d.shard
            // must expect the call (minus or unsigned entry for `from`).
            if (dep_is_contact(d.sign)) {
                const SignedDependency* back =
                    peer == requests.end() ? nullptr : find_dependency(peer->second, from);
                if (!back || !dep_is_caller(back->sign))
                    violations.push_back(from.value + " will contact " + d.shard.value +
                                         ", but " + d.shard.value +
                                         "'s request does not list " + from.value +
                                         " with a minus or no sign");
            }
            // Caller expectation: `from` expects d.shard to contact it.
            if (dep_is_caller(d.sign)) {
                const SignedDependency* back =
                    peer == requests.end() ? nullptr : find_dependency(peer->second, from);
                if (!back || !dep_is_contact(back->sign))
                    violations.push_back(from.value + " expects contact from " + d.shard.value +
                                         ", but " + d.shard.value +
                                         "'s request does not list " + from.value +
                                         " with a plus or no sign");
            }
        }
    }
    return violations;
}

}  // namespace mspt
