#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mspt/bytes.hpp"
#include "mspt/crypto.hpp"

namespace mspt {

// Opaque shard identifier. Scenario files use short display names; the
// runtime assigns each shard a high-entropy token so byte-level privacy
// scans over traces are sound.
struct ShardId {
    std::string value;

    auto operator<=>(const ShardId&) const = default;
};

enum class DepSign : std::uint8_t { Unsigned = 0, Plus = 1, Minus = 2 };

// S (unsigned): contact S and expect contact from S.
// S+ : contact S.  S- : expect to be contacted by S.
struct SignedDependency {
    ShardId shard;
    DepSign sign = DepSign::Unsigned;

    auto operator<=>(const SignedDependency&) const = default;
};

// Kept sorted by shard; a shard appears at most once.
using DependencySet = std::vector<SignedDependency>;

DependencySet make_dependency_set(std::vector<SignedDependency> deps);
const SignedDependency* find_dependency(const DependencySet& deps, const ShardId& shard);

inline bool dep_is_contact(DepSign s) { return s == DepSign::Plus || s == DepSign::Unsigned; }
inline bool dep_is_caller(DepSign s) { return s == DepSign::Minus || s == DepSign::Unsigned; }

struct PayloadOp {
    std::string account;
    std::int64_t delta = 0;

    bool operator==(const PayloadOp&) const = default;
};

// Concrete coin-transfer payload understood by the simulator shards
// (the protocol itself treats payloads as opaque bytes).
struct Payload {
    std::vector<PayloadOp> ops;

    bool operator==(const Payload&) const = default;
};

struct UpdateRequest {
    Bytes id;     // 16-byte identifier shared by all requests of one transaction
    Bytes nonce;  // 16-byte random value
    Bytes payload;
    DependencySet deps;
    std::vector<Bytes> stakeholder_pks;
    std::vector<Bytes> stakeholder_epks;
    std::vector<Bytes> signatures;

    bool operator==(const UpdateRequest&) const = default;
};

struct ShardResponse {
    crypto::Digest request_hash{};
    Bytes shard_signature;

    bool operator==(const ShardResponse&) const = default;
};

struct TransactionEntry {
    crypto::Digest request_hash{};
    std::vector<Bytes> ephemeral_sigs;

    bool operator==(const TransactionEntry&) const = default;
};

struct Transaction {
    std::vector<TransactionEntry> entries;
    Bytes client_epk;
    Bytes client_sig;

    bool operator==(const Transaction&) const = default;
};

enum class BeliefValue : std::uint8_t { Discard = 0, TentativeCommit = 1 };

struct Belief {
    BeliefValue value = BeliefValue::TentativeCommit;
    bool is_final = false;

    bool operator==(const Belief&) const = default;
};

// ---- canonical encoding ----------------------------------------------------
// Deterministic length-prefixed format; doubles as the wire and on-disk
// representation. Field order and layout are documented in the README.

Bytes canonical_encode(const SignedDependency& d);
Bytes canonical_encode(const DependencySet& deps);
Bytes canonical_encode(const Payload& p);
Bytes canonical_encode(const UpdateRequest& r);
Bytes canonical_encode(const ShardResponse& r);
Bytes canonical_encode(const Transaction& t);

void write_dependency_set(ByteWriter& w, const DependencySet& deps);
DependencySet read_dependency_set(ByteReader& r);

SignedDependency decode_signed_dependency(std::span<const std::uint8_t> data);
Payload decode_payload(std::span<const std::uint8_t> data);
UpdateRequest decode_update_request(std::span<const std::uint8_t> data);
ShardResponse decode_shard_response(std::span<const std::uint8_t> data);
Transaction decode_transaction(std::span<const std::uint8_t> data);

// Bytes covered by the stakeholders' long-term signatures: everything in the
// request except the signature list itself.
Bytes request_signing_view(const UpdateRequest& r);

// The full ordered hash list every stakeholder signs with its ephemeral key;
// signing the whole list is what prevents mixing and matching responses.
Bytes hash_list_view(const std::vector<TransactionEntry>& entries);

// Bytes covered by the client signature.
Bytes entries_view(const std::vector<TransactionEntry>& entries);
std::vector<TransactionEntry> decode_entries(std::span<const std::uint8_t> data);

crypto::Digest request_hash(const UpdateRequest& r);

// Structural validation of a single request against its target shard.
// Returns an error description, or nullopt when the request is well-formed.
std::optional<std::string> validate_request_shape(const UpdateRequest& r, const ShardId& target);

// Checks the reciprocal expectations across the requests of one transaction:
// if S_j lists S_i+ (or unsigned), S_i must list S_j- (or unsigned), and
// symmetrically for minus entries. Returns one message per unreciprocated
// edge; empty result means consistent.
std::vector<std::string> validate_dependency_consistency(
    const std::map<ShardId, DependencySet>& requests);

}  // namespace mspt
