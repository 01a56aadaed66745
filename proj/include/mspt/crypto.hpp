#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "mspt/bytes.hpp"

namespace mspt::crypto {

constexpr std::size_t kDigestSize = 32;
using Digest = std::array<std::uint8_t, kDigestSize>;

Digest hash(std::span<const std::uint8_t> data);

inline Bytes digest_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }

enum class KeyKind : std::uint8_t { LongTerm = 0, Ephemeral = 1 };

// Two schemes behind one interface: Ed25519 for realistic runs and a
// transparent keyed-hash scheme for fast, fully deterministic protocol tests.
enum class Scheme : std::uint8_t { Ed25519 = 0, HashSig = 1 };

Scheme scheme_from_name(const std::string& name);
std::string scheme_name(Scheme s);

struct KeyPair {
    Scheme scheme;
    KeyKind kind;
    Bytes public_key;
    Bytes secret_key;
};

// Deterministic: the same seed always yields the same key pair.
KeyPair keygen(Scheme scheme, KeyKind kind, std::span<const std::uint8_t> seed);

Bytes sign(const KeyPair& key, std::span<const std::uint8_t> message);

// Total: malformed keys or signatures return false, never throw.
bool verify(Scheme scheme, std::span<const std::uint8_t> public_key,
            std::span<const std::uint8_t> message, std::span<const std::uint8_t> signature);

std::size_t public_key_size(Scheme scheme);
std::size_t signature_size(Scheme scheme);

}  // namespace mspt::crypto
