#include "mspt/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace mspt::crypto {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("libsodium init failed");
    });
}

Digest hash_with_prefix(std::string_view prefix, std::span<const std::uint8_t> a,
                        std::span<const std::uint8_t> b = {}) {
    ensure_sodium();
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, reinterpret_cast<const unsigned char*>(prefix.data()),
                              prefix.size());
    crypto_hash_sha256_update(&st, a.data(), a.size());
    crypto_hash_sha256_update(&st, b.data(), b.size());
    Digest out;
    crypto_hash_sha256_final(&st, out.data());
    return out;
}

}  // namespace

Digest hash(std::span<const std::uint8_t> data) {
    ensure_sodium();
    Digest out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "ed25519") return Scheme::Ed25519;
    if (name == "hashsig") return Scheme::HashSig;
    throw std::invalid_argument("unknown signature scheme: " + name);
}

std::string scheme_name(Scheme s) {
    return s == Scheme::Ed25519 ? "ed25519" : "hashsig";
}

std::size_t public_key_size(Scheme scheme) {
    return scheme == Scheme::Ed25519 ? crypto_sign_PUBLICKEYBYTES : kDigestSize;
}

std::size_t signature_size(Scheme scheme) {
    return scheme == Scheme::Ed25519 ? crypto_sign_BYTES : kDigestSize;
}

KeyPair keygen(Scheme scheme, KeyKind kind, std::span<const std::uint8_t> seed) {
    ensure_sodium();
    // Stretch arbitrary-length seeds to a fixed derivation key.
    Digest derived = hash_with_prefix("mspt.keygen.v1", seed);
    KeyPair kp;
    kp.scheme = scheme;
    kp.kind = kind;
    if (scheme == Scheme::Ed25519) {
        kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
        kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
        crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), derived.data());
    } else {
        Digest pk = hash_with_prefix("mspt.hashsig.pk", derived);
        kp.public_key.assign(pk.begin(), pk.end());
        // The hashsig secret key embeds the public key so signing does not
        // need a registry; verification recomputes the keyed hash.
        kp.secret_key.assign(derived.begin(), derived.end());
        kp.secret_key.insert(kp.secret_key.end(), pk.begin(), pk.end());
    }
    return kp;
}

Bytes sign(const KeyPair& key, std::span<const std::uint8_t> message) {
    ensure_sodium();
    if (key.scheme == Scheme::Ed25519) {
        Bytes sig(crypto_sign_BYTES);
        unsigned long long len = 0;
        if (key.secret_key.size() != crypto_sign_SECRETKEYBYTES)
            throw std::invalid_argument("bad ed25519 secret key size");
        crypto_sign_detached(sig.data(), &len, message.data(), message.size(),
                             key.secret_key.data());
        sig.resize(len);
        return sig;
    }
    if (key.secret_key.size() != kDigestSize * 2)
        throw std::invalid_argument("bad hashsig secret key size");
    std::span<const std::uint8_t> pk(key.secret_key.data() + kDigestSize, kDigestSize);
    Digest sig = hash_with_prefix("mspt.hashsig.sig", pk, message);
    return Bytes(sig.begin(), sig.end());
}

bool verify(Scheme scheme, std::span<const std::uint8_t> public_key,
            std::span<const std::uint8_t> message, std::span<const std::uint8_t> signature) {
    ensure_sodium();
    if (scheme == Scheme::Ed25519) {
        if (public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
        if (signature.size() != crypto_sign_BYTES) return false;
        return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                           public_key.data()) == 0;
    }
    if (public_key.size() != kDigestSize || signature.size() != kDigestSize) return false;
    Digest expect = hash_with_prefix("mspt.hashsig.sig", public_key, message);
    return sodium_memcmp(expect.data(), signature.data(), kDigestSize) == 0;
}

}  // namespace mspt::crypto
