#pragma once

#include <string>
#include <vector>

#include "mspt/runner.hpp"
#include "mspt/simnet.hpp"
#include "mspt/world.hpp"

namespace mspt::audit {

// Secret byte patterns with the shards allowed to observe each. Every
// pattern is either high-entropy key material or a canonical encoding at
// least a dozen bytes long, so substring scanning is sound in practice.
struct SecretsManifest {
    struct Item {
        std::string cls;    // long-term-key | shard-token | payload | dependency-set | ephemeral-key
        std::string owner;  // human-readable description
        Bytes pattern;
        std::set<std::string> shard_whitelist;  // displays allowed to receive it
    };
    std::vector<Item> items;
    std::map<std::string, std::string> token_to_display;
    std::vector<std::string> shard_displays;

    std::string to_json() const;
    static SecretsManifest from_json(const std::string& text);
};

SecretsManifest build_manifest(const World& world);

struct Finding {
    std::uint64_t time = 0;
    std::string receiver;
    std::string cls;
    std::string owner;
    std::uint64_t msg_seq = 0;

    std::string render() const;
};

struct Report {
    std::vector<Finding> findings;
    std::vector<std::string> info;  // permitted leakage, reported informationally
};

// Everything the ledger received, scanned for every secret class: long-term
// keys, shard identities, payload bytes, dependency sets, stakeholder
// ephemeral keys. Any hit is a finding.
Report audit_ledger_view(const sim::Trace& trace, const SecretsManifest& manifest);

// Everything the shard's nodes received: findings for secrets outside the
// shard's whitelist (its own requests and its immediate dependency set).
Report audit_shard_view(const sim::Trace& trace, const std::string& shard_display,
                        const SecretsManifest& manifest);

// Ledger view, every shard view, plus a structural pass over commit-protocol
// messages: a pull decodes to exactly (session id, caller identity) and a
// reply to exactly (session id, belief value, finality flag).
Report audit_all(const sim::Trace& trace, const SecretsManifest& manifest);

}  // namespace mspt::audit
