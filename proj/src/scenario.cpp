#include "mspt/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <variant>

namespace mspt {

namespace {

struct Value {
    std::variant<std::string, std::int64_t, bool, std::vector<std::string>,
                 std::vector<std::int64_t>>
        v;
    std::size_t line = 0;
};

struct Section {
    std::string name;
    bool is_array = false;
    std::size_t line = 0;
    std::map<std::string, Value> entries;
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

Value parse_value(const std::string& raw, std::size_t line_no) {
    std::string s = trim(raw);
    if (s.empty()) throw ScenarioParseError(line_no, "missing value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ScenarioParseError(line_no, "unterminated string");
        return {s.substr(1, s.size() - 2), line_no};
    }
    if (s == "true") return {true, line_no};
    if (s == "false") return {false, line_no};
    if (s.front() == '[') {
        if (s.back() != ']') throw ScenarioParseError(line_no, "unterminated array");
        std::string inner = s.substr(1, s.size() - 2);
        std::vector<std::string> strings;
        std::vector<std::int64_t> ints;
        bool any_string = false, any_int = false;
        std::string item;
        bool in_string = false;
        auto flush = [&] {
            std::string t = trim(item);
            item.clear();
            if (t.empty()) return;
            if (t.front() == '"') {
                if (t.size() < 2 || t.back() != '"')
                    throw ScenarioParseError(line_no, "unterminated string in array");
                strings.push_back(t.substr(1, t.size() - 2));
                any_string = true;
            } else {
                try {
                    ints.push_back(std::stoll(t));
                } catch (...) {
                    throw ScenarioParseError(line_no, "bad array element: " + t);
                }
                any_int = true;
            }
        };
        for (char c : inner) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                flush();
            } else {
                item.push_back(c);
            }
        }
        flush();
        if (any_string && any_int)
            throw ScenarioParseError(line_no, "mixed array element types");
        if (any_int) return {ints, line_no};
        return {strings, line_no};
    }
    try {
        return {static_cast<std::int64_t>(std::stoll(s)), line_no};
    } catch (...) {
        throw ScenarioParseError(line_no, "bad value: " + s);
    }
}

std::vector<Section> parse_sections(const std::string& text) {
    std::vector<Section> sections;
    sections.push_back({"", false, 0, {}});  // root
    std::istringstream is(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            bool is_array = line.size() > 1 && line[1] == '[';
            std::string close = is_array ? "]]" : "]";
            if (line.substr(line.size() - close.size()) != close)
                throw ScenarioParseError(line_no, "bad section header");
            std::string name =
                trim(line.substr(is_array ? 2 : 1, line.size() - 2 * (is_array ? 2 : 1)));
            if (name.empty()) throw ScenarioParseError(line_no, "empty section name");
            sections.push_back({name, is_array, line_no, {}});
            continue;
        }
        std::size_t eq = std::string::npos;
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '=' && !in_string) {
                eq = i;
                break;
            }
        }
        if (eq == std::string::npos) throw ScenarioParseError(line_no, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ScenarioParseError(line_no, "empty key");
        sections.back().entries[key] = parse_value(line.substr(eq + 1), line_no);
    }
    return sections;
}

template <typename T>
T get_or(const Section& s, const std::string& key, T fallback) {
    auto it = s.entries.find(key);
    if (it == s.entries.end()) return fallback;
    if (auto* p = std::get_if<T>(&it->second.v)) return *p;
    throw ScenarioParseError(it->second.line, "wrong type for key " + key);
}

std::vector<std::string> get_strings(const Section& s, const std::string& key) {
    auto it = s.entries.find(key);
    if (it == s.entries.end()) return {};
    if (auto* p = std::get_if<std::vector<std::string>>(&it->second.v)) return *p;
    throw ScenarioParseError(it->second.line, "expected string array for key " + key);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

std::pair<std::string, DepSign> parse_dep_token(const std::string& token) {
    std::string t = trim(token);
    if (t.empty()) throw std::invalid_argument("empty dependency token");
    DepSign sign = DepSign::Unsigned;
    if (t.back() == '+') {
        sign = DepSign::Plus;
        t.pop_back();
    } else if (t.back() == '-') {
        sign = DepSign::Minus;
        t.pop_back();
    }
    t = trim(t);
    if (t.empty()) throw std::invalid_argument("empty shard in dependency token");
    return {t, sign};
}

std::string dep_token_string(const std::string& shard, DepSign sign) {
    switch (sign) {
        case DepSign::Plus: return shard + "+";
        case DepSign::Minus: return shard + "-";
        default: return shard;
    }
}

RequestSpec parse_request_line(const std::string& line) {
    std::vector<std::string> parts;
    std::string item;
    for (char c : line) {
        if (c == '|') {
            parts.push_back(item);
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    parts.push_back(item);
    if (parts.size() < 2 || parts.size() > 3)
        throw std::invalid_argument("request must be 'SHARD | ops [| deps]': " + line);
    RequestSpec spec;
    spec.shard = trim(parts[0]);
    if (spec.shard.empty()) throw std::invalid_argument("missing shard in request: " + line);
    for (const auto& op_tok : split_ws(trim(parts[1]))) {
        std::size_t eq = op_tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("payload op must be account=delta: " + op_tok);
        PayloadOp op;
        op.account = op_tok.substr(0, eq);
        try {
            op.delta = std::stoll(op_tok.substr(eq + 1));
        } catch (...) {
            throw std::invalid_argument("bad delta in payload op: " + op_tok);
        }
        spec.payload.ops.push_back(std::move(op));
    }
    if (spec.payload.ops.empty()) throw std::invalid_argument("empty payload: " + line);
    if (parts.size() == 3) {
        for (const auto& tok : split_ws(trim(parts[2]))) spec.deps.push_back(parse_dep_token(tok));
    }
    return spec;
}

Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    for (const auto& section : parse_sections(text)) {
        if (section.name.empty()) {
            if (!section.entries.empty())
                sc.name = get_or<std::string>(section, "name", sc.name);
            continue;
        }
        if (section.name == "network") {
            sc.network.seed = static_cast<std::uint64_t>(
                get_or<std::int64_t>(section, "seed", static_cast<std::int64_t>(sc.network.seed)));
            sc.network.delta_max = static_cast<std::uint32_t>(
                get_or<std::int64_t>(section, "delta_max", sc.network.delta_max));
            sc.network.block_max_txs = static_cast<std::uint64_t>(get_or<std::int64_t>(
                section, "block_max_txs", static_cast<std::int64_t>(sc.network.block_max_txs)));
            sc.network.block_timeout = static_cast<std::uint64_t>(get_or<std::int64_t>(
                section, "block_timeout", static_cast<std::int64_t>(sc.network.block_timeout)));
            sc.network.horizon = static_cast<std::uint64_t>(get_or<std::int64_t>(
                section, "horizon", static_cast<std::int64_t>(sc.network.horizon)));
            sc.network.gc_timeout = static_cast<std::uint64_t>(get_or<std::int64_t>(
                section, "gc_timeout", static_cast<std::int64_t>(sc.network.gc_timeout)));
            if (sc.network.delta_max < 1)
                throw ScenarioParseError(section.line, "delta_max must be >= 1");
        } else if (section.name == "protocol") {
            std::string kind = get_or<std::string>(section, "kind", "ppac");
            if (kind == "ppac")
                sc.protocol.kind = CommitProtocol::Ppac;
            else if (kind == "2pc")
                sc.protocol.kind = CommitProtocol::TwoPc;
            else
                throw ScenarioParseError(section.line, "protocol kind must be ppac or 2pc");
            sc.protocol.optimize = get_or<bool>(section, "optimize", sc.protocol.optimize);
            std::string mode = get_or<std::string>(section, "execute_mode", "xo");
            if (mode == "xo")
                sc.protocol.mode = ExecuteOnRequest;
            else if (mode == "ox")
                sc.protocol.mode = ExecuteOnOrder;
            else
                throw ScenarioParseError(section.line, "execute_mode must be xo or ox");
            sc.protocol.replication = static_cast<int>(
                get_or<std::int64_t>(section, "replication", sc.protocol.replication));
            if (sc.protocol.replication < 1)
                throw ScenarioParseError(section.line, "replication must be >= 1");
            sc.protocol.scheme = crypto::scheme_from_name(
                get_or<std::string>(section, "crypto", crypto::scheme_name(sc.protocol.scheme)));
            sc.protocol.clients =
                static_cast<int>(get_or<std::int64_t>(section, "clients", sc.protocol.clients));
            if (sc.protocol.clients < 1)
                throw ScenarioParseError(section.line, "clients must be >= 1");
            sc.protocol.pad_entries = static_cast<std::size_t>(get_or<std::int64_t>(
                section, "pad_entries", static_cast<std::int64_t>(sc.protocol.pad_entries)));
        } else if (section.name == "shard") {
            if (!section.is_array)
                throw ScenarioParseError(section.line, "use [[shard]] sections");
            ShardSpec shard;
            shard.id = get_or<std::string>(section, "id", "");
            if (shard.id.empty()) throw ScenarioParseError(section.line, "shard needs an id");
            for (const auto& acct : get_strings(section, "accounts")) {
                std::size_t eq = acct.find('=');
                if (eq == std::string::npos)
                    throw ScenarioParseError(section.line, "account must be name=balance: " + acct);
                shard.accounts[trim(acct.substr(0, eq))] = std::stoll(acct.substr(eq + 1));
            }
            for (const auto& owner_line : get_strings(section, "owners")) {
                std::size_t colon = owner_line.find(':');
                if (colon == std::string::npos)
                    throw ScenarioParseError(section.line,
                                             "owners entry must be 'account: names': " + owner_line);
                std::string account = trim(owner_line.substr(0, colon));
                shard.owners[account] = split_ws(owner_line.substr(colon + 1));
                if (shard.owners[account].empty())
                    throw ScenarioParseError(section.line, "no owners for account " + account);
            }
            for (const auto& crash : get_strings(section, "crash")) {
                std::size_t at = crash.find('@');
                if (at == std::string::npos)
                    throw ScenarioParseError(section.line, "crash entry must be node@tick: " + crash);
                shard.crashes.emplace_back(std::stoi(crash.substr(0, at)),
                                           std::stoull(crash.substr(at + 1)));
            }
            shard.stall = get_or<bool>(section, "stall", false);
            sc.shards.push_back(std::move(shard));
        } else if (section.name == "transaction") {
            if (!section.is_array)
                throw ScenarioParseError(section.line, "use [[transaction]] sections");
            TxSpec tx;
            tx.name = get_or<std::string>(section, "name",
                                          "tx" + std::to_string(sc.txs.size() + 1));
            tx.submit_at = static_cast<std::uint64_t>(
                get_or<std::int64_t>(section, "submit_at", 0));
            for (const auto& line : get_strings(section, "requests")) {
                try {
                    tx.requests.push_back(parse_request_line(line));
                } catch (const std::invalid_argument& e) {
                    throw ScenarioParseError(section.line, e.what());
                }
            }
            if (tx.requests.empty())
                throw ScenarioParseError(section.line, "transaction has no requests");
            for (const auto& d : get_strings(section, "discard_at")) tx.discard_shards.insert(d);
            sc.txs.push_back(std::move(tx));
        } else {
            throw ScenarioParseError(section.line, "unknown section " + section.name);
        }
    }
    // Cross references
    std::set<std::string> shard_ids;
    for (const auto& s : sc.shards) {
        if (!shard_ids.insert(s.id).second)
            throw ScenarioParseError(0, "duplicate shard id " + s.id);
    }
    for (const auto& tx : sc.txs) {
        for (const auto& r : tx.requests) {
            if (!shard_ids.count(r.shard))
                throw ScenarioParseError(0, "unknown shard " + r.shard + " in transaction " + tx.name);
            for (const auto& [dep, sign] : r.deps)
                if (!shard_ids.count(dep))
                    throw ScenarioParseError(0, "unknown shard " + dep + " in dependency of " +
                                                    tx.name);
        }
        for (const auto& d : tx.discard_shards)
            if (!shard_ids.count(d))
                throw ScenarioParseError(0, "unknown shard " + d + " in discard_at");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Scenario sc = parse_scenario(ss.str());
    if (sc.name == "scenario") {
        std::size_t slash = path.find_last_of('/');
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        std::size_t dot = base.find_last_of('.');
        sc.name = dot == std::string::npos ? base : base.substr(0, dot);
    }
    return sc;
}

// ---- built-in scenarios ------------------------------------------------

namespace {

ShardSpec simple_shard(const std::string& id, const std::string& owner) {
    ShardSpec s;
    s.id = id;
    std::string account = "cell_" + id;
    s.accounts[account] = 1000;
    s.owners[account] = {owner};
    return s;
}

RequestSpec simple_request(const std::string& shard, const std::string& deps) {
    RequestSpec r;
    r.payload.ops.push_back({"cell_" + shard, +1});
    r.shard = shard;
    for (const auto& tok : split_ws(deps)) r.deps.push_back(parse_dep_token(tok));
    return r;
}

}  // namespace

Scenario scenario_single() {
    Scenario sc;
    sc.name = "single";
    sc.network.seed = 11;
    sc.shards.push_back(simple_shard("S1", "st"));
    TxSpec tx;
    tx.name = "solo";
    tx.requests.push_back(simple_request("S1", ""));
    sc.txs.push_back(tx);
    return sc;
}

Scenario scenario_figure1a() {
    Scenario sc;
    sc.name = "figure1a";
    sc.network.seed = 12;
    sc.protocol.optimize = false;  // show the full per-shard budgets
    for (const auto& id : {"S0", "S1", "S2", "S3"}) sc.shards.push_back(simple_shard(id, "st"));
    TxSpec tx;
    tx.name = "cycle";
    tx.requests.push_back(simple_request("S0", "S1 S3"));
    tx.requests.push_back(simple_request("S1", "S0 S2"));
    tx.requests.push_back(simple_request("S2", "S1 S3"));
    tx.requests.push_back(simple_request("S3", "S0 S2"));
    sc.txs.push_back(tx);
    return sc;
}

Scenario scenario_figure1b() {
    Scenario sc;
    sc.name = "figure1b";
    sc.network.seed = 13;
    for (const auto& id : {"S1", "S2", "S3"}) sc.shards.push_back(simple_shard(id, "st"));
    TxSpec tx;
    tx.name = "chain3";
    tx.requests.push_back(simple_request("S1", "S2+"));
    tx.requests.push_back(simple_request("S2", "S1- S3+"));
    tx.requests.push_back(simple_request("S3", "S2-"));
    sc.txs.push_back(tx);
    return sc;
}

Scenario scenario_figure2() {
    Scenario sc;
    sc.name = "figure2";
    sc.network.seed = 14;
    for (const auto& id : {"S1", "S2", "S3", "S4"}) sc.shards.push_back(simple_shard(id, "st"));
    TxSpec tx;
    tx.name = "diamond";
    tx.requests.push_back(simple_request("S1", "S2-"));
    tx.requests.push_back(simple_request("S2", "S1+ S3- S4+"));
    tx.requests.push_back(simple_request("S3", "S2+ S4-"));
    tx.requests.push_back(simple_request("S4", "S2- S3+"));
    tx.discard_shards.insert("S1");
    sc.txs.push_back(tx);
    return sc;
}

Scenario scenario_chain(int k, bool all_commit) {
    Scenario sc;
    sc.name = "chain" + std::to_string(k);
    sc.network.seed = 20 + static_cast<std::uint64_t>(k);
    TxSpec tx;
    tx.name = sc.name;
    for (int i = 1; i <= k; ++i) {
        std::string id = "S" + std::to_string(i);
        sc.shards.push_back(simple_shard(id, "st"));
        std::string deps;
        if (i > 1) deps += "S" + std::to_string(i - 1) + "-";
        if (i < k) deps += (deps.empty() ? "" : " ") + ("S" + std::to_string(i + 1)) + "+";
        tx.requests.push_back(simple_request(id, deps));
    }
    if (!all_commit) tx.discard_shards.insert("S" + std::to_string(k));
    sc.txs.push_back(tx);
    return sc;
}

Scenario scenario_stall() {
    Scenario sc;
    sc.name = "stall";
    sc.network.seed = 31;
    sc.network.horizon = 20000;
    for (const auto& id : {"A", "B", "C"}) sc.shards.push_back(simple_shard(id, "st"));
    ShardSpec stall = simple_shard("Z", "st");
    stall.stall = true;
    sc.shards.push_back(stall);

    TxSpec tx1;
    tx1.name = "blocked";
    tx1.requests.push_back(simple_request("A", "B Z+"));
    tx1.requests.push_back(simple_request("B", "A"));
    tx1.requests.push_back(simple_request("Z", "A-"));
    sc.txs.push_back(tx1);

    TxSpec tx2;
    tx2.name = "healthy";
    tx2.submit_at = 5;
    RequestSpec b2;
    b2.shard = "B";
    b2.payload.ops.push_back({"side_B", +1});
    b2.deps.push_back(parse_dep_token("C"));
    tx2.requests.push_back(b2);
    tx2.requests.push_back(simple_request("C", "B"));
    sc.txs.push_back(tx2);

    // second account on B so the two sessions touch disjoint state
    for (auto& shard : sc.shards) {
        if (shard.id == "B") {
            shard.accounts["side_B"] = 100;
            shard.owners["side_B"] = {"st"};
        }
    }
    return sc;
}

Scenario random_scenario(std::uint64_t seed, const RandomScenarioParams& params) {
    std::mt19937_64 gen(seed * 0x9e3779b97f4a7c15ULL + 1);
    auto pick = [&](std::uint64_t n) { return gen() % n; };

    Scenario sc;
    sc.name = "random" + std::to_string(seed);
    sc.network.seed = gen();
    sc.network.delta_max = 1 + static_cast<std::uint32_t>(pick(params.max_delta));
    sc.protocol.scheme = crypto::Scheme::HashSig;

    int n = 2 + static_cast<int>(pick(static_cast<std::uint64_t>(params.max_shards - 1)));
    std::vector<std::string> ids;
    for (int i = 1; i <= n; ++i) {
        std::string id = "S" + std::to_string(i);
        ids.push_back(id);
        sc.shards.push_back(simple_shard(id, "st"));
    }

    // Reciprocal signed dependency sets: unsigned pairs induce both edges,
    // plus/minus pairs exactly one. Unconnected pairs are allowed, so some
    // scenarios contain disconnected components.
    std::map<std::string, std::vector<std::pair<std::string, DepSign>>> deps;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            switch (pick(5)) {
                case 0:  // i queries j
                    deps[ids[i]].push_back({ids[j], DepSign::Plus});
                    deps[ids[j]].push_back({ids[i], DepSign::Minus});
                    break;
                case 1:  // j queries i
                    deps[ids[j]].push_back({ids[i], DepSign::Plus});
                    deps[ids[i]].push_back({ids[j], DepSign::Minus});
                    break;
                case 2:  // mutual
                    deps[ids[i]].push_back({ids[j], DepSign::Unsigned});
                    deps[ids[j]].push_back({ids[i], DepSign::Unsigned});
                    break;
                default: break;  // unconnected
            }
        }
    }

    TxSpec tx;
    tx.name = "rnd";
    for (const auto& id : ids) {
        RequestSpec r = simple_request(id, "");
        r.deps = deps[id];
        tx.requests.push_back(std::move(r));
    }
    // occasionally a second request for one shard (same session, more hashes)
    if (pick(7) == 0) {
        std::string id = ids[pick(static_cast<std::uint64_t>(n))];
        RequestSpec extra;
        extra.shard = id;
        extra.payload.ops.push_back({"extra_" + id, +1});
        tx.requests.push_back(extra);
        for (auto& shard : sc.shards) {
            if (shard.id == id) {
                shard.accounts["extra_" + id] = 10;
                shard.owners["extra_" + id] = {"st"};
            }
        }
    }
    if (!params.force_all_commit) {
        for (const auto& id : ids)
            if (pick(4) == 0) tx.discard_shards.insert(id);
    }
    // occasionally pad with bogus entries
    if (pick(5) == 0) sc.protocol.pad_entries = tx.requests.size() + 1 + pick(3);
    sc.txs.push_back(std::move(tx));
    return sc;
}

}  // namespace mspt
