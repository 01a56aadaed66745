#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mspt/bytes.hpp"
#include "mspt/crypto.hpp"

namespace mspt::sim {

enum class EventKind : std::uint8_t { Send, Deliver, Crash, StateChange, RoundAdvance, Finalize };

enum class MsgKind : std::uint8_t {
    None = 0,
    Negotiation,
    UpdateRequest,
    UpdateRequestEcho,
    UpdateResponse,
    UpdateError,
    TxRelay,
    Submit,
    Block,
    Pull,
    PullReply,
    PullDenied,
    Vote,
    Decision,
};

std::string event_kind_name(EventKind k);
std::string msg_kind_name(MsgKind k);
EventKind event_kind_from_name(const std::string& s);
MsgKind msg_kind_from_name(const std::string& s);

struct TraceEvent {
    std::uint64_t time = 0;
    EventKind kind = EventKind::Send;
    std::string sender;    // role-qualified display name
    std::string receiver;  // empty for node-local events
    MsgKind msg = MsgKind::None;
    std::uint64_t msg_seq = 0;  // matches Send with its Deliver
    std::string summary;        // key=value tokens, no tabs
    Bytes bytes;                // wire bytes; empty for node-local events

    std::string render() const;
    static TraceEvent parse(const std::string& line);
};

struct Trace {
    std::vector<TraceEvent> events;
    bool horizon_reached = false;

    std::string render() const;
    static Trace parse(const std::string& text);
};

struct Message {
    MsgKind kind = MsgKind::None;
    int from = -1;
    int to = -1;
    std::uint64_t seq = 0;
    Bytes bytes;
};

class Scheduler;

class Actor {
public:
    virtual ~Actor() = default;
    virtual void on_message(Scheduler& net, const Message& msg) = 0;
    virtual void on_timer(Scheduler& net, std::uint64_t tag) {}

    std::string name;  // role-qualified, e.g. "shard:S1.0"
    int actor_id = -1;
    bool crashed = false;
};

// Deterministic discrete-event scheduler: virtual integer clock, seeded
// latency RNG, per-channel FIFO delivery, fail-stop crash injection.
class Scheduler {
public:
    Scheduler(std::uint64_t seed, std::uint32_t delta_max);

    int add_actor(std::unique_ptr<Actor> actor);
    Actor& actor(int id) { return *actors_.at(id); }
    const Actor& actor(int id) const { return *actors_.at(id); }
    std::size_t actor_count() const { return actors_.size(); }

    // Latency is drawn uniformly from [1, delta_max]; deliveries on one
    // channel never reorder.
    void send(int from, int to, MsgKind kind, Bytes bytes, const std::string& summary);
    void schedule_timer(int actor, std::uint64_t delay, std::uint64_t tag);
    void schedule_crash(int actor, std::uint64_t at_time);

    // Node-local observation (state change, round advance, finalization).
    void note(EventKind kind, int actor, const std::string& summary);

    // Runs until quiescence or until the clock would pass `horizon`.
    void run(std::uint64_t horizon);

    std::uint64_t now() const { return now_; }
    std::uint32_t delta_max() const { return delta_max_; }
    std::uint64_t rng() { return rng_(); }

    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }

private:
    struct Pending {
        std::uint64_t time = 0;
        std::uint64_t seq = 0;
        enum class What { Deliver, Timer, Crash } what = What::Deliver;
        Message msg;
        int actor = -1;
        std::uint64_t tag = 0;
    };
    struct Later {
        bool operator()(const Pending& a, const Pending& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    std::uint64_t next_seq() { return seq_counter_++; }

    std::vector<std::unique_ptr<Actor>> actors_;
    std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
    std::map<std::pair<int, int>, std::uint64_t> channel_last_;
    std::mt19937_64 rng_;
    std::uint64_t now_ = 0;
    std::uint64_t seq_counter_ = 0;
    std::uint32_t delta_max_;
    Trace trace_;
};

// Origin sends the payload to every group member; each correct member echoes
// on first delivery, so delivery at one correct node implies delivery at all.
// `reach_limit` truncates the origin's sends to the first k members, modeling
// an origin that crashes mid-broadcast (used by fault-injection tests).
void reliable_broadcast(Scheduler& net, int origin, const std::vector<int>& group, MsgKind kind,
                        const Bytes& payload, const std::string& summary,
                        std::size_t reach_limit = SIZE_MAX);

// Echo-side helper: tracks which broadcast payloads were already seen.
class RbDedupe {
public:
    // True on first sight of the payload; the caller should then echo it.
    bool first_delivery(const Bytes& payload);

private:
    std::set<crypto::Digest> seen_;
};

}  // namespace mspt::sim
