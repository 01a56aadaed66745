#include "mspt/simnet.hpp"

#include <array>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mspt::sim {

namespace {

const std::array<std::pair<EventKind, const char*>, 6> kEventNames{{
    {EventKind::Send, "Send"},
    {EventKind::Deliver, "Deliver"},
    {EventKind::Crash, "Crash"},
    {EventKind::StateChange, "StateChange"},
    {EventKind::RoundAdvance, "RoundAdvance"},
    {EventKind::Finalize, "Finalize"},
}};

const std::array<std::pair<MsgKind, const char*>, 14> kMsgNames{{
    {MsgKind::None, "-"},
    {MsgKind::Negotiation, "Negotiation"},
    {MsgKind::UpdateRequest, "UpdateRequest"},
    {MsgKind::UpdateRequestEcho, "UpdateRequestEcho"},
    {MsgKind::UpdateResponse, "UpdateResponse"},
    {MsgKind::UpdateError, "UpdateError"},
    {MsgKind::TxRelay, "TxRelay"},
    {MsgKind::Submit, "Submit"},
    {MsgKind::Block, "Block"},
    {MsgKind::Pull, "Pull"},
    {MsgKind::PullReply, "PullReply"},
    {MsgKind::PullDenied, "PullDenied"},
    {MsgKind::Vote, "Vote"},
    {MsgKind::Decision, "Decision"},
}};

}  // namespace

std::string event_kind_name(EventKind k) {
    for (const auto& [kind, name] : kEventNames)
        if (kind == k) return name;
    return "?";
}

EventKind event_kind_from_name(const std::string& s) {
    for (const auto& [kind, name] : kEventNames)
        if (s == name) return kind;
    throw std::invalid_argument("unknown event kind: " + s);
}

std::string msg_kind_name(MsgKind k) {
    for (const auto& [kind, name] : kMsgNames)
        if (kind == k) return name;
    return "?";
}

MsgKind msg_kind_from_name(const std::string& s) {
    for (const auto& [kind, name] : kMsgNames)
        if (s == name) return kind;
    throw std::invalid_argument("unknown message kind: " + s);
}

std::string TraceEvent::render() const {
    std::ostringstream os;
    os << time << '\t' << event_kind_name(kind) << '\t' << sender << '\t' << receiver << '\t'
       << msg_kind_name(msg) << '\t' << msg_seq << '\t' << summary << '\t' << to_hex(bytes);
    return os.str();
}

TraceEvent TraceEvent::parse(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    if (fields.size() != 8) throw std::invalid_argument("bad trace line: " + line);
    TraceEvent ev;
    ev.time = std::stoull(fields[0]);
    ev.kind = event_kind_from_name(fields[1]);
    ev.sender = fields[2];
    ev.receiver = fields[3];
    ev.msg = msg_kind_from_name(fields[4]);
    ev.msg_seq = std::stoull(fields[5]);
    ev.summary = fields[6];
    ev.bytes = from_hex(fields[7]);
    return ev;
}

std::string Trace::render() const {
    std::string out;
    for (const auto& ev : events) {
        out += ev.render();
        out += '\n';
    }
    if (horizon_reached) out += "# incomplete: horizon reached with pending events\n";
    return out;
}

Trace Trace::parse(const std::string& text) {
    Trace t;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("incomplete") != std::string::npos) t.horizon_reached = true;
            continue;
        }
        t.events.push_back(TraceEvent::parse(line));
    }
    return t;
}

Scheduler::Scheduler(std::uint64_t seed, std::uint32_t delta_max)
    : rng_(seed), delta_max_(delta_max ? delta_max : 1) {}

int Scheduler::add_actor(std::unique_ptr<Actor> actor) {
    actor->actor_id = static_cast<int>(actors_.size());
    actors_.push_back(std::move(actor));
    return actors_.back()->actor_id;
}

void Scheduler::send(int from, int to, MsgKind kind, Bytes bytes, const std::string& summary) {
    if (actors_.at(from)->crashed) return;  // a crashed node emits nothing
    Pending p;
    p.what = Pending::What::Deliver;
    p.seq = next_seq();
    std::uint64_t latency = 1 + rng_() % delta_max_;
    std::uint64_t at = now_ + latency;
    auto& last = channel_last_[{from, to}];
    if (at < last) at = last;  // point-to-point channels are FIFO
    last = at;
    p.time = at;
    p.msg = Message{kind, from, to, p.seq, std::move(bytes)};

    TraceEvent ev;
    ev.time = now_;
    ev.kind = EventKind::Send;
    ev.sender = actors_.at(from)->name;
    ev.receiver = actors_.at(to)->name;
    ev.msg = kind;
    ev.msg_seq = p.seq;
    ev.summary = summary;
    ev.bytes = p.msg.bytes;
    trace_.events.push_back(std::move(ev));

    queue_.push(std::move(p));
}

void Scheduler::schedule_timer(int actor, std::uint64_t delay, std::uint64_t tag) {
    Pending p;
    p.what = Pending::What::Timer;
    p.seq = next_seq();
    p.time = now_ + delay;
    p.actor = actor;
    p.tag = tag;
    queue_.push(std::move(p));
}

void Scheduler::schedule_crash(int actor, std::uint64_t at_time) {
    Pending p;
    p.what = Pending::What::Crash;
    p.seq = next_seq();
    p.time = at_time < now_ ? now_ : at_time;
    p.actor = actor;
    queue_.push(std::move(p));
}

void Scheduler::note(EventKind kind, int actor, const std::string& summary) {
    TraceEvent ev;
    ev.time = now_;
    ev.kind = kind;
    ev.sender = actors_.at(actor)->name;
    ev.summary = summary;
    trace_.events.push_back(std::move(ev));
}

void Scheduler::run(std::uint64_t horizon) {
    while (!queue_.empty()) {
        const Pending& top = queue_.top();
        if (top.time > horizon) {
            trace_.horizon_reached = true;
            return;
        }
        Pending p = top;
        queue_.pop();
        now_ = p.time;
        switch (p.what) {
            case Pending::What::Crash: {
                Actor& a = *actors_.at(p.actor);
                if (!a.crashed) {
                    a.crashed = true;
                    note(EventKind::Crash, p.actor, "crash");
                }
                break;
            }
            case Pending::What::Timer: {
                Actor& a = *actors_.at(p.actor);
                if (a.crashed) break;
                a.on_timer(*this, p.tag);
                break;
            }
            case Pending::What::Deliver: {
                Actor& a = *actors_.at(p.msg.to);
                if (a.crashed) break;  // a crashed node processes nothing
                TraceEvent ev;
                ev.time = now_;
                ev.kind = EventKind::Deliver;
                ev.sender = actors_.at(p.msg.from)->name;
                ev.receiver = a.name;
                ev.msg = p.msg.kind;
                ev.msg_seq = p.msg.seq;
                ev.bytes = p.msg.bytes;
                trace_.events.push_back(std::move(ev));
                a.on_message(*this, p.msg);
                break;
            }
        }
    }
}

void reliable_broadcast(Scheduler& net, int origin, const std::vector<int>& group, MsgKind kind,
                        const Bytes& payload, const std::string& summary,
                        std::size_t reach_limit) {
    std::size_t sent = 0;
    for (int member : group) {
        if (sent++ >= reach_limit) break;
        net.send(origin, member, kind, payload, summary);
    }
}

bool RbDedupe::first_delivery(const Bytes& payload) {
    return seen_.insert(crypto::hash(payload)).second;
}

}  // namespace mspt::sim
