#include "hacsim/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hacsim {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Arrival: return "Arrival";
        case EventKind::ServiceDone: return "ServiceDone";
        case EventKind::HeartbeatTick: return "HeartbeatTick";
        case EventKind::FailureInject: return "FailureInject";
        case EventKind::RepairInject: return "RepairInject";
        case EventKind::PromotionDone: return "PromotionDone";
        case EventKind::MeasurementTick: return "MeasurementTick";
    }
    return "Unknown";
}

SchedulingInPast::SchedulingInPast(SimTime fire_at, SimTime now)
    : std::logic_error("event scheduled in the past: fire_at=" + std::to_string(fire_at) +
                       " < now=" + std::to_string(now)) {}

EventHandle Simulator::schedule(SimTime fire_at, EventKind kind, EventPayload payload) {
    if (!std::isfinite(fire_at)) {
        throw std::invalid_argument("event time must be finite");
    }
    if (fire_at < now_) {
        throw SchedulingInPast(fire_at, now_);
    }
    const std::uint64_t seq = next_seq_++;
    queue_.push(Event{fire_at, seq, kind, payload});
    in_queue_.insert(seq);
    ++live_;
    return EventHandle{seq};
}

bool Simulator::cancel(EventHandle handle) {
    if (!handle.valid() || in_queue_.erase(handle.seq) == 0) return false;
    cancelled_.insert(handle.seq);
    --live_;
    return true;
}

std::uint64_t Simulator::run_until(SimTime end, const Handler& handler) {
    if (end < now_) {
        throw SchedulingInPast(end, now_);
    }
    std::uint64_t count = 0;
    while (!queue_.empty() && queue_.top().fire_at <= end) {
        const Event ev = queue_.top();
        queue_.pop();
        if (cancelled_.erase(ev.seq) > 0) continue;
        in_queue_.erase(ev.seq);
        --live_;
        now_ = ev.fire_at;
        ++count;
        ++processed_;
        handler(ev);
    }
    now_ = end;
    return count;
}

std::vector<Event> Simulator::pending_events() const {
    auto copy = queue_;
    std::vector<Event> out;
    out.reserve(live_);
    while (!copy.empty()) {
        if (!cancelled_.contains(copy.top().seq)) out.push_back(copy.top());
        copy.pop();
    }
    return out;
}

// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string_view stream_label(StreamId id) {
    switch (id) {
        case StreamId::ArrivalsHeavy: return "arrivals-heavy";
        case StreamId::ArrivalsLight: return "arrivals-light";
        case StreamId::ServiceHeavy: return "service-heavy";
        case StreamId::ServiceLight: return "service-light";
        case StreamId::BalancerRandom: return "balancer-random";
        case StreamId::FailureJitter: return "failure-jitter";
    }
    return "unknown";
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view label) : seed_(seed) {
    std::uint64_t sm = seed ^ fnv1a64(label);
    for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    ++draws_;
    return result;
}

double RngStream::draw_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace hacsim
