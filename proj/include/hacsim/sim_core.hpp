#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace hacsim {

/// Simulated time in seconds.
using SimTime = double;

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class EventKind : std::uint8_t {
    Arrival,
    ServiceDone,
    HeartbeatTick,
    FailureInject,
    RepairInject,
    PromotionDone,
    MeasurementTick,
};

std::string_view to_string(EventKind kind);

/// Kind-specific data. `node` addresses a cluster node, `token` carries a
/// request id, traffic class or other small integer depending on the kind.
struct EventPayload {
    NodeId node = kNoNode;
    std::uint64_t token = 0;

    bool operator==(const EventPayload&) const = default;
};

struct Event {
    SimTime fire_at = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Arrival;
    EventPayload payload{};

    bool operator==(const Event&) const = default;
};

/// Strict total order over scheduled events: earlier time first, then
/// insertion order.
inline bool fires_before(const Event& a, const Event& b) {
    if (a.fire_at != b.fire_at) return a.fire_at < b.fire_at;
    return a.seq < b.seq;
}

struct EventHandle {
    std::uint64_t seq = std::numeric_limits<std::uint64_t>::max();

    bool valid() const { return seq != std::numeric_limits<std::uint64_t>::max(); }
    bool operator==(const EventHandle&) const = default;
};

class SchedulingInPast : public std::logic_error {
public:
    SchedulingInPast(SimTime fire_at, SimTime now);
};

/// Event kernel: clock plus a (fire_at, seq)-ordered queue with lazy
/// cancellation. Strictly single-threaded; one instance per run.
class Simulator {
public:
    using Handler = std::function<void(const Event&)>;

    SimTime now() const { return now_; }

    EventHandle schedule(SimTime fire_at, EventKind kind, EventPayload payload = {});

    /// Returns false if the handle was already processed or cancelled.
    bool cancel(EventHandle handle);

    /// Number of live (not cancelled) events waiting.
    std::size_t pending() const { return live_; }

    /// Processes every event with fire_at <= end in order, then parks the
    /// clock at `end`. Returns the number of events delivered to `handler`.
    std::uint64_t run_until(SimTime end, const Handler& handler);

    /// Live events in firing order. Intended for inspection and tests.
    std::vector<Event> pending_events() const;

    std::uint64_t processed() const { return processed_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const { return fires_before(b, a); }
    };

    SimTime now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::size_t live_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<std::uint64_t> cancelled_;
    std::unordered_set<std::uint64_t> in_queue_;
};

// ---------------------------------------------------------------------------
// Random streams

/// SplitMix64 step (Steele, Lea & Flood). Used for seeding and hashing.
std::uint64_t splitmix64(std::uint64_t& state);

/// FNV-1a 64-bit hash of a label; stable across platforms.
std::uint64_t fnv1a64(std::string_view text);

/// Well-known stochastic sources. Each maps to a fixed stream label.
enum class StreamId : std::uint8_t {
    ArrivalsHeavy,
    ArrivalsLight,
    ServiceHeavy,
    ServiceLight,
    BalancerRandom,
    FailureJitter,
};

std::string_view stream_label(StreamId id);

/// xoshiro256** generator keyed by (seed, stream label). The 256-bit state is
/// filled by SplitMix64 from seed ^ fnv1a64(label), so every stream of a run
/// is independent and reproducible on any platform.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label);
    RngStream(std::uint64_t seed, StreamId id) : RngStream(seed, stream_label(id)) {}

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) built from the top 53 bits.
    double draw_uniform();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t draws() const { return draws_; }

private:
    std::array<std::uint64_t, 4> s_{};
    std::uint64_t seed_ = 0;
    std::uint64_t draws_ = 0;
};

}  // namespace hacsim
