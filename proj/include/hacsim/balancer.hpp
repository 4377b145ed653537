#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hacsim/sim_core.hpp"

namespace hacsim {

enum class BalancerPolicy : std::uint8_t { LeastConnection, ServerLoad, RandomSelection };

std::string_view to_string(BalancerPolicy policy);
std::optional<BalancerPolicy> balancer_policy_from(std::string_view text);

/// Default sliding window for the server-load signal.
inline constexpr double kDefaultLoadWindow = 10.0;

struct BalancerConfig {
    BalancerPolicy policy = BalancerPolicy::LeastConnection;
    /// Per-node selection weights keyed by node name. Only RandomSelection
    /// uses them.
    std::map<std::string, double> weights;
    /// Sliding window (seconds) for the ServerLoad busy fraction.
    double load_window = kDefaultLoadWindow;

    bool operator==(const BalancerConfig&) const = default;
};

struct NodeLoadSnapshot {
    NodeId id = 0;
    std::size_t active_connections = 0;
    /// Busy fraction over the load window, in [0, 1].
    double load = 0.0;
};

class EmptyCandidateSet : public std::invalid_argument {
public:
    EmptyCandidateSet() : std::invalid_argument("balancer called with no candidates") {}
};

class DegenerateWeights : public std::invalid_argument {
public:
    explicit DegenerateWeights(const std::string& why) : std::invalid_argument(why) {}
};

/// Fewest connections; ties to the lowest id.
NodeId select_least_connection(std::span<const NodeLoadSnapshot> candidates);

/// Lowest load; ties to fewer connections, then lowest id.
NodeId select_server_load(std::span<const NodeLoadSnapshot> candidates);

/// Draws exactly one uniform from `rng` and maps it onto the candidates,
/// proportionally to `weights` when given (same length as `candidates`).
NodeId select_random(std::span<const NodeLoadSnapshot> candidates,
                     std::span<const double> weights, RngStream& rng);
NodeId select_random(std::span<const NodeLoadSnapshot> candidates, RngStream& rng);

/// Windowed busy-time accounting backing NodeLoadSnapshot::load.
class BusyWindow {
public:
    explicit BusyWindow(double window = kDefaultLoadWindow) : window_(window) {}

    void start(SimTime at);
    void stop(SimTime at);
    bool busy() const { return busy_since_.has_value(); }

    /// Busy time inside [now - window, now] divided by the window.
    double load(SimTime now) const;

    /// Busy time accumulated over the whole run up to `now`.
    double total_busy(SimTime now) const;

    double window() const { return window_; }

private:
    double window_;
    std::optional<SimTime> busy_since_;
    std::deque<std::pair<SimTime, SimTime>> periods_;
    double closed_total_ = 0.0;
};

}  // namespace hacsim
