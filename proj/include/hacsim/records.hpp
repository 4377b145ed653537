#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "hacsim/sim_core.hpp"
#include "hacsim/workload.hpp"

namespace hacsim {

enum class Outcome : std::uint8_t { Completed, Rejected503 };

std::string_view to_string(Outcome outcome);

struct ArrivalRecord {
    RequestId id = 0;
    TrafficClass cls = TrafficClass::Light;
    SimTime submitted_at = 0.0;
};

/// One finished request: served to completion or turned away with a 503.
struct ResponseRecord {
    RequestId request_id = 0;
    TrafficClass cls = TrafficClass::Light;
    SimTime submitted_at = 0.0;
    SimTime completed_at = 0.0;
    double response_time = 0.0;
    NodeId served_by = kNoNode;
    Outcome outcome = Outcome::Completed;
    /// Network delay: configured link delay plus time parked at the balancer.
    double delay = 0.0;
    SimTime forwarded_at = 0.0;
};

/// Half-open outage [start, end); `end` is empty while still down.
struct DownInterval {
    SimTime start = 0.0;
    std::optional<SimTime> end;

    bool operator==(const DownInterval&) const = default;
};

}  // namespace hacsim
