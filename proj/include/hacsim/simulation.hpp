#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hacsim/cluster.hpp"
#include "hacsim/scenario.hpp"
#include "hacsim/sim_core.hpp"
#include "hacsim/workload.hpp"

namespace hacsim {

struct SimulationOptions {
    /// Width of the measurement grid and of the reported series buckets.
    double bucket = 60.0;
    /// Keep a record of every delivered event.
    bool record_events = false;
};

struct EventRecord {
    SimTime at = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Arrival;
    NodeId node = kNoNode;
    std::uint64_t token = 0;
};

/// Balancer view of one node at a measurement tick.
struct LoadSample {
    SimTime at = 0.0;
    NodeId node = 0;
    std::size_t connections = 0;
    double load = 0.0;
    NodeStatus status = NodeStatus::Active;
};

struct NodeSummary {
    NodeId id = 0;
    std::string name;
    NodeGroup group = NodeGroup::OnPrem;
    NodeStatus final_status = NodeStatus::Active;
    std::optional<double> weight;
    /// Seconds spent processing requests.
    double busy_time = 0.0;
    /// Seconds spent in a serving role (Active or SemiActive).
    double serving_time = 0.0;
};

/// Request accounting for one traffic class at the end of a run.
struct ClassCounts {
    std::size_t arrivals = 0;
    std::size_t completions = 0;
    std::size_t rejections = 0;
    std::size_t in_flight = 0;
    std::size_t queued = 0;

    bool conserved() const { return arrivals == completions + rejections + in_flight + queued; }
};

struct RunResult {
    ScenarioSpec spec;
    SimTime horizon = 0.0;
    double bucket = 60.0;
    RunLog log;
    std::vector<EventRecord> events;
    std::vector<LoadSample> load_samples;
    std::vector<NodeSummary> nodes;
    std::array<ClassCounts, 2> classes{};
    std::uint64_t events_processed = 0;

    const ClassCounts& counts(TrafficClass cls) const { return classes[static_cast<std::size_t>(cls)]; }
};

/// One scenario wired to a simulator: workload sources, heartbeat grid,
/// failure schedule and measurement ticks.
class Simulation {
public:
    Simulation(ScenarioSpec spec, SimulationOptions options);

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    const ScenarioSpec& spec() const { return spec_; }
    Simulator& simulator() { return sim_; }
    const Simulator& simulator() const { return sim_; }
    Cluster& cluster() { return *cluster_; }
    const Cluster& cluster() const { return *cluster_; }

    /// Advances the clock; may be called repeatedly with increasing times.
    void run_until(SimTime end);

    /// Runs to the horizon and collects the result.
    RunResult run();

    /// Snapshot of the current state.
    RunResult result() const;

private:
    void handle(const Event& event);
    void on_arrival(TrafficClass cls);

    ScenarioSpec spec_;
    SimulationOptions options_;
    Simulator sim_;
    std::unique_ptr<Cluster> cluster_;
    std::vector<RequestSource> sources_;
    RequestId next_request_ = 0;
    std::vector<EventRecord> events_;
    std::vector<LoadSample> load_samples_;
};

/// Validates `spec` and schedules every initial event.
std::unique_ptr<Simulation> build_simulation(const ScenarioSpec& spec, SimulationOptions options = {});

/// build_simulation(spec)->run().
RunResult run_scenario(const ScenarioSpec& spec, SimulationOptions options = {});

}  // namespace hacsim
