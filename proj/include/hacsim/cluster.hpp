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
#include <vector>

#include "hacsim/balancer.hpp"
#include "hacsim/records.hpp"
#include "hacsim/sim_core.hpp"
#include "hacsim/workload.hpp"

namespace hacsim {

// ---------------------------------------------------------------------------
// Node roles and the legal-transition table

enum class NodeStatus : std::uint8_t { Active, SemiActive, PassiveWarm, PassiveCold, Promoting, Failed };

std::string_view to_string(NodeStatus status);
std::optional<NodeStatus> node_status_from(std::string_view text);

/// Traffic a node is willing to take from the balancer.
enum class Accepts : std::uint8_t { All, LightOnly, None };

Accepts accepts_for(NodeStatus status);

/// SemiActive, PassiveWarm and PassiveCold: candidates for promotion.
bool is_standby(NodeStatus status);

/// Roles the heartbeat monitor watches.
bool is_monitored(NodeStatus status);

/// Active->Failed; standby->{Promoting, Failed}; Promoting->{Active, Failed};
/// Failed->any role a node can be configured with (repair).
bool is_legal_transition(NodeStatus from, NodeStatus to);

enum class NodeGroup : std::uint8_t { OnPrem, Cloud };

std::string_view to_string(NodeGroup group);
std::optional<NodeGroup> node_group_from(std::string_view text);

// ---------------------------------------------------------------------------
// Configuration

struct NodeConfig {
    std::string name;
    NodeStatus role = NodeStatus::Active;
    double service_rate = 1.0;
    NodeGroup group = NodeGroup::OnPrem;
    /// Resource weight for the utilization formula; measured serving-time
    /// share when absent.
    std::optional<double> weight;
    /// Role after repair. When absent see Cluster::on_repair.
    std::optional<NodeStatus> rejoin_role;

    bool operator==(const NodeConfig&) const = default;
};

struct HeartbeatConfig {
    double interval = 1.0;
    unsigned miss_threshold = 3;

    bool operator==(const HeartbeatConfig&) const = default;
};

enum class OverflowPolicy : std::uint8_t { Queue, Reject503 };

std::string_view to_string(OverflowPolicy policy);
std::optional<OverflowPolicy> overflow_policy_from(std::string_view text);

struct FailoverPolicy {
    double promotion_delay_warm = 5.0;
    double promotion_delay_cold = 30.0;
    OverflowPolicy overflow_policy = OverflowPolicy::Queue;

    /// Warm delay for SemiActive and PassiveWarm, cold delay for PassiveCold.
    double promotion_delay(NodeStatus standby_role) const;

    bool operator==(const FailoverPolicy&) const = default;
};

// ---------------------------------------------------------------------------
// Runtime state

struct Node {
    NodeId id = 0;
    std::string name;
    NodeStatus status = NodeStatus::Active;
    NodeStatus configured_role = NodeStatus::Active;
    double service_rate = 1.0;
    NodeGroup group = NodeGroup::OnPrem;
    std::optional<double> weight;
    std::optional<NodeStatus> rejoin_role;

    /// FIFO; the front request is in service while `serving` is set.
    std::deque<Request> queue;
    bool serving = false;
    EventHandle service_event;

    /// Physical state, which the cluster learns about only via heartbeats.
    bool crashed = false;
    SimTime crashed_at = 0.0;

    BusyWindow busy;
    double serving_time = 0.0;
    SimTime status_since = 0.0;

    /// Role held before the current promotion or failure.
    NodeStatus prior_role = NodeStatus::Active;
    /// Standby role of the node promoted to replace this one.
    std::optional<NodeStatus> swap_role;

    std::size_t active_connections() const { return queue.size(); }
    Accepts accepts() const { return accepts_for(status); }
};

Node make_node(NodeId id, const NodeConfig& config, double load_window = kDefaultLoadWindow);

/// Counts consecutive missed beats on the heartbeat grid.
class HeartbeatMonitor {
public:
    HeartbeatMonitor(HeartbeatConfig config, std::size_t nodes);

    const HeartbeatConfig& config() const { return config_; }

    /// Records one grid tick for `node`; returns true once `miss_threshold`
    /// consecutive beats are missing.
    bool observe(NodeId node, bool beat_received, SimTime at);
    void reset(NodeId node, SimTime at);

    unsigned misses(NodeId node) const { return misses_.at(node); }
    SimTime last_seen(NodeId node) const { return last_seen_.at(node); }

private:
    HeartbeatConfig config_;
    std::vector<unsigned> misses_;
    std::vector<SimTime> last_seen_;
};

// ---------------------------------------------------------------------------
// Logs

struct Transition {
    SimTime at = 0.0;
    NodeId node = 0;
    NodeStatus from = NodeStatus::Active;
    NodeStatus to = NodeStatus::Active;
};

struct FailoverRecord {
    NodeId failed_node = 0;
    NodeStatus failed_role = NodeStatus::Active;
    SimTime failed_at = 0.0;
    SimTime detected_at = 0.0;
    std::optional<NodeId> promoted;
    std::optional<SimTime> promotion_started;
    std::optional<SimTime> promotion_done;
    /// First request the balancer forwarded to the promoted node.
    std::optional<SimTime> first_forward_at;
    /// True when another healthy Active node was serving at detection.
    bool peer_available = false;
    unsigned promotion_attempts = 0;

    /// Failure-to-reroute duration: until promotion completes, or until
    /// detection when a healthy Active peer absorbed the traffic.
    std::optional<double> t_failover() const;
};

struct RunLog {
    std::vector<ArrivalRecord> arrivals;
    std::vector<ResponseRecord> responses;
    std::vector<Transition> transitions;
    std::vector<FailoverRecord> failovers;
    /// Physical down intervals per node.
    std::vector<std::vector<DownInterval>> node_down;
    /// Intervals with no healthy Active node.
    std::vector<DownInterval> outages;
};

struct RoutingDecision {
    enum class Kind : std::uint8_t { ForwardTo, Queued, Rejected503 };
    Kind kind = Kind::Queued;
    NodeId node = kNoNode;

    bool operator==(const RoutingDecision&) const = default;
};

struct FailoverAction {
    NodeId failed = 0;
    SimTime at = 0.0;
    std::size_t redispatched = 0;
    std::optional<NodeId> promoted;
    std::optional<SimTime> promotion_done_at;
};

class EmptyPassiveSet : public std::invalid_argument {
public:
    EmptyPassiveSet() : std::invalid_argument("no passive node to promote") {}
};

class RepairOfHealthyNode : public std::logic_error {
public:
    explicit RepairOfHealthyNode(const std::string& node)
        : std::logic_error("repair requested for healthy node " + node) {}
};

class IllegalTransition : public std::logic_error {
public:
    IllegalTransition(NodeStatus from, NodeStatus to);
};

/// Ranks warm standbys (SemiActive, PassiveWarm) before cold ones, then
/// higher service rate, then lowest id.
NodeId select_best_passive(std::span<const Node* const> passives);

/// Nodes allowed to take a request of `cls`: Active always, SemiActive for
/// light traffic only.
std::vector<NodeId> eligible_nodes(std::span<const Node> nodes, TrafficClass cls);

/// Balancer decision over the eligible set. RandomSelection skips
/// zero-weight nodes. Empty when nothing can take the request.
std::optional<NodeId> route(std::span<const Node> nodes, TrafficClass cls,
                            const BalancerConfig& balancer, RngStream& rng, SimTime now);

/// Request handling and heartbeat-driven failover for one cluster. Schedules
/// its own ServiceDone and PromotionDone events on the simulator it is bound
/// to, and writes everything it does to a RunLog.
class Cluster {
public:
    struct Options {
        BalancerConfig balancer;
        HeartbeatConfig heartbeat;
        FailoverPolicy failover;
        std::uint64_t seed = 0;
        double link_delay = 0.0;
    };

    Cluster(Simulator& sim, const std::vector<NodeConfig>& nodes, Options options);

    Cluster(const Cluster&) = delete;
    Cluster& operator=(const Cluster&) = delete;

    /// New client request: logged as an arrival, then dispatched.
    RoutingDecision submit(Request request);

    RoutingDecision dispatch_request(Request request);

    /// Grid tick: every monitored node either beat or missed.
    void on_heartbeat_tick(SimTime at);

    FailoverAction on_heartbeat_missed(NodeId node, SimTime at);

    void inject_failure(NodeId node, SimTime at);

    /// Physical repair. A node the cluster already marked Failed goes through
    /// on_repair; an undetected crash simply resumes.
    void inject_repair(NodeId node, SimTime at);

    /// Rejoin a Failed node. The role is the configured rejoin_role if any,
    /// else the standby role of the node promoted to replace it, else the
    /// role it held before failing.
    void on_repair(NodeId node, SimTime at);

    void on_promotion_done(NodeId node, SimTime at);

    ResponseRecord complete_service(NodeId node, SimTime at);

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    const std::deque<Request>& balancer_queue() const { return balancer_queue_; }
    const HeartbeatMonitor& heartbeat() const { return monitor_; }
    const Options& options() const { return options_; }

    const RunLog& log() const { return log_; }
    RunLog& log() { return log_; }

    /// True while some Active node is physically up.
    bool service_available() const;

    /// Requests in service / waiting (node queues plus balancer) per class.
    std::size_t in_service(TrafficClass cls) const;
    std::size_t waiting(TrafficClass cls) const;

    /// Time each node has spent in a serving role up to `now`.
    double serving_time(NodeId node, SimTime now) const;

private:
    void set_status(Node& node, NodeStatus to, SimTime at);
    void forward(Request request, Node& node, SimTime at);
    void start_service(Node& node, SimTime at);
    void interrupt_service(Node& node, SimTime at);
    std::size_t redispatch_queue(Node& node);
    void drain_balancer_queue(SimTime at);
    bool start_promotion(std::size_t failover_index, SimTime at);
    void update_outage(SimTime at);

    Simulator& sim_;
    Options options_;
    std::vector<Node> nodes_;
    HeartbeatMonitor monitor_;
    RngStream balancer_rng_;
    std::deque<Request> balancer_queue_;
    RunLog log_;
    /// Promoted node -> failover record awaiting its first forwarded request.
    std::map<NodeId, std::size_t> awaiting_first_forward_;
    /// Promoting node -> failover record that started the promotion.
    std::map<NodeId, std::size_t> promotion_owner_;
};

}  // namespace hacsim
