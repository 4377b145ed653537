#include "hacsim/cluster.hpp"

#include <algorithm>
#include <tuple>
#include <utility>

namespace hacsim {

std::string_view to_string(NodeStatus status) {
    switch (status) {
        case NodeStatus::Active: return "Active";
        case NodeStatus::SemiActive: return "SemiActive";
        case NodeStatus::PassiveWarm: return "PassiveWarm";
        case NodeStatus::PassiveCold: return "PassiveCold";
        case NodeStatus::Promoting: return "Promoting";
        case NodeStatus::Failed: return "Failed";
    }
    return "Unknown";
}

std::optional<NodeStatus> node_status_from(std::string_view text) {
    for (auto s : {NodeStatus::Active, NodeStatus::SemiActive, NodeStatus::PassiveWarm,
                   NodeStatus::PassiveCold, NodeStatus::Promoting, NodeStatus::Failed}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

Accepts accepts_for(NodeStatus status) {
    switch (status) {
        case NodeStatus::Active: return Accepts::All;
        case NodeStatus::SemiActive: return Accepts::LightOnly;
        default: return Accepts::None;
    }
}

bool is_standby(NodeStatus status) {
    return status == NodeStatus::SemiActive || status == NodeStatus::PassiveWarm ||
           status == NodeStatus::PassiveCold;
}

bool is_monitored(NodeStatus status) {
    return status == NodeStatus::Active || status == NodeStatus::SemiActive;
}

bool is_legal_transition(NodeStatus from, NodeStatus to) {
    switch (from) {
        case NodeStatus::Active: return to == NodeStatus::Failed;
        case NodeStatus::SemiActive:
        case NodeStatus::PassiveWarm:
        case NodeStatus::PassiveCold: return to == NodeStatus::Promoting || to == NodeStatus::Failed;
        case NodeStatus::Promoting: return to == NodeStatus::Active || to == NodeStatus::Failed;
        case NodeStatus::Failed: return to == NodeStatus::Active || is_standby(to);
    }
    return false;
}

std::string_view to_string(NodeGroup group) {
    return group == NodeGroup::OnPrem ? "OnPrem" : "Cloud";
}

std::optional<NodeGroup> node_group_from(std::string_view text) {
    if (text == "OnPrem") return NodeGroup::OnPrem;
    if (text == "Cloud") return NodeGroup::Cloud;
    return std::nullopt;
}

std::string_view to_string(OverflowPolicy policy) {
    return policy == OverflowPolicy::Queue ? "Queue" : "Reject503";
}

std::optional<OverflowPolicy> overflow_policy_from(std::string_view text) {
    if (text == "Queue") return OverflowPolicy::Queue;
    if (text == "Reject503") return OverflowPolicy::Reject503;
    return std::nullopt;
}

std::string_view to_string(Outcome outcome) {
    return outcome == Outcome::Completed ? "completed" : "rejected_503";
}

double FailoverPolicy::promotion_delay(NodeStatus standby_role) const {
    return standby_role == NodeStatus::PassiveCold ? promotion_delay_cold : promotion_delay_warm;
}

IllegalTransition::IllegalTransition(NodeStatus from, NodeStatus to)
    : std::logic_error("illegal node transition " + std::string(to_string(from)) + " -> " +
                       std::string(to_string(to))) {}

std::optional<double> FailoverRecord::t_failover() const {
    if (promotion_done) return *promotion_done - failed_at;
    if (peer_available) return detected_at - failed_at;
    return std::nullopt;
}

Node make_node(NodeId id, const NodeConfig& config, double load_window) {
    Node node;
    node.id = id;
    node.name = config.name;
    node.status = config.role;
    node.configured_role = config.role;
    node.service_rate = config.service_rate;
    node.group = config.group;
    node.weight = config.weight;
    node.rejoin_role = config.rejoin_role;
    node.busy = BusyWindow(load_window);
    node.prior_role = config.role;
    return node;
}

// ---------------------------------------------------------------------------

HeartbeatMonitor::HeartbeatMonitor(HeartbeatConfig config, std::size_t nodes)
    : config_(config), misses_(nodes, 0), last_seen_(nodes, 0.0) {}

bool HeartbeatMonitor::observe(NodeId node, bool beat_received, SimTime at) {
    if (beat_received) {
        misses_.at(node) = 0;
        last_seen_.at(node) = at;
        return false;
    }
    return ++misses_.at(node) >= config_.miss_threshold;
}

void HeartbeatMonitor::reset(NodeId node, SimTime at) {
    misses_.at(node) = 0;
    last_seen_.at(node) = at;
}

// ---------------------------------------------------------------------------

NodeId select_best_passive(std::span<const Node* const> passives) {
    if (passives.empty()) throw EmptyPassiveSet();
    const auto rank = [](const Node* n) {
        const int tier = n->status == NodeStatus::PassiveCold ? 1 : 0;
        return std::make_tuple(tier, -n->service_rate, n->id);
    };
    const auto best = std::min_element(passives.begin(), passives.end(),
                                       [&](const Node* a, const Node* b) { return rank(a) < rank(b); });
    return (*best)->id;
}

std::vector<NodeId> eligible_nodes(std::span<const Node> nodes, TrafficClass cls) {
    std::vector<NodeId> out;
    for (const auto& n : nodes) {
        const Accepts a = n.accepts();
        if (a == Accepts::All || (a == Accepts::LightOnly && cls == TrafficClass::Light)) {
            out.push_back(n.id);
        }
    }
    return out;
}

std::optional<NodeId> route(std::span<const Node> nodes, TrafficClass cls,
                            const BalancerConfig& balancer, RngStream& rng, SimTime now) {
    std::vector<NodeLoadSnapshot> snaps;
    std::vector<double> weights;
    const bool weighted = balancer.policy == BalancerPolicy::RandomSelection && !balancer.weights.empty();
    for (NodeId id : eligible_nodes(nodes, cls)) {
        const Node& n = nodes[id];
        if (weighted) {
            const auto it = balancer.weights.find(n.name);
            const double w = it == balancer.weights.end() ? 0.0 : it->second;
            if (w <= 0.0) continue;
            weights.push_back(w);
        }
        snaps.push_back(NodeLoadSnapshot{n.id, n.active_connections(), n.busy.load(now)});
    }
    if (snaps.empty()) return std::nullopt;
    switch (balancer.policy) {
        case BalancerPolicy::LeastConnection: return select_least_connection(snaps);
        case BalancerPolicy::ServerLoad: return select_server_load(snaps);
        case BalancerPolicy::RandomSelection: return select_random(snaps, weights, rng);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

Cluster::Cluster(Simulator& sim, const std::vector<NodeConfig>& nodes, Options options)
    : sim_(sim),
      options_(std::move(options)),
      monitor_(options_.heartbeat, nodes.size()),
      balancer_rng_(options_.seed, StreamId::BalancerRandom) {
    nodes_.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes_.push_back(make_node(static_cast<NodeId>(i), nodes[i], options_.balancer.load_window));
        nodes_.back().status_since = sim_.now();
    }
    log_.node_down.resize(nodes_.size());
    update_outage(sim_.now());
}

RoutingDecision Cluster::submit(Request request) {
    log_.arrivals.push_back(ArrivalRecord{request.id, request.cls, request.submitted_at});
    return dispatch_request(std::move(request));
}

RoutingDecision Cluster::dispatch_request(Request request) {
    const SimTime now = sim_.now();
    if (auto target = route(nodes_, request.cls, options_.balancer, balancer_rng_, now)) {
        forward(std::move(request), nodes_[*target], now);
        return {RoutingDecision::Kind::ForwardTo, *target};
    }
    if (options_.failover.overflow_policy == OverflowPolicy::Queue) {
        request.queued_since = now;
        balancer_queue_.push_back(std::move(request));
        return {RoutingDecision::Kind::Queued, kNoNode};
    }
    ResponseRecord rec;
    rec.request_id = request.id;
    rec.cls = request.cls;
    rec.submitted_at = request.submitted_at;
    rec.completed_at = now;
    rec.response_time = now - request.submitted_at;
    rec.served_by = kNoNode;
    rec.outcome = Outcome::Rejected503;
    rec.delay = options_.link_delay + request.balancer_wait;
    rec.forwarded_at = now;
    log_.responses.push_back(rec);
    return {RoutingDecision::Kind::Rejected503, kNoNode};
}

void Cluster::forward(Request request, Node& node, SimTime at) {
    request.forwarded_at = at;
    node.queue.push_back(std::move(request));
    if (auto it = awaiting_first_forward_.find(node.id); it != awaiting_first_forward_.end()) {
        log_.failovers[it->second].first_forward_at = at;
        awaiting_first_forward_.erase(it);
    }
    if (!node.serving && !node.crashed) start_service(node, at);
}

void Cluster::start_service(Node& node, SimTime at) {
    const Request& head = node.queue.front();
    node.serving = true;
    node.busy.start(at);
    node.service_event = sim_.schedule(at + head.demand / node.service_rate, EventKind::ServiceDone,
                                       EventPayload{node.id, head.id});
}

void Cluster::interrupt_service(Node& node, SimTime at) {
    if (!node.serving) return;
    sim_.cancel(node.service_event);
    node.service_event = {};
    node.serving = false;
    node.busy.stop(at);
}

ResponseRecord Cluster::complete_service(NodeId id, SimTime at) {
    Node& node = nodes_.at(id);
    if (!node.serving || node.queue.empty()) {
        throw std::logic_error("service completion on idle node " + node.name);
    }
    Request req = std::move(node.queue.front());
    node.queue.pop_front();
    node.serving = false;
    node.service_event = {};
    node.busy.stop(at);

    ResponseRecord rec;
    rec.request_id = req.id;
    rec.cls = req.cls;
    rec.submitted_at = req.submitted_at;
    rec.completed_at = at;
    rec.response_time = at - req.submitted_at;
    rec.served_by = id;
    rec.outcome = Outcome::Completed;
    rec.delay = options_.link_delay + req.balancer_wait;
    rec.forwarded_at = req.forwarded_at;
    log_.responses.push_back(rec);

    if (!node.crashed && !node.queue.empty()) start_service(node, at);
    return rec;
}

void Cluster::on_heartbeat_tick(SimTime at) {
    for (auto& node : nodes_) {
        if (!is_monitored(node.status)) continue;
        // A node crashing exactly on the tick still emitted that beat.
        const bool beat = !node.crashed || node.crashed_at >= at;
        if (monitor_.observe(node.id, beat, at)) on_heartbeat_missed(node.id, at);
    }
}

FailoverAction Cluster::on_heartbeat_missed(NodeId id, SimTime at) {
    Node& node = nodes_.at(id);
    if (!is_monitored(node.status)) {
        throw std::logic_error("heartbeat miss on unmonitored node " + node.name);
    }
    const NodeStatus role = node.status;
    node.prior_role = role;
    node.swap_role.reset();
    set_status(node, NodeStatus::Failed, at);
    monitor_.reset(id, at);
    interrupt_service(node, at);

    FailoverRecord rec;
    rec.failed_node = id;
    rec.failed_role = role;
    rec.failed_at = node.crashed ? node.crashed_at : at;
    rec.detected_at = at;
    rec.peer_available = service_available();
    log_.failovers.push_back(rec);
    const std::size_t index = log_.failovers.size() - 1;

    FailoverAction action;
    action.failed = id;
    action.at = at;
    // Only a lost Active is replaced; a lost SemiActive just leaves the pool.
    if (role == NodeStatus::Active && start_promotion(index, at)) {
        action.promoted = log_.failovers[index].promoted;
        action.promotion_done_at =
            at + options_.failover.promotion_delay(nodes_[*action.promoted].prior_role);
    }
    action.redispatched = redispatch_queue(node);
    update_outage(at);
    return action;
}

bool Cluster::start_promotion(std::size_t failover_index, SimTime at) {
    std::vector<const Node*> passives;
    for (const auto& n : nodes_) {
        if (is_standby(n.status)) passives.push_back(&n);
    }
    if (passives.empty()) return false;
    Node& chosen = nodes_[select_best_passive(passives)];
    chosen.prior_role = chosen.status;
    set_status(chosen, NodeStatus::Promoting, at);

    FailoverRecord& rec = log_.failovers[failover_index];
    rec.promoted = chosen.id;
    if (!rec.promotion_started) rec.promotion_started = at;
    ++rec.promotion_attempts;
    nodes_[rec.failed_node].swap_role = chosen.prior_role;
    promotion_owner_[chosen.id] = failover_index;

    sim_.schedule(at + options_.failover.promotion_delay(chosen.prior_role), EventKind::PromotionDone,
                  EventPayload{chosen.id, failover_index});
    return true;
}

void Cluster::on_promotion_done(NodeId id, SimTime at) {
    Node& node = nodes_.at(id);
    if (node.status != NodeStatus::Promoting) {
        throw std::logic_error("promotion completion for node not promoting: " + node.name);
    }
    std::optional<std::size_t> owner;
    if (auto it = promotion_owner_.find(id); it != promotion_owner_.end()) {
        owner = it->second;
        promotion_owner_.erase(it);
    }

    if (node.crashed) {
        // The standby died unnoticed; fall through to the next candidate.
        set_status(node, NodeStatus::Failed, at);
        redispatch_queue(node);
        if (owner && !start_promotion(*owner, at)) {
            FailoverRecord& rec = log_.failovers[*owner];
            rec.promoted.reset();
            nodes_[rec.failed_node].swap_role.reset();
        }
        update_outage(at);
        return;
    }

    set_status(node, NodeStatus::Active, at);
    monitor_.reset(id, at);
    if (owner) {
        log_.failovers[*owner].promotion_done = at;
        awaiting_first_forward_[id] = *owner;
    }
    update_outage(at);
    drain_balancer_queue(at);
}

void Cluster::inject_failure(NodeId id, SimTime at) {
    Node& node = nodes_.at(id);
    if (node.crashed) throw std::logic_error("node already down: " + node.name);
    node.crashed = true;
    node.crashed_at = at;
    interrupt_service(node, at);
    log_.node_down[id].push_back(DownInterval{at, std::nullopt});
    update_outage(at);
}

void Cluster::inject_repair(NodeId id, SimTime at) {
    Node& node = nodes_.at(id);
    if (!node.crashed) throw RepairOfHealthyNode(node.name);
    if (node.status == NodeStatus::Failed) {
        on_repair(id, at);
        return;
    }
    node.crashed = false;
    log_.node_down[id].back().end = at;
    if (is_monitored(node.status)) monitor_.reset(id, at);
    if (!node.serving && !node.queue.empty()) start_service(node, at);
    update_outage(at);
}

void Cluster::on_repair(NodeId id, SimTime at) {
    Node& node = nodes_.at(id);
    if (node.status != NodeStatus::Failed) throw RepairOfHealthyNode(node.name);
    const NodeStatus role = node.rejoin_role.value_or(node.swap_role.value_or(node.prior_role));
    if (node.crashed) {
        node.crashed = false;
        if (!log_.node_down[id].empty() && !log_.node_down[id].back().end) {
            log_.node_down[id].back().end = at;
        }
    }
    set_status(node, role, at);
    node.prior_role = role;
    node.swap_role.reset();
    monitor_.reset(id, at);
    update_outage(at);
    if (node.accepts() != Accepts::None) drain_balancer_queue(at);
}

std::size_t Cluster::redispatch_queue(Node& node) {
    std::deque<Request> stranded;
    stranded.swap(node.queue);
    node.serving = false;
    for (auto& req : stranded) dispatch_request(std::move(req));
    return stranded.size();
}

void Cluster::drain_balancer_queue(SimTime at) {
    if (balancer_queue_.empty()) return;
    std::deque<Request> still_waiting;
    std::deque<Request> pending;
    pending.swap(balancer_queue_);
    for (auto& req : pending) {
        if (auto target = route(nodes_, req.cls, options_.balancer, balancer_rng_, at)) {
            req.balancer_wait += at - req.queued_since;
            forward(std::move(req), nodes_[*target], at);
        } else {
            still_waiting.push_back(std::move(req));
        }
    }
    // Anything queued while draining (none today) stays behind the survivors.
    for (auto& req : balancer_queue_) still_waiting.push_back(std::move(req));
    balancer_queue_.swap(still_waiting);
}

void Cluster::set_status(Node& node, NodeStatus to, SimTime at) {
    if (!is_legal_transition(node.status, to)) throw IllegalTransition(node.status, to);
    if (is_monitored(node.status)) node.serving_time += at - node.status_since;
    log_.transitions.push_back(Transition{at, node.id, node.status, to});
    node.status = to;
    node.status_since = at;
}

void Cluster::update_outage(SimTime at) {
    const bool up = service_available();
    auto& out = log_.outages;
    const bool open = !out.empty() && !out.back().end;
    if (!up && !open) out.push_back(DownInterval{at, std::nullopt});
    if (up && open) out.back().end = at;
}

bool Cluster::service_available() const {
    return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) {
        return n.status == NodeStatus::Active && !n.crashed;
    });
}

std::size_t Cluster::in_service(TrafficClass cls) const {
    std::size_t count = 0;
    for (const auto& n : nodes_) {
        if (n.serving && !n.queue.empty() && n.queue.front().cls == cls) ++count;
    }
    return count;
}

std::size_t Cluster::waiting(TrafficClass cls) const {
    std::size_t count = 0;
    for (const auto& n : nodes_) {
        for (std::size_t i = n.serving ? 1 : 0; i < n.queue.size(); ++i) {
            if (n.queue[i].cls == cls) ++count;
        }
    }
    for (const auto& r : balancer_queue_) {
        if (r.cls == cls) ++count;
    }
    return count;
}

double Cluster::serving_time(NodeId id, SimTime now) const {
    const Node& n = nodes_.at(id);
    return n.serving_time + (is_monitored(n.status) ? now - n.status_since : 0.0);
}

}  // namespace hacsim
