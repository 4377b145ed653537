#include "hacsim/simulation.hpp"

#include <stdexcept>

namespace hacsim {

namespace {

std::uint64_t class_token(TrafficClass cls) { return static_cast<std::uint64_t>(cls); }

}  // namespace

Simulation::Simulation(ScenarioSpec spec, SimulationOptions options)
    : spec_(std::move(spec)), options_(options) {
    validate(spec_);
    if (!(options_.bucket > 0.0)) throw std::invalid_argument("bucket width must be positive");

    Cluster::Options copts;
    copts.balancer = spec_.balancer;
    copts.heartbeat = spec_.heartbeat;
    copts.failover = spec_.failover;
    copts.seed = spec_.seed;
    copts.link_delay = spec_.link_delay;
    cluster_ = std::make_unique<Cluster>(sim_, spec_.nodes, copts);

    for (auto cls : {TrafficClass::Heavy, TrafficClass::Light}) {
        const auto& w = spec_.workload.of(cls);
        if (!w) continue;
        sources_.emplace_back(cls, *w, spec_.seed);
        const double first = sources_.back().next_gap();
        if (first <= spec_.horizon) sim_.schedule(first, EventKind::Arrival, EventPayload{kNoNode, class_token(cls)});
    }

    for (const auto& f : spec_.failures) {
        const NodeId id = *spec_.node_index(f.node);
        sim_.schedule(f.fail_at, EventKind::FailureInject, EventPayload{id, 0});
        if (f.repair_at) sim_.schedule(*f.repair_at, EventKind::RepairInject, EventPayload{id, 0});
    }

    // Grid events carry their tick index so times are k * period, free of drift.
    if (spec_.heartbeat.interval <= spec_.horizon) {
        sim_.schedule(spec_.heartbeat.interval, EventKind::HeartbeatTick, EventPayload{kNoNode, 1});
    }
    sim_.schedule(0.0, EventKind::MeasurementTick, EventPayload{kNoNode, 0});
}

void Simulation::run_until(SimTime end) {
    sim_.run_until(end, [this](const Event& e) { handle(e); });
}

RunResult Simulation::run() {
    run_until(spec_.horizon);
    return result();
}

void Simulation::handle(const Event& e) {
    if (options_.record_events) {
        events_.push_back(EventRecord{e.fire_at, e.seq, e.kind, e.payload.node, e.payload.token});
    }
    const SimTime now = e.fire_at;
    switch (e.kind) {
        case EventKind::Arrival:
            on_arrival(static_cast<TrafficClass>(e.payload.token));
            break;
        case EventKind::ServiceDone:
            cluster_->complete_service(e.payload.node, now);
            break;
        case EventKind::HeartbeatTick: {
            cluster_->on_heartbeat_tick(now);
            const std::uint64_t next = e.payload.token + 1;
            const SimTime at = static_cast<double>(next) * spec_.heartbeat.interval;
            if (at <= spec_.horizon) sim_.schedule(at, EventKind::HeartbeatTick, EventPayload{kNoNode, next});
            break;
        }
        case EventKind::FailureInject:
            cluster_->inject_failure(e.payload.node, now);
            break;
        case EventKind::RepairInject:
            cluster_->inject_repair(e.payload.node, now);
            break;
        case EventKind::PromotionDone:
            cluster_->on_promotion_done(e.payload.node, now);
            break;
        case EventKind::MeasurementTick: {
            for (const auto& n : cluster_->nodes()) {
                load_samples_.push_back(LoadSample{now, n.id, n.active_connections(), n.busy.load(now), n.status});
            }
            const std::uint64_t next = e.payload.token + 1;
            const SimTime at = static_cast<double>(next) * options_.bucket;
            if (at < spec_.horizon) sim_.schedule(at, EventKind::MeasurementTick, EventPayload{kNoNode, next});
            break;
        }
    }
}

void Simulation::on_arrival(TrafficClass cls) {
    RequestSource* source = nullptr;
    for (auto& s : sources_) {
        if (s.traffic_class() == cls) source = &s;
    }
    if (source == nullptr) throw std::logic_error("arrival for a class without workload");

    Request req;
    req.id = next_request_++;
    req.cls = cls;
    req.submitted_at = sim_.now();
    req.demand = source->next_demand();
    cluster_->submit(req);

    const SimTime next = sim_.now() + source->next_gap();
    if (next <= spec_.horizon) sim_.schedule(next, EventKind::Arrival, EventPayload{kNoNode, class_token(cls)});
}

RunResult Simulation::result() const {
    RunResult r;
    r.spec = spec_;
    r.horizon = sim_.now();
    r.bucket = options_.bucket;
    r.log = cluster_->log();
    r.events = events_;
    r.load_samples = load_samples_;
    r.events_processed = sim_.processed();

    for (const auto& n : cluster_->nodes()) {
        NodeSummary s;
        s.id = n.id;
        s.name = n.name;
        s.group = n.group;
        s.final_status = n.status;
        s.weight = n.weight;
        s.busy_time = n.busy.total_busy(sim_.now());
        s.serving_time = cluster_->serving_time(n.id, sim_.now());
        r.nodes.push_back(std::move(s));
    }

    for (auto cls : {TrafficClass::Heavy, TrafficClass::Light}) {
        ClassCounts& c = r.classes[static_cast<std::size_t>(cls)];
        for (const auto& a : r.log.arrivals) {
            if (a.cls == cls) ++c.arrivals;
        }
        for (const auto& resp : r.log.responses) {
            if (resp.cls != cls) continue;
            if (resp.outcome == Outcome::Completed) {
                ++c.completions;
            } else {
                ++c.rejections;
            }
        }
        c.in_flight = cluster_->in_service(cls);
        c.queued = cluster_->waiting(cls);
    }
    return r;
}

std::unique_ptr<Simulation> build_simulation(const ScenarioSpec& spec, SimulationOptions options) {
    return std::make_unique<Simulation>(spec, options);
}

RunResult run_scenario(const ScenarioSpec& spec, SimulationOptions options) {
    return build_simulation(spec, options)->run();
}

}  // namespace hacsim
