#include "hacsim/report.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace hacsim {

using ordered_json = nlohmann::ordered_json;

namespace {

std::optional<ResponseStats> stats_or_empty(std::span<const ResponseRecord> records,
                                            std::optional<TrafficClass> cls, SimTime from) {
    try {
        return response_stats(records, cls, from);
    } catch (const EmptySample&) {
        return std::nullopt;
    }
}

ordered_json figures_json(const AvailabilityFigures& f) {
    ordered_json j;
    j["failures"] = f.failures;
    j["downtime"] = f.downtime;
    j["mtbf"] = f.mtbf ? ordered_json(*f.mtbf) : ordered_json("Unbounded");
    j["mttr"] = f.mttr ? ordered_json(*f.mttr) : ordered_json("Undefined");
    j["availability"] = f.availability;
    return j;
}

ordered_json stats_json(const std::optional<ResponseStats>& s) {
    if (!s) return nullptr;
    return {{"count", s->count}, {"mean", s->mean}, {"p50", s->p50}, {"p95", s->p95}, {"max", s->max}};
}

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json series_json(const TimeSeries& series) {
    ordered_json out = ordered_json::array();
    for (const auto& p : series) out.push_back({p.t_bucket, p.value});
    return out;
}

}  // namespace

AvailabilityFigures availability_figures(const FailureTrace& trace) {
    AvailabilityFigures f;
    f.failures = trace.downs.size();
    f.downtime = total_downtime(trace);
    f.mtbf = mtbf(trace);
    f.mttr = mttr(trace);
    f.availability = trace_availability(trace);
    return f;
}

MetricsReport build_report(const RunResult& run) {
    MetricsReport r;
    r.scenario = run.spec.name;
    r.seed = run.spec.seed;
    r.horizon = run.horizon;
    r.warmup_cut = run.spec.warmup_cut;
    r.blend = run.spec.blend;
    r.bucket = run.bucket;
    const double T = run.horizon;

    double sum_on = 0.0;
    double sum_cloud = 0.0;
    std::size_t n_on = 0;
    std::size_t n_cloud = 0;
    UtilizationSample usample;
    for (const auto& n : run.nodes) {
        NodeReport nr;
        nr.name = n.name;
        nr.group = n.group;
        nr.final_status = n.final_status;
        nr.availability = availability_figures(FailureTrace{run.log.node_down.at(n.id), T});
        nr.busy_fraction = n.busy_time / T;
        nr.weight = n.weight.value_or(n.serving_time / T);
        if (n.group == NodeGroup::OnPrem) {
            sum_on += nr.availability.availability;
            ++n_on;
        } else {
            sum_cloud += nr.availability.availability;
            ++n_cloud;
        }
        usample.weights.push_back(nr.weight);
        usample.resources.push_back(nr.busy_fraction);
        r.nodes.push_back(std::move(nr));
    }
    r.system = availability_figures(FailureTrace{run.log.outages, T});

    // A group without nodes takes the other group's value so WA stays a
    // statement about the nodes that exist.
    r.availability_onprem = n_on > 0 ? sum_on / static_cast<double>(n_on) : sum_cloud / static_cast<double>(n_cloud);
    r.availability_cloud = n_cloud > 0 ? sum_cloud / static_cast<double>(n_cloud) : r.availability_onprem;
    r.weighted_availability = weighted_availability(r.blend, r.availability_onprem, r.availability_cloud);

    try {
        r.utilization = utilization(usample);
    } catch (const DegenerateInput&) {
        r.utilization.reset();
    }

    double t_sum = 0.0;
    std::size_t t_count = 0;
    std::optional<SimTime> first_promotion;
    for (const auto& f : run.log.failovers) {
        FailoverReport fr;
        fr.failed_node = run.nodes.at(f.failed_node).name;
        fr.failed_role = f.failed_role;
        fr.failed_at = f.failed_at;
        fr.detected_at = f.detected_at;
        if (f.promoted) fr.promoted = run.nodes.at(*f.promoted).name;
        fr.promotion_done = f.promotion_done;
        fr.first_forward_at = f.first_forward_at;
        fr.promotion_attempts = f.promotion_attempts;
        fr.t_failover = f.t_failover();
        if (fr.t_failover && *fr.t_failover > 0.0) {
            fr.efficiency = failover_efficiency(*fr.t_failover);
            t_sum += *fr.t_failover;
            ++t_count;
        }
        if (f.promotion_done && (!first_promotion || *f.promotion_done < *first_promotion)) {
            first_promotion = f.promotion_done;
        }
        r.failovers.push_back(std::move(fr));
    }
    if (t_count > 0) r.failover_efficiency = failover_efficiency(t_sum / static_cast<double>(t_count));

    const std::span<const ResponseRecord> responses = run.log.responses;
    r.response_all = stats_or_empty(responses, std::nullopt, r.warmup_cut);
    r.response_heavy = stats_or_empty(responses, TrafficClass::Heavy, r.warmup_cut);
    r.response_light = stats_or_empty(responses, TrafficClass::Light, r.warmup_cut);

    double delay_sum = 0.0;
    std::size_t delay_count = 0;
    for (const auto& resp : responses) {
        if (resp.outcome == Outcome::Completed) {
            ++r.completions;
            if (resp.submitted_at >= r.warmup_cut) {
                delay_sum += resp.delay;
                ++delay_count;
            }
        } else {
            ++r.rejections;
            if (first_promotion && resp.completed_at >= *first_promotion) ++r.rejections_after_promotion;
        }
    }
    if (delay_count > 0) r.mean_delay = delay_sum / static_cast<double>(delay_count);
    r.arrivals = run.log.arrivals.size();

    const TrafficLog traffic{run.log.arrivals, run.log.responses};
    r.throughput = timeseries(traffic, SeriesMetric::Throughput, r.bucket, T);
    r.delay = timeseries(traffic, SeriesMetric::Delay, r.bucket, T);
    r.traffic_sent = timeseries(traffic, SeriesMetric::TrafficSent, r.bucket, T);
    r.traffic_received = timeseries(traffic, SeriesMetric::TrafficReceived, r.bucket, T);
    return r;
}

std::string report_json(const MetricsReport& r) {
    ordered_json doc;
    doc["scenario"] = r.scenario;
    doc["seed"] = r.seed;
    doc["horizon"] = r.horizon;
    doc["warmup_cut"] = r.warmup_cut;

    ordered_json nodes = ordered_json::array();
    for (const auto& n : r.nodes) {
        ordered_json j;
        j["id"] = n.name;
        j["group"] = to_string(n.group);
        j["final_status"] = to_string(n.final_status);
        j["availability"] = figures_json(n.availability);
        j["busy_fraction"] = n.busy_fraction;
        j["weight"] = n.weight;
        nodes.push_back(std::move(j));
    }
    doc["nodes"] = std::move(nodes);
    doc["system"] = figures_json(r.system);
    doc["availability_onprem"] = r.availability_onprem;
    doc["availability_cloud"] = r.availability_cloud;
    doc["blend"] = {{"alpha", r.blend.alpha}, {"beta", r.blend.beta}};
    doc["weighted_availability"] = r.weighted_availability;
    doc["utilization"] = optional_json(r.utilization);

    ordered_json failovers = ordered_json::array();
    for (const auto& f : r.failovers) {
        ordered_json j;
        j["failed_node"] = f.failed_node;
        j["failed_role"] = to_string(f.failed_role);
        j["failed_at"] = f.failed_at;
        j["detected_at"] = f.detected_at;
        j["promoted"] = optional_json(f.promoted);
        j["promotion_done"] = optional_json(f.promotion_done);
        j["first_forward_at"] = optional_json(f.first_forward_at);
        j["promotion_attempts"] = f.promotion_attempts;
        j["t_failover"] = optional_json(f.t_failover);
        j["failover_efficiency"] = optional_json(f.efficiency);
        failovers.push_back(std::move(j));
    }
    doc["failovers"] = std::move(failovers);
    doc["failover_efficiency"] = optional_json(r.failover_efficiency);

    doc["response_time"] = {{"all", stats_json(r.response_all)},
                            {"heavy", stats_json(r.response_heavy)},
                            {"light", stats_json(r.response_light)}};
    doc["mean_delay"] = optional_json(r.mean_delay);
    doc["counts"] = {{"arrivals", r.arrivals},
                     {"completions", r.completions},
                     {"rejections", r.rejections},
                     {"rejections_after_promotion", r.rejections_after_promotion}};
    doc["series"] = {{"bucket", r.bucket},
                     {"throughput", series_json(r.throughput)},
                     {"delay", series_json(r.delay)},
                     {"traffic_sent", series_json(r.traffic_sent)},
                     {"traffic_received", series_json(r.traffic_received)}};
    return doc.dump(2) + "\n";
}

void write_responses_csv(std::ostream& out, const RunResult& run) {
    out << "request_id,class,submitted_at,completed_at,response_time,served_by,outcome\n";
    for (const auto& r : run.log.responses) {
        const std::string served = r.served_by == kNoNode ? "" : run.nodes.at(r.served_by).name;
        out << fmt::format("{},{},{},{},{},{},{}\n", r.request_id, to_string(r.cls), r.submitted_at, r.completed_at,
                           r.response_time, served, to_string(r.outcome));
    }
}

void write_series_csv(std::ostream& out, const MetricsReport& report) {
    out << "t_bucket,metric,value\n";
    const std::pair<SeriesMetric, const TimeSeries*> all[] = {
        {SeriesMetric::Throughput, &report.throughput},
        {SeriesMetric::Delay, &report.delay},
        {SeriesMetric::TrafficSent, &report.traffic_sent},
        {SeriesMetric::TrafficReceived, &report.traffic_received},
    };
    for (const auto& [metric, series] : all) {
        for (const auto& p : *series) out << fmt::format("{},{},{}\n", p.t_bucket, to_string(metric), p.value);
    }
}

void write_events_csv(std::ostream& out, const RunResult& run) {
    out << "at,seq,kind,node,token\n";
    for (const auto& e : run.events) {
        const std::string node = e.node == kNoNode ? "" : run.nodes.at(e.node).name;
        out << fmt::format("{},{},{},{},{}\n", e.at, e.seq, to_string(e.kind), node, e.token);
    }
}

std::vector<std::pair<std::string, double>> scalar_metrics(const MetricsReport& r) {
    std::vector<std::pair<std::string, double>> out;
    const auto add_stats = [&](const std::string& prefix, const std::optional<ResponseStats>& s) {
        if (!s) return;
        out.emplace_back(prefix + ".mean", s->mean);
        out.emplace_back(prefix + ".p50", s->p50);
        out.emplace_back(prefix + ".p95", s->p95);
        out.emplace_back(prefix + ".max", s->max);
    };
    add_stats("response_time.all", r.response_all);
    add_stats("response_time.heavy", r.response_heavy);
    add_stats("response_time.light", r.response_light);
    if (r.mean_delay) out.emplace_back("mean_delay", *r.mean_delay);
    out.emplace_back("availability", r.system.availability);
    if (r.system.mtbf) out.emplace_back("mtbf", *r.system.mtbf);
    if (r.system.mttr) out.emplace_back("mttr", *r.system.mttr);
    out.emplace_back("weighted_availability", r.weighted_availability);
    if (r.utilization) out.emplace_back("utilization", *r.utilization);
    if (r.failover_efficiency) out.emplace_back("failover_efficiency", *r.failover_efficiency);
    out.emplace_back("arrivals", static_cast<double>(r.arrivals));
    out.emplace_back("completions", static_cast<double>(r.completions));
    out.emplace_back("rejections", static_cast<double>(r.rejections));
    return out;
}

}  // namespace hacsim
