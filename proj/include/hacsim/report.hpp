#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hacsim/metrics.hpp"
#include "hacsim/simulation.hpp"

namespace hacsim {

struct AvailabilityFigures {
    std::size_t failures = 0;
    double downtime = 0.0;
    std::optional<double> mtbf;  ///< empty: unbounded
    std::optional<double> mttr;  ///< empty: undefined
    /// Uptime / horizon. Equals mtbf / (mtbf + mttr) when every outage closed.
    double availability = 1.0;
};

AvailabilityFigures availability_figures(const FailureTrace& trace);

struct NodeReport {
    std::string name;
    NodeGroup group = NodeGroup::OnPrem;
    NodeStatus final_status = NodeStatus::Active;
    AvailabilityFigures availability;
    /// R_i: busy time / horizon.
    double busy_fraction = 0.0;
    /// W_i: configured weight, else serving-role time / horizon.
    double weight = 0.0;
};

struct FailoverReport {
    std::string failed_node;
    NodeStatus failed_role = NodeStatus::Active;
    SimTime failed_at = 0.0;
    SimTime detected_at = 0.0;
    std::optional<std::string> promoted;
    std::optional<SimTime> promotion_done;
    std::optional<SimTime> first_forward_at;
    unsigned promotion_attempts = 0;
    std::optional<double> t_failover;
    std::optional<double> efficiency;
};

struct MetricsReport {
    std::string scenario;
    std::uint64_t seed = 0;
    SimTime horizon = 0.0;
    SimTime warmup_cut = 0.0;

    std::vector<NodeReport> nodes;
    /// Outages with no healthy Active node.
    AvailabilityFigures system;
    double availability_onprem = 1.0;
    double availability_cloud = 1.0;
    WeightBlend blend;
    double weighted_availability = 1.0;
    std::optional<double> utilization;

    std::vector<FailoverReport> failovers;
    /// 1 / mean T_failover over failovers that have one.
    std::optional<double> failover_efficiency;

    std::optional<ResponseStats> response_all;
    std::optional<ResponseStats> response_heavy;
    std::optional<ResponseStats> response_light;
    std::optional<double> mean_delay;

    std::size_t arrivals = 0;
    std::size_t completions = 0;
    std::size_t rejections = 0;
    std::size_t rejections_after_promotion = 0;

    double bucket = 60.0;
    TimeSeries throughput;
    TimeSeries delay;
    TimeSeries traffic_sent;
    TimeSeries traffic_received;
};

MetricsReport build_report(const RunResult& run);

/// Report document; "Unbounded" and "Undefined" stand in for missing MTBF
/// and MTTR values.
std::string report_json(const MetricsReport& report);

/// request_id,class,submitted_at,completed_at,response_time,served_by,outcome
void write_responses_csv(std::ostream& out, const RunResult& run);
/// t_bucket,metric,value
void write_series_csv(std::ostream& out, const MetricsReport& report);
/// at,seq,kind,node,token
void write_events_csv(std::ostream& out, const RunResult& run);

/// Flat numeric view used for replication summaries and comparisons. Missing
/// values are left out.
std::vector<std::pair<std::string, double>> scalar_metrics(const MetricsReport& report);

}  // namespace hacsim
