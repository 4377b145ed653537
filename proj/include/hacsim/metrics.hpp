#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hacsim/records.hpp"

namespace hacsim {

class DegenerateInput : public std::invalid_argument {
public:
    explicit DegenerateInput(const std::string& what) : std::invalid_argument(what) {}
};

class WeightSumViolation : public std::invalid_argument {
public:
    WeightSumViolation(double alpha, double beta);
};

class EmptySample : public std::invalid_argument {
public:
    EmptySample() : std::invalid_argument("no response records match the filter") {}
};

/// Down intervals of one component over the observation window [0, horizon].
/// Intervals are disjoint and ordered; an open interval runs to the horizon.
struct FailureTrace {
    std::vector<DownInterval> downs;
    SimTime horizon = 0.0;
};

/// Throws std::invalid_argument when intervals overlap, are unordered or leave
/// [0, horizon].
void check_trace(const FailureTrace& trace);

/// Downtime including open outages (clipped at the horizon).
double total_downtime(const FailureTrace& trace);

/// Uptime / horizon, accumulated directly from the trace.
double trace_availability(const FailureTrace& trace);

/// (horizon - downtime) / failures. Empty means unbounded (no failures).
std::optional<double> mtbf(const FailureTrace& trace);

/// Closed downtime / closed failures. Open outages are excluded; empty means
/// undefined (nothing was repaired).
std::optional<double> mttr(const FailureTrace& trace);

/// mtbf / (mtbf + mttr).
double availability(double mtbf, double mttr);

struct WeightBlend {
    double alpha = 0.5;
    double beta = 0.5;

    bool operator==(const WeightBlend&) const = default;
};

inline constexpr double kBlendTolerance = 1e-9;

/// alpha * A_onprem + beta * A_cloud, with alpha + beta = 1.
double weighted_availability(WeightBlend blend, double a_onprem, double a_cloud);

struct UtilizationSample {
    std::vector<double> weights;    ///< W_i
    std::vector<double> resources;  ///< R_i
};

/// sum(W_i * R_i) / sum(R_i).
double utilization(const UtilizationSample& sample);

/// 1 / T_failover.
double failover_efficiency(double t_failover);

struct ResponseStats {
    std::size_t count = 0;
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

/// Nearest-rank quantile of sorted data: element ceil(p*n) - 1.
double nearest_rank(std::span<const double> sorted, double p);

ResponseStats response_stats(std::span<const double> response_times);

/// Stats over completed requests, optionally one class, submitted at or after
/// `from`. Throws EmptySample when nothing matches.
ResponseStats response_stats(std::span<const ResponseRecord> records,
                             std::optional<TrafficClass> cls = std::nullopt, SimTime from = 0.0);

enum class SeriesMetric : std::uint8_t { Throughput, Delay, TrafficSent, TrafficReceived };

std::string_view to_string(SeriesMetric metric);

struct SeriesPoint {
    SimTime t_bucket = 0.0;
    double value = 0.0;

    bool operator==(const SeriesPoint&) const = default;
};

using TimeSeries = std::vector<SeriesPoint>;

struct TrafficLog {
    std::span<const ArrivalRecord> arrivals;
    std::span<const ResponseRecord> responses;
};

/// Bucketed series. Rates are events per second per bucket; Delay is the
/// mean network delay of requests forwarded in the bucket (empty buckets are
/// skipped). With a horizon the rate series cover every bucket in
/// [0, horizon); without one they stop at the last non-empty bucket.
TimeSeries timeseries(const TrafficLog& log, SeriesMetric metric, double bucket,
                      std::optional<SimTime> horizon = std::nullopt);

}  // namespace hacsim
