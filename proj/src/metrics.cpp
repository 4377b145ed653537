#include "hacsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hacsim {

WeightSumViolation::WeightSumViolation(double alpha, double beta)
    : std::invalid_argument("blend weights must sum to 1 (alpha=" + std::to_string(alpha) +
                            ", beta=" + std::to_string(beta) + ")") {}

void check_trace(const FailureTrace& trace) {
    if (!(trace.horizon > 0.0)) throw std::invalid_argument("trace horizon must be positive");
    SimTime cursor = 0.0;
    for (std::size_t i = 0; i < trace.downs.size(); ++i) {
        const auto& d = trace.downs[i];
        if (d.start < cursor) throw std::invalid_argument("trace intervals overlap or are unordered");
        if (d.start > trace.horizon) throw std::invalid_argument("trace interval starts after horizon");
        if (!d.end) {
            if (i + 1 != trace.downs.size()) throw std::invalid_argument("open interval must be last");
            break;
        }
        if (*d.end < d.start || *d.end > trace.horizon) {
            throw std::invalid_argument("trace interval ends out of range");
        }
        cursor = *d.end;
    }
}

double total_downtime(const FailureTrace& trace) {
    double down = 0.0;
    for (const auto& d : trace.downs) down += d.end.value_or(trace.horizon) - d.start;
    return down;
}

double trace_availability(const FailureTrace& trace) {
    return (trace.horizon - total_downtime(trace)) / trace.horizon;
}

std::optional<double> mtbf(const FailureTrace& trace) {
    if (trace.downs.empty()) return std::nullopt;
    return (trace.horizon - total_downtime(trace)) / static_cast<double>(trace.downs.size());
}

std::optional<double> mttr(const FailureTrace& trace) {
    double down = 0.0;
    std::size_t closed = 0;
    for (const auto& d : trace.downs) {
        if (!d.end) continue;
        down += *d.end - d.start;
        ++closed;
    }
    if (closed == 0) return std::nullopt;
    return down / static_cast<double>(closed);
}

double availability(double mtbf, double mttr) {
    if (mtbf < 0.0 || mttr < 0.0) throw DegenerateInput("MTBF and MTTR must be non-negative");
    if (mtbf + mttr <= 0.0) throw DegenerateInput("MTBF + MTTR must be positive");
    return mtbf / (mtbf + mttr);
}

double weighted_availability(WeightBlend blend, double a_onprem, double a_cloud) {
    if (std::abs(blend.alpha + blend.beta - 1.0) > kBlendTolerance || blend.alpha < 0.0 ||
        blend.beta < 0.0) {
        throw WeightSumViolation(blend.alpha, blend.beta);
    }
    return blend.alpha * a_onprem + blend.beta * a_cloud;
}

double utilization(const UtilizationSample& sample) {
    if (sample.weights.size() != sample.resources.size() || sample.weights.empty()) {
        throw DegenerateInput("utilization needs one weight per resource sample");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < sample.weights.size(); ++i) {
        num += sample.weights[i] * sample.resources[i];
        den += sample.resources[i];
    }
    if (den <= 0.0) throw DegenerateInput("total utilized resources must be positive");
    return num / den;
}

double failover_efficiency(double t_failover) {
    if (!(t_failover > 0.0)) throw DegenerateInput("failover time must be positive");
    return 1.0 / t_failover;
}

double nearest_rank(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw EmptySample();
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

ResponseStats response_stats(std::span<const double> response_times) {
    if (response_times.empty()) throw EmptySample();
    std::vector<double> sorted(response_times.begin(), response_times.end());
    std::sort(sorted.begin(), sorted.end());
    ResponseStats s;
    s.count = sorted.size();
    // Summed in arrival order so the mean does not depend on sorting.
    s.mean = std::accumulate(response_times.begin(), response_times.end(), 0.0) /
             static_cast<double>(s.count);
    s.p50 = nearest_rank(sorted, 0.50);
    s.p95 = nearest_rank(sorted, 0.95);
    s.max = sorted.back();
    return s;
}

ResponseStats response_stats(std::span<const ResponseRecord> records, std::optional<TrafficClass> cls,
                             SimTime from) {
    std::vector<double> times;
    for (const auto& r : records) {
        if (r.outcome != Outcome::Completed) continue;
        if (cls && r.cls != *cls) continue;
        if (r.submitted_at < from) continue;
        times.push_back(r.response_time);
    }
    return response_stats(times);
}

std::string_view to_string(SeriesMetric metric) {
    switch (metric) {
        case SeriesMetric::Throughput: return "throughput";
        case SeriesMetric::Delay: return "delay";
        case SeriesMetric::TrafficSent: return "traffic_sent";
        case SeriesMetric::TrafficReceived: return "traffic_received";
    }
    return "unknown";
}

TimeSeries timeseries(const TrafficLog& log, SeriesMetric metric, double bucket,
                      std::optional<SimTime> horizon) {
    if (!(bucket > 0.0)) throw std::invalid_argument("bucket width must be positive");

    std::vector<std::pair<SimTime, double>> samples;  // (time, value)
    switch (metric) {
        case SeriesMetric::TrafficSent:
            for (const auto& a : log.arrivals) samples.emplace_back(a.submitted_at, 1.0);
            break;
        case SeriesMetric::Throughput:
            for (const auto& r : log.responses) {
                if (r.outcome == Outcome::Completed) samples.emplace_back(r.completed_at, 1.0);
            }
            break;
        case SeriesMetric::TrafficReceived:
            for (const auto& r : log.responses) samples.emplace_back(r.completed_at, 1.0);
            break;
        case SeriesMetric::Delay:
            for (const auto& r : log.responses) {
                if (r.outcome == Outcome::Completed) samples.emplace_back(r.forwarded_at, r.delay);
            }
            break;
    }

    std::size_t buckets = 0;
    if (horizon) {
        buckets = static_cast<std::size_t>(std::ceil(*horizon / bucket));
    } else if (!samples.empty()) {
        SimTime last = 0.0;
        for (const auto& s : samples) last = std::max(last, s.first);
        buckets = static_cast<std::size_t>(std::floor(last / bucket)) + 1;
    }
    if (buckets == 0) return {};

    std::vector<double> sum(buckets, 0.0);
    std::vector<std::size_t> count(buckets, 0);
    for (const auto& [t, v] : samples) {
        auto k = static_cast<std::size_t>(std::floor(t / bucket));
        if (k >= buckets) k = buckets - 1;
        sum[k] += v;
        ++count[k];
    }

    TimeSeries out;
    out.reserve(buckets);
    for (std::size_t k = 0; k < buckets; ++k) {
        const SimTime t = static_cast<double>(k) * bucket;
        if (metric == SeriesMetric::Delay) {
            if (count[k] > 0) out.push_back({t, sum[k] / static_cast<double>(count[k])});
        } else {
            out.push_back({t, sum[k] / bucket});
        }
    }
    return out;
}

}  // namespace hacsim
