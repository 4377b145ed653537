#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "hacsim/sim_core.hpp"

namespace hacsim {

enum class TrafficClass : std::uint8_t { Heavy, Light };

std::string_view to_string(TrafficClass cls);
std::optional<TrafficClass> traffic_class_from(std::string_view text);

struct ArrivalProcess {
    enum class Kind : std::uint8_t { Poisson, Deterministic };
    Kind kind = Kind::Poisson;
    /// Poisson: rate in requests per second. Deterministic: period in seconds.
    double value = 1.0;

    static ArrivalProcess poisson(double rate) { return {Kind::Poisson, rate}; }
    static ArrivalProcess deterministic(double period) { return {Kind::Deterministic, period}; }

    bool operator==(const ArrivalProcess&) const = default;
};

struct ServiceDemand {
    enum class Kind : std::uint8_t { Exponential, Deterministic };
    Kind kind = Kind::Exponential;
    double mean = 1.0;

    static ServiceDemand exponential(double mean) { return {Kind::Exponential, mean}; }
    static ServiceDemand deterministic(double value) { return {Kind::Deterministic, value}; }

    bool operator==(const ServiceDemand&) const = default;
};

/// Offered load for one traffic class.
struct ClassWorkload {
    ArrivalProcess arrival;
    ServiceDemand demand;

    bool operator==(const ClassWorkload&) const = default;
};

using RequestId = std::uint64_t;

struct Request {
    RequestId id = 0;
    TrafficClass cls = TrafficClass::Light;
    SimTime submitted_at = 0.0;
    /// Seconds of work at a rate-1 server.
    double demand = 0.0;

    // Balancer-side bookkeeping.
    SimTime queued_since = 0.0;
    double balancer_wait = 0.0;
    SimTime forwarded_at = 0.0;
};

/// Poisson: -ln(1-u)/rate. Deterministic: the period.
double next_interarrival(const ArrivalProcess& process, RngStream& rng);
double interarrival_from_uniform(const ArrivalProcess& process, double u);

/// Exponential: -mean*ln(1-u). Deterministic: the mean.
double sample_demand(const ServiceDemand& spec, RngStream& rng);
double demand_from_uniform(const ServiceDemand& spec, double u);

/// Generates the request stream of one class from its own arrival and
/// service RNG streams, so classes never perturb each other.
class RequestSource {
public:
    RequestSource(TrafficClass cls, ClassWorkload workload, std::uint64_t seed);

    TrafficClass traffic_class() const { return cls_; }
    double next_gap() { return next_interarrival(workload_.arrival, arrivals_); }
    double next_demand() { return sample_demand(workload_.demand, service_); }

private:
    TrafficClass cls_;
    ClassWorkload workload_;
    RngStream arrivals_;
    RngStream service_;
};

}  // namespace hacsim
