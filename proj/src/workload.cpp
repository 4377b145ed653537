#include "hacsim/workload.hpp"

#include <cmath>

namespace hacsim {

std::string_view to_string(TrafficClass cls) {
    return cls == TrafficClass::Heavy ? "heavy" : "light";
}

std::optional<TrafficClass> traffic_class_from(std::string_view text) {
    if (text == "heavy" || text == "Heavy") return TrafficClass::Heavy;
    if (text == "light" || text == "Light") return TrafficClass::Light;
    return std::nullopt;
}

double interarrival_from_uniform(const ArrivalProcess& process, double u) {
    if (process.kind == ArrivalProcess::Kind::Deterministic) return process.value;
    return -std::log1p(-u) / process.value;
}

double next_interarrival(const ArrivalProcess& process, RngStream& rng) {
    if (process.kind == ArrivalProcess::Kind::Deterministic) return process.value;
    return interarrival_from_uniform(process, rng.draw_uniform());
}

double demand_from_uniform(const ServiceDemand& spec, double u) {
    if (spec.kind == ServiceDemand::Kind::Deterministic) return spec.mean;
    return -spec.mean * std::log1p(-u);
}

double sample_demand(const ServiceDemand& spec, RngStream& rng) {
    if (spec.kind == ServiceDemand::Kind::Deterministic) return spec.mean;
    // u == 0 would give zero demand; draw again (probability 2^-53).
    double d = 0.0;
    while (d <= 0.0) d = demand_from_uniform(spec, rng.draw_uniform());
    return d;
}

RequestSource::RequestSource(TrafficClass cls, ClassWorkload workload, std::uint64_t seed)
    : cls_(cls),
      workload_(workload),
      arrivals_(seed, cls == TrafficClass::Heavy ? StreamId::ArrivalsHeavy : StreamId::ArrivalsLight),
      service_(seed, cls == TrafficClass::Heavy ? StreamId::ServiceHeavy : StreamId::ServiceLight) {}

}  // namespace hacsim
