#include <doctest.h>

#include <cmath>
#include <vector>

#include "hacsim/scenario.hpp"
#include "hacsim/simulation.hpp"
#include "hacsim/workload.hpp"

using namespace hacsim;

TEST_CASE("deterministic processes return their parameter") {
    RngStream rng(1, "x");
    CHECK(next_interarrival(ArrivalProcess::deterministic(2.0), rng) == 2.0);
    CHECK(sample_demand(ServiceDemand::deterministic(3.0), rng) == 3.0);
    CHECK(rng.draws() == 0);
}

TEST_CASE("inverse-cdf arithmetic") {
    CHECK(interarrival_from_uniform(ArrivalProcess::poisson(0.5), 0.5) == doctest::Approx(1.3863).epsilon(1e-4));
    CHECK(interarrival_from_uniform(ArrivalProcess::poisson(0.5), 0.5) == doctest::Approx(2.0 * std::log(2.0)));
    CHECK(demand_from_uniform(ServiceDemand::exponential(2.0), 0.5) == doctest::Approx(1.3863).epsilon(1e-4));
    CHECK(interarrival_from_uniform(ArrivalProcess::poisson(1.0), 0.0) == 0.0);
}

TEST_CASE("sample means") {
    RngStream a(11, "arrivals");
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) sum += next_interarrival(ArrivalProcess::poisson(1.0), a);
    CHECK(std::abs(sum / 100000.0 - 1.0) < 0.02);

    RngStream s(11, "service");
    sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double d = sample_demand(ServiceDemand::exponential(2.0), s);
        REQUIRE(d > 0.0);
        sum += d;
    }
    CHECK(std::abs(sum / 100000.0 - 2.0) < 0.04);
}

TEST_CASE("poisson arrival count over a long horizon") {
    ScenarioSpec spec;
    spec.horizon = 20000.0;
    spec.nodes = {NodeConfig{"n", NodeStatus::Active, 10.0, NodeGroup::OnPrem, std::nullopt, std::nullopt}};
    spec.workload.light = ClassWorkload{ArrivalProcess::poisson(1.0), ServiceDemand::exponential(0.01)};
    const RunResult run = run_scenario(spec);
    const double n = static_cast<double>(run.log.arrivals.size());
    CHECK(std::abs(n - 20000.0) <= 3.0 * std::sqrt(20000.0));
}

TEST_CASE("class streams are independent") {
    const auto trace = [](bool with_heavy) {
        ScenarioSpec spec;
        spec.horizon = 2000.0;
        spec.seed = 5;
        spec.nodes = {NodeConfig{"n", NodeStatus::Active, 5.0, NodeGroup::OnPrem, std::nullopt, std::nullopt}};
        spec.workload.light = ClassWorkload{ArrivalProcess::poisson(0.5), ServiceDemand::exponential(0.2)};
        if (with_heavy) {
            spec.workload.heavy = ClassWorkload{ArrivalProcess::poisson(0.1), ServiceDemand::exponential(1.0)};
        }
        std::vector<SimTime> light;
        for (const auto& a : run_scenario(spec).log.arrivals) {
            if (a.cls == TrafficClass::Light) light.push_back(a.submitted_at);
        }
        return light;
    };
    CHECK(trace(true) == trace(false));
}

TEST_CASE("request source uses per-class streams") {
    const ClassWorkload w{ArrivalProcess::poisson(1.0), ServiceDemand::exponential(1.0)};
    RequestSource heavy(TrafficClass::Heavy, w, 42);
    RequestSource light(TrafficClass::Light, w, 42);
    CHECK(heavy.next_gap() != light.next_gap());

    RngStream ref(42, StreamId::ArrivalsHeavy);
    RequestSource again(TrafficClass::Heavy, w, 42);
    CHECK(again.next_gap() == interarrival_from_uniform(w.arrival, ref.draw_uniform()));
}

TEST_CASE("traffic class names") {
    CHECK(to_string(TrafficClass::Heavy) == "heavy");
    CHECK(traffic_class_from("light") == TrafficClass::Light);
    CHECK_FALSE(traffic_class_from("medium").has_value());
}
