#include <doctest.h>

#include <sstream>

#include "hacsim/report.hpp"
#include "hacsim/scenario.hpp"
#include "hacsim/simulation.hpp"

using namespace hacsim;

namespace {

ScenarioSpec short_preset(Preset p, SimTime horizon = 3600.0) {
    ScenarioSpec s = preset(p);
    s.horizon = horizon;
    s.failures.clear();
    return s;
}

std::size_t count_kind(const std::vector<Event>& events, EventKind kind) {
    std::size_t n = 0;
    for (const auto& e : events) n += e.kind == kind ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("build schedules every initial event") {
    ScenarioSpec s = short_preset(Preset::ActiveActive);
    s.failures = {{"n1", 100.0, 200.0}, {"n2", 300.0, std::nullopt}};
    const auto sim = build_simulation(s);
    const auto events = sim->simulator().pending_events();
    CHECK(count_kind(events, EventKind::FailureInject) == 2);
    CHECK(count_kind(events, EventKind::RepairInject) == 1);
    CHECK(count_kind(events, EventKind::Arrival) == 2);
    CHECK(count_kind(events, EventKind::HeartbeatTick) == 1);
    CHECK(count_kind(events, EventKind::MeasurementTick) == 1);
}

TEST_CASE("identical specs build identical queues") {
    const ScenarioSpec s = preset(Preset::IhacAPP);
    CHECK(build_simulation(s)->simulator().pending_events() == build_simulation(s)->simulator().pending_events());
}

TEST_CASE("invalid specs are refused") {
    ScenarioSpec s = short_preset(Preset::ActiveActive);
    s.nodes.clear();
    CHECK_THROWS_AS(build_simulation(s), ValidationError);
}

TEST_CASE("run ends at the horizon") {
    auto sim = build_simulation(preset(Preset::ActiveActive));
    const RunResult r = sim->run();
    CHECK(sim->simulator().now() == 43200.0);
    CHECK(r.horizon == 43200.0);
}

TEST_CASE("event counts repeat for a fixed seed") {
    const RunResult a = run_scenario(preset(Preset::ActiveActive));
    const RunResult b = run_scenario(preset(Preset::ActiveActive));
    CHECK(a.events_processed == b.events_processed);
    CHECK(a.events_processed > 0);
}

TEST_CASE("recorded events are in clock order") {
    SimulationOptions opts;
    opts.record_events = true;
    ScenarioSpec s = preset(Preset::ActivePassive);
    s.horizon = 31000.0;
    const RunResult r = run_scenario(s, opts);
    REQUIRE(r.events.size() == r.events_processed);
    for (std::size_t i = 1; i < r.events.size(); ++i) {
        REQUIRE(r.events[i - 1].at <= r.events[i].at);
        if (r.events[i - 1].at == r.events[i].at) REQUIRE(r.events[i - 1].seq < r.events[i].seq);
    }
}

TEST_CASE("requests are conserved per class") {
    for (const auto& info : all_presets()) {
        ScenarioSpec s = preset(info.preset);
        s.horizon = 31000.0;
        const RunResult r = run_scenario(s);
        for (auto cls : {TrafficClass::Heavy, TrafficClass::Light}) {
            const auto& c = r.counts(cls);
            CHECK(c.conserved());
            CHECK(c.arrivals > 0);
        }
    }
}

TEST_CASE("report basics for active-passive") {
    const MetricsReport rep = build_report(run_scenario(preset(Preset::ActivePassive)));
    CHECK(rep.scenario == "active-passive");
    REQUIRE(rep.failovers.size() == 1);
    const auto& f = rep.failovers[0];
    CHECK(f.failed_node == "n1");
    CHECK(f.promoted == std::optional<std::string>("n2"));
    CHECK(*f.t_failover == doctest::Approx(21608.0 - 21600.25));
    CHECK(*rep.failover_efficiency == doctest::Approx(1.0 / 7.75));
    CHECK(rep.system.failures == 1);
    CHECK(*rep.system.mttr == doctest::Approx(7.75));
    CHECK(rep.system.availability == doctest::Approx(1.0 - 7.75 / 43200.0));
    REQUIRE(rep.nodes.size() == 2);
    CHECK(*rep.nodes[0].availability.mttr == doctest::Approx(23400.0 - 21600.25));
    CHECK_FALSE(rep.nodes[1].availability.mtbf.has_value());
    CHECK(rep.weighted_availability >= 0.0);
    CHECK(rep.weighted_availability <= 1.0);
    CHECK(rep.rejections == 0);
    CHECK(rep.response_all.has_value());
    CHECK(rep.throughput.size() == 720);
    for (const auto& p : rep.delay) {
        CHECK(p.t_bucket >= 0.0);
        CHECK(p.t_bucket <= rep.horizon);
    }
}

TEST_CASE("delay without queueing equals the link delay") {
    const MetricsReport rep = build_report(run_scenario(short_preset(Preset::ActiveActive)));
    REQUIRE(rep.mean_delay.has_value());
    CHECK(*rep.mean_delay == doctest::Approx(0.00017));
    for (const auto& p : rep.delay) CHECK(p.value == doctest::Approx(0.00017));
}

TEST_CASE("weighted availability uses node groups") {
    ScenarioSpec s = short_preset(Preset::IhacGeneric, 1000.0);
    s.warmup_cut = 0.0;
    s.failures = {{"vm3", 100.0, 300.0}};
    s.blend = {0.25, 0.75};
    const MetricsReport rep = build_report(run_scenario(s));
    CHECK(rep.availability_onprem == 1.0);
    CHECK(rep.availability_cloud == doctest::Approx((0.8 + 1.0) / 2.0));
    CHECK(rep.weighted_availability == doctest::Approx(0.25 + 0.75 * 0.9));
}

TEST_CASE("report document spells out missing values") {
    const MetricsReport rep = build_report(run_scenario(short_preset(Preset::ActiveActive)));
    const std::string doc = report_json(rep);
    CHECK(doc.find("\"Unbounded\"") != std::string::npos);
    CHECK(doc.find("\"Undefined\"") != std::string::npos);
}

TEST_CASE("csv schemas") {
    ScenarioSpec s = short_preset(Preset::ActiveActive, 600.0);
    s.warmup_cut = 0.0;
    const RunResult run = run_scenario(s);
    const MetricsReport rep = build_report(run);
    std::ostringstream responses;
    write_responses_csv(responses, run);
    CHECK(responses.str().rfind("request_id,class,submitted_at,completed_at,response_time,served_by,outcome\n", 0) == 0);
    CHECK(responses.str().find(",n1,completed\n") != std::string::npos);
    CHECK(responses.str().find(",n2,completed\n") != std::string::npos);
    std::ostringstream series;
    write_series_csv(series, rep);
    CHECK(series.str().rfind("t_bucket,metric,value\n", 0) == 0);
    CHECK(series.str().find(",throughput,") != std::string::npos);
    CHECK(series.str().find(",traffic_sent,") != std::string::npos);
    CHECK(series.str().find('\r') == std::string::npos);
}

TEST_CASE("503s are recorded when overflow rejects") {
    ScenarioSpec s = short_preset(Preset::ActivePassive, 1000.0);
    s.warmup_cut = 0.0;
    s.failover.overflow_policy = OverflowPolicy::Reject503;
    s.failures = {{"n1", 100.5, std::nullopt}};
    const RunResult run = run_scenario(s);
    const MetricsReport rep = build_report(run);
    CHECK(rep.rejections > 0);
    for (const auto& r : run.log.responses) {
        if (r.outcome == Outcome::Rejected503) {
            CHECK(r.completed_at >= 103.0);
            CHECK(r.completed_at < 108.0);
        }
    }
    CHECK(rep.rejections_after_promotion == 0);
}
