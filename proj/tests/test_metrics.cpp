#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "hacsim/metrics.hpp"
#include "hacsim/sim_core.hpp"

using namespace hacsim;

TEST_CASE("mtbf") {
    // 1000 h of uptime with four zero-length repairs.
    const double hour = 3600.0;
    FailureTrace t{{{100 * hour, 100 * hour}, {200 * hour, 200 * hour}, {300 * hour, 300 * hour},
                    {400 * hour, 400 * hour}},
                   1000 * hour};
    CHECK(*mtbf(t) == 250 * hour);
    CHECK_FALSE(mtbf(FailureTrace{{}, 500.0}).has_value());
    CHECK(*mtbf(FailureTrace{{{40.0, 60.0}}, 100.0}) == 80.0);
}

TEST_CASE("mttr") {
    CHECK(*mttr(FailureTrace{{{40.0, 60.0}, {80.0, 90.0}}, 100.0}) == 15.0);
    CHECK_FALSE(mttr(FailureTrace{{}, 100.0}).has_value());

    const FailureTrace open{{{70.0, std::nullopt}}, 100.0};
    CHECK_FALSE(mttr(open).has_value());
    CHECK(trace_availability(open) == doctest::Approx(0.7));
    CHECK(total_downtime(open) == 30.0);
}

TEST_CASE("availability") {
    CHECK(availability(99.0, 1.0) == doctest::Approx(0.99));
    CHECK(availability(5.0, 0.0) == 1.0);
    const FailureTrace t{{{40.0, 60.0}}, 100.0};
    CHECK(availability(*mtbf(t), *mttr(t)) == doctest::Approx(0.8));
    CHECK(trace_availability(t) == doctest::Approx(0.8));
    CHECK_THROWS_AS(availability(0.0, 0.0), DegenerateInput);
    CHECK_THROWS_AS(availability(-1.0, 2.0), DegenerateInput);
}

TEST_CASE("closed traces satisfy the availability identity") {
    RngStream rng(3, "identity");
    for (int i = 0; i < 200; ++i) {
        FailureTrace t;
        t.horizon = 100.0 + rng.draw_uniform() * 1e5;
        double cursor = 0.0;
        const int n = 1 + static_cast<int>(rng.draw_uniform() * 10);
        for (int k = 0; k < n; ++k) {
            const double start = cursor + rng.draw_uniform() * t.horizon / (2.0 * n);
            const double end = start + rng.draw_uniform() * t.horizon / (2.0 * n);
            t.downs.push_back({start, end});
            cursor = end;
        }
        check_trace(t);
        CHECK(std::abs(availability(*mtbf(t), *mttr(t)) - trace_availability(t)) <= 1e-9);
    }
}

TEST_CASE("trace validation") {
    CHECK_THROWS(check_trace(FailureTrace{{{10.0, 20.0}, {15.0, 30.0}}, 100.0}));
    CHECK_THROWS(check_trace(FailureTrace{{{10.0, std::nullopt}, {15.0, 30.0}}, 100.0}));
    CHECK_THROWS(check_trace(FailureTrace{{{10.0, 120.0}}, 100.0}));
    CHECK_THROWS(check_trace(FailureTrace{{}, 0.0}));
    CHECK_NOTHROW(check_trace(FailureTrace{{{10.0, 20.0}, {20.0, std::nullopt}}, 100.0}));
}

TEST_CASE("weighted availability") {
    CHECK(weighted_availability({1.0, 0.0}, 0.9, 0.1) == doctest::Approx(0.9));
    CHECK(weighted_availability({0.5, 0.5}, 0.9, 0.95) == doctest::Approx(0.925));
    CHECK_THROWS_AS(weighted_availability({0.6, 0.5}, 0.9, 0.9), WeightSumViolation);

    RngStream rng(4, "wa");
    for (int i = 0; i < 100; ++i) {
        const double a = rng.draw_uniform();
        const double on = rng.draw_uniform();
        const double cloud = rng.draw_uniform();
        const double wa = weighted_availability({a, 1.0 - a}, on, cloud);
        CHECK(wa >= std::min(on, cloud) - 1e-12);
        CHECK(wa <= std::max(on, cloud) + 1e-12);
    }
}

TEST_CASE("utilization") {
    CHECK(utilization({{1.0, 1.0, 1.0}, {3.0, 7.0, 2.0}}) == doctest::Approx(1.0));
    CHECK(utilization({{1.0, 0.0}, {4.0, 4.0}}) == doctest::Approx(0.5));
    CHECK(utilization({{0.8, 0.2}, {10.0, 30.0}}) == doctest::Approx(0.35));
    CHECK_THROWS_AS(utilization({{1.0, 1.0}, {0.0, 0.0}}), DegenerateInput);
    CHECK_THROWS_AS(utilization({{1.0}, {1.0, 2.0}}), DegenerateInput);

    RngStream rng(8, "u");
    for (int i = 0; i < 100; ++i) {
        UtilizationSample s;
        for (int k = 0; k < 4; ++k) {
            s.weights.push_back(rng.draw_uniform());
            s.resources.push_back(0.01 + rng.draw_uniform());
        }
        const double u = utilization(s);
        CHECK(u >= *std::min_element(s.weights.begin(), s.weights.end()) - 1e-12);
        CHECK(u <= *std::max_element(s.weights.begin(), s.weights.end()) + 1e-12);
    }
}

TEST_CASE("failover efficiency") {
    CHECK(failover_efficiency(1.0) == 1.0);
    CHECK(failover_efficiency(2.0) == 0.5);
    CHECK(failover_efficiency(2.8 + 5.0) == doctest::Approx(0.1282).epsilon(1e-3));
    CHECK(failover_efficiency(3.0) > failover_efficiency(4.0));
    CHECK_THROWS_AS(failover_efficiency(0.0), DegenerateInput);
    CHECK_THROWS_AS(failover_efficiency(-1.0), DegenerateInput);
}

TEST_CASE("response stats") {
    const std::vector<double> xs{1.0, 2.0, 3.0};
    const auto s = response_stats(xs);
    CHECK(s.mean == 2.0);
    CHECK(s.p50 == 2.0);
    CHECK(s.max == 3.0);
    CHECK(s.count == 3);

    const std::vector<double> one{4.5};
    const auto t = response_stats(one);
    CHECK(t.mean == 4.5);
    CHECK(t.p50 == 4.5);
    CHECK(t.p95 == 4.5);
    CHECK(t.max == 4.5);

    CHECK_THROWS_AS(response_stats(std::vector<double>{}), EmptySample);
}

TEST_CASE("nearest rank quantiles") {
    std::vector<double> xs(100);
    std::iota(xs.begin(), xs.end(), 1.0);
    CHECK(nearest_rank(xs, 0.95) == 95.0);
    CHECK(nearest_rank(xs, 0.5) == 50.0);
    CHECK(nearest_rank(xs, 0.0) == 1.0);
    CHECK(nearest_rank(xs, 1.0) == 100.0);
    const std::vector<double> four{10.0, 20.0, 30.0, 40.0};
    CHECK(nearest_rank(four, 0.5) == 20.0);
    CHECK(nearest_rank(four, 0.51) == 30.0);
}

TEST_CASE("response stats over records filter by class, outcome and warm-up") {
    std::vector<ResponseRecord> rs;
    const auto add = [&](TrafficClass cls, SimTime at, double rt, Outcome o) {
        ResponseRecord r;
        r.cls = cls;
        r.submitted_at = at;
        r.response_time = rt;
        r.completed_at = at + rt;
        r.outcome = o;
        rs.push_back(r);
    };
    add(TrafficClass::Heavy, 5.0, 100.0, Outcome::Completed);
    add(TrafficClass::Heavy, 20.0, 4.0, Outcome::Completed);
    add(TrafficClass::Light, 20.0, 2.0, Outcome::Completed);
    add(TrafficClass::Light, 21.0, 0.0, Outcome::Rejected503);
    CHECK(response_stats(rs).count == 3);
    CHECK(response_stats(rs, std::nullopt, 10.0).mean == 3.0);
    CHECK(response_stats(rs, TrafficClass::Heavy).mean == 52.0);
    CHECK(response_stats(rs, TrafficClass::Light, 10.0).max == 2.0);
    CHECK_THROWS_AS(response_stats(rs, TrafficClass::Light, 50.0), EmptySample);
}

TEST_CASE("mean equals a brute-force recomputation") {
    RngStream rng(12, "mean");
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) xs.push_back(-std::log1p(-rng.draw_uniform()));
    double brute = 0.0;
    for (double x : xs) brute += x;
    CHECK(response_stats(xs).mean == brute / 10000.0);
}

TEST_CASE("time series") {
    std::vector<ResponseRecord> rs;
    for (int i = 0; i < 60; ++i) {
        ResponseRecord r;
        r.completed_at = i + 0.5;
        r.forwarded_at = i + 0.25;
        r.delay = 0.00017;
        rs.push_back(r);
    }
    const TrafficLog log{{}, rs};
    const auto tp = timeseries(log, SeriesMetric::Throughput, 1.0);
    REQUIRE(tp.size() == 60);
    for (const auto& p : tp) CHECK(p.value == 1.0);

    const auto delay = timeseries(log, SeriesMetric::Delay, 10.0);
    REQUIRE(delay.size() == 6);
    for (const auto& p : delay) CHECK(p.value == doctest::Approx(0.00017));

    CHECK(timeseries(TrafficLog{}, SeriesMetric::Throughput, 1.0).empty());
    CHECK(timeseries(TrafficLog{}, SeriesMetric::Delay, 1.0, 10.0).empty());
    const auto padded = timeseries(TrafficLog{}, SeriesMetric::TrafficSent, 1.0, 10.0);
    CHECK(padded.size() == 10);
    CHECK_THROWS(timeseries(log, SeriesMetric::Throughput, 0.0));

    for (const auto& p : timeseries(log, SeriesMetric::TrafficReceived, 7.0, 60.0)) {
        CHECK(p.t_bucket >= 0.0);
        CHECK(p.t_bucket <= 60.0);
    }
}
