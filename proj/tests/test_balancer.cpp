#include <doctest.h>

#include <array>
#include <vector>

#include "hacsim/balancer.hpp"

using namespace hacsim;

namespace {

std::vector<NodeLoadSnapshot> with_connections(std::vector<std::size_t> conns) {
    std::vector<NodeLoadSnapshot> out;
    for (std::size_t i = 0; i < conns.size(); ++i) out.push_back({static_cast<NodeId>(i), conns[i], 0.0});
    return out;
}

}  // namespace

TEST_CASE("least connection") {
    CHECK(select_least_connection(with_connections({3, 1, 2})) == 1);
    CHECK(select_least_connection(with_connections({2, 2, 5})) == 0);
    CHECK(select_least_connection(with_connections({4})) == 0);
    CHECK_THROWS_AS(select_least_connection({}), EmptyCandidateSet);

    // Ties go to the lowest id even when listed out of order.
    const std::vector<NodeLoadSnapshot> shuffled{{7, 1, 0.0}, {3, 1, 0.0}, {5, 2, 0.0}};
    CHECK(select_least_connection(shuffled) == 3);
}

TEST_CASE("server load") {
    const std::vector<NodeLoadSnapshot> a{{0, 0, 0.9}, {1, 0, 0.4}, {2, 0, 0.7}};
    CHECK(select_server_load(a) == 1);
    const std::vector<NodeLoadSnapshot> b{{0, 4, 0.5}, {1, 2, 0.5}};
    CHECK(select_server_load(b) == 1);
    const std::vector<NodeLoadSnapshot> c{{0, 0, 0.0}, {1, 0, 0.0}, {2, 0, 0.0}};
    CHECK(select_server_load(c) == 0);
    CHECK_THROWS_AS(select_server_load({}), EmptyCandidateSet);
}

TEST_CASE("selection is a pure function of the snapshot") {
    const auto snap = with_connections({5, 2, 2, 9});
    CHECK(select_least_connection(snap) == select_least_connection(snap));
    CHECK(select_server_load(snap) == select_server_load(snap));
}

TEST_CASE("random selection frequencies") {
    const auto two = with_connections({0, 0});
    RngStream rng(42, StreamId::BalancerRandom);
    std::array<int, 2> hits{};
    for (int i = 0; i < 100000; ++i) ++hits[select_random(two, rng)];
    CHECK(std::abs(hits[0] / 100000.0 - 0.5) <= 0.01);

    const std::vector<double> w31{3.0, 1.0};
    hits = {};
    for (int i = 0; i < 100000; ++i) ++hits[select_random(two, w31, rng)];
    CHECK(std::abs(hits[0] / 100000.0 - 0.75) <= 0.01);
    CHECK(std::abs(hits[1] / 100000.0 - 0.25) <= 0.01);

    const std::vector<double> w10{1.0, 0.0};
    for (int i = 0; i < 1000; ++i) REQUIRE(select_random(two, w10, rng) == 0);
}

TEST_CASE("random selection consumes exactly one draw per call") {
    const auto three = with_connections({0, 0, 0});
    const std::vector<double> w{1.0, 2.0, 3.0};
    RngStream rng(1, "budget");
    select_random(three, rng);
    CHECK(rng.draws() == 1);
    select_random(three, w, rng);
    CHECK(rng.draws() == 2);
}

TEST_CASE("random selection maps the draw onto cumulative weights") {
    RngStream probe(9, "map");
    const double u = probe.draw_uniform();
    RngStream rng(9, "map");
    const auto three = with_connections({0, 0, 0});
    const std::vector<double> w{1.0, 2.0, 3.0};
    const double target = u * 6.0;
    const NodeId expected = target < 1.0 ? 0 : (target < 3.0 ? 1 : 2);
    CHECK(select_random(three, w, rng) == expected);
}

TEST_CASE("degenerate weights") {
    const auto two = with_connections({0, 0});
    RngStream rng(1, "w");
    const std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(select_random(two, zeros, rng), DegenerateWeights);
    const std::vector<double> negative{-1.0, 2.0};
    CHECK_THROWS_AS(select_random(two, negative, rng), DegenerateWeights);
    const std::vector<double> short_list{1.0};
    CHECK_THROWS_AS(select_random(two, short_list, rng), DegenerateWeights);
    CHECK_THROWS_AS(select_random({}, rng), EmptyCandidateSet);
}

TEST_CASE("busy window load") {
    BusyWindow w(10.0);
    CHECK(w.load(0.0) == 0.0);
    w.start(0.0);
    CHECK(w.load(5.0) == doctest::Approx(0.5));
    w.stop(5.0);
    CHECK(w.load(10.0) == doctest::Approx(0.5));
    CHECK(w.load(12.0) == doctest::Approx(0.3));
    w.start(12.0);
    CHECK(w.load(20.0) == doctest::Approx(0.8));
    CHECK(w.load(40.0) == doctest::Approx(1.0));
    w.stop(40.0);
    CHECK(w.total_busy(40.0) == doctest::Approx(33.0));
    CHECK(w.load(45.0) == doctest::Approx(0.5));
}

TEST_CASE("policy names round-trip") {
    for (auto p : {BalancerPolicy::LeastConnection, BalancerPolicy::ServerLoad, BalancerPolicy::RandomSelection}) {
        CHECK(balancer_policy_from(to_string(p)) == p);
    }
    CHECK_FALSE(balancer_policy_from("RoundRobin").has_value());
}
