#include "hacsim/balancer.hpp"

#include <algorithm>
#include <numeric>

namespace hacsim {

std::string_view to_string(BalancerPolicy policy) {
    switch (policy) {
        case BalancerPolicy::LeastConnection: return "LeastConnection";
        case BalancerPolicy::ServerLoad: return "ServerLoad";
        case BalancerPolicy::RandomSelection: return "RandomSelection";
    }
    return "Unknown";
}

std::optional<BalancerPolicy> balancer_policy_from(std::string_view text) {
    if (text == "LeastConnection") return BalancerPolicy::LeastConnection;
    if (text == "ServerLoad") return BalancerPolicy::ServerLoad;
    if (text == "RandomSelection") return BalancerPolicy::RandomSelection;
    return std::nullopt;
}

NodeId select_least_connection(std::span<const NodeLoadSnapshot> candidates) {
    if (candidates.empty()) throw EmptyCandidateSet();
    const auto best = std::min_element(candidates.begin(), candidates.end(),
                                       [](const NodeLoadSnapshot& a, const NodeLoadSnapshot& b) {
                                           if (a.active_connections != b.active_connections)
                                               return a.active_connections < b.active_connections;
                                           return a.id < b.id;
                                       });
    return best->id;
}

NodeId select_server_load(std::span<const NodeLoadSnapshot> candidates) {
    if (candidates.empty()) throw EmptyCandidateSet();
    const auto best = std::min_element(candidates.begin(), candidates.end(),
                                       [](const NodeLoadSnapshot& a, const NodeLoadSnapshot& b) {
                                           if (a.load != b.load) return a.load < b.load;
                                           if (a.active_connections != b.active_connections)
                                               return a.active_connections < b.active_connections;
                                           return a.id < b.id;
                                       });
    return best->id;
}

NodeId select_random(std::span<const NodeLoadSnapshot> candidates,
                     std::span<const double> weights, RngStream& rng) {
    if (candidates.empty()) throw EmptyCandidateSet();
    if (weights.empty()) return select_random(candidates, rng);
    if (weights.size() != candidates.size()) {
        throw DegenerateWeights("weight count does not match candidate count");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw DegenerateWeights("negative selection weight");
        total += w;
    }
    if (total <= 0.0) throw DegenerateWeights("all selection weights are zero");

    const double target = rng.draw_uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        acc += weights[i];
        if (target < acc) return candidates[i].id;
    }
    // Rounding left target == total.
    return candidates[last_positive].id;
}

NodeId select_random(std::span<const NodeLoadSnapshot> candidates, RngStream& rng) {
    if (candidates.empty()) throw EmptyCandidateSet();
    const double u = rng.draw_uniform();
    auto idx = static_cast<std::size_t>(u * static_cast<double>(candidates.size()));
    return candidates[std::min(idx, candidates.size() - 1)].id;
}

// ---------------------------------------------------------------------------

void BusyWindow::start(SimTime at) {
    if (!busy_since_) busy_since_ = at;
}

void BusyWindow::stop(SimTime at) {
    if (!busy_since_) return;
    if (at > *busy_since_) {
        periods_.emplace_back(*busy_since_, at);
        closed_total_ += at - *busy_since_;
    }
    busy_since_.reset();
    while (!periods_.empty() && periods_.front().second <= at - window_) periods_.pop_front();
}

double BusyWindow::load(SimTime now) const {
    const SimTime from = now - window_;
    double busy = 0.0;
    for (const auto& [start, end] : periods_) {
        if (end <= from) continue;
        busy += std::min(end, now) - std::max(start, from);
    }
    if (busy_since_ && now > *busy_since_) busy += now - std::max(*busy_since_, from);
    return std::clamp(busy / window_, 0.0, 1.0);
}

double BusyWindow::total_busy(SimTime now) const {
    double total = closed_total_;
    if (busy_since_ && now > *busy_since_) total += now - *busy_since_;
    return total;
}

}  // namespace hacsim
