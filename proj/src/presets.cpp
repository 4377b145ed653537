#include "hacsim/scenario.hpp"

#include <array>

#include <fmt/format.h>

namespace hacsim {

namespace {

// Calibrated workload. The base shape is scaled in time by kTimeScale
// (demands multiplied, rates divided), which scales response times by the
// same factor. tools/calibrate fits kTimeScale so the active-active preset
// averages a five second response over five replications.
constexpr double kTimeScale = 3.206;
constexpr double kHeavyRate = 0.04;
constexpr double kHeavyDemand = 8.0;
constexpr double kLightRate = 1.2;
constexpr double kLightDemand = 0.5;

constexpr std::uint64_t kPresetSeed = 42;
constexpr SimTime kWarmupCut = 600.0;
constexpr SimTime kPrimaryFailAt = 21600.25;
constexpr SimTime kPrimaryRepairAt = 23400.0;

constexpr std::array<PresetInfo, 6> kPresets{{
    {Preset::ActiveActive, "active-active", "two Active nodes behind a least-connection balancer"},
    {Preset::ActivePassive, "active-passive", "one Active node and one PassiveWarm standby; the primary fails mid-run"},
    {Preset::IhacGeneric, "ihac-generic",
     "two hosts with two VMs each: one Active VM and three SemiActive VMs taking light traffic"},
    {Preset::IhacAAP, "ihac-aap", "two Active nodes and one PassiveWarm standby; one Active fails mid-run"},
    {Preset::IhacAPA, "ihac-apa",
     "one Active node and one PassiveWarm standby under a 0.5 s heartbeat; the primary fails mid-run"},
    {Preset::IhacAPP, "ihac-app",
     "one Active node, one PassiveWarm and one PassiveCold; the warm standby dies silently before the primary "
     "fails, so the cold standby takes over"},
}};

NodeConfig node(std::string name, NodeStatus role, NodeGroup group = NodeGroup::OnPrem) {
    NodeConfig n;
    n.name = std::move(name);
    n.role = role;
    n.service_rate = 1.0;
    n.group = group;
    return n;
}

ScenarioSpec base(Preset which) {
    ScenarioSpec s;
    s.name = std::string(preset_name(which));
    s.notes = fmt::format(
        "Workload: heavy Poisson({}/c) with Exponential({}*c) demand, light Poisson({}/c) with "
        "Exponential({}*c) demand, c = {}. c was fitted by tools/calibrate so that active-active "
        "averages 5 s per response.",
        kHeavyRate, kHeavyDemand, kLightRate, kLightDemand, kTimeScale);
    s.horizon = kTwelveHours;
    s.seed = kPresetSeed;
    s.balancer.policy = BalancerPolicy::LeastConnection;
    s.workload = preset_workload(kTimeScale);
    s.heartbeat = HeartbeatConfig{1.0, 3};
    s.failover = FailoverPolicy{5.0, 30.0, OverflowPolicy::Queue};
    s.warmup_cut = kWarmupCut;
    s.blend = WeightBlend{0.5, 0.5};
    return s;
}

}  // namespace

std::span<const PresetInfo> all_presets() { return kPresets; }

double preset_time_scale() { return kTimeScale; }

WorkloadSpec preset_workload(double time_scale) {
    WorkloadSpec w;
    w.heavy = ClassWorkload{ArrivalProcess::poisson(kHeavyRate / time_scale),
                            ServiceDemand::exponential(kHeavyDemand * time_scale)};
    w.light = ClassWorkload{ArrivalProcess::poisson(kLightRate / time_scale),
                            ServiceDemand::exponential(kLightDemand * time_scale)};
    return w;
}

std::string_view preset_name(Preset which) {
    for (const auto& p : kPresets) {
        if (p.preset == which) return p.name;
    }
    return "unknown";
}

std::optional<Preset> preset_from(std::string_view name) {
    for (const auto& p : kPresets) {
        if (p.name == name) return p.preset;
    }
    return std::nullopt;
}

ScenarioSpec preset(Preset which) {
    ScenarioSpec s = base(which);
    switch (which) {
        case Preset::ActiveActive:
            s.nodes = {node("n1", NodeStatus::Active), node("n2", NodeStatus::Active)};
            s.link_delay = 0.00017;
            break;
        case Preset::ActivePassive:
            s.nodes = {node("n1", NodeStatus::Active), node("n2", NodeStatus::PassiveWarm)};
            s.failures = {FailureInjection{"n1", kPrimaryFailAt, kPrimaryRepairAt}};
            s.link_delay = 0.00020;
            break;
        case Preset::IhacGeneric:
            s.nodes = {node("vm1", NodeStatus::Active, NodeGroup::OnPrem),
                       node("vm2", NodeStatus::SemiActive, NodeGroup::OnPrem),
                       node("vm3", NodeStatus::SemiActive, NodeGroup::Cloud),
                       node("vm4", NodeStatus::SemiActive, NodeGroup::Cloud)};
            s.link_delay = 0.00016;
            break;
        case Preset::IhacAAP:
            s.nodes = {node("a1", NodeStatus::Active, NodeGroup::OnPrem),
                       node("a2", NodeStatus::Active, NodeGroup::Cloud),
                       node("p1", NodeStatus::PassiveWarm, NodeGroup::Cloud)};
            s.failures = {FailureInjection{"a1", kPrimaryFailAt, kPrimaryRepairAt}};
            s.link_delay = 0.00016;
            break;
        case Preset::IhacAPA:
            s.nodes = {node("a1", NodeStatus::Active, NodeGroup::OnPrem),
                       node("p1", NodeStatus::PassiveWarm, NodeGroup::Cloud)};
            s.heartbeat = HeartbeatConfig{0.5, 3};
            s.failures = {FailureInjection{"a1", kPrimaryFailAt, kPrimaryRepairAt}};
            s.link_delay = 0.00016;
            break;
        case Preset::IhacAPP:
            s.nodes = {node("a1", NodeStatus::Active, NodeGroup::OnPrem),
                       node("p1", NodeStatus::PassiveWarm, NodeGroup::Cloud),
                       node("p2", NodeStatus::PassiveCold, NodeGroup::Cloud)};
            s.failures = {FailureInjection{"p1", 21000.0, 30000.0},
                          FailureInjection{"a1", kPrimaryFailAt, kPrimaryRepairAt}};
            s.link_delay = 0.00016;
            break;
    }
    return s;
}

ScenarioSpec preset(std::string_view name) {
    if (auto p = preset_from(name)) return preset(*p);
    throw UnknownPreset(name);
}

}  // namespace hacsim
