#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hacsim/balancer.hpp"
#include "hacsim/cluster.hpp"
#include "hacsim/metrics.hpp"
#include "hacsim/workload.hpp"

namespace hacsim {

inline constexpr int kSchemaVersion = 1;
inline constexpr SimTime kTwelveHours = 43200.0;

struct FailureInjection {
    std::string node;
    SimTime fail_at = 0.0;
    std::optional<SimTime> repair_at;

    bool operator==(const FailureInjection&) const = default;
};

struct WorkloadSpec {
    std::optional<ClassWorkload> heavy;
    std::optional<ClassWorkload> light;

    const std::optional<ClassWorkload>& of(TrafficClass cls) const {
        return cls == TrafficClass::Heavy ? heavy : light;
    }

    bool operator==(const WorkloadSpec&) const = default;
};

/// Everything needed to reproduce one experiment.
struct ScenarioSpec {
    std::string name = "scenario";
    /// Free text, e.g. how the constants were obtained. Not used by the engine.
    std::string notes;
    SimTime horizon = kTwelveHours;
    std::uint64_t seed = 1;
    std::vector<NodeConfig> nodes;
    BalancerConfig balancer;
    WorkloadSpec workload;
    HeartbeatConfig heartbeat;
    FailoverPolicy failover;
    std::vector<FailureInjection> failures;
    double link_delay = 0.0;
    double warmup_cut = 0.0;
    WeightBlend blend;

    bool operator==(const ScenarioSpec&) const = default;

    /// Index of the node called `name`, if any.
    std::optional<NodeId> node_index(std::string_view name) const;
};

/// Malformed document: bad syntax (with a line) or a field of the wrong
/// shape (with its path).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, std::size_t line, const std::string& what);

    const std::string& field() const { return field_; }
    std::size_t line() const { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

/// Well-formed document that breaks a scenario invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class UnknownPreset : public std::invalid_argument {
public:
    explicit UnknownPreset(std::string_view name)
        : std::invalid_argument("unknown preset: " + std::string(name)) {}
};

/// Parses and validates a scenario document. Unknown keys are rejected.
ScenarioSpec load_scenario(std::string_view document);
ScenarioSpec load_scenario_file(const std::filesystem::path& path);

/// Canonical document; load_scenario(serialize(s)) == s.
std::string serialize(const ScenarioSpec& spec);

/// Throws ValidationError naming the first violated invariant.
void validate(const ScenarioSpec& spec);

/// Non-fatal remarks, e.g. weights configured for a policy that ignores them.
std::vector<std::string> scenario_warnings(const ScenarioSpec& spec);

/// FNV-1a of the canonical document, as 16 hex digits.
std::string spec_hash(const ScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Presets

enum class Preset : std::uint8_t { ActiveActive, ActivePassive, IhacGeneric, IhacAAP, IhacAPA, IhacAPP };

struct PresetInfo {
    Preset preset;
    std::string_view name;
    std::string_view summary;
};

std::span<const PresetInfo> all_presets();

/// Factor c applied to the shared preset workload: demands times c, arrival
/// rates divided by c. Fitted by tools/calibrate.
double preset_time_scale();

/// The preset workload at an arbitrary time scale.
WorkloadSpec preset_workload(double time_scale);
std::string_view preset_name(Preset preset);
std::optional<Preset> preset_from(std::string_view name);

ScenarioSpec preset(Preset which);
/// Throws UnknownPreset.
ScenarioSpec preset(std::string_view name);

/// Replaces the failure schedule with `count` random injections drawn from
/// the failure-jitter stream of `seed`. Each injection hits a random node at a
/// random time and is repaired after a random outage, so some overlap with
/// detection and promotion windows. Per-node intervals never overlap.
ScenarioSpec with_random_failures(ScenarioSpec spec, std::uint64_t seed, std::size_t count);

}  // namespace hacsim
