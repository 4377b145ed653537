#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hacsim/report.hpp"
#include "hacsim/scenario.hpp"

namespace hacsim {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// One self-check line of `validate`.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Single-node Poisson/Exponential run compared with W = 1/(mu - lambda).
std::vector<CheckResult> check_mm1(std::size_t arrivals = 1'000'000, double lambda = 0.5, double mu = 1.0,
                                   std::uint64_t seed = 1);

/// Random traces replayed against brute-force uptime accumulation.
std::vector<CheckResult> check_metrics_oracle(std::size_t traces = 50, std::uint64_t seed = 1);

/// Every preset replayed under random failure schedules: legal transitions
/// only and per-class request conservation.
std::vector<CheckResult> check_fsm(std::size_t seeds = 100, SimTime horizon = 3600.0);

/// Preset name or path to a scenario document.
ScenarioSpec resolve_scenario(const std::string& ref);

/// Mean and sample standard deviation of each scalar metric.
struct MetricSummary {
    std::string name;
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> stddev;
};

std::vector<MetricSummary> summarize(const std::vector<MetricsReport>& reports);

struct RunRequest {
    ScenarioSpec spec;
    unsigned replications = 1;
    std::filesystem::path out;
    bool emit_events = false;
    double bucket = 60.0;
};

/// Runs each replication (seed + index) and writes its artifacts plus a
/// summary. Returns the per-replication reports.
std::vector<MetricsReport> execute_run(const RunRequest& request);

/// Output root: HAC_SIM_OUT if set, else "out".
std::filesystem::path default_out_dir();

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hacsim
