#include "hacsim/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

namespace hacsim {

using ordered_json = nlohmann::ordered_json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

CheckResult check(std::string name, bool passed, std::string detail) {
    return CheckResult{std::move(name), passed, std::move(detail)};
}

ScenarioSpec mm1_spec(std::size_t arrivals, double lambda, double mu, std::uint64_t seed) {
    ScenarioSpec s;
    s.name = "mm1";
    s.seed = seed;
    s.horizon = static_cast<double>(arrivals) / lambda;
    s.nodes = {NodeConfig{"server", NodeStatus::Active, mu, NodeGroup::OnPrem, std::nullopt, std::nullopt}};
    s.workload.heavy = ClassWorkload{ArrivalProcess::poisson(lambda), ServiceDemand::exponential(1.0)};
    // No failures are injected, so a single heartbeat tick is enough.
    s.heartbeat.interval = s.horizon;
    return s;
}

ordered_json manifest_json(const ScenarioSpec& spec, unsigned replication) {
    ordered_json j;
    j["scenario"] = spec.name;
    j["spec_hash"] = spec_hash(spec);
    j["seed"] = spec.seed;
    j["replication"] = replication;
    j["tool_version"] = kToolVersion;
    return j;
}

ordered_json summary_json(const std::string& name, const std::vector<std::uint64_t>& seeds,
                          const std::vector<MetricSummary>& summary) {
    ordered_json j;
    j["scenario"] = name;
    j["replications"] = seeds.size();
    j["seeds"] = seeds;
    ordered_json metrics;
    for (const auto& m : summary) {
        metrics[m.name] = {{"n", m.n},
                           {"mean", m.mean},
                           {"stddev", m.stddev ? ordered_json(*m.stddev) : ordered_json(nullptr)}};
    }
    j["metrics"] = std::move(metrics);
    return j;
}

std::optional<double> summary_value(const std::vector<MetricSummary>& summary, std::string_view name) {
    for (const auto& m : summary) {
        if (m.name == name) return m.mean;
    }
    return std::nullopt;
}

std::string cell(std::optional<double> v, int precision = 4) {
    return v ? fmt::format("{:.{}f}", *v, precision) : std::string("-");
}

std::string delta(std::optional<double> v, std::optional<double> base) {
    if (!v || !base || *base == 0.0) return "-";
    return fmt::format("{:+.1f}%", (*v - *base) / *base * 100.0);
}

int print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
    bool ok = true;
    for (const auto& c : checks) {
        out << fmt::format("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
        ok = ok && c.passed;
    }
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

std::vector<CheckResult> check_mm1(std::size_t arrivals, double lambda, double mu, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioSpec spec = mm1_spec(arrivals, lambda, mu, seed);
    SimulationOptions opts;
    opts.bucket = spec.horizon;
    const RunResult run = run_scenario(spec, opts);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const ResponseStats stats = response_stats(run.log.responses);
    const double expected = 1.0 / (mu - lambda);
    const double rel = std::abs(stats.mean - expected) / expected;
    return {
        check("mm1 mean response", rel <= 0.05,
              fmt::format("{} arrivals, mean {:.4f} s vs 1/(mu-lambda) = {:.4f} s ({:.2f}% off)",
                          run.log.arrivals.size(), stats.mean, expected, rel * 100.0)),
        check("mm1 runtime", seconds < 30.0, fmt::format("{:.2f} s wall clock", seconds)),
    };
}

std::vector<CheckResult> check_metrics_oracle(std::size_t traces, std::uint64_t seed) {
    std::vector<CheckResult> out;

    // Bundled traces with known answers.
    {
        const FailureTrace t{{{40.0, 60.0}}, 100.0};
        const double a = availability(*mtbf(t), *mttr(t));
        out.push_back(check("bundled single outage", *mtbf(t) == 80.0 && *mttr(t) == 20.0 &&
                                                          std::abs(a - 0.8) <= 1e-9 &&
                                                          std::abs(trace_availability(t) - 0.8) <= 1e-9,
                            fmt::format("mtbf {} mttr {} A {}", *mtbf(t), *mttr(t), a)));
    }
    {
        const FailureTrace t{{{40.0, 60.0}, {80.0, std::nullopt}}, 100.0};
        const bool ok = *mttr(t) == 20.0 && std::abs(trace_availability(t) - 0.6) <= 1e-9 && *mtbf(t) == 30.0;
        out.push_back(check("bundled open outage", ok,
                            fmt::format("mttr {} (open outage excluded), A {}", *mttr(t), trace_availability(t))));
    }

    RngStream rng(seed, "metrics-oracle");
    std::size_t worst_index = 0;
    double worst = 0.0;
    bool exact = true;
    for (std::size_t i = 0; i < traces; ++i) {
        const auto horizon = 1000 + static_cast<long>(rng.draw_uniform() * 19000.0);
        const auto failures = static_cast<long>(rng.draw_uniform() * 9.0);
        FailureTrace trace;
        trace.horizon = static_cast<double>(horizon);
        long cursor = 0;
        for (long k = 0; k < failures; ++k) {
            const long up = 1 + static_cast<long>(rng.draw_uniform() * static_cast<double>(horizon / (failures + 1)));
            const long down = 1 + static_cast<long>(rng.draw_uniform() * 50.0);
            if (cursor + up + down > horizon) break;
            trace.downs.push_back(DownInterval{static_cast<double>(cursor + up), static_cast<double>(cursor + up + down)});
            cursor += up + down;
        }

        // Brute force: walk the horizon one second at a time.
        std::vector<bool> is_down(static_cast<std::size_t>(horizon), false);
        for (const auto& d : trace.downs) {
            for (auto s = static_cast<long>(d.start); s < static_cast<long>(*d.end); ++s) {
                is_down[static_cast<std::size_t>(s)] = true;
            }
        }
        long up_seconds = 0;
        for (bool d : is_down) up_seconds += d ? 0 : 1;
        const double brute = static_cast<double>(up_seconds) / trace.horizon;

        double hand_down = 0.0;
        for (const auto& d : trace.downs) hand_down += *d.end - d.start;
        const auto n = static_cast<double>(trace.downs.size());

        const auto f_mtbf = mtbf(trace);
        const auto f_mttr = mttr(trace);
        double a = 1.0;
        if (f_mtbf) {
            a = availability(*f_mtbf, *f_mttr);
            exact = exact && *f_mtbf == (trace.horizon - hand_down) / n && *f_mttr == hand_down / n;
        } else {
            exact = exact && trace.downs.empty() && !f_mttr;
        }
        const double err = std::abs(a - brute);
        if (err > worst) {
            worst = err;
            worst_index = i;
        }
    }
    out.push_back(check("random traces availability", worst <= 1e-9,
                        fmt::format("{} traces, worst |A - uptime/T| = {:.3g} (trace {})", traces, worst, worst_index)));
    out.push_back(check("random traces mtbf/mttr", exact, "MTBF and MTTR equal hand accumulation"));
    return out;
}

std::vector<CheckResult> check_fsm(std::size_t seeds, SimTime horizon) {
    std::vector<CheckResult> out;
    for (const auto& info : all_presets()) {
        std::size_t illegal = 0;
        std::size_t unconserved = 0;
        std::size_t transitions = 0;
        std::size_t errors = 0;
        std::string first_error;
        for (std::size_t s = 0; s < seeds; ++s) {
            ScenarioSpec spec = preset(info.preset);
            spec.horizon = horizon;
            spec.seed = s;
            spec.warmup_cut = std::min(spec.warmup_cut, horizon / 2.0);
            spec = with_random_failures(std::move(spec), s, 2 * spec.nodes.size());
            try {
                const RunResult run = run_scenario(spec);
                for (const auto& t : run.log.transitions) {
                    ++transitions;
                    if (!is_legal_transition(t.from, t.to)) ++illegal;
                }
                for (const auto& c : run.classes) {
                    if (!c.conserved()) ++unconserved;
                }
            } catch (const std::exception& e) {
                if (errors++ == 0) first_error = fmt::format("seed {}: {}", s, e.what());
            }
        }
        const bool ok = illegal == 0 && unconserved == 0 && errors == 0;
        std::string detail = fmt::format("{} seeds, {} transitions, {} illegal, {} unconserved classes, {} errors",
                                          seeds, transitions, illegal, unconserved, errors);
        if (!first_error.empty()) detail += " (" + first_error + ")";
        out.push_back(check(fmt::format("fsm {}", info.name), ok, detail));
    }

    // A lone Active node with nothing to promote.
    ScenarioSpec lone;
    lone.name = "no-passives";
    lone.horizon = 600.0;
    lone.nodes = {NodeConfig{"solo", NodeStatus::Active, 1.0, NodeGroup::OnPrem, std::nullopt, std::nullopt}};
    lone.workload.light = ClassWorkload{ArrivalProcess::poisson(0.5), ServiceDemand::exponential(1.0)};
    lone.failures = {FailureInjection{"solo", 100.0, std::nullopt}};
    const RunResult run = run_scenario(lone);
    const bool failed = run.nodes[0].final_status == NodeStatus::Failed;
    const bool no_promotion = run.log.failovers.size() == 1 && !run.log.failovers[0].promoted &&
                              run.log.failovers[0].promotion_attempts == 0;
    out.push_back(check("fsm empty passive set", failed && no_promotion,
                        fmt::format("final status {}, {} failover record(s), promoted: {}",
                                    to_string(run.nodes[0].final_status), run.log.failovers.size(),
                                    no_promotion ? "none" : "yes")));
    return out;
}

ScenarioSpec resolve_scenario(const std::string& ref) {
    if (preset_from(ref)) return preset(ref);
    if (std::filesystem::exists(ref)) return load_scenario_file(ref);
    throw UnknownPreset(ref);
}

std::vector<MetricSummary> summarize(const std::vector<MetricsReport>& reports) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> values;
    for (const auto& r : reports) {
        for (const auto& [name, v] : scalar_metrics(r)) {
            auto [it, inserted] = values.try_emplace(name);
            if (inserted) order.push_back(name);
            it->second.push_back(v);
        }
    }
    std::vector<MetricSummary> out;
    for (const auto& name : order) {
        const auto& xs = values[name];
        MetricSummary m;
        m.name = name;
        m.n = xs.size();
        double sum = 0.0;
        for (double x : xs) sum += x;
        m.mean = sum / static_cast<double>(m.n);
        if (m.n > 1) {
            double ss = 0.0;
            for (double x : xs) ss += (x - m.mean) * (x - m.mean);
            m.stddev = std::sqrt(ss / static_cast<double>(m.n - 1));
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("HAC_SIM_OUT"); env != nullptr && *env != '\0') return env;
    return "out";
}

std::vector<MetricsReport> execute_run(const RunRequest& request) {
    validate(request.spec);
    const std::filesystem::path root = request.out / request.spec.name;
    std::vector<MetricsReport> reports;
    std::vector<std::uint64_t> seeds;
    for (unsigned i = 0; i < request.replications; ++i) {
        ScenarioSpec spec = request.spec;
        spec.seed = request.spec.seed + i;
        SimulationOptions opts;
        opts.bucket = request.bucket;
        opts.record_events = request.emit_events;
        const RunResult run = run_scenario(spec, opts);
        MetricsReport report = build_report(run);

        const std::filesystem::path dir = root / fmt::format("rep-{:03}", i);
        std::filesystem::create_directories(dir);
        write_file(dir / "report.json", report_json(report));
        std::ostringstream responses;
        write_responses_csv(responses, run);
        write_file(dir / "responses.csv", responses.str());
        std::ostringstream series;
        write_series_csv(series, report);
        write_file(dir / "series.csv", series.str());
        if (request.emit_events) {
            std::ostringstream events;
            write_events_csv(events, run);
            write_file(dir / "events.csv", events.str());
        }
        write_file(dir / "manifest.json", manifest_json(spec, i).dump(2) + "\n");

        seeds.push_back(spec.seed);
        reports.push_back(std::move(report));
    }
    std::filesystem::create_directories(root);
    write_file(root / "summary.json", summary_json(request.spec.name, seeds, summarize(reports)).dump(2) + "\n");
    return reports;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete-event simulator for high-availability cluster designs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::string run_scenario_ref;
    std::string run_preset;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    unsigned replications = 1;
    std::string out_dir;
    bool emit_events = false;
    double bucket = 60.0;

    auto* run = app.add_subcommand("run", "Run one scenario and write its artifacts");
    run->add_option("scenario", run_scenario_ref, "Scenario file (or preset name)");
    run->add_option("--preset", run_preset, "Preset name");
    run->add_option("--seed", seed, "Base seed; replication i uses seed + i");
    run->add_option("--horizon", horizon, "Override the horizon in seconds");
    run->add_option("--replications", replications, "Number of replications")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory (default: $HAC_SIM_OUT or ./out)");
    run->add_flag("--emit-events", emit_events, "Also write events.csv");
    run->add_option("--bucket", bucket, "Series bucket width in seconds")->check(CLI::PositiveNumber);

    std::vector<std::string> compare_refs;
    auto* compare = app.add_subcommand("compare", "Run several scenarios and tabulate them against the first");
    compare->add_option("scenarios", compare_refs, "Preset names or scenario files");
    compare->add_option("--seed", seed, "Base seed");
    compare->add_option("--horizon", horizon, "Override the horizon in seconds");
    compare->add_option("--replications", replications, "Replications per scenario")->check(CLI::PositiveNumber);
    compare->add_option("--out", out_dir, "Output directory (default: $HAC_SIM_OUT or ./out)");

    std::string validate_case;
    std::size_t mm1_arrivals = 1'000'000;
    auto* validate_cmd = app.add_subcommand("validate", "Engine self-checks");
    validate_cmd->add_option("--case", validate_case, "mm1, metrics-oracle or fsm")
        ->required()
        ->check(CLI::IsMember({"mm1", "metrics-oracle", "fsm"}));
    validate_cmd->add_option("--arrivals", mm1_arrivals, "Arrivals for the mm1 case")->check(CLI::PositiveNumber);

    auto* presets_cmd = app.add_subcommand("presets", "Shipped scenarios");
    presets_cmd->require_subcommand(1);
    presets_cmd->add_subcommand("list", "List preset names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::filesystem::path out_root = out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir);
    const auto apply_overrides = [&](ScenarioSpec& spec) {
        if (seed) spec.seed = *seed;
        if (horizon) spec.horizon = *horizon;
        validate(spec);
    };

    try {
        if (run->parsed()) {
            if (run_preset.empty() == run_scenario_ref.empty()) {
                err << "run: give exactly one of a scenario file or --preset\n";
                return kExitUsage;
            }
            ScenarioSpec spec = run_preset.empty() ? resolve_scenario(run_scenario_ref) : preset(run_preset);
            apply_overrides(spec);
            for (const auto& w : scenario_warnings(spec)) err << "warning: " << w << "\n";
            const auto reports = execute_run(RunRequest{spec, replications, out_root, emit_events, bucket});
            const auto summary = summarize(reports);
            out << fmt::format("{}: {} replication(s) written to {}\n", spec.name, reports.size(),
                               (out_root / spec.name).string());
            for (const auto& m : summary) {
                out << fmt::format("  {:<26} {:>14.6g}", m.name, m.mean);
                if (m.stddev) out << fmt::format(" +- {:.4g}", *m.stddev);
                out << "\n";
            }
            return kExitOk;
        }

        if (compare->parsed()) {
            if (compare_refs.size() < 2) {
                err << "compare: need at least two scenarios\n";
                return kExitUsage;
            }
            std::vector<ScenarioSpec> specs;
            for (const auto& ref : compare_refs) {
                ScenarioSpec spec = resolve_scenario(ref);
                apply_overrides(spec);
                specs.push_back(std::move(spec));
            }
            std::vector<std::vector<MetricSummary>> summaries;
            for (const auto& spec : specs) {
                summaries.push_back(summarize(execute_run(RunRequest{spec, replications, out_root, false, 60.0})));
            }

            const auto base_resp = summary_value(summaries[0], "response_time.all.mean");
            const auto base_delay = summary_value(summaries[0], "mean_delay");
            out << fmt::format("{:<16} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8} {:>12} {:>9} {:>9}\n", "scenario",
                               "resp_all", "resp_heavy", "resp_light", "avail", "U", "F", "mean_delay", "d_resp",
                               "d_delay");
            ordered_json table = ordered_json::array();
            for (std::size_t i = 0; i < specs.size(); ++i) {
                const auto& s = summaries[i];
                const auto resp = summary_value(s, "response_time.all.mean");
                const auto delay = summary_value(s, "mean_delay");
                out << fmt::format("{:<16} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8} {:>12} {:>9} {:>9}\n",
                                   specs[i].name, cell(resp, 3), cell(summary_value(s, "response_time.heavy.mean"), 3),
                                   cell(summary_value(s, "response_time.light.mean"), 3),
                                   cell(summary_value(s, "availability"), 6), cell(summary_value(s, "utilization"), 3),
                                   cell(summary_value(s, "failover_efficiency"), 4), cell(delay, 7),
                                   delta(resp, base_resp), delta(delay, base_delay));
                ordered_json row;
                row["scenario"] = specs[i].name;
                for (const auto& m : s) row[m.name] = m.mean;
                table.push_back(std::move(row));
            }
            std::filesystem::create_directories(out_root);
            write_file(out_root / "compare.json", table.dump(2) + "\n");
            return kExitOk;
        }

        if (validate_cmd->parsed()) {
            if (validate_case == "mm1") return print_checks(check_mm1(mm1_arrivals), out);
            if (validate_case == "metrics-oracle") return print_checks(check_metrics_oracle(), out);
            return print_checks(check_fsm(), out);
        }

        if (presets_cmd->parsed()) {
            for (const auto& p : all_presets()) out << fmt::format("{:<16} {}\n", p.name, p.summary);
            return kExitOk;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnknownPreset& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace hacsim
