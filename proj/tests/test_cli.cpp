#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "hacsim/cli.hpp"

using namespace hacsim;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code = 0;
    std::string out;
    std::string err;
};

Invocation invoke(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"hac_sim"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hac_sim_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("presets list") {
    const auto r = invoke({"presets", "list"});
    CHECK(r.code == kExitOk);
    for (const auto& p : all_presets()) CHECK(r.out.find(std::string(p.name)) != std::string::npos);
}

TEST_CASE("run writes one artifact set per replication") {
    const fs::path out = scratch("run");
    const auto r = invoke({"run", "--preset", "ihac-generic", "--horizon", "1800", "--replications", "3", "--out",
                           out.string(), "--emit-events"});
    REQUIRE(r.code == kExitOk);
    for (int i = 0; i < 3; ++i) {
        const fs::path rep = out / "ihac-generic" / ("rep-00" + std::to_string(i));
        for (const char* f : {"report.json", "responses.csv", "series.csv", "events.csv", "manifest.json"}) {
            CHECK(fs::exists(rep / f));
        }
        CHECK(slurp(rep / "manifest.json").find("\"seed\": " + std::to_string(42 + i)) != std::string::npos);
    }
    const std::string summary = slurp(out / "ihac-generic" / "summary.json");
    CHECK(summary.find("\"stddev\"") != std::string::npos);
    CHECK(summary.find("\"replications\": 3") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("repeated runs are byte-identical") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    REQUIRE(invoke({"run", "--preset", "active-active", "--seed", "42", "--horizon", "3600", "--out", a.string()}).code == 0);
    REQUIRE(invoke({"run", "--preset", "active-active", "--seed", "42", "--horizon", "3600", "--out", b.string()}).code == 0);
    for (const char* f : {"report.json", "responses.csv", "series.csv", "manifest.json"}) {
        CHECK(slurp(a / "active-active" / "rep-000" / f) == slurp(b / "active-active" / "rep-000" / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("scenario files") {
    const fs::path dir = scratch("files");
    fs::create_directories(dir);
    const fs::path good = dir / "good.json";
    std::ofstream(good) << R"({"name": "tiny", "horizon": 500,
      "nodes": [{"id": "a", "role": "Active"}],
      "workload": {"light": {"arrival": {"kind": "Poisson", "rate": 0.2},
                             "demand": {"kind": "Exponential", "mean": 1}}}})";
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << R"({"name": "broken", "horizon": 500,
      "nodes": [{"id": "a", "role": "PassiveWarm"}],
      "workload": {"light": {"arrival": {"kind": "Poisson", "rate": 0.2},
                             "demand": {"kind": "Exponential", "mean": 1}}}})";

    const fs::path out = dir / "out";
    CHECK(invoke({"run", good.string(), "--out", out.string()}).code == kExitOk);
    CHECK(fs::exists(out / "tiny" / "rep-000" / "report.json"));

    const auto r = invoke({"run", bad.string(), "--out", out.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("no active node") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "broken"));
    fs::remove_all(dir);
}

TEST_CASE("usage errors exit 2") {
    CHECK(invoke({}).code == kExitUsage);
    CHECK(invoke({"run"}).code == kExitUsage);
    CHECK(invoke({"run", "--preset", "nope"}).code == kExitUsage);
    CHECK(invoke({"compare", "active-active"}).code == kExitUsage);
    CHECK(invoke({"validate", "--case", "quantum"}).code == kExitUsage);
    CHECK(invoke({"run", "--preset", "active-active", "--horizon", "100"}).code == kExitUsage);
}

TEST_CASE("compare tabulates deltas against the first scenario") {
    const fs::path out = scratch("compare");
    const auto r = invoke({"compare", "active-active", "ihac-generic", "--horizon", "7200", "--out", out.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("ihac-generic") != std::string::npos);
    CHECK(r.out.find("d_resp") != std::string::npos);
    CHECK(fs::exists(out / "compare.json"));
    fs::remove_all(out);
}

TEST_CASE("validate cases") {
    const auto mm1 = invoke({"validate", "--case", "mm1", "--arrivals", "50000"});
    CHECK(mm1.code == kExitOk);
    CHECK(mm1.out.find("PASS mm1 mean response") != std::string::npos);
    const auto oracle = invoke({"validate", "--case", "metrics-oracle"});
    CHECK(oracle.code == kExitOk);
    CHECK(oracle.out.find("FAIL") == std::string::npos);
}

TEST_CASE("fsm check on a few seeds") {
    for (const auto& c : check_fsm(3, 1200.0)) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
}

TEST_CASE("summaries use the sample standard deviation") {
    MetricsReport a;
    a.arrivals = 10;
    MetricsReport b;
    b.arrivals = 14;
    const auto s = summarize({a, b});
    bool found = false;
    for (const auto& m : s) {
        if (m.name != "arrivals") continue;
        found = true;
        CHECK(m.mean == 12.0);
        CHECK(*m.stddev == doctest::Approx(std::sqrt(8.0)));
    }
    CHECK(found);
    CHECK_FALSE(summarize({a})[0].stddev.has_value());
}

TEST_CASE("HAC_SIM_OUT sets the default output root") {
    ::setenv("HAC_SIM_OUT", "/tmp/hac_sim_env_root", 1);
    CHECK(default_out_dir() == fs::path("/tmp/hac_sim_env_root"));
    ::unsetenv("HAC_SIM_OUT");
    CHECK(default_out_dir() == fs::path("out"));
}
