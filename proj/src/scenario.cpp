#include "hacsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace hacsim {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string describe(std::string_view field, std::size_t line, const std::string& what) {
    std::string out;
    if (line > 0) out += fmt::format("line {}: ", line);
    if (!field.empty()) out += fmt::format("{}: ", field);
    return out + what;
}

// Field readers that report the JSON path of whatever is wrong.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) fail("", "expected an object");
    }

    void allow_only(std::initializer_list<std::string_view> keys) const {
        for (const auto& [key, _] : obj_.items()) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) fail(key, "unknown key");
        }
    }

    bool has(std::string_view key) const { return obj_.contains(key); }

    const json& at(std::string_view key) const {
        if (!obj_.contains(key)) fail(key, "missing required key");
        return obj_.at(std::string(key));
    }

    double number(std::string_view key) const {
        const json& v = at(key);
        if (!v.is_number()) fail(key, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key, "expected a finite number");
        return d;
    }

    double number_or(std::string_view key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    std::optional<double> optional_number(std::string_view key) const {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    std::uint64_t unsigned_or(std::string_view key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string string(std::string_view key) const {
        const json& v = at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    std::string string_or(std::string_view key, std::string fallback) const {
        return has(key) ? string(key) : std::move(fallback);
    }

    template <typename Enum, typename Parse>
    Enum enumeration(std::string_view key, Parse parse) const {
        const std::string text = string(key);
        if (auto v = parse(text)) return *v;
        fail(key, "unrecognized value '" + text + "'");
    }

    Reader object(std::string_view key) const { return Reader(at(key), child(key)); }

    const json& array(std::string_view key) const {
        const json& v = at(key);
        if (!v.is_array()) fail(key, "expected an array");
        return v;
    }

    std::string child(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    [[noreturn]] void fail(std::string_view key, const std::string& what) const {
        const std::string field = key.empty() ? path_ : child(key);
        throw ParseError(field, 0, what);
    }

private:
    const json& obj_;
    std::string path_;
};

ArrivalProcess read_arrival(const Reader& r) {
    r.allow_only({"kind", "rate", "period"});
    const std::string kind = r.string("kind");
    if (kind == "Poisson") {
        if (r.has("period")) r.fail("period", "Poisson arrivals take 'rate'");
        return ArrivalProcess::poisson(r.number("rate"));
    }
    if (kind == "Deterministic") {
        if (r.has("rate")) r.fail("rate", "Deterministic arrivals take 'period'");
        return ArrivalProcess::deterministic(r.number("period"));
    }
    r.fail("kind", "unrecognized value '" + kind + "'");
}

ServiceDemand read_demand(const Reader& r) {
    r.allow_only({"kind", "mean"});
    const std::string kind = r.string("kind");
    if (kind == "Exponential") return ServiceDemand::exponential(r.number("mean"));
    if (kind == "Deterministic") return ServiceDemand::deterministic(r.number("mean"));
    r.fail("kind", "unrecognized value '" + kind + "'");
}

ClassWorkload read_class(const Reader& r) {
    r.allow_only({"arrival", "demand"});
    return ClassWorkload{read_arrival(r.object("arrival")), read_demand(r.object("demand"))};
}

ScenarioSpec from_json(const json& doc) {
    const Reader root(doc, "");
    root.allow_only({"schema_version", "name", "notes", "horizon", "seed", "nodes", "balancer", "workload",
                     "heartbeat", "failover", "failures", "link_delay", "warmup_cut", "blend"});
    if (root.has("schema_version")) {
        const json& v = root.at("schema_version");
        if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
            root.fail("schema_version", fmt::format("unsupported schema version (expected {})", kSchemaVersion));
        }
    }

    ScenarioSpec spec;
    spec.name = root.string_or("name", spec.name);
    spec.notes = root.string_or("notes", "");
    spec.horizon = root.number_or("horizon", spec.horizon);
    spec.seed = root.unsigned_or("seed", spec.seed);
    spec.link_delay = root.number_or("link_delay", spec.link_delay);
    spec.warmup_cut = root.number_or("warmup_cut", spec.warmup_cut);

    const json& nodes = root.array("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Reader n(nodes[i], fmt::format("nodes[{}]", i));
        n.allow_only({"id", "role", "service_rate", "group", "weight", "rejoin_role"});
        NodeConfig cfg;
        cfg.name = n.string("id");
        cfg.role = n.enumeration<NodeStatus>("role", node_status_from);
        cfg.service_rate = n.number_or("service_rate", 1.0);
        cfg.group = n.has("group") ? n.enumeration<NodeGroup>("group", node_group_from) : NodeGroup::OnPrem;
        cfg.weight = n.optional_number("weight");
        if (n.has("rejoin_role")) cfg.rejoin_role = n.enumeration<NodeStatus>("rejoin_role", node_status_from);
        spec.nodes.push_back(std::move(cfg));
    }

    if (root.has("balancer")) {
        const Reader b = root.object("balancer");
        b.allow_only({"policy", "weights", "load_window"});
        if (b.has("policy")) spec.balancer.policy = b.enumeration<BalancerPolicy>("policy", balancer_policy_from);
        spec.balancer.load_window = b.number_or("load_window", spec.balancer.load_window);
        if (b.has("weights")) {
            const Reader w = b.object("weights");
            for (const auto& [key, _] : b.at("weights").items()) spec.balancer.weights[key] = w.number(key);
        }
    }

    {
        const Reader w = root.object("workload");
        w.allow_only({"heavy", "light"});
        if (w.has("heavy")) spec.workload.heavy = read_class(w.object("heavy"));
        if (w.has("light")) spec.workload.light = read_class(w.object("light"));
    }

    if (root.has("heartbeat")) {
        const Reader h = root.object("heartbeat");
        h.allow_only({"interval", "miss_threshold"});
        spec.heartbeat.interval = h.number_or("interval", spec.heartbeat.interval);
        if (h.has("miss_threshold")) {
            const json& k = h.at("miss_threshold");
            if (!k.is_number_unsigned()) h.fail("miss_threshold", "expected a positive integer");
            spec.heartbeat.miss_threshold = k.get<unsigned>();
        }
    }

    if (root.has("failover")) {
        const Reader f = root.object("failover");
        f.allow_only({"promotion_delay_warm", "promotion_delay_cold", "overflow_policy"});
        spec.failover.promotion_delay_warm = f.number_or("promotion_delay_warm", spec.failover.promotion_delay_warm);
        spec.failover.promotion_delay_cold = f.number_or("promotion_delay_cold", spec.failover.promotion_delay_cold);
        if (f.has("overflow_policy")) {
            spec.failover.overflow_policy = f.enumeration<OverflowPolicy>("overflow_policy", overflow_policy_from);
        }
    }

    if (root.has("failures")) {
        const json& failures = root.array("failures");
        for (std::size_t i = 0; i < failures.size(); ++i) {
            const Reader f(failures[i], fmt::format("failures[{}]", i));
            f.allow_only({"node", "fail_at", "repair_at"});
            spec.failures.push_back(FailureInjection{f.string("node"), f.number("fail_at"), f.optional_number("repair_at")});
        }
    }

    if (root.has("blend")) {
        const Reader b = root.object("blend");
        b.allow_only({"alpha", "beta"});
        spec.blend.alpha = b.number("alpha");
        spec.blend.beta = b.number("beta");
    }
    return spec;
}

ordered_json class_to_json(const ClassWorkload& w) {
    ordered_json arrival;
    if (w.arrival.kind == ArrivalProcess::Kind::Poisson) {
        arrival["kind"] = "Poisson";
        arrival["rate"] = w.arrival.value;
    } else {
        arrival["kind"] = "Deterministic";
        arrival["period"] = w.arrival.value;
    }
    ordered_json demand;
    demand["kind"] = w.demand.kind == ServiceDemand::Kind::Exponential ? "Exponential" : "Deterministic";
    demand["mean"] = w.demand.mean;
    ordered_json out;
    out["arrival"] = std::move(arrival);
    out["demand"] = std::move(demand);
    return out;
}

bool configurable_role(NodeStatus s) { return s == NodeStatus::Active || is_standby(s); }

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace

ParseError::ParseError(std::string field, std::size_t line, const std::string& what)
    : std::runtime_error(describe(field, line, what)), field_(std::move(field)), line_(line) {}

std::optional<NodeId> ScenarioSpec::node_index(std::string_view node_name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].name == node_name) return static_cast<NodeId>(i);
    }
    return std::nullopt;
}

ScenarioSpec load_scenario(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, document.size());
        const std::size_t line = 1 + static_cast<std::size_t>(
                                         std::count(document.begin(), document.begin() + static_cast<long>(upto), '\n'));
        throw ParseError("", line, "malformed document");
    }
    ScenarioSpec spec = from_json(doc);
    validate(spec);
    return spec;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string serialize(const ScenarioSpec& spec) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["name"] = spec.name;
    if (!spec.notes.empty()) doc["notes"] = spec.notes;
    doc["horizon"] = spec.horizon;
    doc["seed"] = spec.seed;

    ordered_json nodes = ordered_json::array();
    for (const auto& n : spec.nodes) {
        ordered_json j;
        j["id"] = n.name;
        j["role"] = to_string(n.role);
        j["service_rate"] = n.service_rate;
        j["group"] = to_string(n.group);
        if (n.weight) j["weight"] = *n.weight;
        if (n.rejoin_role) j["rejoin_role"] = to_string(*n.rejoin_role);
        nodes.push_back(std::move(j));
    }
    doc["nodes"] = std::move(nodes);

    ordered_json balancer;
    balancer["policy"] = to_string(spec.balancer.policy);
    balancer["load_window"] = spec.balancer.load_window;
    if (!spec.balancer.weights.empty()) {
        ordered_json weights;
        for (const auto& [node, w] : spec.balancer.weights) weights[node] = w;
        balancer["weights"] = std::move(weights);
    }
    doc["balancer"] = std::move(balancer);

    ordered_json workload = ordered_json::object();
    if (spec.workload.heavy) workload["heavy"] = class_to_json(*spec.workload.heavy);
    if (spec.workload.light) workload["light"] = class_to_json(*spec.workload.light);
    doc["workload"] = std::move(workload);

    doc["heartbeat"] = {{"interval", spec.heartbeat.interval}, {"miss_threshold", spec.heartbeat.miss_threshold}};
    doc["failover"] = {{"promotion_delay_warm", spec.failover.promotion_delay_warm},
                       {"promotion_delay_cold", spec.failover.promotion_delay_cold},
                       {"overflow_policy", to_string(spec.failover.overflow_policy)}};

    ordered_json failures = ordered_json::array();
    for (const auto& f : spec.failures) {
        ordered_json j;
        j["node"] = f.node;
        j["fail_at"] = f.fail_at;
        if (f.repair_at) j["repair_at"] = *f.repair_at;
        failures.push_back(std::move(j));
    }
    doc["failures"] = std::move(failures);
    doc["link_delay"] = spec.link_delay;
    doc["warmup_cut"] = spec.warmup_cut;
    doc["blend"] = {{"alpha", spec.blend.alpha}, {"beta", spec.blend.beta}};
    return doc.dump(2) + "\n";
}

void validate(const ScenarioSpec& spec) {
    require(std::isfinite(spec.horizon) && spec.horizon > 0.0, "horizon must be positive");
    require(!spec.nodes.empty(), "no nodes defined");

    std::set<std::string> names;
    for (const auto& n : spec.nodes) {
        require(!n.name.empty(), "node id must not be empty");
        require(names.insert(n.name).second, "duplicate node id '" + n.name + "'");
        require(configurable_role(n.role), "node '" + n.name + "' has a role that cannot be configured");
        require(n.service_rate > 0.0, "node '" + n.name + "' needs a positive service_rate");
        require(!n.weight || *n.weight >= 0.0, "node '" + n.name + "' has a negative weight");
        require(!n.rejoin_role || configurable_role(*n.rejoin_role),
                "node '" + n.name + "' has an invalid rejoin_role");
    }
    require(std::any_of(spec.nodes.begin(), spec.nodes.end(),
                        [](const NodeConfig& n) { return n.role == NodeStatus::Active; }),
            "no active node");

    require(spec.balancer.load_window > 0.0, "balancer load_window must be positive");
    if (!spec.balancer.weights.empty()) {
        double total = 0.0;
        for (const auto& [node, w] : spec.balancer.weights) {
            require(names.contains(node), "balancer weight for unknown node '" + node + "'");
            require(w >= 0.0, "balancer weight for '" + node + "' is negative");
            total += w;
        }
        require(total > 0.0, "balancer weights are all zero");
        for (const auto& n : spec.nodes) {
            require(spec.balancer.weights.contains(n.name), "balancer weights missing node '" + n.name + "'");
        }
    }

    require(spec.workload.heavy || spec.workload.light, "workload defines no traffic class");
    for (auto cls : {TrafficClass::Heavy, TrafficClass::Light}) {
        const auto& w = spec.workload.of(cls);
        if (!w) continue;
        const std::string label(to_string(cls));
        require(w->arrival.value > 0.0,
                label + (w->arrival.kind == ArrivalProcess::Kind::Poisson ? " arrival rate must be positive"
                                                                          : " arrival period must be positive"));
        require(w->demand.mean > 0.0, label + " demand mean must be positive");
    }
    if (spec.workload.heavy && spec.workload.light) {
        require(spec.workload.heavy->demand.mean >= spec.workload.light->demand.mean,
                "heavy demand mean must not be below light demand mean");
    }

    require(spec.heartbeat.interval > 0.0, "heartbeat interval must be positive");
    require(spec.heartbeat.miss_threshold >= 1, "heartbeat miss_threshold must be at least 1");
    require(spec.failover.promotion_delay_warm >= 0.0, "promotion_delay_warm must be non-negative");
    require(spec.failover.promotion_delay_cold >= spec.failover.promotion_delay_warm,
            "promotion_delay_cold must not be below promotion_delay_warm");

    std::map<std::string, std::vector<const FailureInjection*>> per_node;
    for (const auto& f : spec.failures) {
        require(names.contains(f.node), "failure for unknown node '" + f.node + "'");
        require(f.fail_at >= 0.0 && f.fail_at <= spec.horizon, "failure time outside [0, horizon]");
        if (f.repair_at) {
            require(*f.repair_at > f.fail_at, "repair before failure");
            require(*f.repair_at <= spec.horizon, "repair time outside [0, horizon]");
        }
        per_node[f.node].push_back(&f);
    }
    for (auto& [node, list] : per_node) {
        std::sort(list.begin(), list.end(),
                  [](const FailureInjection* a, const FailureInjection* b) { return a->fail_at < b->fail_at; });
        for (std::size_t i = 0; i + 1 < list.size(); ++i) {
            require(list[i]->repair_at && *list[i]->repair_at <= list[i + 1]->fail_at,
                    "overlapping failures on node '" + node + "'");
        }
    }

    require(spec.link_delay >= 0.0, "link_delay must be non-negative");
    require(spec.warmup_cut >= 0.0 && spec.warmup_cut < spec.horizon, "warmup_cut must lie in [0, horizon)");
    require(spec.blend.alpha >= 0.0 && spec.blend.alpha <= 1.0 && spec.blend.beta >= 0.0 && spec.blend.beta <= 1.0,
            "blend weights must lie in [0, 1]");
    require(std::abs(spec.blend.alpha + spec.blend.beta - 1.0) <= kBlendTolerance, "blend weights must sum to 1");
}

std::vector<std::string> scenario_warnings(const ScenarioSpec& spec) {
    std::vector<std::string> out;
    if (!spec.balancer.weights.empty() && spec.balancer.policy != BalancerPolicy::RandomSelection) {
        out.push_back(fmt::format("balancer weights are ignored by the {} policy", to_string(spec.balancer.policy)));
    }
    return out;
}

std::string spec_hash(const ScenarioSpec& spec) {
    return fmt::format("{:016x}", fnv1a64(serialize(spec)));
}

ScenarioSpec with_random_failures(ScenarioSpec spec, std::uint64_t seed, std::size_t count) {
    RngStream rng(seed, StreamId::FailureJitter);
    spec.failures.clear();
    std::vector<SimTime> busy_until(spec.nodes.size(), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        const auto node = static_cast<std::size_t>(rng.draw_uniform() * static_cast<double>(spec.nodes.size()));
        const double start = busy_until[node] + rng.draw_uniform() * (spec.horizon - busy_until[node]) * 0.5;
        // Outages from a fraction of a heartbeat up to a few minutes.
        const double outage = 0.5 + rng.draw_uniform() * 300.0;
        if (start >= spec.horizon) continue;
        FailureInjection f{spec.nodes[node].name, start, std::nullopt};
        if (start + outage < spec.horizon && rng.draw_uniform() < 0.85) {
            f.repair_at = start + outage;
            busy_until[node] = start + outage;
        } else {
            busy_until[node] = spec.horizon;
        }
        spec.failures.push_back(f);
    }
    return spec;
}

}  // namespace hacsim
