#include <ponedge/config.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace ponedge::config {

using nlohmann::json;

namespace {

struct cpu_row {
    cpu_entry cpu;
    std::vector<std::string> scenarios;
};

const std::vector<cpu_row>& cpu_table()
{
    static const std::vector<cpu_row> rows = {
        {{"AMD Phenom II X4 955", 43000.0}, {"smart-city"}},
        {{"AMD FX 8320", 80000.0}, {"smart-city"}},
        {{"Intel Core i7-4710HQ", 123000.0}, {"smart-city"}},
        {{"Intel Core i7-3930K", 220000.0}, {"smart-city", "e-health"}},
        {{"Intel Core i7 5960X", 300000.0}, {"smart-city", "e-health"}},
        {{"Intel i7-1280P", 440000.0}, {"smart-building", "e-health"}},
        {{"Intel i7-12800H", 500000.0}, {"smart-building", "e-health"}},
        {{"Intel i7-13850HX", 620000.0}, {"smart-building", "e-health"}},
        {{"Intel i9-13900", 700000.0}, {"smart-building", "aigc"}},
        {{"Intel i7-13700K", 800000.0}, {"smart-building", "aigc"}},
        {{"Intel i7-14700K", 1000000.0}, {"aigc"}},
        {{"Intel i9-14900KF", 1200000.0}, {"aigc"}},
        {{"AMD Ryzen 3990X", 2350000.0}, {"aigc"}},
    };
    return rows;
}

/// Strict view of a JSON object: every key must be consumed or listed.
class object_reader {
public:
    object_reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw config_error(fmt::format("{}: expected an object", where()));
    }

    void allow(std::initializer_list<std::string_view> keys)
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
                throw config_error(fmt::format("unknown key '{}' in {}", it.key(), where()));
            }
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }
    [[nodiscard]] const json& at(const std::string& key) const { return j_.at(key); }
    [[nodiscard]] std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key, double fallback) const
    {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw config_error(fmt::format("{} must be a number", field(key)));
        return v.get<double>();
    }

    double positive(const std::string& key, double fallback) const
    {
        const double v = number(key, fallback);
        if (!(v > 0.0)) throw config_error(fmt::format("{} must be positive", field(key)));
        return v;
    }

    double non_negative(const std::string& key, double fallback) const
    {
        const double v = number(key, fallback);
        if (!(v >= 0.0)) throw config_error(fmt::format("{} must be non-negative", field(key)));
        return v;
    }

    int positive_int(const std::string& key, int fallback) const
    {
        const double v = number(key, fallback);
        if (!(v >= 1.0) || v != std::floor(v)) throw config_error(fmt::format("{} must be a positive integer", field(key)));
        return static_cast<int>(v);
    }

    bool boolean(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw config_error(fmt::format("{} must be true or false", field(key)));
        return v.get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) const
    {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_string()) throw config_error(fmt::format("{} must be a string", field(key)));
        return v.get<std::string>();
    }

private:
    [[nodiscard]] std::string where() const { return path_.empty() ? "document" : "'" + path_ + "'"; }

    const json& j_;
    std::string path_;
};

network::link_spec parse_link(const json& j, const std::string& path, network::link_spec base)
{
    object_reader r(j, path);
    r.allow({"bandwidth_bps", "fixed_latency_s", "propagation_mps"});
    base.bandwidth_bps = r.positive("bandwidth_bps", base.bandwidth_bps);
    base.fixed_latency_s = r.non_negative("fixed_latency_s", base.fixed_latency_s);
    base.propagation_mps = r.positive("propagation_mps", base.propagation_mps);
    return base;
}

node_sizing parse_sizing(const json& j, const std::string& path, node_sizing base, bool with_mips)
{
    object_reader r(j, path);
    if (with_mips) {
        r.allow({"mips", "cores", "ram_mb", "storage_mb"});
        base.mips = r.non_negative("mips", base.mips);
    } else {
        r.allow({"cores", "ram_mb", "storage_mb"});
    }
    base.cores = r.positive_int("cores", base.cores);
    base.ram_mb = r.non_negative("ram_mb", base.ram_mb);
    base.storage_mb = r.non_negative("storage_mb", base.storage_mb);
    return base;
}

json link_json(const network::link_spec& l)
{
    return {{"bandwidth_bps", l.bandwidth_bps}, {"fixed_latency_s", l.fixed_latency_s},
            {"propagation_mps", l.propagation_mps}};
}

json sizing_json(const node_sizing& n, bool with_mips)
{
    json j = {{"cores", n.cores}, {"ram_mb", n.ram_mb}, {"storage_mb", n.storage_mb}};
    if (with_mips) j["mips"] = n.mips;
    return j;
}

template <typename F>
void for_each_item(const json& j, F&& f)
{
    if (j.is_array()) {
        for (const auto& item : j) f(item);
    } else {
        f(j);
    }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

network::topology_spec topology_preset(const std::string& name, const workload::scenario_spec& scenario,
                                       double edge_mips, const model_params& model)
{
    if (name != "genio" && name != "baseline") {
        throw config_error(fmt::format("unknown topology '{}' (valid: genio, baseline)", name));
    }
    workload::validate(scenario);
    if (!(edge_mips > 0.0)) throw config_error("edge server mips must be positive");

    network::topology_spec t;
    t.preset = name;
    const auto users = static_cast<std::uint32_t>(scenario.users);

    auto add_node = [&](std::string node_name, layer l, const node_sizing& s) {
        const node_id id{static_cast<std::uint32_t>(t.nodes.size())};
        t.nodes.push_back({id, std::move(node_name), l, s.mips, s.cores, s.ram_mb, s.storage_mb});
        return id;
    };
    auto add_link = [&](node_id a, node_id b, network::link_spec spec, double length) {
        spec.length_m = length;
        t.links.push_back({link_id{static_cast<std::uint32_t>(t.links.size())}, a, b, spec});
    };

    for (std::uint32_t i = 0; i < users; ++i) add_node(fmt::format("device-{}", i), layer::far_edge_device, model.device);
    for (std::uint32_t i = 0; i < users; ++i) add_node(fmt::format("onu-{}", i), layer::onu, model.onu);
    const auto olt = add_node("olt", layer::olt, {0.0, 1, 0.0, 0.0});
    auto edge_sizing = model.edge;
    edge_sizing.mips = edge_mips;
    const auto edge = add_node("edge", layer::edge_server, edge_sizing);
    const auto cloud = add_node("cloud", layer::cloud, model.cloud);

    const network::link_spec local{link_kind::local, 0.0, 0.0, 0.0, network::fiber_propagation_mps};
    for (std::uint32_t i = 0; i < users; ++i) add_link(node_id{i}, node_id{users + i}, local, 0.0);
    for (std::uint32_t i = 0; i < users; ++i) add_link(node_id{users + i}, olt, model.fiber, model.access_fiber_m);
    if (name == "genio") {
        add_link(olt, edge, local, 0.0);
    } else {
        add_link(olt, edge, model.wan, model.olt_edge_wan_m);
    }
    add_link(edge, cloud, model.wan, model.edge_cloud_wan_m);
    validate(t);
    return t;
}

void validate(const network::topology_spec& topology)
{
    const auto n = topology.nodes.size();
    if (n == 0) throw config_error("topology has no nodes");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = topology.nodes[i];
        if (node.id.value != i) throw config_error(fmt::format("node '{}' has id {} at index {}", node.name, node.id.value, i));
        if (node.cores < 1) throw config_error(fmt::format("node '{}': cores must be >= 1", node.name));
        if (node.mips < 0.0) throw config_error(fmt::format("node '{}': mips must be non-negative", node.name));
    }
    if (topology.links.size() != n - 1) {
        throw config_error(fmt::format("topology is not a tree: {} nodes, {} links", n, topology.links.size()));
    }
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t i = 0; i < topology.links.size(); ++i) {
        const auto& l = topology.links[i];
        if (l.id.value != i) throw config_error(fmt::format("link at index {} has id {}", i, l.id.value));
        if (l.a.value >= n || l.b.value >= n || l.a == l.b) throw config_error(fmt::format("link {} has bad endpoints", i));
        network::validate(l.spec);
        incident[l.a.value].push_back(i);
        incident[l.b.value].push_back(i);
    }
    // n - 1 links plus connectivity means a tree.
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const auto at = stack.back();
        stack.pop_back();
        for (auto li : incident[at]) {
            const auto& l = topology.links[li];
            const auto other = l.a.value == at ? l.b.value : l.a.value;
            if (!seen[other]) {
                seen[other] = true;
                ++reached;
                stack.push_back(other);
            }
        }
    }
    if (reached != n) throw config_error("topology is not connected");

    std::size_t clouds = 0;
    for (const auto& node : topology.nodes) {
        if (node.layer == layer::cloud) ++clouds;
        if (node.layer != layer::far_edge_device) continue;
        const auto& links = incident[node.id.value];
        const bool ok = links.size() == 1 && topology.links[links[0]].spec.kind == link_kind::local && [&] {
            const auto& l = topology.links[links[0]];
            const auto other = l.a == node.id ? l.b : l.a;
            return topology.node(other).layer == layer::onu;
        }();
        if (!ok) throw config_error(fmt::format("device '{}' must attach to exactly one ONU via a local link", node.name));
    }
    if (clouds != 1) throw config_error(fmt::format("topology must have exactly one cloud node, found {}", clouds));
}

std::vector<cpu_entry> cpu_grid(const std::string& scenario)
{
    std::vector<cpu_entry> out;
    for (const auto& row : cpu_table()) {
        if (std::find(row.scenarios.begin(), row.scenarios.end(), scenario) != row.scenarios.end()) out.push_back(row.cpu);
    }
    if (out.empty()) {
        throw config_error(fmt::format("unknown scenario '{}' (valid: {})", scenario, fmt::join(workload::preset_names(), ", ")));
    }
    return out;
}

std::string cpu_label(double mips)
{
    for (const auto& row : cpu_table()) {
        if (row.cpu.mips == mips) return row.cpu.label;
    }
    return fmt::format("custom-{:.0f}", mips);
}

model_params parse_model(const json& j)
{
    model_params m;
    object_reader r(j, "model");
    r.allow({"links", "lengths_m", "nodes", "weights", "far_edge_execution", "control_plane_latency_s",
             "strict_deadline", "task_footprint"});
    if (r.has("links")) {
        object_reader links(r.at("links"), "model.links");
        links.allow({"fiber", "man", "wan"});
        if (links.has("fiber")) m.fiber = parse_link(links.at("fiber"), "model.links.fiber", m.fiber);
        if (links.has("man")) m.man = parse_link(links.at("man"), "model.links.man", m.man);
        if (links.has("wan")) m.wan = parse_link(links.at("wan"), "model.links.wan", m.wan);
    }
    if (r.has("lengths_m")) {
        object_reader lengths(r.at("lengths_m"), "model.lengths_m");
        lengths.allow({"access_fiber", "olt_edge_wan", "edge_cloud_wan"});
        m.access_fiber_m = lengths.non_negative("access_fiber", m.access_fiber_m);
        m.olt_edge_wan_m = lengths.non_negative("olt_edge_wan", m.olt_edge_wan_m);
        m.edge_cloud_wan_m = lengths.non_negative("edge_cloud_wan", m.edge_cloud_wan_m);
    }
    if (r.has("nodes")) {
        object_reader nodes(r.at("nodes"), "model.nodes");
        nodes.allow({"edge", "cloud", "device", "onu"});
        if (nodes.has("edge")) m.edge = parse_sizing(nodes.at("edge"), "model.nodes.edge", m.edge, false);
        if (nodes.has("cloud")) m.cloud = parse_sizing(nodes.at("cloud"), "model.nodes.cloud", m.cloud, true);
        if (nodes.has("device")) m.device = parse_sizing(nodes.at("device"), "model.nodes.device", m.device, true);
        if (nodes.has("onu")) m.onu = parse_sizing(nodes.at("onu"), "model.nodes.onu", m.onu, true);
        if (!(m.cloud.mips > 0.0)) throw config_error("model.nodes.cloud.mips must be positive");
    }
    if (r.has("weights")) {
        object_reader w(r.at("weights"), "model.weights");
        w.allow({"edge_server", "cloud", "far_edge"});
        m.weights.edge_server = w.positive("edge_server", m.weights.edge_server);
        m.weights.cloud = w.positive("cloud", m.weights.cloud);
        m.weights.far_edge = w.positive("far_edge", m.weights.far_edge);
    }
    m.far_edge_execution = r.boolean("far_edge_execution", m.far_edge_execution);
    m.control_plane_latency_s = r.non_negative("control_plane_latency_s", m.control_plane_latency_s);
    m.strict_deadline = r.boolean("strict_deadline", m.strict_deadline);
    if (r.has("task_footprint")) {
        object_reader f(r.at("task_footprint"), "model.task_footprint");
        f.allow({"ram_mb", "storage_mb"});
        m.task_footprint.ram_mb = f.non_negative("ram_mb", m.task_footprint.ram_mb);
        m.task_footprint.storage_mb = f.non_negative("storage_mb", m.task_footprint.storage_mb);
    }
    return m;
}

json to_json(const model_params& m)
{
    return {
        {"links", {{"fiber", link_json(m.fiber)}, {"man", link_json(m.man)}, {"wan", link_json(m.wan)}}},
        {"lengths_m",
         {{"access_fiber", m.access_fiber_m}, {"olt_edge_wan", m.olt_edge_wan_m}, {"edge_cloud_wan", m.edge_cloud_wan_m}}},
        {"nodes",
         {{"edge", sizing_json(m.edge, false)},
          {"cloud", sizing_json(m.cloud, true)},
          {"device", sizing_json(m.device, true)},
          {"onu", sizing_json(m.onu, true)}}},
        {"weights", {{"edge_server", m.weights.edge_server}, {"cloud", m.weights.cloud}, {"far_edge", m.weights.far_edge}}},
        {"far_edge_execution", m.far_edge_execution},
        {"control_plane_latency_s", m.control_plane_latency_s},
        {"strict_deadline", m.strict_deadline},
        {"task_footprint", {{"ram_mb", m.task_footprint.ram_mb}, {"storage_mb", m.task_footprint.storage_mb}}},
    };
}

workload::scenario_spec parse_scenario(const json& j)
{
    if (j.is_string()) return workload::scenario_preset(j.get<std::string>());
    object_reader r(j, "scenario");
    r.allow({"name", "users", "rate_per_min", "deadline_s", "length_mi", "request_kb", "result_kb"});
    workload::scenario_spec s;
    s.name = r.text("name", "");
    if (s.name.empty()) throw config_error("scenario.name must be a non-empty string");
    s.users = r.positive_int("users", 0);
    s.rate_per_min = r.positive("rate_per_min", 0.0);
    s.deadline_s = r.positive("deadline_s", 0.0);
    s.length_mi = r.positive("length_mi", 0.0);
    s.request = {r.positive("request_kb", 0.0)};
    s.result = {r.positive("result_kb", 0.0)};
    return s;
}

json to_json(const workload::scenario_spec& s)
{
    return {{"name", s.name},           {"users", s.users},
            {"rate_per_min", s.rate_per_min}, {"deadline_s", s.deadline_s},
            {"length_mi", s.length_mi}, {"request_kb", s.request.kilobytes},
            {"result_kb", s.result.kilobytes}};
}

experiment_spec parse_experiment(const json& j)
{
    experiment_spec spec;
    object_reader r(j, "");
    r.allow({"scenario", "topology", "cpus", "seeds", "duration", "strategy", "arrivals", "model"});

    if (!r.has("scenario")) throw config_error("scenario is required");
    for_each_item(r.at("scenario"), [&](const json& item) { spec.scenarios.push_back(parse_scenario(item)); });
    if (spec.scenarios.empty()) throw config_error("scenario must not be empty");

    if (r.has("topology")) {
        for_each_item(r.at("topology"), [&](const json& item) {
            if (!item.is_string()) throw config_error("topology must be a string or a list of strings");
            const auto name = item.get<std::string>();
            orchestrator::architecture(name);
            spec.topologies.push_back(name);
        });
    } else {
        spec.topologies = {"genio", "baseline"};
    }
    if (spec.topologies.empty()) throw config_error("topology must not be empty");

    if (r.has("cpus")) {
        const auto& cpus = r.at("cpus");
        if (!cpus.is_array() || cpus.empty()) throw config_error("cpus must be a non-empty list");
        for (const auto& item : cpus) {
            object_reader c(item, "cpus[]");
            c.allow({"label", "mips"});
            cpu_entry e;
            e.mips = c.positive("mips", 0.0);
            e.label = c.text("label", cpu_label(e.mips));
            spec.cpus.push_back(std::move(e));
        }
    }

    if (r.has("seeds")) {
        const auto& seeds = r.at("seeds");
        if (!seeds.is_array() || seeds.empty()) throw config_error("seeds must be a non-empty list");
        spec.seeds.clear();
        for (const auto& s : seeds) {
            if (!s.is_number_unsigned()) throw config_error("seeds must be non-negative integers");
            spec.seeds.push_back(s.get<std::uint64_t>());
        }
    }

    spec.duration_s = r.number("duration", spec.duration_s);
    if (!(spec.duration_s > 0.0)) throw config_error("duration must be positive");
    spec.strategy = orchestrator::parse_strategy(r.text("strategy", orchestrator::to_string(spec.strategy)));
    spec.arrivals = workload::parse_arrival_mode(r.text("arrivals", workload::to_string(spec.arrivals)));
    if (r.has("model")) spec.model = parse_model(r.at("model"));
    return spec;
}

json parse_document(std::string_view document)
{
    try {
        return json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(document, e.byte == 0 ? 0 : e.byte - 1);
        throw config_error(fmt::format("syntax error at line {}, column {}: {}", line, col, e.what()));
    }
}

experiment_spec parse_experiment(std::string_view document)
{
    return parse_experiment(parse_document(document));
}

json to_json(const experiment_spec& spec)
{
    json scenarios = json::array();
    for (const auto& s : spec.scenarios) scenarios.push_back(to_json(s));
    json cpus = json::array();
    for (const auto& c : spec.cpus) cpus.push_back({{"label", c.label}, {"mips", c.mips}});
    json out = {
        {"scenario", scenarios},
        {"topology", spec.topologies},
        {"seeds", spec.seeds},
        {"duration", spec.duration_s},
        {"strategy", orchestrator::to_string(spec.strategy)},
        {"arrivals", workload::to_string(spec.arrivals)},
        {"model", to_json(spec.model)},
    };
    if (!spec.cpus.empty()) out["cpus"] = cpus;
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text)
{
    auto number = [&](const std::string& s) -> std::uint64_t {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            throw config_error(fmt::format("bad seed list '{}'", text));
        }
        return std::stoull(s);
    };
    std::vector<std::uint64_t> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const auto lo = number(text.substr(0, dots));
        const auto hi = number(text.substr(dots + 2));
        if (hi < lo) throw config_error(fmt::format("bad seed range '{}'", text));
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        out.push_back(number(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace ponedge::config
