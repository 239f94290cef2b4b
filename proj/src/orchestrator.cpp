#include <ponedge/orchestrator.hpp>

#include <algorithm>

#include <fmt/format.h>

namespace ponedge::orchestrator {

architecture_preset architecture(const std::string& name, bool far_edge_execution)
{
    architecture_preset p;
    p.name = name;
    p.eligible_layers = {layer::edge_server, layer::cloud};
    if (far_edge_execution) p.eligible_layers.insert(layer::onu);
    if (name == "genio") {
        p.description = "edge server co-located with the OLT in the central office";
    } else if (name == "baseline") {
        p.description = "edge server on a remote site, one WAN hop behind the OLT";
    } else {
        throw config_error(fmt::format("unknown topology '{}' (valid: genio, baseline)", name));
    }
    return p;
}

double layer_weights::of(layer l) const
{
    switch (l) {
    case layer::edge_server: return edge_server;
    case layer::cloud: return cloud;
    case layer::far_edge_device:
    case layer::onu: return far_edge;
    case layer::olt: break;
    }
    throw config_error("olt nodes are not schedulable");
}

std::vector<node_id> candidates(const architecture_preset& preset, std::span<const compute::node_state> nodes,
                                const workload::task& task)
{
    std::vector<node_id> out;
    for (const auto& n : nodes) {
        const auto& spec = n.spec();
        if (!preset.eligible_layers.contains(spec.layer) || !spec.can_execute()) continue;
        if (n.admit(task.needs)) continue;
        out.push_back(spec.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double trade_off_score(const candidate& c, double length_mi, const layer_weights& weights)
{
    return (c.queued_and_running + 1) * weights.of(c.layer) * length_mi / c.mips_per_core;
}

placement_decision trade_off_select(const workload::task& task, std::span<const candidate> options,
                                    const layer_weights& weights)
{
    if (options.empty()) throw simulation_error(fmt::format("task {}: no candidates to score", task.id));
    placement_decision d;
    d.task = task.id;
    d.breakdown.reserve(options.size());
    bool first = true;
    for (const auto& c : options) {
        const double s = trade_off_score(c, task.length_mi, weights);
        d.breakdown.push_back({c.node, s});
        if (first || s < d.score || (s == d.score && c.node < d.chosen)) {
            d.chosen = c.node;
            d.score = s;
            first = false;
        }
    }
    return d;
}

placement_decision round_robin::select(const workload::task& task, std::span<const candidate> options)
{
    if (options.empty()) throw simulation_error(fmt::format("task {}: no candidates to pick from", task.id));
    std::vector<node_id> ids;
    ids.reserve(options.size());
    for (const auto& c : options) ids.push_back(c.node);
    std::sort(ids.begin(), ids.end());

    auto next = ids.front();
    if (last_) {
        const auto it = std::upper_bound(ids.begin(), ids.end(), *last_);
        if (it != ids.end()) next = *it;
    }
    last_ = next;

    placement_decision d;
    d.task = task.id;
    d.chosen = next;
    for (const auto& c : options) d.breakdown.push_back({c.node, c.node == next ? 0.0 : 1.0});
    return d;
}

std::string to_string(strategy s)
{
    return s == strategy::trade_off ? "trade-off" : "round-robin";
}

strategy parse_strategy(const std::string& text)
{
    if (text == "trade-off") return strategy::trade_off;
    if (text == "round-robin") return strategy::round_robin;
    throw config_error(fmt::format("unknown strategy '{}' (valid: trade-off, round-robin)", text));
}

placement_decision scheduler::select(const workload::task& task, std::span<const candidate> options)
{
    if (kind_ == strategy::round_robin) return rr_.select(task, options);
    return trade_off_select(task, options, weights_);
}

} // namespace ponedge::orchestrator
