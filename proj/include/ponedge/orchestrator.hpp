#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <ponedge/compute.hpp>
#include <ponedge/network.hpp>
#include <ponedge/types.hpp>
#include <ponedge/workload.hpp>

namespace ponedge::orchestrator {

struct architecture_preset {
    std::string name;
    std::set<layer> eligible_layers;
    std::string description;
};

/// Throws config_error for anything but "genio" / "baseline".
architecture_preset architecture(const std::string& name, bool far_edge_execution = false);

/// Per-layer multipliers for the trade-off score.
struct layer_weights {
    double edge_server = 1.0;
    double cloud = 1.8;
    double far_edge = 1.3; ///< far-edge devices and ONUs

    [[nodiscard]] double of(layer l) const;

    friend bool operator==(const layer_weights&, const layer_weights&) = default;
};

/// What a scheduler sees of one candidate node.
struct candidate {
    node_id node;
    ponedge::layer layer = layer::edge_server;
    double mips_per_core = 0.0;
    int queued_and_running = 0;
};

struct scored {
    node_id node;
    double score;
};

struct placement_decision {
    task_id task = 0;
    node_id chosen;
    double score = 0.0;
    std::vector<scored> breakdown;
};

/// Nodes of eligible layers that can execute and admit the task's footprint,
/// in id order.
std::vector<node_id> candidates(const architecture_preset& preset, std::span<const compute::node_state> nodes,
                                const workload::task& task);

/// (load + 1) * layer weight * length / per-core capacity.
double trade_off_score(const candidate& c, double length_mi, const layer_weights& weights);

/// Lowest score wins; equal scores go to the lowest node id.
/// Requires a non-empty candidate list.
placement_decision trade_off_select(const workload::task& task, std::span<const candidate> options,
                                    const layer_weights& weights);

/// Cycles through candidates in id order, skipping any that are missing from
/// the current list.
class round_robin {
public:
    placement_decision select(const workload::task& task, std::span<const candidate> options);

private:
    std::optional<node_id> last_;
};

enum class strategy { trade_off, round_robin };

std::string to_string(strategy s);
strategy parse_strategy(const std::string& text);

class scheduler {
public:
    scheduler(strategy kind, layer_weights weights) : kind_(kind), weights_(weights) {}

    placement_decision select(const workload::task& task, std::span<const candidate> options);

private:
    strategy kind_;
    layer_weights weights_;
    round_robin rr_;
};

} // namespace ponedge::orchestrator
