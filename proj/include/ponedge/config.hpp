#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include <ponedge/compute.hpp>
#include <ponedge/network.hpp>
#include <ponedge/orchestrator.hpp>
#include <ponedge/workload.hpp>

namespace ponedge::config {

struct node_sizing {
    double mips = 0.0;
    int cores = 1;
    double ram_mb = 0.0;
    double storage_mb = 0.0;

    friend bool operator==(const node_sizing&, const node_sizing&) = default;
};

/// Every calibration constant of the model. The defaults are the shipped
/// calibration used by the acceptance suite.
struct model_params {
    network::link_spec fiber{link_kind::fiber, 1.0e9, 0.0, 0.0, network::fiber_propagation_mps};
    network::link_spec man{link_kind::man, 1.0e9, 0.0, 1.0e-3, network::fiber_propagation_mps};
    network::link_spec wan{link_kind::wan, 1.0e10, 0.0, 10.0e-3, network::fiber_propagation_mps};

    double access_fiber_m = 100.0;    ///< ONU to OLT
    double olt_edge_wan_m = 100.0;    ///< baseline only
    double edge_cloud_wan_m = 50000.0;

    node_sizing edge{0.0, 1, 32768.0, 1048576.0}; ///< mips comes from the CPU under test
    node_sizing cloud{1.0e6, 16, 32768.0, 1048576.0};
    node_sizing device{5000.0, 1, 1024.0, 16384.0};
    node_sizing onu{5000.0, 1, 1024.0, 16384.0};

    orchestrator::layer_weights weights;
    bool far_edge_execution = false;
    /// Delay between a task's arrival and the start of its upload, standing in
    /// for the round trip to the cloud-hosted scheduler.
    double control_plane_latency_s = 0.0;
    bool strict_deadline = false;
    compute::footprint task_footprint;

    friend bool operator==(const model_params&, const model_params&) = default;
};

/// Builds the GENIO or baseline network for `scenario.users` devices with an
/// edge server rated `edge_mips`. Node order: devices, ONUs, OLT, edge, cloud.
network::topology_spec topology_preset(const std::string& name, const workload::scenario_spec& scenario,
                                       double edge_mips, const model_params& model = {});

/// Throws config_error unless the topology is a connected tree whose devices
/// each hang off exactly one ONU through a local link, with one cloud node.
void validate(const network::topology_spec& topology);

struct cpu_entry {
    std::string label;
    double mips = 0.0;

    friend bool operator==(const cpu_entry&, const cpu_entry&) = default;
};

/// The five processors evaluated for a scenario, ascending MIPS.
std::vector<cpu_entry> cpu_grid(const std::string& scenario);

/// Label of a known processor with exactly this rating, else "custom-<mips>".
std::string cpu_label(double mips);

struct experiment_spec {
    std::vector<workload::scenario_spec> scenarios;
    std::vector<std::string> topologies;
    /// Empty means each scenario's own CPU grid.
    std::vector<cpu_entry> cpus;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double duration_s = 600.0;
    orchestrator::strategy strategy = orchestrator::strategy::trade_off;
    workload::arrival_mode arrivals = workload::arrival_mode::poisson;
    model_params model;

    friend bool operator==(const experiment_spec&, const experiment_spec&) = default;
};

/// Parses and validates a JSON experiment document; unknown keys are errors.
/// Throws config_error with line/column for syntax errors and the field name
/// for semantic ones.
experiment_spec parse_experiment(std::string_view document);
/// JSON syntax check only; errors carry line and column.
nlohmann::json parse_document(std::string_view document);
experiment_spec parse_experiment(const nlohmann::json& document);
// Text overloads; without them a literal converts to both string_view and json.
inline experiment_spec parse_experiment(const char* document) { return parse_experiment(std::string_view(document)); }
inline experiment_spec parse_experiment(const std::string& document)
{
    return parse_experiment(std::string_view(document));
}

/// Fully resolved form, every default spelled out.
nlohmann::json to_json(const experiment_spec& spec);
nlohmann::json to_json(const model_params& model);
nlohmann::json to_json(const workload::scenario_spec& scenario);

model_params parse_model(const nlohmann::json& j);
workload::scenario_spec parse_scenario(const nlohmann::json& j);

/// Parses seed lists such as "3", "1..5" or "1,4,9".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

} // namespace ponedge::config
