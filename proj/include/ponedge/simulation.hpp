#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <ponedge/config.hpp>
#include <ponedge/metrics.hpp>
#include <ponedge/network.hpp>
#include <ponedge/orchestrator.hpp>
#include <ponedge/workload.hpp>

namespace ponedge {

/// Everything that determines one simulation cell.
struct run_config {
    workload::scenario_spec scenario;
    std::string topology = "genio";
    config::cpu_entry cpu;
    std::uint64_t seed = 1;
    double duration_s = 600.0;
    orchestrator::strategy strategy = orchestrator::strategy::trade_off;
    workload::arrival_mode arrivals = workload::arrival_mode::poisson;
    /// Fixed arrivals only: shared phase instead of a per-device draw.
    std::optional<double> fixed_phase;
    config::model_params model;
    /// Optional per-event text trace.
    std::ostream* trace = nullptr;
};

struct run_result {
    metrics::run_info info;
    std::vector<metrics::task_record> records;
    metrics::run_summary summary;
    std::uint64_t trace_hash = 0;
    std::uint64_t events = 0;
    /// Tasks that found no admissible node.
    std::size_t unplaced = 0;
};

/// Runs one cell on its preset topology. Conservation and latency
/// decomposition are verified before returning (simulation_error otherwise).
run_result simulate(const run_config& cfg);

/// Same, on an explicit topology and pre-generated tasks. Every task's
/// source must be a far-edge device of `topology`.
run_result simulate(const run_config& cfg, const network::topology_spec& topology, std::vector<workload::task> tasks);

} // namespace ponedge
