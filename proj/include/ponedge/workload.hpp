#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <ponedge/compute.hpp>
#include <ponedge/types.hpp>

namespace ponedge::workload {

/// One application workload: how many devices, how often each sends, and
/// what each request costs.
struct scenario_spec {
    std::string name;
    int users = 0;
    double rate_per_min = 0.0; ///< tasks per minute per device
    double deadline_s = 0.0;   ///< maximum desired latency
    double length_mi = 0.0;
    data_size request;
    data_size result;

    [[nodiscard]] double mean_interval() const { return 60.0 / rate_per_min; }

    friend bool operator==(const scenario_spec&, const scenario_spec&) = default;
};

/// Throws config_error naming the first non-positive field.
void validate(const scenario_spec& spec);

std::vector<std::string> preset_names();

/// Throws config_error listing the valid names when `name` is unknown.
scenario_spec scenario_preset(const std::string& name);

enum class task_status { pending, in_transit, queued, running, delivered, unfinished };

std::string to_string(task_status s);

struct task {
    task_id id = 0;
    node_id source_device;
    sim_time generated_at = 0.0;
    double length_mi = 0.0;
    data_size request;
    data_size result;
    double deadline_s = 0.0;
    compute::footprint needs;

    std::optional<sim_time> uplink_done;
    std::optional<sim_time> exec_start;
    std::optional<sim_time> exec_end;
    std::optional<sim_time> delivered_at;
    task_status status = task_status::pending;

    /// Moves along the lifecycle; throws simulation_error on an illegal step.
    void advance(task_status next);
};

enum class arrival_mode { poisson, fixed };

std::string to_string(arrival_mode m);
arrival_mode parse_arrival_mode(const std::string& text);

struct arrival_options {
    arrival_mode mode = arrival_mode::poisson;
    /// Fixed mode only: use this phase for every device instead of drawing one.
    std::optional<double> fixed_phase;
    compute::footprint needs;
};

/// One independent arrival process per device, every arrival strictly before
/// `duration`. Sorted by generation time, ties by device id; ids are assigned
/// in that order starting at 0.
std::vector<task> generate_arrivals(const scenario_spec& spec, double duration, std::uint64_t seed,
                                    std::span<const node_id> devices, const arrival_options& options = {});

} // namespace ponedge::workload
