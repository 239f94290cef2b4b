#pragma once

#include <optional>
#include <queue>
#include <string>
#include <vector>

#include <ponedge/types.hpp>

namespace ponedge::compute {

struct node_spec {
    node_id id;
    std::string name;
    ponedge::layer layer = layer::edge_server;
    double mips = 0.0;
    int cores = 1;
    double ram_mb = 0.0;
    double storage_mb = 0.0;

    [[nodiscard]] double mips_per_core() const { return mips / cores; }
    [[nodiscard]] bool can_execute() const { return mips > 0.0; }
};

/// RAM and storage held by a task from placement until its execution ends.
struct footprint {
    double ram_mb = 1.0;
    double storage_mb = 100.0;

    friend bool operator==(const footprint&, const footprint&) = default;
};

enum class reject_reason { ram, storage };

std::string to_string(reject_reason r);

struct slot {
    int core;
    sim_time exec_start;
    sim_time exec_end;
};

struct load_snapshot {
    /// Dispatched (including still uploading) and not yet completed.
    int queued_and_running = 0;
    double mean_utilization = 0.0;
};

/// Runtime state of one node: per-core FIFO timelines plus held capacity.
///
/// Tasks go to the core that frees up first (lowest index on ties) and run
/// without preemption for exactly length / mips_per_core seconds. Queries must
/// be issued with non-decreasing `now`.
class node_state {
public:
    explicit node_state(node_spec spec);

    [[nodiscard]] const node_spec& spec() const { return spec_; }

    /// Checks the footprint against what is left after current reservations.
    [[nodiscard]] std::optional<reject_reason> admit(const footprint& fp) const;
    void reserve(const footprint& fp);
    void release(const footprint& fp);

    /// A task has been dispatched here and is still uploading; it counts as
    /// load until its submit().
    void expect() { ++inbound_; }

    slot submit(double length_mi, sim_time now);

    load_snapshot snapshot(sim_time now);

    [[nodiscard]] double execution_time(double length_mi) const { return length_mi / spec_.mips_per_core(); }
    [[nodiscard]] sim_time core_free_at(int core) const { return core_free_at_.at(static_cast<std::size_t>(core)); }

private:
    struct interval {
        sim_time start;
        sim_time end;
    };

    void retire(sim_time now);

    node_spec spec_;
    std::vector<sim_time> core_free_at_;
    std::vector<std::vector<interval>> timeline_;
    std::vector<std::size_t> retired_upto_;
    std::priority_queue<sim_time, std::vector<sim_time>, std::greater<>> pending_ends_;
    int inbound_ = 0;
    double retired_busy_ = 0.0;
    double ram_held_ = 0.0;
    double storage_held_ = 0.0;
};

} // namespace ponedge::compute
