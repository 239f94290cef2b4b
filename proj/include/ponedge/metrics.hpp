#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <ponedge/types.hpp>
#include <ponedge/workload.hpp>

namespace ponedge::metrics {

class empty_run : public std::runtime_error {
public:
    empty_run() : std::runtime_error("empty-run: no tasks were generated") {}
};

class incomparable_runs : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct task_record {
    task_id id = 0;
    std::string node; ///< empty when the task was never placed
    sim_time generated_at = 0.0;
    std::optional<sim_time> uplink_done;
    std::optional<sim_time> exec_start;
    std::optional<sim_time> exec_end;
    std::optional<sim_time> delivered_at;
    workload::task_status status = workload::task_status::pending;
    double deadline_s = 0.0;

    [[nodiscard]] bool delivered() const { return status == workload::task_status::delivered; }
    /// delivered_at - generated_at; only meaningful when delivered.
    [[nodiscard]] double latency() const { return delivered() ? *delivered_at - generated_at : 0.0; }
    [[nodiscard]] bool deadline_met() const { return delivered() && latency() <= deadline_s; }
};

task_record make_record(const workload::task& t, std::string node_name);

/// Identity of one simulation cell.
struct run_info {
    std::string scenario;
    std::string topology;
    std::string cpu;
    double mips = 0.0;
    std::uint64_t seed = 0;
    double deadline_s = 0.0;
    /// Count deadline misses as failures in the success rate.
    bool strict_deadline = false;
};

struct node_utilization {
    std::string node;
    double utilization = 0.0;
};

struct run_summary {
    std::string scenario;
    std::string topology;
    std::string cpu;
    double mips = 0.0;
    std::uint64_t seed = 0;
    std::size_t tasks_generated = 0;
    std::size_t tasks_delivered = 0;
    std::size_t tasks_unfinished = 0;
    double tsr_pct = 0.0;
    double mean_latency_s = 0.0; ///< over delivered tasks; NaN if none
    double p95_latency_s = 0.0;
    double deadline_hit_pct = 0.0;
    std::vector<node_utilization> utilization;
};

/// Throws empty_run when `records` is empty.
run_summary summarize(std::span<const task_record> records, const run_info& info);

/// Percent change of mean latency from baseline to genio; negative when genio
/// is faster. Throws incomparable_runs unless scenario, cpu and seed match.
double compare(const run_summary& genio, const run_summary& baseline);

/// Throws simulation_error when generated != delivered + unfinished, or when a
/// delivered task's latency differs from the sum of its phases by more than
/// `tolerance` seconds.
void verify(std::span<const task_record> records, const run_summary& summary, double tolerance = 1e-12);

enum class group_key { scenario, topology, cpu };

struct stat {
    double mean = 0.0;
    double stddev = 0.0;
};

struct aggregate_row {
    std::string scenario;
    std::string topology;
    std::string cpu;
    double mips = 0.0;
    std::size_t runs = 0;
    stat tsr_pct;
    stat mean_latency_s;
    stat p95_latency_s;
    stat deadline_hit_pct;
};

/// One row per distinct combination of the chosen keys (fields outside the
/// keys are left blank), sorted by scenario, topology, mips, cpu. Standard
/// deviation is the sample deviation, 0 for a single run.
std::vector<aggregate_row> aggregate(std::span<const run_summary> summaries, std::span<const group_key> keys);

/// Decimal (non-exponent) rendering with at least 12 significant digits.
std::string format_decimal(double value);

void write_tasks_csv(std::ostream& out, std::span<const task_record> records, const run_info& info);
void write_summary_csv(std::ostream& out, std::span<const run_summary> summaries);
void write_aggregate_csv(std::ostream& out, std::span<const aggregate_row> rows);

/// Parses a file written by write_summary_csv (utilization is not stored).
std::vector<run_summary> read_summary_csv(std::istream& in);

std::vector<std::string> split_csv_line(const std::string& line);

} // namespace ponedge::metrics
