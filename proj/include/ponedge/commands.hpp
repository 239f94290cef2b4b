#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <ponedge/config.hpp>
#include <ponedge/metrics.hpp>
#include <ponedge/simulation.hpp>

namespace ponedge::cli {

enum exit_code : int { ok = 0, runtime_failure = 1, configuration_error = 2 };

struct outcome {
    int code = ok;
    std::vector<std::filesystem::path> written;
};

/// Flags shared by every subcommand; unset values fall back to the config
/// document, then to built-in defaults.
struct common_options {
    std::optional<std::string> config_path;
    std::optional<double> duration;
    std::optional<std::string> strategy;
    std::optional<std::string> arrivals;
    std::filesystem::path out_dir = "results";
    int jobs = 1;
};

struct run_options {
    common_options common;
    std::optional<std::string> scenario;
    std::optional<std::string> topology;
    std::optional<double> cpu_mips;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> trace_path;
};

struct sweep_options {
    common_options common;
    std::optional<std::string> scenario;
    std::optional<std::string> seeds;
};

struct compare_options {
    common_options common;
    std::optional<std::string> scenario;
    bool all = false;
    std::optional<std::string> seeds;
    /// The two presets being compared, "first" against "second".
    std::string first = "genio";
    std::string second = "baseline";
};

outcome run_command(const run_options& opts, std::ostream& out, std::ostream& err);
outcome sweep_command(const sweep_options& opts, std::ostream& out, std::ostream& err);
outcome compare_command(const compare_options& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

/// One simulation cell plus where its files live.
struct cell {
    run_config config;
    std::filesystem::path dir;
};

/// Runs (or reuses, when an identical config.json is already on disk) every
/// cell, at most `jobs` at a time. Result order matches `cells`.
std::vector<metrics::run_summary> execute_cells(const std::vector<cell>& cells, int jobs, std::ostream& err,
                                                std::vector<std::filesystem::path>& written);

/// Resolved single-cell experiment document written next to each result.
nlohmann::json resolved_config(const run_config& cfg);

/// Writes `content` to `path` via a temporary file and rename.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// The per-scenario comparison line, e.g. "smart-city: average latency reduction -27.7%".
std::string reduction_line(const std::string& scenario, double reduction_pct);

} // namespace ponedge::cli
