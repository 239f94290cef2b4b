#include <ponedge/commands.hpp>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace ponedge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error(fmt::format("cannot read '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Config document (or an empty one) with command-line flags layered on top.
json base_document(const common_options& common)
{
    json doc = json::object();
    if (common.config_path) {
        doc = config::parse_document(read_file(*common.config_path));
        if (!doc.is_object()) throw config_error("experiment document must be a JSON object");
    }
    if (common.duration) doc["duration"] = *common.duration;
    if (common.strategy) doc["strategy"] = *common.strategy;
    if (common.arrivals) doc["arrivals"] = *common.arrivals;
    return doc;
}

void apply_seeds(json& doc, const std::optional<std::string>& flag)
{
    if (flag) {
        doc["seeds"] = config::parse_seed_list(*flag);
    } else if (!doc.contains("seeds")) {
        if (const char* env = std::getenv("PONEDGE_SEED"); env != nullptr && *env != '\0') {
            doc["seeds"] = config::parse_seed_list(env);
        }
    }
}

std::string mips_dir(double mips)
{
    return fmt::format("{:.0f}", mips);
}

fs::path cell_dir(const fs::path& out, const run_config& cfg)
{
    return out / cfg.scenario.name / cfg.topology / mips_dir(cfg.cpu.mips) / std::to_string(cfg.seed);
}

run_config make_config(const config::experiment_spec& spec, const workload::scenario_spec& scenario,
                       const std::string& topology, const config::cpu_entry& cpu, std::uint64_t seed)
{
    run_config cfg;
    cfg.scenario = scenario;
    cfg.topology = topology;
    cfg.cpu = cpu;
    cfg.seed = seed;
    cfg.duration_s = spec.duration_s;
    cfg.strategy = spec.strategy;
    cfg.arrivals = spec.arrivals;
    cfg.model = spec.model;
    return cfg;
}

std::vector<config::cpu_entry> cpus_for(const config::experiment_spec& spec, const workload::scenario_spec& scenario)
{
    if (!spec.cpus.empty()) return spec.cpus;
    return config::cpu_grid(scenario.name);
}

std::vector<cell> plan(const config::experiment_spec& spec, const workload::scenario_spec& scenario,
                       const std::vector<std::string>& topologies, const fs::path& out)
{
    std::vector<cell> cells;
    for (const auto& topology : topologies) {
        for (const auto& cpu : cpus_for(spec, scenario)) {
            for (auto seed : spec.seeds) {
                auto cfg = make_config(spec, scenario, topology, cpu, seed);
                auto dir = cell_dir(out, cfg);
                cells.push_back({std::move(cfg), std::move(dir)});
            }
        }
    }
    return cells;
}

std::optional<metrics::run_summary> cached_summary(const cell& c)
{
    std::error_code ec;
    if (!fs::exists(c.dir / "config.json", ec) || !fs::exists(c.dir / "summary.csv", ec) ||
        !fs::exists(c.dir / "tasks.csv", ec)) {
        return std::nullopt;
    }
    try {
        if (json::parse(read_file(c.dir / "config.json")) != resolved_config(c.config)) return std::nullopt;
        std::istringstream in(read_file(c.dir / "summary.csv"));
        auto rows = metrics::read_summary_csv(in);
        if (rows.size() != 1) return std::nullopt;
        return rows.front();
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

/// Simulates one cell and writes its three files; config.json goes last and
/// marks the cell complete.
metrics::run_summary run_cell(const cell& c, std::vector<fs::path>& written)
{
    const auto result = simulate(c.config);
    std::ostringstream tasks;
    metrics::write_tasks_csv(tasks, result.records, result.info);
    std::ostringstream summary;
    metrics::write_summary_csv(summary, std::span(&result.summary, 1));

    fs::create_directories(c.dir);
    write_atomically(c.dir / "tasks.csv", tasks.str());
    write_atomically(c.dir / "summary.csv", summary.str());
    write_atomically(c.dir / "config.json", resolved_config(c.config).dump(2) + "\n");
    written.insert(written.end(), {c.dir / "tasks.csv", c.dir / "summary.csv", c.dir / "config.json"});
    return result.summary;
}

std::string table_number(double v, int precision)
{
    return fmt::format("{:.{}f}", v, precision);
}

void print_summary_table(std::ostream& out, std::span<const metrics::run_summary> rows)
{
    fmt::print(out, "{:<16} {:<9} {:<22} {:>10} {:>5} {:>7} {:>9} {:>8} {:>13} {:>13} {:>9}\n", "scenario", "topology",
               "cpu", "mips", "seed", "tasks", "delivered", "tsr_%", "mean_lat_s", "p95_lat_s", "deadline%");
    for (const auto& s : rows) {
        fmt::print(out, "{:<16} {:<9} {:<22} {:>10.0f} {:>5} {:>7} {:>9} {:>8} {:>13} {:>13} {:>9}\n", s.scenario,
                   s.topology, s.cpu, s.mips, s.seed, s.tasks_generated, s.tasks_delivered, table_number(s.tsr_pct, 2),
                   table_number(s.mean_latency_s, 6), table_number(s.p95_latency_s, 6),
                   table_number(s.deadline_hit_pct, 2));
    }
}

template <typename F>
outcome guarded(std::ostream& err, F&& body)
{
    try {
        return body();
    } catch (const config_error& e) {
        fmt::print(err, "configuration error: {}\n", e.what());
        return {configuration_error, {}};
    } catch (const metrics::incomparable_runs& e) {
        fmt::print(err, "configuration error: {}\n", e.what());
        return {configuration_error, {}};
    } catch (const std::exception& e) {
        fmt::print(err, "runtime failure: {}\n", e.what());
        return {runtime_failure, {}};
    }
}

struct comparison_row {
    std::string cpu;
    double mips = 0.0;
    metrics::stat first_latency;
    metrics::stat second_latency;
    double reduction_pct = 0.0;
    metrics::stat first_tsr;
    metrics::stat second_tsr;
};

} // namespace

void write_atomically(const fs::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        out << content;
        out.flush();
        if (!out) throw std::runtime_error(fmt::format("short write to '{}'", tmp.string()));
    }
    fs::rename(tmp, path);
}

json resolved_config(const run_config& cfg)
{
    config::experiment_spec spec;
    spec.scenarios = {cfg.scenario};
    spec.topologies = {cfg.topology};
    spec.cpus = {cfg.cpu};
    spec.seeds = {cfg.seed};
    spec.duration_s = cfg.duration_s;
    spec.strategy = cfg.strategy;
    spec.arrivals = cfg.arrivals;
    spec.model = cfg.model;
    return config::to_json(spec);
}

std::string reduction_line(const std::string& scenario, double reduction_pct)
{
    return fmt::format("{}: average latency reduction {:.1f}%", scenario, reduction_pct);
}

std::vector<metrics::run_summary> execute_cells(const std::vector<cell>& cells, int jobs, std::ostream& err,
                                                std::vector<fs::path>& written)
{
    std::vector<metrics::run_summary> results(cells.size());
    std::vector<std::exception_ptr> failures(cells.size());
    std::vector<std::vector<fs::path>> files(cells.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            try {
                if (auto hit = cached_summary(cells[i])) {
                    results[i] = *hit;
                } else {
                    results[i] = run_cell(cells[i], files[i]);
                    std::lock_guard lock(log_mutex);
                    fmt::print(err, "ran {}\n", cells[i].dir.string());
                }
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    const auto threads = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, cells.size()); ++t) pool.emplace_back(worker);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        written.insert(written.end(), files[i].begin(), files[i].end());
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return results;
}

outcome run_command(const run_options& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> outcome {
        auto doc = base_document(opts.common);
        if (opts.scenario) doc["scenario"] = *opts.scenario;
        if (opts.topology) doc["topology"] = *opts.topology;
        if (opts.cpu_mips) doc["cpus"] = json::array({{{"mips", *opts.cpu_mips}}});
        if (opts.seed) doc["seeds"] = json::array({*opts.seed});
        apply_seeds(doc, std::nullopt);
        const auto spec = config::parse_experiment(doc);

        if (spec.scenarios.size() != 1) throw config_error("run takes exactly one scenario");
        if (spec.topologies.size() != 1) throw config_error("run takes exactly one topology (--topology)");
        if (spec.cpus.size() != 1) throw config_error("run takes exactly one cpu (--cpu-mips)");

        auto cfg = make_config(spec, spec.scenarios.front(), spec.topologies.front(), spec.cpus.front(),
                               spec.seeds.front());
        const cell c{cfg, cell_dir(opts.common.out_dir, cfg)};

        std::ostringstream trace;
        auto traced = c.config;
        if (opts.trace_path) traced.trace = &trace;

        outcome result;
        const auto summary = run_cell({traced, c.dir}, result.written);
        if (opts.trace_path) {
            write_atomically(*opts.trace_path, trace.str());
            result.written.push_back(*opts.trace_path);
        }
        print_summary_table(out, std::span(&summary, 1));
        return result;
    });
}

outcome sweep_command(const sweep_options& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> outcome {
        auto doc = base_document(opts.common);
        if (opts.scenario) doc["scenario"] = *opts.scenario;
        apply_seeds(doc, opts.seeds);
        const auto spec = config::parse_experiment(doc);

        outcome result;
        for (const auto& scenario : spec.scenarios) {
            const auto cells = plan(spec, scenario, spec.topologies, opts.common.out_dir);
            const auto summaries = execute_cells(cells, opts.common.jobs, err, result.written);

            const std::vector<metrics::group_key> keys{metrics::group_key::scenario, metrics::group_key::topology,
                                                       metrics::group_key::cpu};
            const auto rows = metrics::aggregate(summaries, keys);
            const auto dir = opts.common.out_dir / scenario.name;
            fs::create_directories(dir);
            std::ostringstream all;
            metrics::write_summary_csv(all, summaries);
            write_atomically(dir / "summary.csv", all.str());
            std::ostringstream agg;
            metrics::write_aggregate_csv(agg, rows);
            write_atomically(dir / "aggregate.csv", agg.str());
            result.written.push_back(dir / "summary.csv");
            result.written.push_back(dir / "aggregate.csv");

            fmt::print(out, "{:<16} {:<9} {:<22} {:>10} {:>5} {:>16} {:>20}\n", "scenario", "topology", "cpu", "mips",
                       "runs", "tsr_% (std)", "mean_lat_s (std)");
            for (const auto& r : rows) {
                fmt::print(out, "{:<16} {:<9} {:<22} {:>10.0f} {:>5} {:>16} {:>20}\n", r.scenario, r.topology, r.cpu,
                           r.mips, r.runs, fmt::format("{:.2f} ({:.2f})", r.tsr_pct.mean, r.tsr_pct.stddev),
                           fmt::format("{:.6f} ({:.6f})", r.mean_latency_s.mean, r.mean_latency_s.stddev));
            }
        }
        return result;
    });
}

outcome compare_command(const compare_options& opts, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&]() -> outcome {
        auto doc = base_document(opts.common);
        if (opts.all && opts.scenario) throw config_error("use either --scenario or --all");
        if (opts.all) {
            doc["scenario"] = workload::preset_names();
        } else if (opts.scenario) {
            doc["scenario"] = *opts.scenario;
        }
        apply_seeds(doc, opts.seeds);
        orchestrator::architecture(opts.first);
        orchestrator::architecture(opts.second);
        const auto spec = config::parse_experiment(doc);

        std::vector<std::string> topologies{opts.first};
        if (opts.second != opts.first) topologies.push_back(opts.second);

        outcome result;
        std::vector<std::string> footer;
        fmt::print(out, "{:<16} {:<22} {:>10} {:>14} {:>14} {:>12} {:>10} {:>10}\n", "scenario", "cpu", "mips",
                   opts.first + "_lat_s", opts.second + "_lat_s", "reduction_%", opts.first + "_tsr",
                   opts.second + "_tsr");
        for (const auto& scenario : spec.scenarios) {
            const auto cells = plan(spec, scenario, topologies, opts.common.out_dir);
            const auto summaries = execute_cells(cells, opts.common.jobs, err, result.written);

            std::vector<comparison_row> rows;
            double reduction_sum = 0.0;
            for (const auto& cpu : cpus_for(spec, scenario)) {
                comparison_row row;
                row.cpu = cpu.label;
                row.mips = cpu.mips;
                std::vector<double> first_lat, second_lat, first_tsr, second_tsr, reductions;
                for (auto seed : spec.seeds) {
                    auto find = [&](const std::string& topology) -> const metrics::run_summary& {
                        for (const auto& s : summaries) {
                            if (s.topology == topology && s.mips == cpu.mips && s.seed == seed) return s;
                        }
                        throw std::runtime_error("missing cell for " + topology);
                    };
                    const auto& a = find(opts.first);
                    const auto& b = find(opts.second);
                    first_lat.push_back(a.mean_latency_s);
                    second_lat.push_back(b.mean_latency_s);
                    first_tsr.push_back(a.tsr_pct);
                    second_tsr.push_back(b.tsr_pct);
                    reductions.push_back(metrics::compare(a, b));
                }
                auto mean = [](const std::vector<double>& xs) {
                    double s = 0.0;
                    for (double x : xs) s += x;
                    return metrics::stat{s / static_cast<double>(xs.size()), 0.0};
                };
                row.first_latency = mean(first_lat);
                row.second_latency = mean(second_lat);
                row.first_tsr = mean(first_tsr);
                row.second_tsr = mean(second_tsr);
                row.reduction_pct = mean(reductions).mean;
                reduction_sum += row.reduction_pct;
                rows.push_back(row);
            }
            const double average = reduction_sum / static_cast<double>(rows.size());

            std::ostringstream table;
            table << "scenario,cpu,mips," << opts.first << "_mean_latency_s," << opts.second << "_mean_latency_s,"
                  << "reduction_pct," << opts.first << "_tsr_pct," << opts.second << "_tsr_pct\n";
            std::ostringstream plot;
            plot << "scenario,cpu,mips,topology,tsr_pct,mean_latency_s,deadline_s\n";
            for (const auto& r : rows) {
                fmt::print(out, "{:<16} {:<22} {:>10.0f} {:>14.6f} {:>14.6f} {:>12.2f} {:>10.2f} {:>10.2f}\n",
                           scenario.name, r.cpu, r.mips, r.first_latency.mean, r.second_latency.mean, r.reduction_pct,
                           r.first_tsr.mean, r.second_tsr.mean);
                table << scenario.name << ',' << r.cpu << ',' << metrics::format_decimal(r.mips) << ','
                      << metrics::format_decimal(r.first_latency.mean) << ','
                      << metrics::format_decimal(r.second_latency.mean) << ','
                      << metrics::format_decimal(r.reduction_pct) << ',' << metrics::format_decimal(r.first_tsr.mean)
                      << ',' << metrics::format_decimal(r.second_tsr.mean) << '\n';
                auto plot_row = [&](const std::string& topology, double tsr, double lat) {
                    plot << scenario.name << ',' << r.cpu << ',' << metrics::format_decimal(r.mips) << ',' << topology
                         << ',' << metrics::format_decimal(tsr) << ',' << metrics::format_decimal(lat) << ','
                         << metrics::format_decimal(scenario.deadline_s) << '\n';
                };
                plot_row(opts.first, r.first_tsr.mean, r.first_latency.mean);
                if (opts.second != opts.first) plot_row(opts.second, r.second_tsr.mean, r.second_latency.mean);
            }
            table << "# " << reduction_line(scenario.name, average) << '\n';
            const auto dir = opts.common.out_dir / scenario.name;
            fs::create_directories(dir);
            write_atomically(dir / "comparison.csv", table.str());
            write_atomically(dir / "plot.csv", plot.str());
            result.written.push_back(dir / "comparison.csv");
            result.written.push_back(dir / "plot.csv");
            footer.push_back(reduction_line(scenario.name, average));
        }
        for (const auto& line : footer) fmt::print(out, "{}\n", line);
        return result;
    });
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Discrete-event simulator for edge computing in PON central offices"};
    app.require_subcommand(1);

    auto add_common = [](CLI::App* sub, common_options& c) {
        sub->add_option("--config", c.config_path, "JSON experiment document");
        sub->add_option("--duration", c.duration, "Simulated seconds per run");
        sub->add_option("--strategy", c.strategy, "trade-off | round-robin");
        sub->add_option("--arrivals", c.arrivals, "poisson | fixed");
        sub->add_option("--out-dir", c.out_dir, "Results directory")->capture_default_str();
        sub->add_option("--jobs", c.jobs, "Parallel simulation cells")->capture_default_str();
    };

    run_options run;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario/topology/cpu/seed cell");
    add_common(run_cmd, run.common);
    run_cmd->add_option("--scenario", run.scenario, "smart-city | e-health | smart-building | aigc");
    run_cmd->add_option("--topology", run.topology, "genio | baseline");
    run_cmd->add_option("--cpu-mips", run.cpu_mips, "Edge server MIPS");
    run_cmd->add_option("--seed", run.seed, "Random seed");
    run_cmd->add_option("--trace", run.trace_path, "Write the event trace to this file");

    sweep_options sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Both topologies x the scenario's CPU grid x seeds");
    add_common(sweep_cmd, sweep.common);
    sweep_cmd->add_option("--scenario", sweep.scenario, "Scenario preset");
    sweep_cmd->add_option("--seeds", sweep.seeds, "Seed list: 1..5 or 1,2,3");

    compare_options compare;
    auto* compare_cmd = app.add_subcommand("compare", "GENIO versus baseline latency and TSR table");
    add_common(compare_cmd, compare.common);
    compare_cmd->add_option("--scenario", compare.scenario, "Scenario preset");
    compare_cmd->add_flag("--all", compare.all, "All four scenarios");
    compare_cmd->add_option("--seeds", compare.seeds, "Seed list: 1..5 or 1,2,3");
    compare_cmd->add_option("--first", compare.first, "First topology of the pair")->capture_default_str();
    compare_cmd->add_option("--against", compare.second, "Second topology of the pair")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream cli_out;
        std::ostringstream cli_err;
        const int code = app.exit(e, cli_out, cli_err);
        out << cli_out.str();
        err << cli_err.str();
        return code == 0 ? ok : configuration_error;
    }

    outcome result;
    if (run_cmd->parsed()) {
        result = run_command(run, out, err);
    } else if (sweep_cmd->parsed()) {
        result = sweep_command(sweep, out, err);
    } else {
        result = compare_command(compare, out, err);
    }
    return result.code;
}

} // namespace ponedge::cli
