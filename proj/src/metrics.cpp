#include <ponedge/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

#include <fmt/format.h>

namespace ponedge::metrics {

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string opt_time(const std::optional<sim_time>& t)
{
    return t ? format_decimal(*t) : std::string{};
}

stat mean_std(const std::vector<double>& xs)
{
    stat s;
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(xs.size() - 1));
    }
    return s;
}

double to_double(const std::string& s)
{
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw config_error("malformed number '" + s + "'");
    return v;
}

} // namespace

task_record make_record(const workload::task& t, std::string node_name)
{
    task_record r;
    r.id = t.id;
    r.node = std::move(node_name);
    r.generated_at = t.generated_at;
    r.uplink_done = t.uplink_done;
    r.exec_start = t.exec_start;
    r.exec_end = t.exec_end;
    r.delivered_at = t.delivered_at;
    r.status = t.status;
    r.deadline_s = t.deadline_s;
    return r;
}

run_summary summarize(std::span<const task_record> records, const run_info& info)
{
    if (records.empty()) throw empty_run();
    run_summary s;
    s.scenario = info.scenario;
    s.topology = info.topology;
    s.cpu = info.cpu;
    s.mips = info.mips;
    s.seed = info.seed;
    s.tasks_generated = records.size();

    std::vector<double> latencies;
    std::size_t hits = 0;
    for (const auto& r : records) {
        if (!r.delivered()) continue;
        latencies.push_back(r.latency());
        if (r.latency() <= info.deadline_s) ++hits;
    }
    s.tasks_delivered = latencies.size();
    s.tasks_unfinished = s.tasks_generated - s.tasks_delivered;
    const auto successes = info.strict_deadline ? hits : s.tasks_delivered;
    s.tsr_pct = 100.0 * static_cast<double>(successes) / static_cast<double>(s.tasks_generated);

    if (latencies.empty()) {
        s.mean_latency_s = std::numeric_limits<double>::quiet_NaN();
        s.p95_latency_s = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double l : latencies) sum += l;
    s.mean_latency_s = sum / static_cast<double>(latencies.size());
    std::sort(latencies.begin(), latencies.end());
    // Nearest-rank percentile.
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(latencies.size())));
    s.p95_latency_s = latencies[std::max<std::size_t>(rank, 1) - 1];
    s.deadline_hit_pct = 100.0 * static_cast<double>(hits) / static_cast<double>(latencies.size());
    return s;
}

double compare(const run_summary& genio, const run_summary& baseline)
{
    if (genio.scenario != baseline.scenario || genio.cpu != baseline.cpu || genio.mips != baseline.mips ||
        genio.seed != baseline.seed) {
        throw incomparable_runs(fmt::format("incomparable-runs: ({}, {}, seed {}) vs ({}, {}, seed {})", genio.scenario,
                                            genio.cpu, genio.seed, baseline.scenario, baseline.cpu, baseline.seed));
    }
    return 100.0 * (genio.mean_latency_s - baseline.mean_latency_s) / baseline.mean_latency_s;
}

void verify(std::span<const task_record> records, const run_summary& summary, double tolerance)
{
    if (summary.tasks_generated != summary.tasks_delivered + summary.tasks_unfinished ||
        summary.tasks_generated != records.size()) {
        throw simulation_error(fmt::format("conservation violated: generated {} != delivered {} + unfinished {}",
                                           summary.tasks_generated, summary.tasks_delivered, summary.tasks_unfinished));
    }
    for (const auto& r : records) {
        if (!r.delivered()) continue;
        if (!r.uplink_done || !r.exec_start || !r.exec_end || !r.delivered_at) {
            throw simulation_error(fmt::format("task {}: delivered without a full lifecycle", r.id));
        }
        const double uplink = *r.uplink_done - r.generated_at;
        const double wait = *r.exec_start - *r.uplink_done;
        const double exec = *r.exec_end - *r.exec_start;
        const double downlink = *r.delivered_at - *r.exec_end;
        if (uplink < 0.0 || wait < 0.0 || exec < 0.0 || downlink < 0.0) {
            throw simulation_error(fmt::format("task {}: negative latency component", r.id));
        }
        if (std::abs(uplink + wait + exec + downlink - r.latency()) > tolerance) {
            throw simulation_error(fmt::format("task {}: latency decomposition off by {:.3g} s", r.id,
                                               uplink + wait + exec + downlink - r.latency()));
        }
    }
}

std::vector<aggregate_row> aggregate(std::span<const run_summary> summaries, std::span<const group_key> keys)
{
    auto has = [&](group_key k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
    const bool by_scenario = has(group_key::scenario);
    const bool by_topology = has(group_key::topology);
    const bool by_cpu = has(group_key::cpu);

    using key = std::tuple<std::string, std::string, double, std::string>;
    std::map<key, std::vector<const run_summary*>> groups;
    for (const auto& s : summaries) {
        groups[{by_scenario ? s.scenario : "", by_topology ? s.topology : "", by_cpu ? s.mips : 0.0,
                by_cpu ? s.cpu : ""}]
            .push_back(&s);
    }

    std::vector<aggregate_row> rows;
    for (const auto& [k, members] : groups) {
        aggregate_row row;
        std::tie(row.scenario, row.topology, row.mips, row.cpu) = k;
        row.runs = members.size();
        std::vector<double> tsr, mean, p95, hit;
        for (const auto* m : members) {
            tsr.push_back(m->tsr_pct);
            mean.push_back(m->mean_latency_s);
            p95.push_back(m->p95_latency_s);
            hit.push_back(m->deadline_hit_pct);
        }
        row.tsr_pct = mean_std(tsr);
        row.mean_latency_s = mean_std(mean);
        row.p95_latency_s = mean_std(p95);
        row.deadline_hit_pct = mean_std(hit);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_decimal(double value)
{
    if (std::isnan(value)) return "nan";
    if (value == 0.0) return "0";
    if (value == std::trunc(value) && std::abs(value) < 1e15) return fmt::format("{:.0f}", value);
    const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(value))));
    const int decimals = std::max(0, 11 - magnitude);
    return fmt::format("{:.{}f}", value, decimals);
}

void write_tasks_csv(std::ostream& out, std::span<const task_record> records, const run_info& info)
{
    out << "task_id,scenario,topology,cpu,seed,node_id,generated_at,uplink_done,exec_start,exec_end,delivered_at,"
           "status,latency_s,deadline_met\n";
    const auto prefix = fmt::format("{},{},{},{}", csv_field(info.scenario), csv_field(info.topology),
                                    csv_field(info.cpu), info.seed);
    for (const auto& r : records) {
        out << r.id << ',' << prefix << ',' << csv_field(r.node) << ',' << format_decimal(r.generated_at) << ','
            << opt_time(r.uplink_done) << ',' << opt_time(r.exec_start) << ',' << opt_time(r.exec_end) << ','
            << opt_time(r.delivered_at) << ',' << workload::to_string(r.status) << ','
            << (r.delivered() ? format_decimal(r.latency()) : std::string{}) << ','
            << (r.deadline_met() ? "true" : "false") << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const run_summary> summaries)
{
    out << "scenario,topology,cpu,mips,seed,tasks_generated,tasks_delivered,tsr_pct,mean_latency_s,p95_latency_s,"
           "deadline_hit_pct\n";
    for (const auto& s : summaries) {
        out << csv_field(s.scenario) << ',' << csv_field(s.topology) << ',' << csv_field(s.cpu) << ','
            << format_decimal(s.mips) << ',' << s.seed << ',' << s.tasks_generated << ',' << s.tasks_delivered << ','
            << format_decimal(s.tsr_pct) << ',' << format_decimal(s.mean_latency_s) << ','
            << format_decimal(s.p95_latency_s) << ',' << format_decimal(s.deadline_hit_pct) << '\n';
    }
}

void write_aggregate_csv(std::ostream& out, std::span<const aggregate_row> rows)
{
    out << "scenario,topology,cpu,mips,runs,tsr_pct_mean,tsr_pct_std,mean_latency_s_mean,mean_latency_s_std,"
           "p95_latency_s_mean,p95_latency_s_std,deadline_hit_pct_mean,deadline_hit_pct_std\n";
    for (const auto& r : rows) {
        out << csv_field(r.scenario) << ',' << csv_field(r.topology) << ',' << csv_field(r.cpu) << ','
            << format_decimal(r.mips) << ',' << r.runs << ',' << format_decimal(r.tsr_pct.mean) << ','
            << format_decimal(r.tsr_pct.stddev) << ',' << format_decimal(r.mean_latency_s.mean) << ','
            << format_decimal(r.mean_latency_s.stddev) << ',' << format_decimal(r.p95_latency_s.mean) << ','
            << format_decimal(r.p95_latency_s.stddev) << ',' << format_decimal(r.deadline_hit_pct.mean) << ','
            << format_decimal(r.deadline_hit_pct.stddev) << '\n';
    }
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

std::vector<run_summary> read_summary_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw config_error("summary file is empty");
    if (split_csv_line(line).size() != 11) throw config_error("summary file has an unexpected header");
    std::vector<run_summary> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw config_error("summary row has " + std::to_string(f.size()) + " fields");
        run_summary s;
        s.scenario = f[0];
        s.topology = f[1];
        s.cpu = f[2];
        s.mips = to_double(f[3]);
        s.seed = std::stoull(f[4]);
        s.tasks_generated = std::stoull(f[5]);
        s.tasks_delivered = std::stoull(f[6]);
        s.tasks_unfinished = s.tasks_generated - s.tasks_delivered;
        s.tsr_pct = to_double(f[7]);
        s.mean_latency_s = to_double(f[8]);
        s.p95_latency_s = to_double(f[9]);
        s.deadline_hit_pct = to_double(f[10]);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace ponedge::metrics
