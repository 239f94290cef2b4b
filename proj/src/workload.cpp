#include <ponedge/workload.hpp>

#include <algorithm>

#include <fmt/format.h>

#include <ponedge/engine.hpp>

namespace ponedge::workload {

namespace {

// Table rows: users, rate/min, deadline s, length MI, request KB, result KB.
const std::vector<scenario_spec>& presets()
{
    static const std::vector<scenario_spec> rows = {
        {"smart-city", 128, 2.0, 0.5, 500.0, {1.0}, {10.0}},
        {"e-health", 10, 60.0, 0.05, 1000.0, {10.0}, {10.0}},
        {"smart-building", 20, 60.0, 0.2, 5000.0, {750.0}, {500.0}},
        {"aigc", 50, 20.0, 0.5, 48000.0, {5000.0}, {2000.0}},
    };
    return rows;
}

} // namespace

void validate(const scenario_spec& spec)
{
    auto need = [&](bool ok, const char* field) {
        if (!ok) throw config_error(fmt::format("scenario '{}': {} must be positive", spec.name, field));
    };
    if (spec.name.empty()) throw config_error("scenario name must not be empty");
    need(spec.users > 0, "users");
    need(spec.rate_per_min > 0.0, "rate");
    need(spec.deadline_s > 0.0, "deadline");
    need(spec.length_mi > 0.0, "length");
    need(spec.request.kilobytes > 0.0, "request_kb");
    need(spec.result.kilobytes > 0.0, "result_kb");
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> out;
    for (const auto& p : presets()) out.push_back(p.name);
    return out;
}

scenario_spec scenario_preset(const std::string& name)
{
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    throw config_error(fmt::format("unknown scenario '{}' (valid: {})", name, fmt::join(preset_names(), ", ")));
}

std::string to_string(task_status s)
{
    switch (s) {
    case task_status::pending: return "Pending";
    case task_status::in_transit: return "InTransit";
    case task_status::queued: return "Queued";
    case task_status::running: return "Running";
    case task_status::delivered: return "Delivered";
    case task_status::unfinished: return "Unfinished";
    }
    return "Unknown";
}

void task::advance(task_status next)
{
    using enum task_status;
    bool ok = false;
    switch (status) {
    case pending: ok = next == in_transit || next == unfinished; break;
    case in_transit: ok = next == queued || next == delivered || next == unfinished; break;
    case queued: ok = next == running || next == unfinished; break;
    case running: ok = next == in_transit || next == unfinished; break;
    case delivered:
    case unfinished: ok = false; break;
    }
    // in_transit -> delivered only after execution (result on its way back).
    if (ok && status == in_transit && next == delivered && !exec_end) ok = false;
    if (ok && status == in_transit && next == queued && exec_end) ok = false;
    if (!ok) {
        throw simulation_error(fmt::format("task {}: illegal transition {} -> {}", id, to_string(status), to_string(next)));
    }
    status = next;
}

std::string to_string(arrival_mode m)
{
    return m == arrival_mode::poisson ? "poisson" : "fixed";
}

arrival_mode parse_arrival_mode(const std::string& text)
{
    if (text == "poisson") return arrival_mode::poisson;
    if (text == "fixed") return arrival_mode::fixed;
    throw config_error(fmt::format("unknown arrival mode '{}' (valid: poisson, fixed)", text));
}

std::vector<task> generate_arrivals(const scenario_spec& spec, double duration, std::uint64_t seed,
                                    std::span<const node_id> devices, const arrival_options& options)
{
    validate(spec);
    if (!(duration > 0.0)) throw config_error("duration must be positive");
    if (devices.size() != static_cast<std::size_t>(spec.users)) {
        throw config_error(fmt::format("scenario '{}' needs {} devices, got {}", spec.name, spec.users, devices.size()));
    }
    const double interval = spec.mean_interval();

    std::vector<task> out;
    out.reserve(static_cast<std::size_t>(duration / interval * spec.users * 1.1) + 16);
    for (std::size_t d = 0; d < devices.size(); ++d) {
        auto rng = engine::make_stream(seed, fmt::format("arrivals/{}", d));
        auto emit = [&](sim_time at) {
            task t;
            t.source_device = devices[d];
            t.generated_at = at;
            t.length_mi = spec.length_mi;
            t.request = spec.request;
            t.result = spec.result;
            t.deadline_s = spec.deadline_s;
            t.needs = options.needs;
            out.push_back(t);
        };
        if (options.mode == arrival_mode::poisson) {
            for (sim_time at = rng.exponential(interval); at < duration; at += rng.exponential(interval)) emit(at);
        } else {
            const double phase = options.fixed_phase ? *options.fixed_phase : rng.uniform(0.0, interval);
            for (std::uint64_t k = 0;; ++k) {
                const sim_time at = phase + static_cast<double>(k) * interval;
                if (at >= duration) break;
                emit(at);
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const task& a, const task& b) {
        if (a.generated_at != b.generated_at) return a.generated_at < b.generated_at;
        return a.source_device < b.source_device;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = i;
    return out;
}

} // namespace ponedge::workload
