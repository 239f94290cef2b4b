#include <ponedge/compute.hpp>

#include <algorithm>

#include <fmt/format.h>

namespace ponedge::compute {

std::string to_string(reject_reason r)
{
    return r == reject_reason::ram ? "ram" : "storage";
}

node_state::node_state(node_spec spec) : spec_(std::move(spec))
{
    if (spec_.cores < 1) throw config_error(fmt::format("node {}: cores must be >= 1", spec_.name));
    const auto n = static_cast<std::size_t>(spec_.cores);
    core_free_at_.assign(n, 0.0);
    timeline_.resize(n);
    retired_upto_.assign(n, 0);
}

std::optional<reject_reason> node_state::admit(const footprint& fp) const
{
    if (fp.ram_mb > spec_.ram_mb - ram_held_) return reject_reason::ram;
    if (fp.storage_mb > spec_.storage_mb - storage_held_) return reject_reason::storage;
    return std::nullopt;
}

void node_state::reserve(const footprint& fp)
{
    ram_held_ += fp.ram_mb;
    storage_held_ += fp.storage_mb;
}

void node_state::release(const footprint& fp)
{
    ram_held_ = std::max(0.0, ram_held_ - fp.ram_mb);
    storage_held_ = std::max(0.0, storage_held_ - fp.storage_mb);
}

slot node_state::submit(double length_mi, sim_time now)
{
    if (!spec_.can_execute()) throw simulation_error(fmt::format("node {} cannot execute tasks", spec_.name));
    const auto it = std::min_element(core_free_at_.begin(), core_free_at_.end());
    const auto core = static_cast<std::size_t>(it - core_free_at_.begin());
    const sim_time start = std::max(now, *it);
    const sim_time end = start + execution_time(length_mi);
    *it = end;
    if (inbound_ > 0) --inbound_;
    timeline_[core].push_back({start, end});
    pending_ends_.push(end);
    return {static_cast<int>(core), start, end};
}

void node_state::retire(sim_time now)
{
    while (!pending_ends_.empty() && pending_ends_.top() <= now) pending_ends_.pop();
    for (std::size_t c = 0; c < timeline_.size(); ++c) {
        auto& idx = retired_upto_[c];
        while (idx < timeline_[c].size() && timeline_[c][idx].end <= now) {
            retired_busy_ += timeline_[c][idx].end - timeline_[c][idx].start;
            ++idx;
        }
    }
}

load_snapshot node_state::snapshot(sim_time now)
{
    retire(now);
    load_snapshot out;
    out.queued_and_running = static_cast<int>(pending_ends_.size()) + inbound_;
    if (now <= 0.0) return out;

    double busy = retired_busy_;
    for (std::size_t c = 0; c < timeline_.size(); ++c) {
        const auto idx = retired_upto_[c];
        // Only the head of each core's remaining queue can be partially done.
        if (idx < timeline_[c].size() && timeline_[c][idx].start < now) busy += now - timeline_[c][idx].start;
    }
    out.mean_utilization = std::clamp(busy / (static_cast<double>(spec_.cores) * now), 0.0, 1.0);
    return out;
}

} // namespace ponedge::compute
