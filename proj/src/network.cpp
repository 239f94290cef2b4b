#include <ponedge/network.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ponedge::network {

void validate(const link_spec& link)
{
    if (!link.unlimited() && !(link.bandwidth_bps > 0.0)) {
        throw config_error(fmt::format("{} link: bandwidth must be positive", to_string(link.kind)));
    }
    if (!(link.length_m >= 0.0)) throw config_error("link length must be non-negative");
    if (!(link.fixed_latency_s >= 0.0)) throw config_error("link fixed latency must be non-negative");
    if (!(link.propagation_mps > 0.0)) throw config_error("link propagation speed must be positive");
}

double single_transfer_time(data_size size, const link_spec& link)
{
    if (link.unlimited()) return 0.0;
    return size.bits() / link.bandwidth_bps + link.flight_time();
}

node_id topology_spec::find(const std::string& name) const
{
    for (const auto& n : nodes) {
        if (n.name == name) return n.id;
    }
    throw config_error("unknown node '" + name + "'");
}

std::vector<node_id> topology_spec::nodes_in(layer l) const
{
    std::vector<node_id> out;
    for (const auto& n : nodes) {
        if (n.layer == l) out.push_back(n.id);
    }
    return out;
}

route route_between(const topology_spec& topology, node_id src, node_id dst)
{
    const auto n = topology.nodes.size();
    if (src.value >= n || dst.value >= n) {
        throw config_error(fmt::format("route {} -> {}: unknown node", src.value, dst.value));
    }
    if (src == dst) return {};

    std::vector<std::vector<std::pair<link_id, node_id>>> adjacent(n);
    for (const auto& l : topology.links) {
        adjacent[l.a.value].push_back({l.id, l.b});
        adjacent[l.b.value].push_back({l.id, l.a});
    }

    // BFS from dst so that following parents from src walks the path forward.
    constexpr auto unseen = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> parent_link(n, unseen);
    std::vector<node_id> parent(n);
    std::vector<bool> seen(n, false);
    std::vector<node_id> frontier{dst};
    seen[dst.value] = true;
    for (std::size_t i = 0; i < frontier.size() && !seen[src.value]; ++i) {
        const auto here = frontier[i];
        for (const auto& [lid, next] : adjacent[here.value]) {
            if (seen[next.value]) continue;
            seen[next.value] = true;
            parent[next.value] = here;
            parent_link[next.value] = lid.value;
            frontier.push_back(next);
        }
    }
    if (!seen[src.value]) {
        throw config_error(fmt::format("no path between {} and {}", topology.node(src).name,
                                       topology.node(dst).name));
    }

    route out;
    for (auto at = src; at != dst; at = parent[at.value]) {
        out.push_back({link_id{parent_link[at.value]}, at, parent[at.value]});
    }
    return out;
}

route reversed(const route& r)
{
    route out;
    out.reserve(r.size());
    for (auto it = r.rbegin(); it != r.rend(); ++it) out.push_back({it->link, it->to, it->from});
    return out;
}

fabric::fabric(engine::simulator& sim, const topology_spec& topology) : sim_(sim)
{
    links_.reserve(topology.links.size());
    for (const auto& l : topology.links) {
        validate(l.spec);
        links_.push_back(link_state{l.spec, {}, 0.0, 0});
    }
}

double fabric::rate_on(link_id id) const
{
    const auto& l = links_.at(id.value);
    if (l.active.empty()) return 0.0;
    return l.spec.bandwidth_bps / static_cast<double>(l.active.size());
}

std::uint64_t fabric::start_transfer(const route& path, data_size size, completion on_done, double delay)
{
    if (size.kilobytes < 0.0) throw simulation_error("negative transfer size");
    if (delay < 0.0) throw simulation_error("negative transfer delay");
    const auto id = next_id_++;
    auto& t = transfers_[id];
    t.path = path;
    t.bits = size.bits();
    t.on_done = std::move(on_done);
    if (t.path.empty() || delay > 0.0) {
        // Held back (or nothing to traverse): a pseudo-arrival releases it.
        sim_.schedule(sim_.now() + delay,
                      engine::transfer_complete{engine::transfer_complete::phase::hop_arrival, 0, 0, id, not_started});
        return id;
    }
    begin_hop(id, t);
    return id;
}

void fabric::begin_hop(std::uint64_t id, transfer& t)
{
    const auto li = t.path[t.hop].link.value;
    auto& link = links_.at(li);
    if (link.spec.unlimited() || t.bits == 0.0) {
        const double delay = link.spec.unlimited() ? 0.0 : link.spec.flight_time();
        sim_.schedule(sim_.now() + delay,
                      engine::transfer_complete{engine::transfer_complete::phase::hop_arrival, li, 0, id, t.hop});
        return;
    }
    advance(link, sim_.now());
    t.remaining_bits = t.bits;
    link.active.insert(id);
    reschedule(li);
}

void fabric::advance(link_state& link, sim_time now)
{
    if (!link.active.empty() && now > link.last_update) {
        const double moved = (now - link.last_update) * link.spec.bandwidth_bps / static_cast<double>(link.active.size());
        for (auto id : link.active) transfers_.at(id).remaining_bits -= moved;
    }
    link.last_update = now;
}

void fabric::reschedule(std::uint32_t link_index)
{
    auto& link = links_[link_index];
    ++link.epoch;
    if (link.active.empty()) return;
    double least = std::numeric_limits<double>::infinity();
    for (auto id : link.active) least = std::min(least, transfers_.at(id).remaining_bits);
    const double rate = link.spec.bandwidth_bps / static_cast<double>(link.active.size());
    const sim_time when = sim_.now() + std::max(0.0, least) / rate;
    sim_.schedule(when, engine::transfer_complete{engine::transfer_complete::phase::link_drain, link_index, link.epoch, 0, 0});
}

void fabric::drain(std::uint32_t link_index, std::uint64_t epoch)
{
    auto& link = links_.at(link_index);
    if (epoch != link.epoch) return; // superseded by a later join/leave
    const sim_time now = sim_.now();
    advance(link, now);

    // Residue left by floating-point time arithmetic: anything within a few
    // ulps of the clock (or a tenth of a nanosecond) at the current rate is done.
    const double rate = link.spec.bandwidth_bps / static_cast<double>(link.active.size());
    const double slack = std::max(1e-10, 8.0 * (std::nextafter(now, INFINITY) - now));
    const double tolerance = rate * slack;

    std::vector<std::uint64_t> finished;
    for (auto id : link.active) {
        if (transfers_.at(id).remaining_bits <= tolerance) finished.push_back(id);
    }
    for (auto id : finished) link.active.erase(id);
    reschedule(link_index);

    const double flight = link.spec.flight_time();
    for (auto id : finished) {
        auto& t = transfers_.at(id);
        t.remaining_bits = 0.0;
        sim_.schedule(now + flight,
                      engine::transfer_complete{engine::transfer_complete::phase::hop_arrival, link_index, 0, id, t.hop});
    }
}

void fabric::arrive(std::uint64_t id, std::uint32_t hop)
{
    auto it = transfers_.find(id);
    if (it == transfers_.end()) throw simulation_error(fmt::format("arrival for unknown transfer {}", id));
    auto& t = it->second;
    if (hop == not_started && !t.path.empty()) {
        t.hop = 0;
        begin_hop(id, t);
        return;
    }
    if (hop != not_started && hop + 1 < t.path.size()) {
        t.hop = hop + 1;
        begin_hop(id, t);
        return;
    }
    auto done = std::move(t.on_done);
    transfers_.erase(it);
    if (done) done(sim_.now());
}

void fabric::handle(const engine::transfer_complete& ev)
{
    if (ev.stage == engine::transfer_complete::phase::link_drain) {
        drain(ev.link, ev.epoch);
    } else {
        arrive(ev.transfer, ev.hop);
    }
}

} // namespace ponedge::network
