#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <ponedge/compute.hpp>
#include <ponedge/engine.hpp>
#include <ponedge/types.hpp>

namespace ponedge::network {

/// Fiber propagation speed, refractive index ~1.5.
inline constexpr double fiber_propagation_mps = 2.0e8;

struct link_spec {
    link_kind kind = link_kind::fiber;
    double bandwidth_bps = 1.0e9; ///< ignored for local links
    double length_m = 0.0;
    double fixed_latency_s = 0.0; ///< one-way, charged once per traversal
    double propagation_mps = fiber_propagation_mps;

    [[nodiscard]] bool unlimited() const { return kind == link_kind::local; }
    /// Time spent on the link after the last bit is serialized.
    [[nodiscard]] double flight_time() const { return length_m / propagation_mps + fixed_latency_s; }

    friend bool operator==(const link_spec&, const link_spec&) = default;
};

/// Throws config_error unless bandwidth > 0 (or local), length >= 0, fixed latency >= 0.
void validate(const link_spec& link);

/// Uncontended transfer time: serialization + propagation + fixed latency.
/// Zero for local links.
double single_transfer_time(data_size size, const link_spec& link);

struct topology_link {
    link_id id;
    node_id a;
    node_id b;
    link_spec spec;
};

/// Nodes and links of one simulated network. Node and link ids equal their
/// index in the respective vectors.
struct topology_spec {
    std::string preset;
    std::vector<compute::node_spec> nodes;
    std::vector<topology_link> links;

    [[nodiscard]] const compute::node_spec& node(node_id id) const { return nodes.at(id.value); }
    [[nodiscard]] const topology_link& link(link_id id) const { return links.at(id.value); }
    [[nodiscard]] node_id find(const std::string& name) const;
    [[nodiscard]] std::vector<node_id> nodes_in(layer l) const;
};

struct hop {
    link_id link;
    node_id from;
    node_id to;
};

using route = std::vector<hop>;

/// Unique path between two nodes of a tree topology. Empty when src == dst.
/// Throws config_error if either node is unknown or no path exists.
route route_between(const topology_spec& topology, node_id src, node_id dst);

route reversed(const route& r);

/// Event-driven realization of the link model.
///
/// Each hop is store-and-forward: the whole message is serialized onto the
/// link, then spends the link's flight time before the next hop starts.
/// Transfers serializing on the same link share its bandwidth equally; the
/// share is recomputed whenever a transfer joins or leaves the link.
class fabric {
public:
    using completion = std::function<void(sim_time)>;

    fabric(engine::simulator& sim, const topology_spec& topology);

    /// Starts at the simulator's current time plus `delay`. `on_done` fires
    /// once the last hop delivers the message.
    std::uint64_t start_transfer(const route& path, data_size size, completion on_done, double delay = 0.0);

    void handle(const engine::transfer_complete& ev);

    [[nodiscard]] std::size_t in_flight() const { return transfers_.size(); }
    [[nodiscard]] std::size_t active_on(link_id id) const { return links_.at(id.value).active.size(); }
    /// Current per-transfer rate on a link, 0 when idle.
    [[nodiscard]] double rate_on(link_id id) const;

private:
    struct transfer {
        route path;
        double bits = 0.0;
        double remaining_bits = 0.0;
        std::uint32_t hop = 0;
        completion on_done;
    };

    static constexpr std::uint32_t not_started = 0xffffffffU;

    struct link_state {
        link_spec spec;
        std::set<std::uint64_t> active;
        sim_time last_update = 0.0;
        std::uint64_t epoch = 0;
    };

    void begin_hop(std::uint64_t id, transfer& t);
    void advance(link_state& link, sim_time now);
    void reschedule(std::uint32_t link_index);
    void drain(std::uint32_t link_index, std::uint64_t epoch);
    void arrive(std::uint64_t id, std::uint32_t hop);

    engine::simulator& sim_;
    std::vector<link_state> links_;
    std::map<std::uint64_t, transfer> transfers_;
    std::uint64_t next_id_ = 0;
};

} // namespace ponedge::network
