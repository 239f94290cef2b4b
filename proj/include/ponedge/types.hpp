#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace ponedge {

/// Simulated time in seconds.
using sim_time = double;

template <typename Tag>
struct strong_id {
    std::uint32_t value = 0;

    constexpr strong_id() = default;
    constexpr explicit strong_id(std::uint32_t v) : value(v) {}

    friend constexpr auto operator<=>(strong_id, strong_id) = default;
};

using node_id = strong_id<struct node_tag>;
using link_id = strong_id<struct link_tag>;

using task_id = std::uint64_t;

enum class layer { far_edge_device, onu, olt, edge_server, cloud };

enum class link_kind { fiber, man, wan, local };

/// Message size in kilobytes, 1 KB = 1000 bytes.
struct data_size {
    double kilobytes = 0.0;

    [[nodiscard]] constexpr double bits() const { return kilobytes * 8000.0; }

    friend constexpr bool operator==(data_size, data_size) = default;
};

/// Bad input: unknown names, malformed documents, invalid topologies.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Broken simulation invariant (scheduling into the past, conservation failure).
class simulation_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

std::string to_string(layer l);
std::string to_string(link_kind k);
layer parse_layer(const std::string& text);
link_kind parse_link_kind(const std::string& text);

} // namespace ponedge

template <typename Tag>
struct std::hash<ponedge::strong_id<Tag>> {
    std::size_t operator()(ponedge::strong_id<Tag> id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
