#include <ponedge/types.hpp>

namespace ponedge {

std::string to_string(layer l)
{
    switch (l) {
    case layer::far_edge_device: return "far-edge-device";
    case layer::onu: return "onu";
    case layer::olt: return "olt";
    case layer::edge_server: return "edge-server";
    case layer::cloud: return "cloud";
    }
    return "unknown";
}

std::string to_string(link_kind k)
{
    switch (k) {
    case link_kind::fiber: return "fiber";
    case link_kind::man: return "man";
    case link_kind::wan: return "wan";
    case link_kind::local: return "local";
    }
    return "unknown";
}

layer parse_layer(const std::string& text)
{
    for (auto l : {layer::far_edge_device, layer::onu, layer::olt, layer::edge_server, layer::cloud}) {
        if (to_string(l) == text) return l;
    }
    throw config_error("unknown layer '" + text + "'");
}

link_kind parse_link_kind(const std::string& text)
{
    for (auto k : {link_kind::fiber, link_kind::man, link_kind::wan, link_kind::local}) {
        if (to_string(k) == text) return k;
    }
    throw config_error("unknown link kind '" + text + "'");
}

} // namespace ponedge
