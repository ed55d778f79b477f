#pragma once

// Network files: UTF-8 JSON
//
//   {"version": 1, "n": 3,
//    "edges": [{"i": 1, "j": 2, "y": [re, im]}, ...],
//    "labels": ["650.a", ...],          (optional)
//    "bus_spec": {...}}                 (optional)
//
// Node indices are 1-based. A file carrying a bus_spec but no edge list is
// expanded into phase nodes on load.

#include <optional>
#include <string>
#include <string_view>

#include "gridident/netmodel.hpp"

namespace gridident {

inline constexpr int kNetworkFormatVersion = 1;

struct NetworkFile {
    AdmittanceNetwork network;
    std::optional<BusSpec> bus_spec;
};

std::string network_to_string(const AdmittanceNetwork& net, const BusSpec* bus_spec = nullptr);
NetworkFile parse_network(std::string_view text, const std::string& origin = "<string>");

void save_network(const std::string& path, const AdmittanceNetwork& net, const BusSpec* bus_spec = nullptr);
AdmittanceNetwork load_network(const std::string& path);
NetworkFile load_network_file(const std::string& path);

/// Reads a file whose top-level object has a "bus_spec" member.
BusSpec load_bus_spec(const std::string& path);

}  // namespace gridident
