#include "gridident/network_io.hpp"

#include <json.hpp>

#include "file_util.hpp"
#include "gridident/errors.hpp"

namespace gridident {

using nlohmann::json;

namespace {

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError(field + ": expected [re, im] pair of numbers");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(where + ": missing field '" + key + "'");
    }
    return *it;
}

int require_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) {
        throw ParseError(where + "." + key + ": expected integer");
    }
    return v.get<int>();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) {
        throw ParseError(where + "." + key + ": expected string");
    }
    return v.get<std::string>();
}

json bus_spec_to_json(const BusSpec& spec) {
    json buses = json::array();
    for (const auto& b : spec.buses) {
        buses.push_back({{"name", b.name}, {"phases", phases_to_string(b.phases)}});
    }
    json branches = json::array();
    for (const auto& br : spec.branches) {
        json couplings = json::array();
        for (const auto& c : br.couplings) {
            couplings.push_back({{"from_phase", std::string(1, phase_char(c.from_phase))},
                                 {"to_phase", std::string(1, phase_char(c.to_phase))},
                                 {"y", complex_to_json(c.y)}});
        }
        branches.push_back({{"from", br.from_bus}, {"to", br.to_bus}, {"couplings", std::move(couplings)}});
    }
    return {{"buses", std::move(buses)}, {"branches", std::move(branches)}};
}

Phase phase_field(const json& obj, const char* key, const std::string& where) {
    const std::string s = require_string(obj, key, where);
    if (s.size() != 1) {
        throw ParseError(where + "." + key + ": expected a single phase letter");
    }
    try {
        return phase_from_char(s[0]);
    } catch (const SpecError& e) {
        throw ParseError(where + "." + key + ": " + e.what());
    }
}

BusSpec bus_spec_from_json(const json& j) {
    if (!j.is_object()) {
        throw ParseError("bus_spec: expected object");
    }
    BusSpec spec;
    const json& buses = require(j, "buses", "bus_spec");
    if (!buses.is_array()) {
        throw ParseError("bus_spec.buses: expected array");
    }
    for (std::size_t k = 0; k < buses.size(); ++k) {
        const std::string where = "bus_spec.buses[" + std::to_string(k) + "]";
        Bus b;
        b.name = require_string(buses[k], "name", where);
        try {
            b.phases = phases_from_string(require_string(buses[k], "phases", where));
        } catch (const SpecError& e) {
            throw ParseError(where + ".phases: " + e.what());
        }
        spec.buses.push_back(std::move(b));
    }
    const json& branches = require(j, "branches", "bus_spec");
    if (!branches.is_array()) {
        throw ParseError("bus_spec.branches: expected array");
    }
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const std::string where = "bus_spec.branches[" + std::to_string(k) + "]";
        Branch br;
        br.from_bus = require_string(branches[k], "from", where);
        br.to_bus = require_string(branches[k], "to", where);
        const json& couplings = require(branches[k], "couplings", where);
        if (!couplings.is_array()) {
            throw ParseError(where + ".couplings: expected array");
        }
        for (std::size_t c = 0; c < couplings.size(); ++c) {
            const std::string cw = where + ".couplings[" + std::to_string(c) + "]";
            br.couplings.push_back({phase_field(couplings[c], "from_phase", cw),
                                    phase_field(couplings[c], "to_phase", cw),
                                    complex_from_json(require(couplings[c], "y", cw), cw + ".y")});
        }
        spec.branches.push_back(std::move(br));
    }
    return spec;
}

}  // namespace

std::string network_to_string(const AdmittanceNetwork& net, const BusSpec* bus_spec) {
    json edges = json::array();
    for (int l = 0; l < net.edge_count(); ++l) {
        const Edge& e = net.graph.edge(l);
        edges.push_back({{"i", e.i}, {"j", e.j}, {"y", complex_to_json(net.y(l))}});
    }
    json doc = {{"version", kNetworkFormatVersion}, {"n", net.node_count()}, {"edges", std::move(edges)}};
    if (!net.labels.empty()) {
        doc["labels"] = net.labels;
    }
    if (bus_spec) {
        doc["bus_spec"] = bus_spec_to_json(*bus_spec);
    }
    return doc.dump(2) + "\n";
}

NetworkFile parse_network(std::string_view text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError(origin + ": top level must be an object");
    }
    const int version = require_int(doc, "version", origin);
    if (version != kNetworkFormatVersion) {
        throw ParseError(origin + ": unsupported network format version " + std::to_string(version));
    }

    NetworkFile out;
    if (auto it = doc.find("bus_spec"); it != doc.end()) {
        out.bus_spec = bus_spec_from_json(*it);
    }

    if (!doc.contains("edges") && out.bus_spec) {
        out.network = phase_expand(*out.bus_spec).network;
        return out;
    }

    const int n = require_int(doc, "n", origin);
    const json& edges_json = require(doc, "edges", origin);
    if (!edges_json.is_array()) {
        throw ParseError(origin + ": edges: expected array");
    }
    std::vector<Edge> edges;
    std::vector<cplx> values;
    for (std::size_t k = 0; k < edges_json.size(); ++k) {
        const std::string where = origin + ": edges[" + std::to_string(k) + "]";
        const json& ej = edges_json[k];
        if (!ej.is_object()) {
            throw ParseError(where + ": expected object");
        }
        edges.push_back({require_int(ej, "i", where), require_int(ej, "j", where)});
        values.push_back(complex_from_json(require(ej, "y", where), where + ".y"));
    }
    std::vector<std::string> labels;
    if (auto it = doc.find("labels"); it != doc.end()) {
        if (!it->is_array()) {
            throw ParseError(origin + ": labels: expected array of strings");
        }
        for (const auto& s : *it) {
            if (!s.is_string()) {
                throw ParseError(origin + ": labels: expected array of strings");
            }
            labels.push_back(s.get<std::string>());
        }
    }

    // The graph sorts edges; carry the admittances along by looking them up afterwards.
    NetworkGraph g(n, edges);
    CVector y(g.edge_count());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        y(*g.index_of(edges[k])) = values[k];
    }
    out.network = AdmittanceNetwork(std::move(g), std::move(y), std::move(labels));
    return out;
}

void save_network(const std::string& path, const AdmittanceNetwork& net, const BusSpec* bus_spec) {
    detail::write_file_locked(path, network_to_string(net, bus_spec));
}

NetworkFile load_network_file(const std::string& path) { return parse_network(detail::read_file_locked(path), path); }

AdmittanceNetwork load_network(const std::string& path) { return load_network_file(path).network; }

BusSpec load_bus_spec(const std::string& path) {
    auto file = load_network_file(path);
    if (!file.bus_spec) {
        throw ParseError(path + ": no bus_spec member");
    }
    return *file.bus_spec;
}

}  // namespace gridident
