#include "gridident/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "gridident/errors.hpp"

namespace gridident {

AdmittanceNetwork::AdmittanceNetwork(NetworkGraph g, CVector admittances, std::vector<std::string> node_labels)
    : graph(std::move(g)), y(std::move(admittances)), labels(std::move(node_labels)) {
    if (y.size() != graph.edge_count()) {
        throw ValidationError("admittance vector has " + std::to_string(y.size()) + " entries for " +
                              std::to_string(graph.edge_count()) + " edges");
    }
    if (!y.allFinite()) {
        throw ValidationError("admittance vector has non-finite entries");
    }
    if (!labels.empty() && static_cast<int>(labels.size()) != graph.node_count()) {
        throw ValidationError("label count does not match node count");
    }
}

cplx AdmittanceNetwork::admittance(Edge e) const {
    auto idx = graph.index_of(e);
    return idx ? y(*idx) : cplx(0.0, 0.0);
}

CMatrix matrix_from_vector(const AdmittanceNetwork& net) {
    const int n = net.node_count();
    CMatrix Y = CMatrix::Zero(n, n);
    for (int l = 0; l < net.edge_count(); ++l) {
        const int a = net.graph.tails()[l];
        const int b = net.graph.heads()[l];
        Y(a, b) -= net.y(l);
        Y(b, a) -= net.y(l);
        Y(a, a) += net.y(l);
        Y(b, b) += net.y(l);
    }
    return Y;
}

namespace {

void check_symmetric(const CMatrix& Y, double scale, const char* what) {
    if ((Y - Y.transpose()).cwiseAbs().maxCoeff() > kMatrixConsistencyTol * scale) {
        throw ConsistencyError(std::string(what) + " is not symmetric");
    }
}

}  // namespace

CVector vector_from_matrix(const CMatrix& Y, const NetworkGraph& g) {
    if (Y.rows() != Y.cols() || Y.rows() != g.node_count()) {
        throw InvalidSizeError("admittance matrix shape does not match the graph");
    }
    const double scale = std::max(1.0, Y.cwiseAbs().maxCoeff());
    check_symmetric(Y, scale, "admittance matrix");
    if (Y.rowwise().sum().cwiseAbs().maxCoeff() > kMatrixConsistencyTol * scale) {
        throw ConsistencyError("admittance matrix rows do not sum to zero");
    }
    CVector y(g.edge_count());
    for (int l = 0; l < g.edge_count(); ++l) {
        y(l) = -Y(g.tails()[l], g.heads()[l]);
    }
    return y;
}

CMatrix reduce_slack(const CMatrix& Y) {
    if (Y.rows() != Y.cols() || Y.rows() < 2) {
        throw InvalidSizeError("slack reduction needs a square matrix with n >= 2");
    }
    const Eigen::Index m = Y.rows() - 1;
    return Y.bottomRightCorner(m, m);
}

CMatrix reconstruct_full(const CMatrix& Ybar) {
    if (Ybar.rows() != Ybar.cols()) {
        throw InvalidSizeError("reduced admittance must be square");
    }
    const Eigen::Index m = Ybar.rows();
    if (m > 0) {
        check_symmetric(Ybar, std::max(1.0, Ybar.cwiseAbs().maxCoeff()), "reduced admittance matrix");
    }
    CMatrix Y(m + 1, m + 1);
    const CVector border = -Ybar.rowwise().sum();
    Y(0, 0) = -border.sum();
    Y.block(1, 0, m, 1) = border;
    Y.block(0, 1, 1, m) = border.transpose();
    Y.bottomRightCorner(m, m) = Ybar;
    return Y;
}

char phase_char(Phase p) { return static_cast<char>('a' + static_cast<int>(p)); }

Phase phase_from_char(char c) {
    switch (c) {
        case 'a':
        case 'A':
            return Phase::a;
        case 'b':
        case 'B':
            return Phase::b;
        case 'c':
        case 'C':
            return Phase::c;
        default:
            throw SpecError(std::string("unknown phase label '") + c + "'");
    }
}

std::vector<Phase> phases_from_string(const std::string& s) {
    std::vector<Phase> out;
    for (char c : s) {
        Phase p = phase_from_char(c);
        if (std::find(out.begin(), out.end(), p) != out.end()) {
            throw SpecError("phase '" + std::string(1, c) + "' listed twice in \"" + s + "\"");
        }
        out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string phases_to_string(const std::vector<Phase>& phases) {
    std::string s;
    for (Phase p : phases) {
        s.push_back(phase_char(p));
    }
    return s;
}

const Bus* BusSpec::find_bus(const std::string& name) const {
    auto it = std::find_if(buses.begin(), buses.end(), [&](const Bus& b) { return b.name == name; });
    return it == buses.end() ? nullptr : &*it;
}

PhaseExpansion phase_expand(const BusSpec& spec) {
    PhaseExpansion out;
    int next = 1;
    std::set<std::string> seen;
    for (const auto& bus : spec.buses) {
        if (!seen.insert(bus.name).second) {
            throw SpecError("bus '" + bus.name + "' declared twice");
        }
        std::vector<Phase> phases = bus.phases;
        std::sort(phases.begin(), phases.end());
        if (std::adjacent_find(phases.begin(), phases.end()) != phases.end()) {
            throw SpecError("bus '" + bus.name + "' repeats a phase");
        }
        for (Phase p : phases) {
            out.node_of[{bus.name, p}] = next++;
            out.node_labels.emplace_back(bus.name, p);
        }
    }
    const int n = next - 1;
    if (n < 1) {
        throw SpecError("bus spec declares no phase nodes");
    }

    std::map<Edge, cplx> accumulated;
    for (const auto& br : spec.branches) {
        for (const auto* name : {&br.from_bus, &br.to_bus}) {
            if (!spec.find_bus(*name)) {
                throw SpecError("branch references unknown bus '" + *name + "'");
            }
        }
        for (const auto& c : br.couplings) {
            auto from = out.node_of.find({br.from_bus, c.from_phase});
            auto to = out.node_of.find({br.to_bus, c.to_phase});
            if (from == out.node_of.end()) {
                throw SpecError("branch " + br.from_bus + "-" + br.to_bus + " uses undeclared phase " +
                                std::string(1, phase_char(c.from_phase)) + " at bus '" + br.from_bus + "'");
            }
            if (to == out.node_of.end()) {
                throw SpecError("branch " + br.from_bus + "-" + br.to_bus + " uses undeclared phase " +
                                std::string(1, phase_char(c.to_phase)) + " at bus '" + br.to_bus + "'");
            }
            if (from->second == to->second) {
                throw SpecError("coupling connects phase node " + std::to_string(from->second) + " to itself");
            }
            Edge e{std::min(from->second, to->second), std::max(from->second, to->second)};
            accumulated[e] += c.y;
        }
    }

    std::vector<Edge> edges;
    CVector y(static_cast<Eigen::Index>(accumulated.size()));
    Eigen::Index l = 0;
    for (const auto& [e, adm] : accumulated) {
        edges.push_back(e);
        y(l++) = adm;
    }
    std::vector<std::string> labels;
    for (const auto& [bus, p] : out.node_labels) {
        labels.push_back(bus + "." + std::string(1, phase_char(p)));
    }
    out.network = AdmittanceNetwork(NetworkGraph(n, std::move(edges)), std::move(y), std::move(labels));
    return out;
}

}  // namespace gridident
