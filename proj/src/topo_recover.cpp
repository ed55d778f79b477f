#include "gridident/topo_recover.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gridident/errors.hpp"

namespace gridident {

CVector threshold(const CVector& y, double alpha) {
    if (!(alpha >= 0.0)) {
        throw ValidationError("threshold alpha must be non-negative");
    }
    CVector out = y;
    for (Eigen::Index l = 0; l < out.size(); ++l) {
        if (std::abs(out(l)) < alpha) {
            out(l) = cplx(0.0, 0.0);
        }
    }
    return out;
}

double ThresholdPolicy::resolve(const CVector& y) const {
    if (!(value >= 0.0)) {
        throw ValidationError("threshold value must be non-negative");
    }
    if (mode == Mode::absolute || y.size() == 0) {
        return mode == Mode::absolute ? value : 0.0;
    }
    std::vector<double> mags(static_cast<std::size_t>(y.size()));
    for (Eigen::Index l = 0; l < y.size(); ++l) {
        mags[static_cast<std::size_t>(l)] = std::abs(y(l));
    }
    if (mode == Mode::relative_max) {
        return value * *std::max_element(mags.begin(), mags.end());
    }
    const auto mid = mags.size() / 2;
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid), mags.end());
    double median = mags[mid];
    if (mags.size() % 2 == 0) {
        median = 0.5 * (median + *std::max_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return value * median;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::automatic:
            return "auto";
        case Method::exact:
            return "exact";
        case Method::stls:
            return "stls";
        case Method::plugin:
            return "plugin";
    }
    return "unknown";
}

Method method_from_string(const std::string& s) {
    if (s == "auto") return Method::automatic;
    if (s == "exact") return Method::exact;
    if (s == "stls") return Method::stls;
    if (s == "plugin") return Method::plugin;
    throw ValidationError("unknown method '" + s + "' (expected auto, exact, stls or plugin)");
}

Method choose_method(Method requested, const MeasurementSet& ms, int unknowns) {
    if (requested != Method::automatic) {
        return requested;
    }
    const bool noiseless = !ms.noisy || (ms.noise && ms.noise->sigma_scale == 0.0);
    if (noiseless) {
        return Method::exact;
    }
    return unknowns <= kStlsUnknownLimit ? Method::stls : Method::plugin;
}

namespace {

std::string threshold_rule(PriorKind kind) {
    switch (kind) {
        case PriorKind::none:
            return "complete hypothesis needs tau >= n-1";
        case PriorKind::tree:
            return "tree hypothesis needs tau >= 1";
        case PriorKind::minus_one_edge:
            return "complete-minus-one-edge hypothesis needs tau >= n-2";
        case PriorKind::explicit_graph:
            return "explicit hypothesis needs tau >= ceil(e/n) (heuristic lower bound)";
    }
    return "";
}

}  // namespace

TopologyEstimate estimate_topology(const PriorTopology& prior, const MeasurementSet& ms,
                                   const Algorithm1Config& cfg) {
    const NetworkGraph& g = prior.graph();
    if (ms.node_count() != g.node_count()) {
        throw AlignmentError("measurements cover " + std::to_string(ms.node_count()) + " nodes, hypothesis has " +
                             std::to_string(g.node_count()));
    }
    TopologyEstimate est;
    est.hypothesis = g;
    est.tau = ms.tau();
    est.prior = prior.kind();
    est.method = choose_method(cfg.method, ms, g.edge_count());
    switch (est.method) {
        case Method::exact:
        case Method::plugin: {
            // a single set averages to itself, so plugin is OLS on the raw data
            const StackedSystem sys = stack_coefficients(ms, g);
            try {
                est.y_raw = estimate_vector_ls(sys.A, sys.currents);
            } catch (const NonUniquenessError&) {
                est.y_raw = minimum_norm_solve(sys.A, sys.currents);
            }
            break;
        }
        case Method::stls: {
            StlsSolution sol = solve_stls(ms, prior, cfg.solver);
            est.y_raw = std::move(sol.y);
            est.converged = sol.converged;
            est.iterations = sol.iterations;
            break;
        }
        case Method::automatic:
            break;
    }

    est.alpha = cfg.threshold.resolve(est.y_raw);
    est.y_hat = threshold(est.y_raw, est.alpha);
    for (int l = 0; l < g.edge_count(); ++l) {
        if (est.y_hat(l) != cplx(0.0, 0.0)) {
            est.edges_hat.push_back(g.edge(l));
        }
    }
    est.graph_hat = NetworkGraph(g.node_count(), est.edges_hat);
    return est;
}

TopologyEstimate run_algorithm1(const PriorTopology& prior, const MeasurementSet& ms, const Algorithm1Config& cfg) {
    const NetworkGraph& g = prior.graph();
    if (ms.node_count() != g.node_count()) {
        throw AlignmentError("measurements cover " + std::to_string(ms.node_count()) + " nodes, hypothesis has " +
                             std::to_string(g.node_count()));
    }
    const MinMeasurements need = min_measurements(prior);
    if (ms.tau() < need.tau) {
        throw InsufficientMeasurementsError("insufficient measurements: " + threshold_rule(prior.kind()) + " (n=" +
                                                std::to_string(g.node_count()) + ", required " +
                                                std::to_string(need.tau) + ", supplied " +
                                                std::to_string(ms.tau()) + ")",
                                            need.tau, ms.tau());
    }
    if (need.heuristic && choose_method(cfg.method, ms, g.edge_count()) != Method::stls) {
        // no count formula for explicit graphs; the rank decides
        const StackedSystem sys = stack_coefficients(ms, g);
        const UniquenessDiagnostic d = uniqueness_diagnostic(sys.A, g.edge_count());
        if (!d.unique) {
            throw NonUniquenessError("explicit hypothesis: coefficient matrix rank " + std::to_string(d.rank) +
                                         " < " + std::to_string(d.unknowns) + " unknowns",
                                     d);
        }
    }
    return estimate_topology(prior, ms, cfg);
}

namespace {

constexpr std::uint64_t kPhaseBaseStream = 0x5048415345ULL;

BusSpec augment_bus(const BusSpec& spec, const std::string& candidate) {
    BusSpec out = spec;
    bool found = false;
    for (auto& bus : out.buses) {
        if (bus.name == candidate) {
            bus.phases = {Phase::a, Phase::b, Phase::c};
            found = true;
        }
    }
    if (!found) {
        throw NotFoundError("bus '" + candidate + "' not in spec");
    }
    return out;
}

// Balanced three-phase profile: magnitude 1, phase offsets 0 / -120 / +120
// degrees plus a small random angle per node.
CVector phase_base_voltages(const PhaseExpansion& ex, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ kPhaseBaseStream);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    const double deg = std::numbers::pi / 180.0;
    CVector V(static_cast<Eigen::Index>(ex.node_labels.size()));
    for (std::size_t j = 0; j < ex.node_labels.size(); ++j) {
        double offset = 0.0;
        switch (ex.node_labels[j].second) {
            case Phase::a:
                offset = 0.0;
                break;
            case Phase::b:
                offset = -120.0;
                break;
            case Phase::c:
                offset = 120.0;
                break;
        }
        V(static_cast<Eigen::Index>(j)) = std::polar(1.0, (offset + jitter(rng)) * deg);
    }
    return V;
}

}  // namespace

MeasurementBuilder synthetic_phase_measurements(const BusSpec& truth, double sigma, std::uint64_t seed) {
    const PhaseExpansion true_ex = phase_expand(truth);
    return [true_ex, sigma, seed](const PhaseExpansion& augmented, int tau) {
        const auto n = static_cast<int>(augmented.node_labels.size());
        std::vector<Edge> edges;
        std::vector<cplx> ys;
        const NetworkGraph& tg = true_ex.network.graph;
        for (int l = 0; l < tg.edge_count(); ++l) {
            const Edge e = tg.edge(l);
            const auto a = augmented.node_of.find(true_ex.node_labels[static_cast<std::size_t>(e.i - 1)]);
            const auto b = augmented.node_of.find(true_ex.node_labels[static_cast<std::size_t>(e.j - 1)]);
            if (a == augmented.node_of.end() || b == augmented.node_of.end()) {
                throw AlignmentError("augmented expansion is missing a true phase node");
            }
            edges.push_back({std::min(a->second, b->second), std::max(a->second, b->second)});
            ys.push_back(true_ex.network.y(l));
        }
        NetworkGraph g(n, edges);
        CVector y(g.edge_count());
        for (std::size_t k = 0; k < edges.size(); ++k) {
            y(*g.index_of(edges[k])) = ys[k];
        }
        const AdmittanceNetwork net(std::move(g), std::move(y));
        MeasurementSet ms = synthesize(net, tau, seed, phase_base_voltages(augmented, seed));
        if (sigma > 0.0) {
            ms = add_noise(ms, NoiseSpec{sigma}, seed);
        }
        return ms;
    };
}

PhaseIdentification identify_phases(const BusSpec& spec, const std::string& candidate_bus,
                                    const MeasurementBuilder& build, const Algorithm1Config& cfg) {
    PhaseIdentification out;
    out.augmented = phase_expand(augment_bus(spec, candidate_bus));
    const int n = out.augmented.network.node_count();
    const PriorTopology prior = PriorTopology::complete(n);
    const MeasurementSet ms = build(out.augmented, n - 1);
    out.estimate = run_algorithm1(prior, ms, cfg);

    for (Phase p : {Phase::a, Phase::b, Phase::c}) {
        const int node = out.augmented.node_of.at({candidate_bus, p});
        bool any = false;
        for (const Edge& e : out.estimate.edges_hat) {
            any = any || e.i == node || e.j == node;
        }
        (any ? out.connected : out.disconnected).push_back(p);
    }
    return out;
}

TopologyScore score_topology(const TopologyEstimate& est, const AdmittanceNetwork& truth) {
    if (est.hypothesis.node_count() != truth.node_count()) {
        throw AlignmentError("estimate has " + std::to_string(est.hypothesis.node_count()) + " nodes, truth has " +
                             std::to_string(truth.node_count()));
    }
    TopologyScore s;
    for (const Edge& e : est.edges_hat) {
        (truth.graph.contains(e) ? s.true_positives : s.false_positives)++;
    }
    for (const Edge& e : truth.graph.edges()) {
        if (!est.graph_hat.contains(e)) {
            ++s.false_negatives;
        }
    }
    const int predicted = s.true_positives + s.false_positives;
    const int actual = s.true_positives + s.false_negatives;
    s.precision = predicted > 0 ? static_cast<double>(s.true_positives) / predicted : (actual == 0 ? 1.0 : 0.0);
    s.recall = actual > 0 ? static_cast<double>(s.true_positives) / actual : 1.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;

    auto add = [&s](cplx d) {
        s.total_abs_error += std::abs(d);
        s.total_abs_error_conductance += std::abs(d.real());
        s.total_abs_error_susceptance += std::abs(d.imag());
    };
    for (int l = 0; l < est.hypothesis.edge_count(); ++l) {
        add(est.y_hat(l) - truth.admittance(est.hypothesis.edge(l)));
    }
    for (int l = 0; l < truth.edge_count(); ++l) {
        if (!est.hypothesis.contains(truth.graph.edge(l))) {
            add(-truth.y(l));
        }
    }
    return s;
}

}  // namespace gridident
