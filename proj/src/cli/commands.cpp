#include "gridident/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../file_util.hpp"
#include "gridident/errors.hpp"
#include "gridident/measurement_io.hpp"
#include "gridident/network_io.hpp"
#include "gridident/parallel.hpp"
#include "gridident/report_io.hpp"
#include "gridident/topo_recover.hpp"

namespace gridident {

namespace {

constexpr double kRandomExtraEdgeProbability = 0.3;

// usage mistakes that CLI11 cannot see
class UsageError : public Error {
  public:
    using Error::Error;
};

struct Common {
    int n = 0;
    std::string prior = "complete";
    std::string missing;
    std::string tau;
    double sigma = 0.0;
    std::string alpha;
    std::uint64_t seed = 1;
    std::string method = "auto";
    std::string out;
};

Edge parse_edge(const std::string& s) {
    Edge e;
    char comma = 0;
    std::istringstream in(s);
    if (!(in >> e.i >> comma >> e.j) || comma != ',' || !in.eof()) {
        throw UsageError("--missing expects 'i,j', got '" + s + "'");
    }
    return {std::min(e.i, e.j), std::max(e.i, e.j)};
}

std::vector<int> parse_tau_list(const std::string& s) {
    if (s.empty()) {
        throw UsageError("--tau is required");
    }
    std::vector<int> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        try {
            if (colon == std::string::npos) {
                out.push_back(std::stoi(item));
            } else {
                const int lo = std::stoi(item.substr(0, colon));
                const int hi = std::stoi(item.substr(colon + 1));
                for (int t = lo; t <= hi; ++t) {
                    out.push_back(t);
                }
            }
        } catch (const std::logic_error&) {
            throw UsageError("--tau expects a list such as '6:20' or '29,30,31', got '" + s + "'");
        }
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (out[k] < 1 || (k > 0 && out[k] <= out[k - 1])) {
            throw UsageError("--tau values must be positive and strictly increasing");
        }
    }
    return out;
}

ThresholdPolicy parse_alpha(const std::string& s, ThresholdPolicy fallback) {
    if (s.empty()) {
        return fallback;
    }
    try {
        std::size_t used = 0;
        if (s.rfind("median:", 0) == 0) {
            return ThresholdPolicy::relative_median(std::stod(s.substr(7), &used));
        }
        if (s.rfind("max:", 0) == 0) {
            return ThresholdPolicy::relative_max(std::stod(s.substr(4), &used));
        }
        const double a = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return ThresholdPolicy::absolute(a);
    } catch (const std::logic_error&) {
        throw UsageError("--alpha expects a number, 'median:C' or 'max:C', got '" + s + "'");
    }
}

Edge first_non_edge(const NetworkGraph& g) {
    for (int i = 1; i <= g.node_count(); ++i) {
        for (int j = i + 1; j <= g.node_count(); ++j) {
            if (!g.contains({i, j})) {
                return {i, j};
            }
        }
    }
    throw UsageError("the true network is complete; a minus-one prior would exclude a true edge");
}

// `truth` supplies the tree for a tree prior and the default missing edge.
PriorTopology make_prior(const Common& c, int n, const NetworkGraph* truth) {
    if (c.prior == "complete") {
        return PriorTopology::complete(n);
    }
    if (c.prior == "tree") {
        if (truth == nullptr) {
            throw UsageError("--prior tree needs a known tree; pass --prior file:PATH");
        }
        return PriorTopology::tree(*truth);
    }
    if (c.prior == "minus-one") {
        Edge missing{n - 1, n};
        if (!c.missing.empty()) {
            missing = parse_edge(c.missing);
        } else if (truth != nullptr) {
            missing = first_non_edge(*truth);
        }
        if (n < 4) {
            throw OutOfRegimeError("minus-one prior needs n >= 4");
        }
        return PriorTopology::minus_one_edge(n, missing);
    }
    if (c.prior.rfind("file:", 0) == 0) {
        NetworkGraph g = load_network(c.prior.substr(5)).graph;
        if (g.node_count() != n) {
            throw AlignmentError("prior file has " + std::to_string(g.node_count()) + " nodes, expected " +
                                 std::to_string(n));
        }
        return PriorTopology::classify(std::move(g));
    }
    throw UsageError("--prior must be complete, tree, minus-one or file:PATH");
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        detail::write_file_locked(path, text);
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_ranktable(const Common& c, std::ostream& out, std::ostream& err) {
    if (c.n < 2) {
        throw UsageError("--n must be at least 2");
    }
    const auto taus = parse_tau_list(c.tau);
    std::optional<NetworkGraph> tree;
    if (c.prior == "tree") {
        tree = random_tree_network(c.n, c.seed).graph;
    }
    const PriorTopology prior = make_prior(c, c.n, tree ? &*tree : nullptr);
    // rank only depends on the voltages; any network gives them
    const AdmittanceNetwork net = random_connected_network(c.n, kRandomExtraEdgeProbability, c.seed);
    const MeasurementSet ms = synthesize(net, taus.back(), c.seed);
    std::string text = "tau,rank,unknowns,unique\n";
    for (int t : taus) {
        const auto t0 = std::chrono::steady_clock::now();
        const StackedSystem sys = stack_coefficients(ms.prefix(t), prior.graph());
        const UniquenessDiagnostic d = uniqueness_diagnostic(sys.A, prior.unknowns());
        text += std::to_string(t) + "," + std::to_string(d.rank) + "," + std::to_string(d.unknowns) + "," +
                (d.unique ? "yes" : "no") + "\n";
        err << "[ranktable] tau=" << t << " rank=" << d.rank << " (" << seconds_since(t0) << " s)\n";
    }
    emit(c.out, text, out);
    return kExitOk;
}

int cmd_synth(const Common& c, const std::string& network_path, const std::string& network_out, std::ostream& out,
              std::ostream& err) {
    AdmittanceNetwork net;
    if (!network_path.empty()) {
        net = load_network(network_path);
    } else {
        if (c.n < 2) {
            throw UsageError("synth needs --network or --n >= 2");
        }
        net = c.prior == "tree" ? random_tree_network(c.n, c.seed)
                                : random_connected_network(c.n, kRandomExtraEdgeProbability, c.seed);
    }
    const auto taus = parse_tau_list(c.tau);
    MeasurementSet ms = synthesize(net, taus.back(), c.seed);
    if (c.sigma > 0.0) {
        ms = add_noise(ms, NoiseSpec{c.sigma}, c.seed);
    }
    if (!network_out.empty()) {
        save_network(network_out, net);
    }
    err << "[synth] n=" << net.node_count() << " edges=" << net.edge_count() << " tau=" << ms.tau() << "\n";
    emit(c.out, measurements_to_csv(ms), out);
    return kExitOk;
}

int cmd_noise(const Common& c, const std::string& measurements, std::ostream& out, std::ostream& err) {
    if (measurements.empty()) {
        throw UsageError("noise needs --measurements");
    }
    if (!(c.sigma >= 0.0)) {
        throw UsageError("--sigma must be non-negative");
    }
    const MeasurementSet ms = load_measurements(measurements);
    const MeasurementSet noisy = add_noise(ms, NoiseSpec{c.sigma}, c.seed);
    err << "[noise] sigma=" << c.sigma << " tau=" << noisy.tau() << "\n";
    emit(c.out, measurements_to_csv(noisy), out);
    return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& network_path, int seeds, std::ostream& out, std::ostream& err) {
    if (seeds < 1) {
        throw UsageError("--seeds must be at least 1");
    }
    AdmittanceNetwork net;
    if (!network_path.empty()) {
        net = load_network(network_path);
    } else {
        if (c.n < 2) {
            throw UsageError("sweep needs --network or --n >= 2");
        }
        net = c.prior == "tree" ? random_tree_network(c.n, c.seed)
                                : random_connected_network(c.n, kRandomExtraEdgeProbability, c.seed);
    }
    const PriorTopology prior = make_prior(c, net.node_count(), &net.graph);
    const auto taus = parse_tau_list(c.tau);
    Algorithm1Config cfg;
    cfg.method = method_from_string(c.method);
    cfg.threshold = parse_alpha(c.alpha, ThresholdPolicy::relative_max());

    SweepResult result;
    result.min_measurements = min_measurements(prior).tau;
    std::vector<std::vector<SweepRow>> per_seed(static_cast<std::size_t>(seeds));
    parallel_for(per_seed.size(), [&](std::size_t s) {
        const std::uint64_t seed = c.seed + s;
        MeasurementSet full = synthesize(net, taus.back(), seed);
        if (c.sigma > 0.0) {
            full = add_noise(full, NoiseSpec{c.sigma}, seed);
        }
        for (int t : taus) {
            const auto t0 = std::chrono::steady_clock::now();
            const TopologyEstimate est = estimate_topology(prior, full.prefix(t), cfg);
            // error is measured before thresholding, F1 after
            TopologyEstimate raw = est;
            raw.y_hat = est.y_raw;
            const TopologyScore err_score = score_topology(raw, net);
            const TopologyScore f1_score = score_topology(est, net);
            per_seed[s].push_back({t, seed, err_score.total_abs_error_conductance,
                                   err_score.total_abs_error_susceptance, f1_score.f1, seconds_since(t0)});
        }
    });
    for (std::size_t s = 0; s < per_seed.size(); ++s) {
        for (const auto& row : per_seed[s]) {
            err << "[sweep] seed=" << row.seed << " tau=" << row.tau << " error="
                << row.total_abs_error_conductance + row.total_abs_error_susceptance << " f1=" << row.f1 << " ("
                << row.runtime_s << " s)\n";
        }
        result.rows.insert(result.rows.end(), per_seed[s].begin(), per_seed[s].end());
    }
    sort_sweep_rows(result.rows);
    emit(c.out, sweep_to_csv(result), out);
    return kExitOk;
}

int cmd_identify(const Common& c, const std::string& measurements, const std::string& truth_path, std::ostream& out,
                 std::ostream& err) {
    if (measurements.empty()) {
        throw UsageError("identify needs --measurements");
    }
    const MeasurementSet ms = load_measurements(measurements);
    std::optional<AdmittanceNetwork> truth;
    if (!truth_path.empty()) {
        truth = load_network(truth_path);
    }
    const PriorTopology prior = make_prior(c, ms.node_count(), nullptr);
    Algorithm1Config cfg;
    cfg.method = method_from_string(c.method);
    cfg.threshold = parse_alpha(c.alpha, ThresholdPolicy::absolute());
    const auto t0 = std::chrono::steady_clock::now();
    const TopologyEstimate est = run_algorithm1(prior, ms, cfg);
    err << "[identify] method=" << method_name(est.method) << " edges=" << est.edges_hat.size()
        << " alpha=" << est.alpha << " (" << seconds_since(t0) << " s)\n";
    if (!est.converged) {
        err << "[identify] warning: structured solver did not reach the stopping tolerance\n";
    }
    std::optional<TopologyScore> score;
    if (truth) {
        score = score_topology(est, *truth);
    }
    emit(c.out, report_to_string(make_report(est, score)), out);
    return kExitOk;
}

int cmd_phases(const Common& c, const std::string& spec_path, const std::string& bus, std::ostream& out,
               std::ostream& err) {
    if (spec_path.empty() || bus.empty()) {
        throw UsageError("phases needs --spec and --bus");
    }
    const BusSpec spec = load_bus_spec(spec_path);
    Algorithm1Config cfg;
    cfg.method = method_from_string(c.method);
    cfg.threshold = parse_alpha(c.alpha, ThresholdPolicy::relative_max());
    const auto t0 = std::chrono::steady_clock::now();
    const PhaseIdentification r = identify_phases(spec, bus, synthetic_phase_measurements(spec, c.sigma, c.seed), cfg);
    err << "[phases] bus=" << bus << " connected=" << phases_to_string(r.connected) << " ("
        << seconds_since(t0) << " s)\n";
    nlohmann::json doc = {{"bus", bus},
                          {"connected", phases_to_string(r.connected)},
                          {"disconnected", phases_to_string(r.disconnected)},
                          {"alpha", r.estimate.alpha},
                          {"tau", r.estimate.tau},
                          {"method", method_name(r.estimate.method)}};
    emit(c.out, doc.dump(2) + "\n", out);
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grid topology and admittance identification from phasor measurements", "gridident"};
    app.require_subcommand(1);
    Common c;
    std::string network, network_out, measurements, truth, spec, bus;
    int seeds = 20;

    auto add_common = [&c](CLI::App* sub) {
        sub->add_option("--n", c.n, "Node count");
        sub->add_option("--prior", c.prior, "complete | tree | minus-one | file:PATH");
        sub->add_option("--missing", c.missing, "Edge absent from a minus-one prior, as i,j");
        sub->add_option("--tau", c.tau, "Measurement counts, e.g. 6:20 or 29,30,31");
        sub->add_option("--sigma", c.sigma, "Noise scale (standard deviation relative to |V1|)");
        sub->add_option("--alpha", c.alpha, "Threshold: number, median:C or max:C");
        sub->add_option("--seed", c.seed, "Random seed");
        sub->add_option("--method", c.method, "auto | exact | stls | plugin");
        sub->add_option("--out", c.out, "Output file (default stdout)");
    };

    auto* ranktable = app.add_subcommand("ranktable", "Rank of the stacked voltage coefficient matrix per tau");
    add_common(ranktable);
    auto* synth = app.add_subcommand("synth", "Synthesize measurements from a network");
    add_common(synth);
    synth->add_option("--network", network, "Network JSON (random network from --n/--seed when absent)");
    synth->add_option("--network-out", network_out, "Write the network used");
    auto* noise = app.add_subcommand("noise", "Add measurement noise to a noiseless CSV");
    add_common(noise);
    noise->add_option("--measurements", measurements, "Measurement CSV");
    auto* sweep = app.add_subcommand("sweep", "Error and F1 versus tau over several seeds");
    add_common(sweep);
    sweep->add_option("--network", network, "Network JSON (random network from --n/--seed when absent)");
    sweep->add_option("--seeds", seeds, "Number of seeds");
    auto* identify = app.add_subcommand("identify", "Estimate topology and admittances from a measurement file");
    add_common(identify);
    identify->add_option("--measurements", measurements, "Measurement CSV");
    identify->add_option("--truth", truth, "True network JSON, adds a score to the report");
    auto* phases = app.add_subcommand("phases", "Identify connected phases at a bus");
    add_common(phases);
    phases->add_option("--spec", spec, "Network JSON carrying a bus_spec");
    phases->add_option("--bus", bus, "Candidate bus");

    std::vector<std::string> args;
    for (int k = argc - 1; k >= 1; --k) {
        args.emplace_back(argv[k]);
    }
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }

    try {
        if (ranktable->parsed()) return cmd_ranktable(c, out, err);
        if (synth->parsed()) return cmd_synth(c, network, network_out, out, err);
        if (noise->parsed()) return cmd_noise(c, measurements, out, err);
        if (sweep->parsed()) return cmd_sweep(c, network, seeds, out, err);
        if (identify->parsed()) return cmd_identify(c, measurements, truth, out, err);
        if (phases->parsed()) return cmd_phases(c, spec, bus, out, err);
    } catch (const ParseError& e) {
        err << "format error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const SolverFailureError& e) {
        err << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
    return kExitPrecondition;
}

}  // namespace gridident
