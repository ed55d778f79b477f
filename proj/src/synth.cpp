#include "gridident/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gridident/errors.hpp"
#include "gridident/simd/kernels.hpp"

namespace gridident {

namespace {

// Decorrelates the streams derived from one user seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kBaseStream = 1;
constexpr std::uint64_t kPerturbStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
constexpr std::uint64_t kTopologyStream = 4;
constexpr std::uint64_t kAdmittanceStream = 5;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

cplx draw_line_admittance(std::mt19937_64& rng) {
    const double r = uniform(rng, 0.02, 0.08);
    const double x = uniform(rng, 0.06, 0.24);
    return 1.0 / cplx(r, x);
}

// I = H (drop(V) .* y)
CVector edgewise_currents(const NetworkGraph& g, const CVector& y, const CVector& V) {
    const auto e = static_cast<std::size_t>(g.edge_count());
    std::vector<cplx> flow(e);
    simd::edge_drop({V.data(), static_cast<std::size_t>(V.size())}, g.tails(), g.heads(), flow);
    simd::hadamard(flow, {y.data(), e}, flow);
    CVector I = CVector::Zero(g.node_count());
    for (std::size_t l = 0; l < e; ++l) {
        I(g.tails()[l]) += flow[l];
        I(g.heads()[l]) -= flow[l];
    }
    return I;
}

void check_same_nodes(const MeasurementSet& ms) {
    const int n = ms.node_count();
    for (const auto& p : ms.points) {
        if (p.V.size() != n || p.I.size() != n) {
            throw AlignmentError("operating point " + std::to_string(p.k) + " has inconsistent node count");
        }
    }
}

}  // namespace

MeasurementSet MeasurementSet::prefix(int tau) const {
    if (tau < 0 || tau > this->tau()) {
        throw InvalidSizeError("prefix length " + std::to_string(tau) + " outside 0.." + std::to_string(this->tau()));
    }
    MeasurementSet out = *this;
    out.points.resize(static_cast<std::size_t>(tau));
    return out;
}

CMatrix MeasurementSet::voltage_matrix() const {
    CMatrix u(node_count(), tau());
    for (int k = 0; k < tau(); ++k) {
        u.col(k) = points[static_cast<std::size_t>(k)].V;
    }
    return u;
}

CMatrix MeasurementSet::current_matrix() const {
    CMatrix i(node_count(), tau());
    for (int k = 0; k < tau(); ++k) {
        i.col(k) = points[static_cast<std::size_t>(k)].I;
    }
    return i;
}

CVector default_base_voltages(int n, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, kBaseStream));
    CVector V(n);
    constexpr double half_width = 0.5 * std::numbers::pi / 180.0;
    for (int j = 0; j < n; ++j) {
        V(j) = std::polar(1.0, uniform(rng, -half_width, half_width));
    }
    return V;
}

CVector currents_from_voltages(const AdmittanceNetwork& net, const CVector& V) {
    if (V.size() != net.node_count()) {
        throw InvalidSizeError("voltage vector length does not match node count");
    }
    if (!V.allFinite()) {
        throw ValidationError("voltage vector has non-finite entries");
    }
    const CVector dense = matrix_from_vector(net) * V;
    CVector edgewise = edgewise_currents(net.graph, net.y, V);
    const double scale = net.y.cwiseAbs().sum() * std::max(1.0, V.cwiseAbs().maxCoeff());
    if ((dense - edgewise).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300)) {
        throw ConsistencyError("Y*V and edge-wise current evaluation disagree");
    }
    return edgewise;
}

std::vector<CVector> perturb_voltages(const CVector& V1, int count, std::uint64_t seed) {
    if (count < 0) {
        throw InvalidSizeError("perturbation count must be >= 0");
    }
    std::mt19937_64 rng(mix_seed(seed, kPerturbStream));
    std::vector<CVector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) {
        CVector V = V1;
        for (Eigen::Index j = 0; j < V1.size(); ++j) {
            const double half = 0.05 * std::abs(V1(j));
            const double dr = uniform(rng, -half, half);
            const double di = uniform(rng, -half, half);
            V(j) += cplx(dr, di);
        }
        out.push_back(std::move(V));
    }
    return out;
}

MeasurementSet synthesize(const AdmittanceNetwork& net, int tau, std::uint64_t seed,
                          const std::optional<CVector>& base_voltages) {
    if (tau < 1) {
        throw InvalidSizeError("need at least one operating point");
    }
    const CVector V1 = base_voltages ? *base_voltages : default_base_voltages(net.node_count(), seed);
    if (V1.size() != net.node_count()) {
        throw InvalidSizeError("base voltage length does not match node count");
    }
    MeasurementSet ms;
    ms.seed = seed;
    ms.points.push_back({V1, currents_from_voltages(net, V1), 1});
    auto rest = perturb_voltages(V1, tau - 1, seed);
    for (std::size_t c = 0; c < rest.size(); ++c) {
        CVector I = currents_from_voltages(net, rest[c]);
        ms.points.push_back({std::move(rest[c]), std::move(I), static_cast<int>(c) + 2});
    }
    return ms;
}

MeasurementSet add_noise(const MeasurementSet& ms, const NoiseSpec& spec, std::uint64_t seed) {
    if (spec.sigma_scale < 0.0 || !std::isfinite(spec.sigma_scale)) {
        throw ValidationError("noise sigma_scale must be a finite value >= 0");
    }
    if (ms.noisy) {
        throw ValidationError("measurement set is already noisy");
    }
    check_same_nodes(ms);
    MeasurementSet out = ms;
    out.noisy = true;
    out.noise = spec;
    if (ms.points.empty() || spec.sigma_scale == 0.0) {
        return out;
    }
    const CVector& V1 = ms.points.front().V;
    std::mt19937_64 rng(mix_seed(seed, kNoiseStream));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& p : out.points) {
        for (Eigen::Index j = 0; j < p.V.size(); ++j) {
            const double sigma = spec.sigma_scale * std::abs(V1(j));
            const double dvr = sigma * gauss(rng);
            const double dvi = sigma * gauss(rng);
            const double dir = sigma * gauss(rng);
            const double dii = sigma * gauss(rng);
            p.V(j) += cplx(dvr, dvi);
            p.I(j) += cplx(dir, dii);
        }
    }
    return out;
}

MeasurementSet average_snapshots(std::span<const MeasurementSet> sets) {
    if (sets.empty()) {
        throw AlignmentError("no measurement sets to average");
    }
    const MeasurementSet& first = sets.front();
    check_same_nodes(first);
    for (const auto& s : sets) {
        if (s.tau() != first.tau() || s.node_count() != first.node_count()) {
            throw AlignmentError("replicate sets differ in shape");
        }
        check_same_nodes(s);
        for (int k = 0; k < s.tau(); ++k) {
            if (s.points[static_cast<std::size_t>(k)].k != first.points[static_cast<std::size_t>(k)].k) {
                throw AlignmentError("replicate sets list operating points in different order");
            }
        }
    }
    MeasurementSet out = first;
    const double m = static_cast<double>(sets.size());
    for (int k = 0; k < first.tau(); ++k) {
        auto& p = out.points[static_cast<std::size_t>(k)];
        for (std::size_t r = 1; r < sets.size(); ++r) {
            p.V += sets[r].points[static_cast<std::size_t>(k)].V;
            p.I += sets[r].points[static_cast<std::size_t>(k)].I;
        }
        p.V /= m;
        p.I /= m;
    }
    out.surrogate = sets.size() > 1 || first.surrogate;
    out.noisy = std::any_of(sets.begin(), sets.end(), [](const MeasurementSet& s) { return s.noisy; });
    return out;
}

CMatrix voltage_coefficient(const RMatrix& H, const CVector& V) {
    if (H.rows() != V.size()) {
        throw InvalidSizeError("incidence matrix rows do not match voltage length");
    }
    const CMatrix Hc = H.cast<cplx>();
    const CVector drops = Hc.transpose() * V;
    return Hc * drops.asDiagonal();
}

CMatrix voltage_coefficient(const NetworkGraph& g, const CVector& V) {
    if (g.node_count() != V.size()) {
        throw InvalidSizeError("graph node count does not match voltage length");
    }
    std::vector<cplx> drops(static_cast<std::size_t>(g.edge_count()));
    simd::edge_drop({V.data(), static_cast<std::size_t>(V.size())}, g.tails(), g.heads(), drops);
    CMatrix A = CMatrix::Zero(g.node_count(), g.edge_count());
    for (int l = 0; l < g.edge_count(); ++l) {
        A(g.tails()[l], l) = drops[static_cast<std::size_t>(l)];
        A(g.heads()[l], l) = -drops[static_cast<std::size_t>(l)];
    }
    return A;
}

StackedSystem stack_coefficients(const MeasurementSet& ms, const NetworkGraph& hypothesis) {
    check_same_nodes(ms);
    const int n = hypothesis.node_count();
    if (ms.tau() > 0 && ms.node_count() != n) {
        throw AlignmentError("measurement node count differs from the hypothesis graph");
    }
    StackedSystem sys{CMatrix::Zero(static_cast<Eigen::Index>(n) * ms.tau(), hypothesis.edge_count()),
                      CVector(static_cast<Eigen::Index>(n) * ms.tau())};
    for (int k = 0; k < ms.tau(); ++k) {
        const auto& p = ms.points[static_cast<std::size_t>(k)];
        sys.A.middleRows(static_cast<Eigen::Index>(k) * n, n) = voltage_coefficient(hypothesis, p.V);
        sys.currents.segment(static_cast<Eigen::Index>(k) * n, n) = p.I;
    }
    return sys;
}

StackedSystem stack_coefficients(const MeasurementSet& ms, const RMatrix& H) {
    check_same_nodes(ms);
    const auto n = H.rows();
    if (ms.tau() > 0 && ms.node_count() != n) {
        throw AlignmentError("measurement node count differs from the incidence matrix");
    }
    StackedSystem sys{CMatrix(n * ms.tau(), H.cols()), CVector(n * ms.tau())};
    for (int k = 0; k < ms.tau(); ++k) {
        const auto& p = ms.points[static_cast<std::size_t>(k)];
        sys.A.middleRows(k * n, n) = voltage_coefficient(H, p.V);
        sys.currents.segment(k * n, n) = p.I;
    }
    return sys;
}

AdmittanceNetwork random_connected_network(int n, double extra_edge_probability, std::uint64_t seed) {
    if (n < 2) {
        throw InvalidSizeError("random network needs n >= 2");
    }
    std::mt19937_64 topo(mix_seed(seed, kTopologyStream));
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = i + 1;
    }
    std::shuffle(order.begin(), order.end(), topo);
    std::vector<Edge> edges;
    for (int k = 1; k < n; ++k) {
        const int parent = order[std::uniform_int_distribution<int>(0, k - 1)(topo)];
        const int child = order[static_cast<std::size_t>(k)];
        edges.push_back({std::min(parent, child), std::max(parent, child)});
    }
    if (extra_edge_probability > 0.0) {
        std::sort(edges.begin(), edges.end());
        const std::vector<Edge> tree = edges;
        std::bernoulli_distribution coin(std::min(1.0, extra_edge_probability));
        for (int i = 1; i <= n; ++i) {
            for (int j = i + 1; j <= n; ++j) {
                const bool extra = coin(topo);
                if (extra && !std::binary_search(tree.begin(), tree.end(), Edge{i, j})) {
                    edges.push_back({i, j});
                }
            }
        }
    }
    NetworkGraph g(n, std::move(edges));
    std::mt19937_64 adm(mix_seed(seed, kAdmittanceStream));
    CVector y(g.edge_count());
    for (int l = 0; l < g.edge_count(); ++l) {
        y(l) = draw_line_admittance(adm);
    }
    return AdmittanceNetwork(std::move(g), std::move(y));
}

AdmittanceNetwork random_tree_network(int n, std::uint64_t seed) { return random_connected_network(n, 0.0, seed); }

bool entrywise_distinct(const MeasurementSet& ms) {
    for (int a = 0; a < ms.tau(); ++a) {
        for (int b = a + 1; b < ms.tau(); ++b) {
            const auto& p = ms.points[static_cast<std::size_t>(a)];
            const auto& q = ms.points[static_cast<std::size_t>(b)];
            if ((p.V.array() == q.V.array()).any() || (p.I.array() == q.I.array()).any()) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace gridident
