#include <gtest/gtest.h>

#include <random>

#include "gridident/errors.hpp"
#include "gridident/stls.hpp"
#include "oracles.hpp"

using namespace gridident;

namespace {

RVector random_real(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    RVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        v(k) = d(rng);
    }
    return v;
}

CVector random_cvec(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    CVector v(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        v(k) = cplx(d(rng), d(rng));
    }
    return v;
}

RVector stack(const CVector& z) {
    RVector r(2 * z.size());
    r << z.real(), z.imag();
    return r;
}

Edge first_gap(const NetworkGraph& g) {
    for (int i = 1; i <= g.node_count(); ++i)
        for (int j = i + 1; j <= g.node_count(); ++j)
            if (!g.contains({i, j})) return {i, j};
    return {1, 2};
}

CVector truth_on(const PriorTopology& prior, const AdmittanceNetwork& net) {
    CVector y(prior.unknowns());
    for (int l = 0; l < prior.unknowns(); ++l) {
        y(l) = net.admittance(prior.graph().edge(l));
    }
    return y;
}

}  // namespace

TEST(Realify, BlockStructureAndComplexProduct) {
    std::mt19937_64 rng(3);
    const auto g = complete_graph(6);
    const RMatrix h = incidence_matrix(g);
    const OperatingPoint p{random_cvec(6, rng), random_cvec(6, rng), 1};
    const RealifiedBlock b = realify(h, p);
    const auto e = g.edge_count();
    EXPECT_EQ(b.A.topLeftCorner(6, e), b.A.bottomRightCorner(6, e));
    EXPECT_EQ(b.A.topRightCorner(6, e), -b.A.bottomLeftCorner(6, e));
    const CVector y = random_cvec(e, rng);
    const CVector prod = voltage_coefficient(h, p.V) * y;
    EXPECT_LE((b.A * stack(y) - stack(prod)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(b.b, stack(p.I));
    EXPECT_EQ(realified_coefficient(h, CVector::Zero(6)), RMatrix::Zero(12, 2 * e));
}

TEST(Realify, RealInputsGiveRealProduct) {
    const auto g = complete_graph(4);
    const RMatrix h = incidence_matrix(g);
    CVector v(4);
    v << 1.0, 0.9, 1.1, 0.95;
    const RMatrix a = realified_coefficient(h, v);
    EXPECT_EQ(a.bottomLeftCorner(4, 6), RMatrix::Zero(4, 6));
    EXPECT_THROW(realify(h, OperatingPoint{CVector::Zero(3), CVector::Zero(4), 1}), InvalidSizeError);
}

TEST(ConstraintResidual, ZeroAtTruthAndMinusBAtZero) {
    const auto net = random_connected_network(6, 0.4, 2);
    const MeasurementSet ms = synthesize(net, 2, 5);
    const RMatrix h = incidence_matrix(net.graph);
    const RealifiedBlock b = realify(h, ms.points[1]);
    const RVector s0 = RVector::Zero(24);
    EXPECT_LE(constraint_residual(b, s0, net.y.real(), net.y.imag()).cwiseAbs().maxCoeff(), 1e-10);
    const auto e = net.edge_count();
    EXPECT_EQ(constraint_residual(b, s0, RVector::Zero(e), RVector::Zero(e)), -b.b);
}

TEST(ConstraintResidual, MatchesComplexOracle) {
    std::mt19937_64 rng(11);
    const auto net = random_connected_network(7, 0.4, 4);
    const MeasurementSet ms = synthesize(net, 1, 5);
    const RMatrix h = incidence_matrix(net.graph);
    const RVector s = random_real(28, rng, 0.01);
    const RealifiedBlock b = realify(h, ms.points[0]);
    CVector dv(7), di(7);
    for (int j = 0; j < 7; ++j) {
        dv(j) = cplx(s(j), s(7 + j));
        di(j) = cplx(s(14 + j), s(21 + j));
    }
    std::vector<std::pair<int, int>> edges;
    for (const Edge& e : net.graph.edges()) edges.emplace_back(e.i, e.j);
    const CVector want = oracle::coefficient_matrix(7, edges, ms.points[0].V + dv) * net.y - (ms.points[0].I + di);
    EXPECT_LE((constraint_residual(b, s, net.y.real(), net.y.imag()) - stack(want)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KktResidual, IsGradientOfLagrangian) {
    std::mt19937_64 rng(5);
    const auto net = random_connected_network(5, 0.5, 6);
    const MeasurementSet ms = add_noise(synthesize(net, 3, 7), NoiseSpec{0.01}, 8);
    const auto g = complete_graph(5);
    const RMatrix h = incidence_matrix(g);
    const int n = 5, e = g.edge_count(), tau = 3;
    const RMatrix W = RMatrix::Identity(4 * n, 4 * n) * 1.7;
    std::vector<RVector> s, lam;
    for (int k = 0; k < tau; ++k) {
        s.push_back(random_real(4 * n, rng, 0.01));
        lam.push_back(random_real(2 * n, rng));
    }
    const RVector y = random_real(2 * e, rng);
    const RVector r = stls_kkt_residual(ms, g, W, s, y, lam);
    ASSERT_EQ(r.size(), tau * 6 * n + 2 * e);

    auto lagrangian = [&](const std::vector<RVector>& ss, const RVector& yy) {
        double total = 0.0;
        for (int k = 0; k < tau; ++k) {
            const RealifiedBlock b = realify(h, ms.points[k]);
            total += 0.5 * ss[k].dot(W * ss[k]);
            total += lam[k].dot(constraint_residual(b, ss[k], yy.head(e), yy.tail(e)));
        }
        return total;
    };
    const double step = 1e-6;
    for (int k = 0; k < tau; ++k) {
        for (int c = 0; c < 4 * n; ++c) {
            auto sp = s, sm = s;
            sp[k](c) += step;
            sm[k](c) -= step;
            const double fd = (lagrangian(sp, y) - lagrangian(sm, y)) / (2 * step);
            EXPECT_NEAR(r(k * 4 * n + c), fd, 1e-6) << "s k=" << k << " c=" << c;
        }
    }
    for (int c = 0; c < 2 * e; ++c) {
        RVector yp = y, ym = y;
        yp(c) += step;
        ym(c) -= step;
        const double fd = (lagrangian(s, yp) - lagrangian(s, ym)) / (2 * step);
        EXPECT_NEAR(r(tau * 4 * n + c), fd, 1e-6) << "y c=" << c;
    }
    for (int k = 0; k < tau; ++k) {
        const RVector gk = constraint_residual(realify(h, ms.points[k]), s[k], y.head(e), y.tail(e));
        EXPECT_LE((r.segment(tau * 4 * n + 2 * e + k * 2 * n, 2 * n) - gk).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SolveStls, ZeroNoiseMatchesExact) {
    for (int n : {4, 6, 9}) {
        const auto net = random_connected_network(n, 0.3, static_cast<std::uint64_t>(n));
        const auto prior = PriorTopology::minus_one_edge(n, first_gap(net.graph));
        const MeasurementSet ms = synthesize(net, n - 2, 3);
        const StlsSolution sol = solve_stls(ms, prior);
        EXPECT_TRUE(sol.converged);
        EXPECT_LE(oracle::rel_error(sol.y, truth_on(prior, net)), 1e-6);
        for (const auto& s : sol.s) {
            EXPECT_LE(s.norm(), 1e-6);
        }
    }
}

TEST(SolveStls, NoisyConvergesQuadratically) {
    const auto net = random_connected_network(10, 0.3, 21);
    const auto prior = PriorTopology::minus_one_edge(10, first_gap(net.graph));
    const MeasurementSet ms = add_noise(synthesize(net, 12, 4), NoiseSpec{0.001}, 5);
    SolverConfig cfg;
    cfg.record_trace = true;
    const StlsSolution sol = solve_stls(ms, prior, cfg);
    ASSERT_TRUE(sol.converged);
    EXPECT_LE(sol.kkt_residual, 1e-5);
    EXPECT_LE(sol.kkt_residual, sol.initial_kkt_residual);
    EXPECT_LE(sol.iterations, 8);
    ASSERT_GE(sol.trace.size(), 3u);
    const auto& t = sol.trace;
    // final contraction is much stronger than linear
    const double r1 = t[t.size() - 2].kkt_residual / t[t.size() - 3].kkt_residual;
    const double r2 = t.back().kkt_residual / t[t.size() - 2].kkt_residual;
    EXPECT_LT(r2, r1);
    EXPECT_LT(r2, 1e-2);

    // structured estimate beats plain least squares on the same data
    const StackedSystem sys = stack_coefficients(ms, prior.graph());
    const CVector ols = estimate_vector_ls(sys.A, sys.currents);
    const CVector truth = truth_on(prior, net);
    EXPECT_LT((sol.y - truth).norm(), (ols - truth).norm());
}

TEST(SolveStls, WeightScaleInvariance) {
    const auto net = random_connected_network(6, 0.3, 8);
    const auto prior = PriorTopology::complete(6);
    const MeasurementSet ms = add_noise(synthesize(net, 6, 4), NoiseSpec{0.001}, 5);
    SolverConfig a;
    SolverConfig b;
    b.W = RMatrix::Identity(24, 24) * 3.0;
    const CVector ya = solve_stls(ms, prior, a).y;
    const CVector yb = solve_stls(ms, prior, b).y;
    EXPECT_LE(oracle::rel_error(yb, ya), 1e-8);
}

TEST(SolveStls, DeterministicAndValidated) {
    const auto net = random_connected_network(5, 0.3, 1);
    const auto prior = PriorTopology::complete(5);
    const MeasurementSet ms = add_noise(synthesize(net, 4, 4), NoiseSpec{0.001}, 5);
    EXPECT_EQ(solve_stls(ms, prior).y, solve_stls(ms, prior).y);
    SolverConfig bad;
    bad.W = RMatrix::Identity(3, 3);
    EXPECT_THROW(solve_stls(ms, prior, bad), ValidationError);
    bad.W = -RMatrix::Identity(20, 20);
    EXPECT_THROW(solve_stls(ms, prior, bad), ValidationError);
    bad = {};
    bad.tol = 0.0;
    EXPECT_THROW(solve_stls(ms, prior, bad), ValidationError);
    EXPECT_THROW(solve_stls(MeasurementSet{}, prior), InvalidSizeError);
}

TEST(SolveStls, IterationCapReportsNotConverged) {
    const auto net = random_connected_network(7, 0.3, 3);
    const MeasurementSet ms = add_noise(synthesize(net, 6, 4), NoiseSpec{0.001}, 5);
    SolverConfig cfg;
    cfg.max_iter = 0;
    const StlsSolution sol = solve_stls(ms, PriorTopology::complete(7), cfg);
    EXPECT_FALSE(sol.converged);
    EXPECT_EQ(sol.iterations, 0);
    EXPECT_EQ(sol.kkt_residual, sol.initial_kkt_residual);
}

TEST(PlugIn, SingleNoiselessSetEqualsLeastSquares) {
    const auto net = random_connected_network(7, 0.3, 3);
    const auto prior = PriorTopology::complete(7);
    const MeasurementSet ms = synthesize(net, 6, 2);
    const StackedSystem sys = stack_coefficients(ms, prior.graph());
    EXPECT_LE(oracle::rel_error(plug_in_ols(std::span(&ms, 1), prior), estimate_vector_ls(sys.A, sys.currents)),
              1e-12);
    const MeasurementSet low = ms.prefix(5);
    EXPECT_THROW(plug_in_ols(std::span(&low, 1), prior), NonUniquenessError);
}

TEST(Trace, CsvFormat) {
    const std::string csv = stls_trace_to_csv({{0, 1.5, 1.0, 0.25}});
    EXPECT_EQ(csv, "iter,kkt_residual,constraint_norm,step_norm\n0,1.5,1,0.25\n");
}
