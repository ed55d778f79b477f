#include <gtest/gtest.h>

#include <random>

#include "gridident/errors.hpp"
#include "gridident/graph_core.hpp"
#include "gridident/synth.hpp"
#include "oracles.hpp"

using namespace gridident;

namespace {

CMatrix random_points(int n, int tau, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    CMatrix x(n, tau);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < tau; ++k) {
            x(i, k) = cplx(d(rng), d(rng));
        }
    }
    return x;
}

}  // namespace

TEST(NetworkGraph, NormalisesAndSortsEdges) {
    NetworkGraph g(4, {{3, 1}, {1, 2}, {4, 2}});
    ASSERT_EQ(g.edge_count(), 3);
    EXPECT_EQ(g.edge(0), (Edge{1, 2}));
    EXPECT_EQ(g.edge(1), (Edge{1, 3}));
    EXPECT_EQ(g.edge(2), (Edge{2, 4}));
    EXPECT_EQ(g.index_of({2, 4}), 2);
    EXPECT_FALSE(g.index_of({3, 4}).has_value());
    EXPECT_TRUE(g.contains({1, 3}));
    EXPECT_EQ(g.tails()[2], 1);
    EXPECT_EQ(g.heads()[2], 3);
}

TEST(NetworkGraph, RejectsBadEdges) {
    EXPECT_THROW(NetworkGraph(3, {{1, 1}}), ValidationError);
    EXPECT_THROW(NetworkGraph(3, {{1, 4}}), ValidationError);
    EXPECT_THROW(NetworkGraph(3, {{0, 2}}), ValidationError);
    try {
        NetworkGraph(3, {{1, 2}, {2, 1}});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("duplicate edge (1,2)"), std::string::npos);
    }
}

TEST(NetworkGraph, CompleteAndRemove) {
    const auto k5 = complete_graph(5);
    EXPECT_EQ(k5.edge_count(), 10);
    const auto m = remove_edge(k5, {2, 4});
    EXPECT_EQ(m.edge_count(), 9);
    EXPECT_FALSE(m.contains({2, 4}));
    EXPECT_THROW(remove_edge(m, {2, 4}), NotFoundError);
    EXPECT_THROW(complete_graph(1), InvalidSizeError);
}

TEST(NetworkGraph, ConnectivityAndTrees) {
    EXPECT_TRUE(is_tree(NetworkGraph(3, {{1, 2}, {2, 3}})));
    EXPECT_FALSE(is_tree(NetworkGraph(3, {{1, 2}, {2, 3}, {1, 3}})));
    EXPECT_FALSE(is_connected(NetworkGraph(4, {{1, 2}, {3, 4}})));
    EXPECT_TRUE(is_connected(complete_graph(6)));
}

TEST(Incidence, SignsAndColumnSums) {
    const auto g = complete_graph(5);
    const RMatrix h = incidence_matrix(g);
    ASSERT_EQ(h.rows(), 5);
    ASSERT_EQ(h.cols(), 10);
    for (int l = 0; l < g.edge_count(); ++l) {
        EXPECT_EQ(h(g.edge(l).i - 1, l), 1.0);
        EXPECT_EQ(h(g.edge(l).j - 1, l), -1.0);
        EXPECT_EQ(h.col(l).sum(), 0.0);
    }
    // H H^T of the complete graph: n I - 1 1^T
    const RMatrix lap = h * h.transpose();
    EXPECT_NEAR((lap - (5.0 * RMatrix::Identity(5, 5) - RMatrix::Ones(5, 5))).norm(), 0.0, 1e-14);
}

TEST(Rank, AgreesWithJacobiOracle) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const CMatrix x = random_points(9, 4, seed);
        const CMatrix low = x * random_points(4, 7, seed + 10);  // rank 4
        EXPECT_EQ(numerical_rank(low), 4);
        EXPECT_EQ(oracle::jacobi_rank(low), 4);
    }
    EXPECT_EQ(numerical_rank(CMatrix(0, 3)), 0);
    EXPECT_EQ(numerical_rank(RMatrix(RMatrix::Identity(3, 3))), 3);
}

TEST(Rigidity, RowStructure) {
    const NetworkGraph g(3, {{1, 2}, {2, 3}});
    const CMatrix x = random_points(3, 2, 7);
    const CMatrix r = rigidity_matrix({g, x});
    ASSERT_EQ(r.rows(), 2);
    ASSERT_EQ(r.cols(), 6);
    EXPECT_EQ(r(0, 0), x(0, 0) - x(1, 0));
    EXPECT_EQ(r(0, 3), x(1, 1) - x(0, 1));
    EXPECT_EQ(r(0, 4), cplx(0.0));
    EXPECT_EQ(r(1, 5), x(2, 1) - x(1, 1));
    EXPECT_THROW(rigidity_matrix({g, random_points(4, 2, 1)}), InvalidSizeError);
}

TEST(Rigidity, PermutationReproducesMatrix) {
    for (int n = 4; n <= 7; ++n) {
        for (int tau = 1; tau <= n; ++tau) {
            const auto g = remove_edge(complete_graph(n), {1, n});
            const CMatrix v = random_points(n, tau, static_cast<unsigned>(n * 31 + tau));
            CMatrix a(static_cast<Eigen::Index>(n) * tau, g.edge_count());
            for (int k = 0; k < tau; ++k) {
                a.middleRows(static_cast<Eigen::Index>(k) * n, n) = voltage_coefficient(g, CVector(v.col(k)));
            }
            const auto p = a_to_rigidity_permutation(n, tau);
            const CMatrix permuted = permute_columns(a.transpose(), p);
            EXPECT_LE((permuted - rigidity_matrix({g, v})).cwiseAbs().maxCoeff(), 1e-12) << n << " " << tau;
        }
    }
}

TEST(Rigidity, RankFormulaOnCompleteGraphs) {
    for (int n = 4; n <= 8; ++n) {
        for (int tau = 1; tau <= n; ++tau) {
            const CMatrix r = rigidity_matrix({complete_graph(n), random_points(n, tau, 100u + n * 10 + tau)});
            EXPECT_EQ(numerical_rank(r), n * tau - trivial_motion_count(tau)) << n << " " << tau;
        }
    }
}

TEST(Rigidity, MinusOneEdgeRankInValidRegime) {
    for (int n = 4; n <= 8; ++n) {
        const auto g = remove_edge(complete_graph(n), {2, 3});
        for (int tau = 1; tau <= n; ++tau) {
            const CMatrix r = rigidity_matrix({g, random_points(n, tau, 500u + n * 10 + tau)});
            const int rank = numerical_rank(r);
            if (tau <= n - 2) {
                EXPECT_EQ(rank, predicted_rank_minus_one_edge(n, tau)) << n << " " << tau;
            } else {
                // the formula overshoots the row count; rank saturates at e
                EXPECT_EQ(rank, g.edge_count()) << n << " " << tau;
            }
        }
    }
}

TEST(Rigidity, FormulaDomain) {
    EXPECT_EQ(trivial_motion_count(3), 6);
    EXPECT_EQ(predicted_rank_minus_one_edge(14, 12), 90);
    EXPECT_THROW(predicted_rank_minus_one_edge(3, 1), OutOfRegimeError);
    EXPECT_THROW(predicted_rank_minus_one_edge(5, 6), OutOfRegimeError);
    EXPECT_THROW(predicted_rank_minus_one_edge(5, 0), OutOfRegimeError);
}
