#include <gtest/gtest.h>

#include "gridident/errors.hpp"
#include "gridident/netmodel.hpp"
#include "gridident/synth.hpp"

using namespace gridident;

namespace {

AdmittanceNetwork path3() { return {NetworkGraph(3, {{1, 2}, {2, 3}}), CVector::Constant(2, cplx(1.0, -3.0))}; }

}  // namespace

TEST(AdmittanceNetwork, Validation) {
    EXPECT_THROW(AdmittanceNetwork(complete_graph(3), CVector::Zero(2)), ValidationError);
    CVector bad = CVector::Ones(3);
    bad(1) = cplx(std::nan(""), 0.0);
    EXPECT_THROW(AdmittanceNetwork(complete_graph(3), bad), ValidationError);
    EXPECT_THROW(AdmittanceNetwork(complete_graph(3), CVector::Ones(3), {"a", "b"}), ValidationError);
    const auto net = path3();
    EXPECT_EQ(net.admittance({2, 3}), cplx(1.0, -3.0));
    EXPECT_EQ(net.admittance({1, 3}), cplx(0.0));
}

TEST(AdmittanceMatrix, PathExample) {
    const CMatrix y = matrix_from_vector(path3());
    const cplx a(1.0, -3.0);
    CMatrix want(3, 3);
    want << a, -a, 0.0, -a, 2.0 * a, -a, 0.0, -a, a;
    EXPECT_EQ(y, want);
}

TEST(AdmittanceMatrix, RoundTripOnRandomNetworks) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto net = random_connected_network(9, 0.4, seed);
        const CMatrix y = matrix_from_vector(net);
        EXPECT_LE((y - y.transpose()).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_LE(y.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12 * y.cwiseAbs().maxCoeff());
        EXPECT_EQ(vector_from_matrix(y, net.graph), net.y);
    }
}

TEST(AdmittanceMatrix, RejectsInconsistentMatrices) {
    CMatrix y = matrix_from_vector(path3());
    CMatrix asym = y;
    asym(0, 1) += 0.1;
    EXPECT_THROW(vector_from_matrix(asym, complete_graph(3)), ConsistencyError);
    CMatrix rows = y;
    rows(0, 0) += 0.1;
    EXPECT_THROW(vector_from_matrix(rows, complete_graph(3)), ConsistencyError);
    EXPECT_THROW(vector_from_matrix(CMatrix::Zero(2, 2), complete_graph(3)), InvalidSizeError);
}

TEST(SlackReduction, ReconstructInvertsReduce) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CMatrix y = matrix_from_vector(random_connected_network(7, 0.5, seed));
        const CMatrix bar = reduce_slack(y);
        EXPECT_EQ(bar.rows(), 6);
        EXPECT_LE((reconstruct_full(bar) - y).cwiseAbs().maxCoeff(), 1e-12 * y.cwiseAbs().maxCoeff());
    }
    EXPECT_THROW(reduce_slack(CMatrix::Zero(1, 1)), InvalidSizeError);
    EXPECT_THROW(reconstruct_full(CMatrix::Zero(2, 3)), InvalidSizeError);
}

TEST(Phases, ParseAndFormat) {
    EXPECT_EQ(phases_from_string("cb"), (std::vector<Phase>{Phase::b, Phase::c}));
    EXPECT_EQ(phases_to_string({Phase::a, Phase::c}), "ac");
    EXPECT_THROW(phases_from_string("aa"), SpecError);
    EXPECT_THROW(phases_from_string("ad"), SpecError);
    EXPECT_EQ(phase_from_char('b'), Phase::b);
    EXPECT_EQ(phase_char(Phase::c), 'c');
}

TEST(Phases, ExpandLateral) {
    BusSpec spec;
    spec.buses = {{"1", {Phase::a, Phase::b, Phase::c}}, {"2", {Phase::b, Phase::c}}};
    spec.branches = {{"1", "2", {{Phase::b, Phase::b, cplx(1, -2)}, {Phase::c, Phase::c, cplx(2, -4)},
                                 {Phase::b, Phase::c, cplx(0.5, -1)}, {Phase::b, Phase::b, cplx(1, -2)}}}};
    const PhaseExpansion ex = phase_expand(spec);
    EXPECT_EQ(ex.network.node_count(), 5);
    EXPECT_EQ(ex.node_of.at({"2", Phase::b}), 4);
    EXPECT_EQ(ex.network.labels[4], "2.c");
    // parallel couplings add up
    EXPECT_EQ(ex.network.admittance({2, 4}), cplx(2, -4));
    EXPECT_EQ(ex.network.admittance({2, 5}), cplx(0.5, -1));
    EXPECT_EQ(ex.network.edge_count(), 3);
}

TEST(Phases, ExpandErrors) {
    BusSpec spec;
    spec.buses = {{"1", {Phase::a}}, {"2", {Phase::b}}};
    spec.branches = {{"1", "2", {{Phase::a, Phase::a, cplx(1, 0)}}}};
    EXPECT_THROW(phase_expand(spec), SpecError);  // phase a missing at bus 2
    spec.branches = {{"1", "3", {{Phase::a, Phase::b, cplx(1, 0)}}}};
    EXPECT_THROW(phase_expand(spec), SpecError);
    spec.branches.clear();
    spec.buses.push_back({"1", {}});
    EXPECT_THROW(phase_expand(spec), SpecError);
}
