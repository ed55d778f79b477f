#include "gridident/exact_estimate.hpp"

#include <algorithm>
#include <cmath>

namespace gridident {

std::string prior_kind_name(PriorKind kind) {
    switch (kind) {
        case PriorKind::none:
            return "complete";
        case PriorKind::tree:
            return "tree";
        case PriorKind::minus_one_edge:
            return "minus-one";
        case PriorKind::explicit_graph:
            return "explicit";
    }
    return "unknown";
}

PriorTopology PriorTopology::complete(int n) { return {PriorKind::none, complete_graph(n)}; }

PriorTopology PriorTopology::tree(NetworkGraph tree) {
    if (!is_tree(tree)) {
        throw ValidationError("tree prior needs a connected graph with n-1 edges");
    }
    return {PriorKind::tree, std::move(tree)};
}

PriorTopology PriorTopology::minus_one_edge(int n, Edge missing) {
    return {PriorKind::minus_one_edge, remove_edge(complete_graph(n), missing)};
}

PriorTopology PriorTopology::explicit_graph(NetworkGraph g) { return {PriorKind::explicit_graph, std::move(g)}; }

PriorTopology PriorTopology::classify(NetworkGraph g) {
    const int n = g.node_count();
    const int full = n * (n - 1) / 2;
    if (n >= 2 && g.edge_count() == full) {
        return {PriorKind::none, std::move(g)};
    }
    if (n >= 4 && g.edge_count() == full - 1) {
        return {PriorKind::minus_one_edge, std::move(g)};
    }
    if (is_tree(g)) {
        return {PriorKind::tree, std::move(g)};
    }
    return {PriorKind::explicit_graph, std::move(g)};
}

MinMeasurements min_measurements(PriorKind kind, int n, int unknowns) {
    if (n < 2) {
        throw InvalidSizeError("need n >= 2 nodes");
    }
    switch (kind) {
        case PriorKind::none:
            return {n - 1, false};
        case PriorKind::tree:
            return {1, false};
        case PriorKind::minus_one_edge:
            if (n < 4) {
                throw OutOfRegimeError("complete-minus-one-edge threshold requires n >= 4");
            }
            return {n - 2, false};
        case PriorKind::explicit_graph:
            return {std::max(1, (unknowns + n - 1) / n), true};
    }
    throw ValidationError("unknown prior kind");
}

MinMeasurements min_measurements(const PriorTopology& prior) {
    return min_measurements(prior.kind(), prior.node_count(), prior.unknowns());
}

UniquenessDiagnostic uniqueness_diagnostic(const CMatrix& A, int unknowns) {
    UniquenessDiagnostic d;
    d.unknowns = unknowns;
    d.rank = A.size() == 0 ? 0 : numerical_rank(A);
    d.deficiency = unknowns - d.rank;
    d.unique = d.deficiency == 0;
    return d;
}

ReducedMeasurements build_reduced_measurements(const MeasurementSet& ms, std::optional<cplx> slack_voltage) {
    const int n = ms.node_count();
    if (n < 2) {
        throw InvalidSizeError("slack reduction needs n >= 2");
    }
    ReducedMeasurements r{CMatrix(n - 1, ms.tau()), CMatrix(n - 1, ms.tau())};
    for (int k = 0; k < ms.tau(); ++k) {
        const auto& p = ms.points[static_cast<std::size_t>(k)];
        const cplx slack = slack_voltage.value_or(p.V(0));
        r.vbar.col(k) = p.V.tail(n - 1).array() - slack;
        r.ibar.col(k) = p.I.tail(n - 1);
    }
    return r;
}

CMatrix estimate_reduced(const CMatrix& vbar, const CMatrix& ibar) {
    if (vbar.rows() != ibar.rows() || vbar.cols() != ibar.cols()) {
        throw InvalidSizeError("reduced voltage and current matrices differ in shape");
    }
    const auto m = static_cast<int>(vbar.rows());
    const int rank = vbar.size() == 0 ? 0 : numerical_rank(vbar);
    if (rank < m) {
        UniquenessDiagnostic d{rank, m, m - rank, false};
        throw NonUniquenessError("reduced voltage matrix has rank " + std::to_string(rank) + " < " +
                                     std::to_string(m) + " (needs tau >= n-1 independent operating points)",
                                 d);
    }
    if (vbar.cols() == vbar.rows()) {
        // Ybar vbar = ibar  <=>  vbar^T Ybar^T = ibar^T
        return vbar.transpose().partialPivLu().solve(ibar.transpose()).transpose();
    }
    // Ybar (vbar vbar^H) = ibar vbar^H
    const CMatrix gram = vbar * vbar.adjoint();
    const CMatrix rhs = vbar * ibar.adjoint();
    return gram.ldlt().solve(rhs).adjoint();
}

CVector estimate_vector_ls(const CMatrix& A, const CVector& currents) {
    if (A.rows() != currents.size()) {
        throw InvalidSizeError("coefficient matrix rows do not match current vector length");
    }
    const auto unknowns = static_cast<int>(A.cols());
    if (A.rows() == 0) {
        throw NonUniquenessError("no equations", {0, unknowns, unknowns, unknowns == 0});
    }
    Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tol = default_rank_tolerance(A.rows(), A.cols());
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(0) > 0.0 && sv(k) > tol * sv(0)) {
            ++rank;
        }
    }
    if (rank < unknowns) {
        UniquenessDiagnostic d{rank, unknowns, unknowns - rank, false};
        throw NonUniquenessError("voltage coefficient matrix has rank " + std::to_string(rank) + " for " +
                                     std::to_string(unknowns) + " unknown admittances",
                                 d);
    }
    svd.setThreshold(tol);
    return svd.solve(currents);
}

CVector minimum_norm_solve(const CMatrix& A, const CVector& rhs) {
    if (A.rows() != rhs.size()) {
        throw InvalidSizeError("minimum_norm_solve: shape mismatch");
    }
    if (A.size() == 0) {
        return CVector::Zero(A.cols());
    }
    Eigen::BDCSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(default_rank_tolerance(A.rows(), A.cols()));
    return svd.solve(rhs);
}

double symmetry_deviation(const CMatrix& Ybar) {
    const double scale = Ybar.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        return 0.0;
    }
    return (Ybar - Ybar.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace gridident
