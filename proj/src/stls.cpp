#include "gridident/stls.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gridident/simd/kernels.hpp"

namespace gridident {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

constexpr int kMaxDampingEscalations = 16;
constexpr double kSingularRcond = 1e-14;

CVector to_complex(const RVector& yv) {
    const auto e = yv.size() / 2;
    CVector y(e);
    for (Eigen::Index l = 0; l < e; ++l) {
        y(l) = cplx(yv(l), yv(e + l));
    }
    return y;
}

RVector to_real(const CVector& z) {
    RVector out(2 * z.size());
    out.head(z.size()) = z.real();
    out.tail(z.size()) = z.imag();
    return out;
}

std::vector<cplx> drops_of(const NetworkGraph& g, const CVector& x) {
    std::vector<cplx> d(static_cast<std::size_t>(g.edge_count()));
    simd::edge_drop({x.data(), static_cast<std::size_t>(x.size())}, g.tails(), g.heads(), d);
    return d;
}

// H D(y) H^T x
CVector laplacian_apply(const NetworkGraph& g, const CVector& y, const CVector& x) {
    auto flow = drops_of(g, x);
    simd::hadamard(flow, {y.data(), flow.size()}, flow);
    CVector out = CVector::Zero(g.node_count());
    for (std::size_t l = 0; l < flow.size(); ++l) {
        out(g.tails()[l]) += flow[l];
        out(g.heads()[l]) -= flow[l];
    }
    return out;
}

// Complex multiplier whose products reproduce realified transposes:
// realify(X)^T [l_re; l_im] = [Re(X^T mu); -Im(X^T mu)] with mu = l_re - i l_im.
CVector multiplier_conj(const RVector& lambda, int n) {
    CVector mu(n);
    for (int j = 0; j < n; ++j) {
        mu(j) = cplx(lambda(j), -lambda(n + j));
    }
    return mu;
}

struct PointView {
    CVector v_total;  // V + dV
    CVector i_total;  // I + dI
};

PointView apply_noise(const OperatingPoint& p, const RVector& s, int n) {
    PointView out{p.V, p.I};
    for (int j = 0; j < n; ++j) {
        out.v_total(j) += cplx(s(j), s(n + j));
        out.i_total(j) += cplx(s(2 * n + j), s(3 * n + j));
    }
    return out;
}

RVector constraint_of(const NetworkGraph& g, const CVector& y, const PointView& pv) {
    return to_real(laplacian_apply(g, y, pv.v_total) - pv.i_total);
}

// Residual pieces for one operating point: r_s (4n), contribution to r_y (2e), g (2n).
struct PointResidual {
    RVector r_s;
    RVector r_y_part;
    RVector g;
};

PointResidual point_residual(const NetworkGraph& g, const RMatrix& W, const OperatingPoint& p, const RVector& s,
                             const CVector& y, const RVector& lambda) {
    const int n = g.node_count();
    const PointView pv = apply_noise(p, s, n);
    const CVector mu = multiplier_conj(lambda, n);

    PointResidual r;
    r.g = constraint_of(g, y, pv);

    // W s + G^T lambda, G = [M(y), -I]
    const CVector lmu = laplacian_apply(g, y, mu);
    r.r_s = W * s;
    r.r_s.segment(0, n) += lmu.real();
    r.r_s.segment(n, n) -= lmu.imag();
    r.r_s.segment(2 * n, 2 * n) -= lambda;

    // B^T lambda, B = realify(H D(H^T v_total))
    auto dv = drops_of(g, pv.v_total);
    auto dmu = drops_of(g, mu);
    simd::hadamard(dv, dmu, dv);
    const auto e = static_cast<Eigen::Index>(dv.size());
    r.r_y_part.resize(2 * e);
    for (Eigen::Index l = 0; l < e; ++l) {
        r.r_y_part(l) = dv[static_cast<std::size_t>(l)].real();
        r.r_y_part(e + l) = -dv[static_cast<std::size_t>(l)].imag();
    }
    return r;
}

// Sparse E_k = [C_k; B_k] (6n x 2e): second derivatives of the Lagrangian in
// (s, y) stacked over the constraint Jacobian in y.
SparseMatrix coupling_block(const NetworkGraph& g, const OperatingPoint& p, const RVector& s,
                            const RVector& lambda) {
    const int n = g.node_count();
    const int e = g.edge_count();
    const PointView pv = apply_noise(p, s, n);
    const auto dv = drops_of(g, pv.v_total);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(e) * 16);
    for (int l = 0; l < e; ++l) {
        const int i = g.tails()[l];
        const int j = g.heads()[l];
        const double a = lambda(i) - lambda(j);
        const double b = lambda(n + i) - lambda(n + j);
        const int re = l;
        const int im = e + l;
        t.emplace_back(i, re, a);
        t.emplace_back(j, re, -a);
        t.emplace_back(n + i, re, b);
        t.emplace_back(n + j, re, -b);
        t.emplace_back(i, im, b);
        t.emplace_back(j, im, -b);
        t.emplace_back(n + i, im, -a);
        t.emplace_back(n + j, im, a);

        const double dr = dv[static_cast<std::size_t>(l)].real();
        const double di = dv[static_cast<std::size_t>(l)].imag();
        const int gr = 4 * n;
        const int gi = 5 * n;
        t.emplace_back(gr + i, re, dr);
        t.emplace_back(gr + j, re, -dr);
        t.emplace_back(gi + i, re, di);
        t.emplace_back(gi + j, re, -di);
        t.emplace_back(gr + i, im, -di);
        t.emplace_back(gr + j, im, di);
        t.emplace_back(gi + i, im, dr);
        t.emplace_back(gi + j, im, -dr);
    }
    SparseMatrix E(6 * n, 2 * e);
    E.setFromTriplets(t.begin(), t.end());
    return E;
}

// [[W, G^T], [G, 0]] with G = [M(y), -I]; identical for every operating point.
RMatrix kkt_point_matrix(const NetworkGraph& g, const RMatrix& W, const CVector& y) {
    const int n = g.node_count();
    CMatrix L = CMatrix::Zero(n, n);
    for (int l = 0; l < g.edge_count(); ++l) {
        const int a = g.tails()[l];
        const int b = g.heads()[l];
        L(a, a) += y(l);
        L(b, b) += y(l);
        L(a, b) -= y(l);
        L(b, a) -= y(l);
    }
    RMatrix G = RMatrix::Zero(2 * n, 4 * n);
    G.block(0, 0, n, n) = L.real();
    G.block(0, n, n, n) = -L.imag();
    G.block(n, 0, n, n) = L.imag();
    G.block(n, n, n, n) = L.real();
    G.block(0, 2 * n, 2 * n, 2 * n) = -RMatrix::Identity(2 * n, 2 * n);

    RMatrix K = RMatrix::Zero(6 * n, 6 * n);
    K.topLeftCorner(4 * n, 4 * n) = W;
    K.block(0, 4 * n, 4 * n, 2 * n) = G.transpose();
    K.block(4 * n, 0, 2 * n, 4 * n) = G;
    return K;
}

double inf_norm(const RVector& v) { return simd::max_abs({v.data(), static_cast<std::size_t>(v.size())}); }

struct Iterate {
    std::vector<RVector> s;
    RVector y;  // [y_re; y_im]
    std::vector<RVector> lambda;
};

struct Evaluation {
    std::vector<RVector> r_point;  // [r_s; g] per operating point, 6n
    RVector r_y;
    double kkt_norm = 0.0;
    double constraint_norm = 0.0;
};

Evaluation evaluate(const MeasurementSet& ms, const NetworkGraph& g, const RMatrix& W, const Iterate& it) {
    const int n = g.node_count();
    const CVector y = to_complex(it.y);
    Evaluation ev;
    ev.r_y = RVector::Zero(it.y.size());
    for (int k = 0; k < ms.tau(); ++k) {
        const auto uk = static_cast<std::size_t>(k);
        PointResidual pr = point_residual(g, W, ms.points[uk], it.s[uk], y, it.lambda[uk]);
        RVector r(6 * n);
        r.head(4 * n) = pr.r_s;
        r.tail(2 * n) = pr.g;
        ev.r_y += pr.r_y_part;
        ev.kkt_norm = std::max(ev.kkt_norm, inf_norm(r.head(4 * n)));
        ev.constraint_norm = std::max(ev.constraint_norm, inf_norm(pr.g));
        ev.r_point.push_back(std::move(r));
    }
    ev.kkt_norm = std::max({ev.kkt_norm, ev.constraint_norm, inf_norm(ev.r_y)});
    return ev;
}

RMatrix resolve_weight(const SolverConfig& cfg, int n) {
    if (cfg.W.size() == 0) {
        return RMatrix::Identity(4 * n, 4 * n);
    }
    if (cfg.W.rows() != 4 * n || cfg.W.cols() != 4 * n) {
        throw ValidationError("weighting matrix must be " + std::to_string(4 * n) + " x " + std::to_string(4 * n));
    }
    if ((cfg.W - cfg.W.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cfg.W.cwiseAbs().maxCoeff())) {
        throw ValidationError("weighting matrix must be symmetric");
    }
    Eigen::LLT<RMatrix> llt(cfg.W);
    if (llt.info() != Eigen::Success) {
        throw ValidationError("weighting matrix must be positive definite");
    }
    return cfg.W;
}

}  // namespace

RMatrix realified_coefficient(const RMatrix& H, const CVector& x) {
    const RVector dr = H.transpose() * x.real();
    const RVector di = H.transpose() * x.imag();
    const RMatrix Are = H * dr.asDiagonal();
    const RMatrix Aim = H * di.asDiagonal();
    const auto n = H.rows();
    const auto e = H.cols();
    RMatrix A(2 * n, 2 * e);
    A << Are, -Aim, Aim, Are;
    return A;
}

RealifiedBlock realify(const RMatrix& H, const OperatingPoint& point) {
    if (point.V.size() != H.rows() || point.I.size() != H.rows()) {
        throw InvalidSizeError("operating point length does not match incidence matrix");
    }
    RealifiedBlock block;
    block.A = realified_coefficient(H, point.V);
    block.b = to_real(point.I);
    block.H = H;
    return block;
}

RVector constraint_residual(const RealifiedBlock& block, const RVector& s, const RVector& y_re, const RVector& y_im) {
    const auto n = block.H.rows();
    const auto e = block.H.cols();
    if (s.size() != 4 * n || y_re.size() != e || y_im.size() != e) {
        throw InvalidSizeError("constraint_residual: inconsistent shapes");
    }
    CVector dV(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        dV(j) = cplx(s(j), s(n + j));
    }
    RVector yv(2 * e);
    yv << y_re, y_im;
    const RMatrix dA = realified_coefficient(block.H, dV);
    return (block.A + dA) * yv - (block.b + s.tail(2 * n));
}

RVector stls_kkt_residual(const MeasurementSet& ms, const NetworkGraph& hypothesis, const RMatrix& W,
                          std::span<const RVector> s, const RVector& y, std::span<const RVector> multipliers) {
    const int n = hypothesis.node_count();
    const int tau = ms.tau();
    if (static_cast<int>(s.size()) != tau || static_cast<int>(multipliers.size()) != tau) {
        throw InvalidSizeError("stls_kkt_residual: need one noise vector and one multiplier per point");
    }
    Iterate it{std::vector<RVector>(s.begin(), s.end()), y,
               std::vector<RVector>(multipliers.begin(), multipliers.end())};
    const RMatrix w = W.size() == 0 ? RMatrix::Identity(4 * n, 4 * n) : W;
    Evaluation ev = evaluate(ms, hypothesis, w, it);
    const auto e2 = y.size();
    RVector out(static_cast<Eigen::Index>(tau) * 6 * n + e2);
    for (int k = 0; k < tau; ++k) {
        out.segment(static_cast<Eigen::Index>(k) * 4 * n, 4 * n) = ev.r_point[static_cast<std::size_t>(k)].head(4 * n);
        out.segment(static_cast<Eigen::Index>(tau) * 4 * n + e2 + static_cast<Eigen::Index>(k) * 2 * n, 2 * n) =
            ev.r_point[static_cast<std::size_t>(k)].tail(2 * n);
    }
    out.segment(static_cast<Eigen::Index>(tau) * 4 * n, e2) = ev.r_y;
    return out;
}

CVector plug_in_ols(std::span<const MeasurementSet> sets, const PriorTopology& prior) {
    const MeasurementSet averaged = average_snapshots(sets);
    const StackedSystem sys = stack_coefficients(averaged, prior.graph());
    return estimate_vector_ls(sys.A, sys.currents);
}

StlsSolution solve_stls(const MeasurementSet& ms, const PriorTopology& prior, const SolverConfig& cfg) {
    const NetworkGraph& g = prior.graph();
    const int n = g.node_count();
    const int tau = ms.tau();
    const int e = g.edge_count();
    if (tau < 1) {
        throw InvalidSizeError("solve_stls needs at least one operating point");
    }
    if (ms.node_count() != n) {
        throw AlignmentError("measurement node count differs from the hypothesis graph");
    }
    if (!(cfg.tol > 0.0) || cfg.max_iter < 0 || cfg.damping < 0.0) {
        throw ValidationError("solver config needs tol > 0, max_iter >= 0, damping >= 0");
    }
    const RMatrix W = resolve_weight(cfg, n);

    Iterate it;
    {
        const StackedSystem sys = stack_coefficients(ms, g);
        CVector y0;
        try {
            y0 = estimate_vector_ls(sys.A, sys.currents);
        } catch (const NonUniquenessError&) {
            y0 = minimum_norm_solve(sys.A, sys.currents);
        }
        it.y = to_real(y0);
    }
    it.s.assign(static_cast<std::size_t>(tau), RVector::Zero(4 * n));
    it.lambda.assign(static_cast<std::size_t>(tau), RVector::Zero(2 * n));

    StlsSolution best;
    double best_norm = std::numeric_limits<double>::infinity();
    std::vector<StlsTraceRow> trace;
    double damping = cfg.damping;

    for (int iter = 0;; ++iter) {
        const Evaluation ev = evaluate(ms, g, W, it);
        if (iter == 0) {
            best.initial_kkt_residual = ev.kkt_norm;
        }
        if (cfg.record_trace) {
            trace.push_back({iter, ev.kkt_norm, ev.constraint_norm, 0.0});
        }
        if (ev.kkt_norm < best_norm) {
            best_norm = ev.kkt_norm;
            best.y = to_complex(it.y);
            best.s = it.s;
            best.iterations = iter;
        }
        if (!std::isfinite(ev.kkt_norm) || ev.kkt_norm <= cfg.tol || iter >= cfg.max_iter) {
            break;
        }

        // Newton step with (s_k, lambda_k) eliminated per point:
        //   S dy = r_y - sum_k E_k^T K^-1 r_k,   S = sum_k E_k^T K^-1 E_k
        const RMatrix K = kkt_point_matrix(g, W, to_complex(it.y));
        Eigen::PartialPivLU<RMatrix> klu(K);
        const RMatrix Kinv = klu.inverse();
        std::vector<SparseMatrix> E;
        E.reserve(static_cast<std::size_t>(tau));
        RMatrix S = RMatrix::Zero(2 * e, 2 * e);
        RVector rhs = ev.r_y;
        for (int k = 0; k < tau; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            E.push_back(coupling_block(g, ms.points[uk], it.s[uk], it.lambda[uk]));
            const RMatrix Z = Kinv * E.back();
            S.noalias() += E.back().transpose() * Z;
            rhs.noalias() -= E.back().transpose() * (Kinv * ev.r_point[uk]);
        }

        // -S is close to positive semidefinite (it is exactly -B^T (G G^T)^-1 B
        // when the multipliers vanish), so the shift goes on -S.
        RMatrix negS = -S;
        RVector dy;
        const double diag_scale = std::max(negS.diagonal().cwiseAbs().maxCoeff(), 1e-300);
        bool solved = false;
        for (int attempt = 0; attempt <= kMaxDampingEscalations; ++attempt) {
            RMatrix shifted = negS;
            shifted.diagonal().array() += damping;
            Eigen::PartialPivLU<RMatrix> lu(shifted);
            if (lu.rcond() > kSingularRcond) {
                dy = lu.solve(-rhs);
                solved = dy.allFinite();
                if (solved) {
                    break;
                }
            }
            damping = damping == 0.0 ? 1e-10 * diag_scale : damping * 10.0;
        }
        if (!solved) {
            throw SolverFailureError("Newton system stays singular after damping escalation");
        }

        double step = inf_norm(dy);
        for (int k = 0; k < tau; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            const RVector d = -(Kinv * (ev.r_point[uk] + E[uk] * dy));
            it.s[uk] += d.head(4 * n);
            it.lambda[uk] += d.tail(2 * n);
            step = std::max(step, inf_norm(d));
        }
        it.y += dy;
        if (cfg.record_trace) {
            trace.back().step_norm = step;
        }
        damping = cfg.damping;
    }

    best.kkt_residual = best_norm;
    best.converged = best_norm <= cfg.tol;
    best.trace = std::move(trace);
    (void)e;
    return best;
}

std::string stls_trace_to_csv(const std::vector<StlsTraceRow>& trace) {
    std::string out = "iter,kkt_residual,constraint_norm,step_norm\n";
    char buf[128];
    for (const auto& row : trace) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.iter, row.kkt_residual, row.constraint_norm,
                      row.step_norm);
        out += buf;
    }
    return out;
}

}  // namespace gridident
