#pragma once

// Independent reference routines for the tests. None of them calls into the
// library's linear algebra.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "gridident/types.hpp"

namespace oracle {

using gridident::CMatrix;
using gridident::cplx;
using gridident::CVector;

/// Singular values by one-sided (Hestenes) Jacobi rotations, descending.
inline std::vector<double> jacobi_singular_values(CMatrix a) {
    if (a.rows() < a.cols()) {
        a = a.adjoint().eval();
    }
    const auto m = a.rows();
    const auto n = a.cols();
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0;
                cplx gamma = 0.0;
                for (Eigen::Index r = 0; r < m; ++r) {
                    alpha += std::norm(a(r, p));
                    beta += std::norm(a(r, q));
                    gamma += std::conj(a(r, p)) * a(r, q);
                }
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) {
                    continue;
                }
                off = std::max(off, g / std::sqrt(alpha * beta));
                const cplx phase = gamma / g;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index r = 0; r < m; ++r) {
                    const cplx ap = a(r, p);
                    const cplx aq = a(r, q) * std::conj(phase);
                    a(r, p) = c * ap - s * aq;
                    a(r, q) = s * ap + c * aq;
                }
            }
        }
        if (off < 10 * eps) {
            break;
        }
    }
    std::vector<double> sv(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        sv[static_cast<std::size_t>(j)] = a.col(j).norm();
    }
    std::sort(sv.rbegin(), sv.rend());
    return sv;
}

inline int jacobi_rank(const CMatrix& a) {
    if (a.size() == 0) {
        return 0;
    }
    const auto sv = jacobi_singular_values(a);
    const double tol = static_cast<double>(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon() *
                       sv.front() * 16;
    return static_cast<int>(std::count_if(sv.begin(), sv.end(), [tol](double s) { return s > tol; }));
}

/// Dense incidence-based coefficient matrix for edges given as 1-based pairs.
inline CMatrix coefficient_matrix(int n, const std::vector<std::pair<int, int>>& edges, const CVector& v) {
    CMatrix a = CMatrix::Zero(n, static_cast<Eigen::Index>(edges.size()));
    for (std::size_t l = 0; l < edges.size(); ++l) {
        const int i = edges[l].first - 1;
        const int j = edges[l].second - 1;
        const auto c = static_cast<Eigen::Index>(l);
        a(i, c) = v(i) - v(j);
        a(j, c) = v(j) - v(i);
    }
    return a;
}

inline double rel_error(const CVector& got, const CVector& want) {
    const double scale = std::max(want.norm(), 1e-300);
    return (got - want).norm() / scale;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
