#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aemor/matrix.hpp"

namespace aemor {

struct svd_result {
    matrix u;  ///< m x k, orthonormal columns
    vec s;     ///< k singular values, descending, non-negative
    matrix vt; ///< k x n, orthonormal rows
};

namespace detail {

/// One-sided Jacobi on the columns of b (m x n, m >= n), accumulating the
/// right rotations into v (n x n). Stops when every column pair is orthogonal
/// to relative tolerance `tol`; throws after `max_sweeps` full sweeps.
inline void jacobi_orthogonalize(matrix& b, matrix& v, double tol, std::size_t max_sweeps) {
    const std::size_t m = b.rows(), n = b.cols();
    // Columns whose norm falls below the matrix's roundoff floor carry no
    // signal; rotating them against each other chases noise and never settles
    // on rank-deficient input. They sort below the rank cutoff and are later
    // replaced by an orthonormal completion, so treat them as converged.
    const double col_floor = frobenius_norm(b) * 1e-15;
    const double floor_sq = col_floor * col_floor;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        std::size_t rotations = 0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bp = b(i, p), bq = b(i, q);
                    alpha += bp * bp;
                    beta += bq * bq;
                    gamma += bp * bq;
                }
                if (alpha <= floor_sq || beta <= floor_sq) continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                ++rotations;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bp = b(i, p), bq = b(i, q);
                    b(i, p) = c * bp - s * bq;
                    b(i, q) = s * bp + c * bq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (rotations == 0) return;
    }
    throw numerical_error("svd_thin: Jacobi sweep cap (" + std::to_string(max_sweeps) +
                          ") reached without convergence");
}

/// Thin SVD for m >= n via one-sided Jacobi.
inline svd_result svd_tall(const matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    matrix b = a;
    matrix v = matrix::identity(n);
    jacobi_orthogonalize(b, v, 1e-12, 100);

    vec s(n);
    for (std::size_t j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < m; ++i) nrm += b(i, j) * b(i, j);
        s[j] = std::sqrt(nrm);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });

    svd_result r;
    r.u = matrix(m, n);
    r.s = vec(n);
    r.vt = matrix(n, n);
    const double smax = s.empty() ? 0.0 : s[order[0]];
    const double rank_cutoff = smax * static_cast<double>(std::max(m, n)) * 1e-15;

    std::size_t filled = 0;
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t src = order[jj];
        r.s[jj] = s[src];
        for (std::size_t i = 0; i < n; ++i) r.vt(jj, i) = v(i, src);
        if (s[src] > rank_cutoff && s[src] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) r.u(i, jj) = b(i, src) / s[src];
            ++filled;
        }
    }
    // Columns past the numerical rank carry only rounding noise; replace them
    // with an orthonormal completion so U stays orthonormal for any input.
    for (std::size_t jj = filled; jj < n; ++jj) {
        vec cand(m, 0.0);
        for (std::size_t trial = 0; trial < m; ++trial) {
            for (std::size_t i = 0; i < m; ++i) cand[i] = (i == trial) ? 1.0 : 0.0;
            for (std::size_t prev = 0; prev < jj; ++prev) {
                double proj = 0.0;
                for (std::size_t i = 0; i < m; ++i) proj += cand[i] * r.u(i, prev);
                for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * r.u(i, prev);
            }
            const double nrm = norm2(cand);
            if (nrm > 0.5) {
                for (std::size_t i = 0; i < m; ++i) r.u(i, jj) = cand[i] / nrm;
                break;
            }
        }
    }
    return r;
}

} // namespace detail

/// Thin SVD: A (m x n) = U diag(S) Vt with k = min(m, n) columns/rows.
/// One-sided Jacobi; for wide matrices the factorization runs on the transpose
/// and the roles of U and V swap back.
inline svd_result svd_thin(const matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) throw contract_error("svd_thin: empty matrix");
    if (a.rows() >= a.cols()) return detail::svd_tall(a);
    svd_result t = detail::svd_tall(transpose(a));
    svd_result r;
    r.u = transpose(t.vt);
    r.s = t.s;
    r.vt = transpose(t.u);
    return r;
}

} // namespace aemor
