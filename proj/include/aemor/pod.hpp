#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aemor/svd.hpp"

namespace aemor {

/// Truncated left-singular basis of a snapshot matrix.
struct pod_basis_t {
    matrix xi;           ///< n_dim x r, orthonormal columns
    vec singular_values; ///< all min(n_dim, n_S) values, descending

    std::size_t rank() const { return xi.cols(); }
    std::size_t dim() const { return xi.rows(); }
};

/// Linear parametric full-order model: assemble(theta) -> (K, r), K SPD over
/// the unit parameter box. `field_slices` partitions the DOFs for coupled
/// problems ((offset, width) per field); single-field models have one slice.
struct linear_fom {
    std::string name;
    std::size_t dim = 0;
    std::size_t param_dim = 0;
    std::vector<std::pair<std::size_t, std::size_t>> field_slices;
    std::function<void(const vec& theta, matrix& k, vec& r)> assemble;

    vec solve(const vec& theta) const {
        matrix k;
        vec r;
        assemble(theta, k, r);
        return solve_linear(k, r);
    }
};

/// Leading-r left singular vectors of the snapshot matrix (columns are
/// snapshots). Optionally mean-centers the columns first; default is raw SVD.
/// Each basis column is sign-fixed so its largest-magnitude entry is positive.
inline pod_basis_t pod_basis(const matrix& snapshots, std::size_t r, bool center = false) {
    const std::size_t kmax = std::min(snapshots.rows(), snapshots.cols());
    if (r < 1 || r > kmax)
        throw contract_error("pod_basis: rank " + std::to_string(r) + " out of [1, " +
                             std::to_string(kmax) + "]");
    matrix phi = snapshots;
    if (center) {
        for (std::size_t i = 0; i < phi.rows(); ++i) {
            double mean = 0.0;
            for (std::size_t j = 0; j < phi.cols(); ++j) mean += phi(i, j);
            mean /= static_cast<double>(phi.cols());
            for (std::size_t j = 0; j < phi.cols(); ++j) phi(i, j) -= mean;
        }
    }
    const svd_result svd = svd_thin(phi);

    pod_basis_t basis;
    basis.singular_values = svd.s;
    basis.xi = matrix(phi.rows(), r);
    for (std::size_t j = 0; j < r; ++j) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < phi.rows(); ++i) {
            const double a = std::abs(svd.u(i, j));
            if (a > best) { best = a; arg = i; }
        }
        const double sign = svd.u(arg, j) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < phi.rows(); ++i) basis.xi(i, j) = sign * svd.u(i, j);
    }
    return basis;
}

struct reduced_solution {
    vec a;          ///< reduced coordinates, length r
    vec phi_approx; ///< back-projected full vector, length n_dim
};

/// Galerkin-reduced solve: K_t = Xi^T K Xi, r_t = Xi^T r, K_t a = r_t,
/// phi ~= Xi a.
inline reduced_solution reduce_and_solve(const linear_fom& fom, const pod_basis_t& basis,
                                         const vec& theta) {
    if (basis.dim() != fom.dim)
        throw contract_error("reduce_and_solve: basis dimension " + std::to_string(basis.dim()) +
                             " != model dimension " + std::to_string(fom.dim));
    matrix k;
    vec r;
    fom.assemble(theta, k, r);
    const matrix kxi = matmul(k, basis.xi);
    const matrix k_red = matmul(transpose(basis.xi), kxi);
    const vec r_red = matvec_t(basis.xi, r);
    reduced_solution sol;
    sol.a = solve_linear(k_red, r_red);
    sol.phi_approx = matvec(basis.xi, sol.a);
    return sol;
}

/// Per-field bases for a coupled model, in field-slice order.
struct block_basis {
    std::vector<pod_basis_t> blocks;

    std::size_t total_rank() const {
        std::size_t r = 0;
        for (const auto& b : blocks) r += b.rank();
        return r;
    }
};

/// Block-diagonal Galerkin reduction of a coupled system: assembles
/// blockdiag(Xi_1, ..., Xi_n), projects the full K and r, solves the reduced
/// system, and back-projects each field with its own basis.
inline std::vector<vec> block_reduce_and_solve(const linear_fom& fom, const block_basis& blocks,
                                               const vec& theta) {
    if (blocks.blocks.size() != fom.field_slices.size())
        throw contract_error("block_reduce_and_solve: " + std::to_string(blocks.blocks.size()) +
                             " bases for " + std::to_string(fom.field_slices.size()) + " fields");
    std::size_t covered = 0;
    for (std::size_t i = 0; i < blocks.blocks.size(); ++i) {
        if (blocks.blocks[i].dim() != fom.field_slices[i].second)
            throw contract_error("block_reduce_and_solve: basis " + std::to_string(i) +
                                 " has dimension " + std::to_string(blocks.blocks[i].dim()) +
                                 ", field slice is " +
                                 std::to_string(fom.field_slices[i].second));
        covered += fom.field_slices[i].second;
    }
    if (covered != fom.dim)
        throw contract_error("block_reduce_and_solve: field slices cover " +
                             std::to_string(covered) + " of " + std::to_string(fom.dim) + " DOFs");

    matrix big_xi(fom.dim, blocks.total_rank());
    std::size_t col0 = 0;
    for (std::size_t i = 0; i < blocks.blocks.size(); ++i) {
        const auto [row0, width] = fom.field_slices[i];
        const pod_basis_t& b = blocks.blocks[i];
        for (std::size_t r = 0; r < width; ++r)
            for (std::size_t c = 0; c < b.rank(); ++c) big_xi(row0 + r, col0 + c) = b.xi(r, c);
        col0 += b.rank();
    }

    matrix k;
    vec r;
    fom.assemble(theta, k, r);
    const matrix k_red = matmul(transpose(big_xi), matmul(k, big_xi));
    const vec r_red = matvec_t(big_xi, r);
    const vec a = solve_linear(k_red, r_red);

    std::vector<vec> per_field;
    col0 = 0;
    for (std::size_t i = 0; i < blocks.blocks.size(); ++i) {
        const pod_basis_t& b = blocks.blocks[i];
        const vec ai(a.begin() + col0, a.begin() + col0 + b.rank());
        per_field.push_back(matvec(b.xi, ai));
        col0 += b.rank();
    }
    return per_field;
}

} // namespace aemor
