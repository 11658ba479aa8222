#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "aemor/pod.hpp"

namespace aemor {

namespace detail {

/// 1D Poisson, 65 linear elements on [0,1], homogeneous Dirichlet ends,
/// 64 interior DOFs. theta = (conductivity contrast, load scale).
/// kappa(x) = 1 + 3*theta0*sin^2(pi x) stays >= 1, so K is SPD on the box.
inline linear_fom make_poisson1d() {
    constexpr std::size_t n_elem = 65;
    constexpr std::size_t n_dof = n_elem - 1;
    linear_fom fom;
    fom.name = "poisson1d";
    fom.dim = n_dof;
    fom.param_dim = 2;
    fom.field_slices = {{0, n_dof}};
    fom.assemble = [](const vec& theta, matrix& k, vec& r) {
        if (theta.size() != 2)
            throw contract_error("poisson1d: expected 2 parameters, got " +
                                 std::to_string(theta.size()));
        const double contrast = theta[0], load = theta[1];
        const double h = 1.0 / static_cast<double>(n_elem);
        k = matrix(n_dof, n_dof);
        r = vec(n_dof, 0.0);
        for (std::size_t e = 0; e < n_elem; ++e) {
            const double xm = (static_cast<double>(e) + 0.5) * h;
            const double s = std::sin(std::numbers::pi * xm);
            const double kappa = 1.0 + 3.0 * contrast * s * s;
            const double ke = kappa / h;
            const double fe = load * (1.0 + 8.0 * xm * xm) * h / 2.0;
            // global node ids e and e+1; interior DOF index = node - 1
            const long i = static_cast<long>(e) - 1, j = static_cast<long>(e);
            if (i >= 0) {
                k(i, i) += ke;
                r[i] += fe;
            }
            if (j < static_cast<long>(n_dof)) {
                k(j, j) += ke;
                r[j] += fe;
            }
            if (i >= 0 && j < static_cast<long>(n_dof)) {
                k(i, j) -= ke;
                k(j, i) -= ke;
            }
        }
    };
    return fom;
}

/// Plane-strain Q4 elasticity on a 10 x 9 element grid (11 x 10 nodes),
/// bottom edge clamped: 198 free DOFs. A circular inclusion stiffens by up to
/// 10x with theta0; theta1 scales a downward traction on the top edge.
inline linear_fom make_elasticity2d() {
    constexpr std::size_t nx = 10, ny = 9;
    constexpr std::size_t nodes_x = nx + 1, nodes_y = ny + 1;
    constexpr std::size_t n_free_nodes = nodes_x * (nodes_y - 1); // bottom row clamped
    constexpr std::size_t n_dof = 2 * n_free_nodes;
    linear_fom fom;
    fom.name = "elasticity2d";
    fom.dim = n_dof;
    fom.param_dim = 2;
    fom.field_slices = {{0, n_dof}};
    fom.assemble = [](const vec& theta, matrix& k, vec& r) {
        if (theta.size() != 2)
            throw contract_error("elasticity2d: expected 2 parameters, got " +
                                 std::to_string(theta.size()));
        const double contrast = theta[0], load = theta[1];
        const double lx = 1.0, ly = 0.9;
        const double hx = lx / nx, hy = ly / ny;
        const double nu = 0.3;

        k = matrix(n_dof, n_dof);
        r = vec(n_dof, 0.0);

        // Free-DOF numbering: node (ix, iy), iy >= 1, id = (iy-1)*nodes_x + ix,
        // DOFs (2*id, 2*id+1). Bottom row iy == 0 is clamped (dropped).
        auto dof_of = [](std::size_t ix, std::size_t iy, std::size_t comp) -> long {
            if (iy == 0) return -1;
            return static_cast<long>(2 * ((iy - 1) * nodes_x + ix) + comp);
        };

        const double gp = 1.0 / std::sqrt(3.0);
        const std::array<double, 2> gauss = {-gp, gp};

        for (std::size_t ey = 0; ey < ny; ++ey) {
            for (std::size_t ex = 0; ex < nx; ++ex) {
                const double cx = (ex + 0.5) * hx, cy = (ey + 0.5) * hy;
                const double dx = cx - 0.5 * lx, dy = cy - 0.5 * ly;
                const bool inside = dx * dx + dy * dy < 0.25 * 0.25;
                const double e_mod = 1.0 * (inside ? 1.0 + 9.0 * contrast : 1.0);
                const double dfac = e_mod / ((1.0 + nu) * (1.0 - 2.0 * nu));
                const double d11 = dfac * (1.0 - nu), d12 = dfac * nu;
                const double d33 = e_mod / (2.0 * (1.0 + nu));

                // element nodes counterclockwise from lower-left
                const std::array<std::pair<std::size_t, std::size_t>, 4> en = {
                    {{ex, ey}, {ex + 1, ey}, {ex + 1, ey + 1}, {ex, ey + 1}}};
                std::array<double, 64> ke{};

                for (double xi_g : gauss) {
                    for (double eta_g : gauss) {
                        // shape gradients on the physical rectangle
                        const std::array<double, 4> dndx = {
                            -(1.0 - eta_g) / (2.0 * hx), (1.0 - eta_g) / (2.0 * hx),
                            (1.0 + eta_g) / (2.0 * hx), -(1.0 + eta_g) / (2.0 * hx)};
                        const std::array<double, 4> dndy = {
                            -(1.0 - xi_g) / (2.0 * hy), -(1.0 + xi_g) / (2.0 * hy),
                            (1.0 + xi_g) / (2.0 * hy), (1.0 - xi_g) / (2.0 * hy)};
                        const double w = hx * hy / 4.0;
                        for (std::size_t a = 0; a < 4; ++a) {
                            for (std::size_t b = 0; b < 4; ++b) {
                                const double kxx =
                                    d11 * dndx[a] * dndx[b] + d33 * dndy[a] * dndy[b];
                                const double kxy =
                                    d12 * dndx[a] * dndy[b] + d33 * dndy[a] * dndx[b];
                                const double kyx =
                                    d12 * dndy[a] * dndx[b] + d33 * dndx[a] * dndy[b];
                                const double kyy =
                                    d11 * dndy[a] * dndy[b] + d33 * dndx[a] * dndx[b];
                                ke[(2 * a) * 8 + 2 * b] += w * kxx;
                                ke[(2 * a) * 8 + 2 * b + 1] += w * kxy;
                                ke[(2 * a + 1) * 8 + 2 * b] += w * kyx;
                                ke[(2 * a + 1) * 8 + 2 * b + 1] += w * kyy;
                            }
                        }
                    }
                }

                for (std::size_t a = 0; a < 4; ++a) {
                    for (std::size_t ca = 0; ca < 2; ++ca) {
                        const long ga = dof_of(en[a].first, en[a].second, ca);
                        if (ga < 0) continue;
                        for (std::size_t b = 0; b < 4; ++b) {
                            for (std::size_t cb = 0; cb < 2; ++cb) {
                                const long gb = dof_of(en[b].first, en[b].second, cb);
                                if (gb < 0) continue;
                                k(ga, gb) += ke[(2 * a + ca) * 8 + 2 * b + cb];
                            }
                        }
                    }
                }
            }
        }

        // consistent nodal loads for a uniform downward traction on the top edge
        for (std::size_t ix = 0; ix < nodes_x; ++ix) {
            const long gy = dof_of(ix, nodes_y - 1, 1);
            const double weight = (ix == 0 || ix == nodes_x - 1) ? 0.5 : 1.0;
            r[gy] -= load * weight * hx;
        }
    };
    return fom;
}

/// Two 1D fields (displacement and temperature) on a shared grid of 40
/// interior nodes each, coupled through a symmetric off-diagonal block.
/// theta = (stiffness contrast, coupling strength, load scale); coupling 0
/// decouples the block system exactly. The thermal source sits three orders
/// of magnitude below the mechanical one (different physical units), which is
/// what makes per-field bases worthwhile on this problem.
inline linear_fom make_coupled2field() {
    constexpr std::size_t n = 40;
    constexpr std::size_t n_elem = n + 1;
    linear_fom fom;
    fom.name = "coupled2field";
    fom.dim = 2 * n;
    fom.param_dim = 3;
    fom.field_slices = {{0, n}, {n, n}};
    fom.assemble = [](const vec& theta, matrix& k, vec& r) {
        if (theta.size() != 3)
            throw contract_error("coupled2field: expected 3 parameters, got " +
                                 std::to_string(theta.size()));
        const double contrast = theta[0], coupling = theta[1], load = theta[2];
        const double h = 1.0 / static_cast<double>(n_elem);
        k = matrix(2 * n, 2 * n);
        r = vec(2 * n, 0.0);

        auto add_laplacian = [&](std::size_t offset, double coeff_scale,
                                 bool reverse_grading) {
            for (std::size_t e = 0; e < n_elem; ++e) {
                const double xm = (static_cast<double>(e) + 0.5) * h;
                const double grade = reverse_grading ? 1.0 - xm : xm;
                const double coeff = coeff_scale * (1.0 + 2.0 * contrast * grade) / h;
                const long i = static_cast<long>(e) - 1, j = static_cast<long>(e);
                if (i >= 0) k(offset + i, offset + i) += coeff;
                if (j < static_cast<long>(n)) k(offset + j, offset + j) += coeff;
                if (i >= 0 && j < static_cast<long>(n)) {
                    k(offset + i, offset + j) -= coeff;
                    k(offset + j, offset + i) -= coeff;
                }
            }
        };
        add_laplacian(0, 1.0, false); // mechanical block
        add_laplacian(n, 0.7, true);  // thermal block, grading mirrored

        // symmetric node-local coupling, mass-matrix scaled: small next to 1/h
        const double gamma = 0.3 * coupling * h;
        for (std::size_t i = 0; i < n; ++i) {
            k(i, n + i) += gamma;
            k(n + i, i) += gamma;
            if (i + 1 < n) {
                k(i, n + i + 1) += 0.25 * gamma;
                k(n + i + 1, i) += 0.25 * gamma;
                k(i + 1, n + i) += 0.25 * gamma;
                k(n + i, i + 1) += 0.25 * gamma;
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i + 1) * h;
            r[i] = load * h * 1.0;
            r[n + i] = load * h * 2.0 * x * 1e-3; // milli-scale units
        }
    };
    return fom;
}

} // namespace detail

inline linear_fom builtin_fom(const std::string& name) {
    if (name == "poisson1d") return detail::make_poisson1d();
    if (name == "elasticity2d") return detail::make_elasticity2d();
    if (name == "coupled2field") return detail::make_coupled2field();
    throw data_error("unknown built-in model '" + name +
                     "' (have: poisson1d, elasticity2d, coupled2field)");
}

} // namespace aemor
