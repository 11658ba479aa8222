#pragma once

#include <cmath>
#include <numbers>

#include "aemor/presets.hpp"
#include "aemor/rng.hpp"
#include "aemor/snapshot.hpp"

namespace aemor {

/// Generator description: preset name, parameter dimension, grid resolution.
/// For rectangular grids (unit-cell, thermo) nx * ny are node counts per axis;
/// for the radial plate grids nx is the angle count and ny the ring count.
/// `full_scale` swaps the desk grid for the full-scale DOF counts with
/// constant fields (topology plumbing checks only). `imperfection` selects the
/// regularized single-branch thermo fields; switching it off injects the
/// bifurcation-like sign feature of the mixed-buckling variant.
struct parametric_problem {
    std::string name;
    std::size_t param_dim = 2;
    std::size_t nx = 0, ny = 0;
    bool full_scale = false;
    bool imperfection = true;
};

/// Canonical desk-scale presets.
inline parametric_problem problem_preset(const std::string& name) {
    if (name == "unit-cell") return {"unit-cell", 2, 13, 13};
    if (name == "plate") return {"plate", 2, 16, 6};
    if (name == "plate-morph") return {"plate-morph", 1, 16, 6};
    if (name == "thermo") return {"thermo", 3, 9, 9};
    throw data_error("unknown problem preset '" + name +
                     "' (have: unit-cell, plate, plate-morph, thermo)");
}

namespace detail {

constexpr double pi = std::numbers::pi;

/// Neighbor offsets of a rectangular grid node (4-connectivity).
inline std::vector<std::size_t> rect_neighbors(std::size_t ix, std::size_t iy, std::size_t nx,
                                               std::size_t ny) {
    std::vector<std::size_t> out;
    if (ix > 0) out.push_back(iy * nx + ix - 1);
    if (ix + 1 < nx) out.push_back(iy * nx + ix + 1);
    if (iy > 0) out.push_back((iy - 1) * nx + ix);
    if (iy + 1 < ny) out.push_back((iy + 1) * nx + ix);
    return out;
}

/// Neighbors on the radial grid: ring neighbors wrap around the angle axis.
inline std::vector<std::size_t> radial_neighbors(std::size_t i, std::size_t j, std::size_t n_t,
                                                 std::size_t n_s) {
    std::vector<std::size_t> out;
    out.push_back(j * n_t + (i + 1) % n_t);
    out.push_back(j * n_t + (i + n_t - 1) % n_t);
    if (j > 0) out.push_back((j - 1) * n_t + i);
    if (j + 1 < n_s) out.push_back((j + 1) * n_t + i);
    return out;
}

/// Static seeded grain shared by all snapshots of a set: a smooth per-node
/// perturbation pattern standing in for manufacturing imperfections. Small
/// enough (1e-3) never to dominate the parametric structure.
inline vec make_grain(rng_state& rng, std::size_t n_values) {
    vec grain(n_values);
    for (double& g : grain) g = 1e-3 * rng.uniform(-1.0, 1.0);
    return grain;
}

/// Graph-Laplacian boundary forces: for prescribed node alpha and component
/// beta, f = -scale * sum_{j ~ alpha} (psi[alpha,beta] - psi[j,beta]).
/// This is the negative gradient of the quadratic pseudo-energy
/// E = scale/2 * sum_edges (psi_i - psi_j)^2 restricted to prescribed DOFs,
/// so forces are a closed-form function of the field (and the snapshot's
/// material factor in `scale`).
template <typename NeighborFn>
inline void laplacian_forces(const vec& full_field, std::size_t dofs_per_node, double scale,
                             const std::vector<std::size_t>& prescribed_nodes,
                             NeighborFn&& neighbors, double* out) {
    std::size_t k = 0;
    for (std::size_t node : prescribed_nodes) {
        for (std::size_t beta = 0; beta < dofs_per_node; ++beta) {
            double acc = 0.0;
            for (std::size_t nb : neighbors(node))
                acc += full_field[node * dofs_per_node + beta] -
                       full_field[nb * dofs_per_node + beta];
            out[k++] = -scale * acc;
        }
    }
}

/// Masks for a rectangular grid with the first and last node rows prescribed.
inline void rect_row_masks(std::size_t nx, std::size_t ny, std::size_t dofs_per_node,
                           std::vector<std::size_t>& active, std::vector<std::size_t>& prescribed,
                           std::vector<std::size_t>& prescribed_nodes) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t node = iy * nx + ix;
            const bool fixed = (iy == 0 || iy + 1 == ny);
            if (fixed) prescribed_nodes.push_back(node);
            for (std::size_t c = 0; c < dofs_per_node; ++c)
                (fixed ? prescribed : active).push_back(node * dofs_per_node + c);
        }
    }
}

/// Radial plate grid at morph parameter xi: node (i, j) interpolates between
/// the elliptic hole boundary (ring j = 0) and the fixed bounding box
/// [-5, 5]^2 (ring j = n_s - 1). Connectivity never changes with xi.
inline matrix radial_grid_coords(double xi, std::size_t n_t, std::size_t n_s) {
    const plate_quantities q = param_map_plate(xi, 0.0);
    matrix coords(n_t * n_s, 2);
    for (std::size_t j = 0; j < n_s; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n_s - 1);
        for (std::size_t i = 0; i < n_t; ++i) {
            const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n_t);
            const double ct = std::cos(t), st = std::sin(t);
            const double hole_x = q.a * ct, hole_y = q.b * st;
            const double m = std::max(std::abs(ct), std::abs(st));
            const double box_x = 5.0 * ct / m, box_y = 5.0 * st / m;
            coords(j * n_t + i, 0) = hole_x * (1.0 - s) + box_x * s;
            coords(j * n_t + i, 1) = hole_y * (1.0 - s) + box_y * s;
        }
    }
    return coords;
}

inline void check_radial_grid(std::size_t n_t, std::size_t n_s) {
    if (n_t < 8 || n_t % 8 != 0 || n_s < 2)
        throw contract_error("radial grid: need angle count >= 8 and divisible by 8 (so the box "
                             "corners are sampled) and at least 2 rings; got " +
                             std::to_string(n_t) + " x " + std::to_string(n_s));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Unit cell: displacement field on a square grid, driven top edge, clamped
// bottom edge, inclusion-modulated interior.

/// Full displacement field of the unit-cell manifold at one parameter point.
/// Exposed so tests can cross-check stored snapshots entry by entry.
inline vec unit_cell_full_field(double xi, double eta, std::size_t nx, std::size_t ny,
                                const vec& grain) {
    const unit_cell_quantities q = param_map_unit_cell(xi, eta);
    const double edge = 3.0;
    const double m = q.mu_i / 900.0;
    const double px = 1.0 + 0.8 * m, py = 1.0 + 0.5 * m;
    vec psi(2 * nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double y = edge * static_cast<double>(iy) / static_cast<double>(ny - 1);
        const double s = y / edge;
        const double sp = std::sin(detail::pi * s);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = edge * static_cast<double>(ix) / static_cast<double>(nx - 1);
            const std::size_t node = iy * nx + ix;
            // Gaussian bump around the central inclusion
            const double dx = x - 1.5, dy = y - 1.5;
            const double g = std::exp(-(dx * dx + dy * dy) / (0.75 * 0.75));
            const double soften = 1.0 - 0.35 * m * g * sp * sp;
            const double ux = q.u_x * std::pow(s, px) * soften +
                              0.08 * q.u_y * m * sp * std::sin(2.0 * detail::pi * x / edge);
            const double uy = q.u_y * std::pow(s, py) * soften +
                              0.08 * q.u_x * m * sp * std::cos(2.0 * detail::pi * x / edge);
            psi[2 * node] = ux * (1.0 + grain[2 * node]);
            psi[2 * node + 1] = uy * (1.0 + grain[2 * node + 1]);
        }
    }
    return psi;
}

/// Thermo manifold: displacement (2 DOFs/node) and temperature (1 DOF/node)
/// on a shared square grid, heated from the top, time-driven.
struct thermo_fields {
    vec displacement, temperature;
};

inline thermo_fields thermo_full_fields(double xi, double eta, double t, std::size_t nx,
                                        std::size_t ny, bool imperfection, const vec& grain) {
    const thermo_quantities q = param_map_thermo(xi, eta);
    const double edge = 10.0;
    const double kappa = q.lambda / 30.0;       // in (0.66, 1]
    const double thin = 1.2 - q.d;              // thinner plate, larger deflection
    const double profile_pow = 1.0 + 2.0 * (1.0 - kappa);
    double branch = 1.0;
    if (!imperfection)
        branch = std::sin(13.0 * detail::pi * (xi + eta) + 0.5) >= 0.0 ? 1.0 : -1.0;
    thermo_fields out;
    out.displacement.resize(2 * nx * ny);
    out.temperature.resize(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double v = static_cast<double>(iy) / static_cast<double>(ny - 1);
        const double sv = std::sin(detail::pi * v);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = edge * static_cast<double>(ix) / static_cast<double>(nx - 1);
            const std::size_t node = iy * nx + ix;
            const double lateral = std::sin(detail::pi * x / edge);
            const double temp =
                10.0 * t * std::pow(v, profile_pow) *
                (1.0 + 0.2 * lateral * sv * sv * (2.0 - 2.0 * kappa));
            const double ux = branch * 0.8 * thin * t * t * lateral * sv;
            const double uy = 0.4 * thin * kappa * t * std::sin(2.0 * detail::pi * x / edge) * sv;
            out.temperature[node] = temp * (1.0 + grain[node]);
            out.displacement[2 * node] = ux * (1.0 + grain[nx * ny + 2 * node]);
            out.displacement[2 * node + 1] = uy * (1.0 + grain[nx * ny + 2 * node + 1]);
        }
    }
    return out;
}

/// Plate displacement field in intrinsic radial-grid coordinates (angle index
/// i, ring fraction s), anisotropy steered by the fiber angle.
inline vec plate_full_field(double xi, double eta, std::size_t n_t, std::size_t n_s,
                            const vec& grain) {
    const plate_quantities q = param_map_plate(xi, eta);
    const double alpha = detail::deg2rad(q.alpha_deg);
    vec psi(2 * n_t * n_s);
    for (std::size_t j = 0; j < n_s; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n_s - 1);
        const double rho = 1.0 - s; // 1 at the hole, 0 on the fixed box
        for (std::size_t i = 0; i < n_t; ++i) {
            const double t = 2.0 * detail::pi * static_cast<double>(i) / static_cast<double>(n_t);
            const std::size_t node = j * n_t + i;
            const double aniso = 0.8 * std::cos(2.0 * (t - alpha));
            const double breathe = (q.a - q.b) / 1.5; // in [-1.5, 1.5] over xi
            const double ux =
                0.5 * rho * rho * (breathe * std::cos(t) + aniso * std::cos(t) +
                                   0.3 * std::sin(alpha) * std::sin(t));
            const double uy =
                0.5 * rho * rho * (-breathe * std::sin(t) + aniso * std::sin(t) +
                                   0.3 * std::cos(alpha) * std::cos(t));
            psi[2 * node] = ux * (1.0 + grain[2 * node]);
            psi[2 * node + 1] = uy * (1.0 + grain[2 * node + 1]);
        }
    }
    return psi;
}

// ---------------------------------------------------------------------------

/// Deterministic synthetic snapshot generation. `sample_params` is n_S rows of
/// parameter points in the unit box (columns documented per preset). The same
/// (problem, samples, seed) triple always yields bit-identical output.
inline snapshot_set generate_synthetic(const parametric_problem& problem,
                                       const matrix& sample_params, std::uint64_t seed);

/// Nodal-coordinate snapshots of the morphing grid over a list of xi values.
inline snapshot_set generate_ellipse_morph(const vec& xi_samples, std::size_t n_t,
                                           std::size_t n_s) {
    detail::check_radial_grid(n_t, n_s);
    if (xi_samples.empty()) throw contract_error("generate_ellipse_morph: no samples");
    const std::size_t n_nodes = n_t * n_s;

    field_block coords;
    coords.name = "coords";
    coords.dofs_per_node = 2;
    coords.full_width = 2 * n_nodes;
    for (std::size_t j = 0; j + 1 < n_s; ++j)
        for (std::size_t i = 0; i < n_t; ++i) {
            coords.active.push_back(2 * (j * n_t + i));
            coords.active.push_back(2 * (j * n_t + i) + 1);
        }
    for (std::size_t i = 0; i < n_t; ++i) {
        coords.prescribed.push_back(2 * ((n_s - 1) * n_t + i));
        coords.prescribed.push_back(2 * ((n_s - 1) * n_t + i) + 1);
    }
    coords.values = matrix(xi_samples.size(), coords.active.size());
    coords.node_coords = detail::radial_grid_coords(0.5, n_t, n_s);

    snapshot_set set;
    set.params = matrix(xi_samples.size(), 1);
    set.param_names = {"xi"};
    for (std::size_t s = 0; s < xi_samples.size(); ++s) {
        set.params(s, 0) = xi_samples[s];
        const matrix grid = detail::radial_grid_coords(xi_samples[s], n_t, n_s);
        for (std::size_t k = 0; k < coords.active.size(); ++k) {
            const std::size_t dof = coords.active[k];
            coords.values(s, k) = grid(dof / 2, dof % 2);
        }
    }
    set.fields.push_back(std::move(coords));
    set.provenance = "generator:plate-morph";
    set.validate();
    return set;
}

/// Keep every k-th time step within each (non-time) parameter combination,
/// counting 1-based; a combination whose selection would be empty keeps its
/// last step instead. Stride 1 returns the set unchanged.
inline snapshot_set subsample_time(const snapshot_set& set, std::size_t every_k) {
    if (every_k < 1) throw contract_error("subsample_time: stride must be >= 1");
    const int t_col = set.param_index("t");
    if (t_col < 0) throw data_error("subsample_time: set has no time parameter column");
    if (every_k == 1) return set;

    // group rows by their non-time parameters, preserving encounter order
    std::vector<std::vector<std::size_t>> groups;
    std::vector<vec> keys;
    for (std::size_t s = 0; s < set.count(); ++s) {
        vec key;
        for (std::size_t j = 0; j < set.param_dim(); ++j)
            if (static_cast<int>(j) != t_col) key.push_back(set.params(s, j));
        std::size_t g = keys.size();
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys[i] == key) { g = i; break; }
        if (g == keys.size()) {
            keys.push_back(key);
            groups.emplace_back();
        }
        groups[g].push_back(s);
    }

    std::vector<std::size_t> keep;
    for (const auto& rows : groups) {
        std::size_t kept_before = keep.size();
        for (std::size_t pos = 0; pos < rows.size(); ++pos)
            if ((pos + 1) % every_k == 0) keep.push_back(rows[pos]);
        if (keep.size() == kept_before && !rows.empty()) keep.push_back(rows.back());
    }

    snapshot_set out;
    out.param_names = set.param_names;
    out.provenance = set.provenance;
    out.seed = set.seed;
    out.params = matrix(keep.size(), set.param_dim());
    for (std::size_t i = 0; i < keep.size(); ++i) out.params.set_row(i, set.params.row(keep[i]));
    for (const field_block& f : set.fields) {
        field_block nf = f;
        nf.values = matrix(keep.size(), f.values.cols());
        for (std::size_t i = 0; i < keep.size(); ++i) nf.values.set_row(i, f.values.row(keep[i]));
        out.fields.push_back(std::move(nf));
    }
    if (set.force) {
        force_block nf;
        nf.field = set.force->field;
        nf.values = matrix(keep.size(), set.force->values.cols());
        for (std::size_t i = 0; i < keep.size(); ++i)
            nf.values.set_row(i, set.force->values.row(keep[i]));
        out.force = std::move(nf);
    }
    out.validate();
    return out;
}

namespace detail {

inline snapshot_set generate_full_scale(const parametric_problem& problem,
                                         const matrix& sample_params, std::uint64_t seed) {
    // Published widths, constant fields: topology plumbing only.
    snapshot_set set;
    set.params = sample_params;
    set.seed = seed;
    set.provenance = "generator:" + problem.name + " (full-scale shapes)";
    auto make_const_field = [&](const std::string& name, std::size_t dofs_per_node,
                                std::size_t active_width, std::size_t prescribed_width,
                                double value) {
        field_block f;
        f.name = name;
        f.dofs_per_node = dofs_per_node;
        f.full_width = active_width + prescribed_width;
        for (std::size_t i = 0; i < active_width; ++i) f.active.push_back(i);
        for (std::size_t i = 0; i < prescribed_width; ++i)
            f.prescribed.push_back(active_width + i);
        f.values = matrix(sample_params.rows(), active_width, value);
        return f;
    };
    if (problem.name == "unit-cell") {
        set.param_names = {"xi", "eta"};
        set.fields.push_back(make_const_field("displacement", 2, 18580, 4676, 1.0));
        force_block fb;
        fb.field = "displacement";
        fb.values = matrix(sample_params.rows(), 4676, 0.5);
        set.force = std::move(fb);
    } else if (problem.name == "plate") {
        set.param_names = {"xi", "eta"};
        set.fields.push_back(make_const_field("displacement", 3, 4641, 300, 1.0));
    } else if (problem.name == "plate-morph") {
        set.param_names = {"xi"};
        set.fields.push_back(make_const_field("coords", 3, 2871, 0, 1.0));
    } else if (problem.name == "thermo") {
        set.param_names = {"xi", "eta", "t"};
        set.fields.push_back(make_const_field("displacement", 3, 4641, 300, 1.0));
        set.fields.push_back(make_const_field("temperature", 1, 1497, 50, 2.0));
    } else {
        throw data_error("full-scale shapes not defined for preset '" + problem.name + "'");
    }
    set.validate();
    return set;
}

} // namespace detail

inline snapshot_set generate_synthetic(const parametric_problem& problem,
                                       const matrix& sample_params, std::uint64_t seed) {
    if (sample_params.rows() == 0) throw contract_error("generate_synthetic: no sample points");
    if (sample_params.cols() != problem.param_dim)
        throw contract_error("generate_synthetic: " + std::to_string(sample_params.cols()) +
                             " parameter columns for problem '" + problem.name + "' expecting " +
                             std::to_string(problem.param_dim));
    for (double v : sample_params.storage())
        if (!(v >= 0.0 && v <= 1.0))
            throw contract_error("generate_synthetic: sample point outside the unit box");
    if (problem.full_scale) return detail::generate_full_scale(problem, sample_params, seed);

    const std::size_t nx = problem.nx, ny = problem.ny;
    if (nx < 3 || ny < 3)
        throw contract_error("generate_synthetic: grid too small for preset '" + problem.name +
                             "'");
    rng_state rng(seed);
    snapshot_set set;
    set.params = sample_params;
    set.seed = seed;
    set.provenance = "generator:" + problem.name;

    if (problem.name == "unit-cell") {
        set.param_names = {"xi", "eta"};
        const std::size_t n_nodes = nx * ny;
        const vec grain = detail::make_grain(rng, 2 * n_nodes);

        field_block disp;
        disp.name = "displacement";
        disp.dofs_per_node = 2;
        disp.full_width = 2 * n_nodes;
        std::vector<std::size_t> prescribed_nodes;
        detail::rect_row_masks(nx, ny, 2, disp.active, disp.prescribed, prescribed_nodes);
        disp.values = matrix(set.count(), disp.active.size());
        disp.node_coords = matrix(n_nodes, 2);
        for (std::size_t iy = 0; iy < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix) {
                disp.node_coords(iy * nx + ix, 0) = 3.0 * ix / static_cast<double>(nx - 1);
                disp.node_coords(iy * nx + ix, 1) = 3.0 * iy / static_cast<double>(ny - 1);
            }

        force_block fb;
        fb.field = "displacement";
        fb.values = matrix(set.count(), disp.prescribed.size());

        for (std::size_t s = 0; s < set.count(); ++s) {
            const double xi = sample_params(s, 0), eta = sample_params(s, 1);
            const vec psi = unit_cell_full_field(xi, eta, nx, ny, grain);
            for (std::size_t k = 0; k < disp.active.size(); ++k)
                disp.values(s, k) = psi[disp.active[k]];
            const double mu_scale = param_map_unit_cell(xi, eta).mu_i / 150.0;
            detail::laplacian_forces(
                psi, 2, mu_scale, prescribed_nodes,
                [&](std::size_t node) {
                    return detail::rect_neighbors(node % nx, node / nx, nx, ny);
                },
                fb.values.row_ptr(s));
        }
        set.fields.push_back(std::move(disp));
        set.force = std::move(fb);
    } else if (problem.name == "plate") {
        set.param_names = {"xi", "eta"};
        const std::size_t n_t = nx, n_s = ny;
        detail::check_radial_grid(n_t, n_s);
        const std::size_t n_nodes = n_t * n_s;
        const vec grain = detail::make_grain(rng, 2 * n_nodes);

        field_block disp;
        disp.name = "displacement";
        disp.dofs_per_node = 2;
        disp.full_width = 2 * n_nodes;
        std::vector<std::size_t> prescribed_nodes;
        for (std::size_t j = 0; j + 1 < n_s; ++j)
            for (std::size_t i = 0; i < n_t; ++i) {
                disp.active.push_back(2 * (j * n_t + i));
                disp.active.push_back(2 * (j * n_t + i) + 1);
            }
        for (std::size_t i = 0; i < n_t; ++i) {
            const std::size_t node = (n_s - 1) * n_t + i;
            prescribed_nodes.push_back(node);
            disp.prescribed.push_back(2 * node);
            disp.prescribed.push_back(2 * node + 1);
        }
        disp.values = matrix(set.count(), disp.active.size());
        disp.node_coords = detail::radial_grid_coords(0.5, n_t, n_s);

        force_block fb;
        fb.field = "displacement";
        fb.values = matrix(set.count(), disp.prescribed.size());

        for (std::size_t s = 0; s < set.count(); ++s) {
            const double xi = sample_params(s, 0), eta = sample_params(s, 1);
            const vec psi = plate_full_field(xi, eta, n_t, n_s, grain);
            for (std::size_t k = 0; k < disp.active.size(); ++k)
                disp.values(s, k) = psi[disp.active[k]];
            detail::laplacian_forces(
                psi, 2, 1.0, prescribed_nodes,
                [&](std::size_t node) {
                    return detail::radial_neighbors(node % n_t, node / n_t, n_t, n_s);
                },
                fb.values.row_ptr(s));
        }
        set.fields.push_back(std::move(disp));
        set.force = std::move(fb);
    } else if (problem.name == "thermo") {
        set.param_names = {"xi", "eta", "t"};
        const std::size_t n_nodes = nx * ny;
        const vec grain = detail::make_grain(rng, 3 * n_nodes);

        field_block disp, temp;
        disp.name = "displacement";
        disp.dofs_per_node = 2;
        disp.full_width = 2 * n_nodes;
        temp.name = "temperature";
        temp.dofs_per_node = 1;
        temp.full_width = n_nodes;
        std::vector<std::size_t> disp_presc_nodes, temp_presc_nodes;
        detail::rect_row_masks(nx, ny, 2, disp.active, disp.prescribed, disp_presc_nodes);
        detail::rect_row_masks(nx, ny, 1, temp.active, temp.prescribed, temp_presc_nodes);
        disp.values = matrix(set.count(), disp.active.size());
        temp.values = matrix(set.count(), temp.active.size());
        matrix coords(n_nodes, 2);
        for (std::size_t iy = 0; iy < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix) {
                coords(iy * nx + ix, 0) = 10.0 * ix / static_cast<double>(nx - 1);
                coords(iy * nx + ix, 1) = 10.0 * iy / static_cast<double>(ny - 1);
            }
        disp.node_coords = coords;
        temp.node_coords = coords;

        for (std::size_t s = 0; s < set.count(); ++s) {
            const thermo_fields f =
                thermo_full_fields(sample_params(s, 0), sample_params(s, 1), sample_params(s, 2),
                                   nx, ny, problem.imperfection, grain);
            for (std::size_t k = 0; k < disp.active.size(); ++k)
                disp.values(s, k) = f.displacement[disp.active[k]];
            for (std::size_t k = 0; k < temp.active.size(); ++k)
                temp.values(s, k) = f.temperature[temp.active[k]];
        }
        set.fields.push_back(std::move(disp));
        set.fields.push_back(std::move(temp));
    } else if (problem.name == "plate-morph") {
        vec xs(set.count());
        for (std::size_t s = 0; s < set.count(); ++s) xs[s] = sample_params(s, 0);
        snapshot_set morph = generate_ellipse_morph(xs, nx, ny);
        morph.seed = seed;
        return morph;
    } else {
        throw data_error("unknown problem preset '" + problem.name + "'");
    }
    set.validate();
    return set;
}

} // namespace aemor
