#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <numbers>

#include "aemor/network.hpp"

namespace aemor {

// ---------------------------------------------------------------------------
// Parameter maps. Natural coordinates live in the unit box; angles are in
// degrees in the source formulas and converted to radians only for evaluation.

namespace detail {
inline void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw contract_error(std::string("parameter ") + name + " = " + std::to_string(v) +
                             " outside [0, 1]");
}
inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
} // namespace detail

struct unit_cell_quantities {
    double u_x, u_y; ///< prescribed top-surface displacement components
    double mu_i;     ///< inclusion stiffness
};

/// u_x = 2 cos(90deg - 90deg xi), u_y = 2 sin(90deg - 90deg xi),
/// mu_I = 150 + 750 eta^2.
inline unit_cell_quantities param_map_unit_cell(double xi, double eta) {
    detail::check_unit(xi, "xi");
    detail::check_unit(eta, "eta");
    const double ang = detail::deg2rad(90.0 - 90.0 * xi);
    return {2.0 * std::cos(ang), 2.0 * std::sin(ang), 150.0 + 750.0 * eta * eta};
}

struct plate_quantities {
    double a, b;      ///< ellipse semi-axes
    double alpha_deg; ///< fiber angle in degrees
};

/// a = 3 - 1.5 xi, b = 1.5 + 1.5 xi, alpha = 30deg + 120deg eta.
inline plate_quantities param_map_plate(double xi, double eta) {
    detail::check_unit(xi, "xi");
    detail::check_unit(eta, "eta");
    return {3.0 - 1.5 * xi, 1.5 + 1.5 * xi, 30.0 + 120.0 * eta};
}

struct thermo_quantities {
    double lambda; ///< thermal conductivity
    double d;      ///< plate thickness
};

/// Lambda = 20 + 10 xi, d = 0.2 + 0.8 eta.
inline thermo_quantities param_map_thermo(double xi, double eta) {
    detail::check_unit(xi, "xi");
    detail::check_unit(eta, "eta");
    return {20.0 + 10.0 * xi, 0.2 + 0.8 * eta};
}

// ---------------------------------------------------------------------------
// Published topologies, exactly as listed. Activation shorthand: G = GELU,
// S = SiLU, R = ReLU, I = identity (the unlabeled arrows).

struct ae_topology {
    network_spec encoder, decoder;
};

namespace topo {

namespace detail_t {
using act_list = std::vector<activation>;
inline act_list gelu_chain(std::size_t hidden) {
    act_list a(hidden, activation::gelu);
    a.push_back(activation::identity);
    return a;
}
} // namespace detail_t

/// 18580 -G-> 1024 -G-> 512 -G-> 128 -G-> 32 -G-> 16 -I-> 4 and its decoder
/// 4 -S-> 16 -S-> 16 -S-> 16 -S-> 128 -G-> 1024 -I-> 18580.
inline ae_topology unit_cell_ae_full() {
    using a = activation;
    return {network_spec({18580, 1024, 512, 128, 32, 16, 4}, detail_t::gelu_chain(5)),
            network_spec({4, 16, 16, 16, 128, 1024, 18580},
                         {a::silu, a::silu, a::silu, a::silu, a::gelu, a::identity})};
}

/// 2 -G-> 16 -G-> 16 -G-> 16 -G-> 16 -I-> 4.
inline network_spec unit_cell_regressor_full() {
    return network_spec({2, 16, 16, 16, 16, 4}, detail_t::gelu_chain(4));
}

/// Force branch: 4676 -G-> 128 -G-> 32 -G-> 16 -I-> 4 and
/// 4 -S-> 16 -S-> 32 -S-> 128 -I-> 4676.
inline ae_topology unit_cell_force_ae_full() {
    using a = activation;
    return {network_spec({4676, 128, 32, 16, 4}, detail_t::gelu_chain(3)),
            network_spec({4, 16, 32, 128, 4676}, {a::silu, a::silu, a::silu, a::identity})};
}

/// Staggered force net: 4 -I-> 8 -R-> 16 -R-> 32 -R-> 64 -R-> 128 -R-> 256
/// -R-> 512 -R-> 1024 -I-> 4676.
inline network_spec unit_cell_staggered_full() {
    using a = activation;
    return network_spec({4, 8, 16, 32, 64, 128, 256, 512, 1024, 4676},
                        {a::identity, a::relu, a::relu, a::relu, a::relu, a::relu, a::relu,
                         a::relu, a::identity});
}

/// Morphing coordinates: 2871 -G-> 256 -G-> 128 -G-> 64 -G-> 32 -I-> 2, decoder mirrored.
inline ae_topology plate_morph_ae_full() {
    return {network_spec({2871, 256, 128, 64, 32, 2}, detail_t::gelu_chain(4)),
            network_spec({2, 32, 64, 128, 256, 2871}, detail_t::gelu_chain(4))};
}

/// 1 -G-> 32 -G-> 32 -G-> 32 -I-> 2 (only xi shapes the geometry).
inline network_spec plate_morph_regressor_full() {
    return network_spec({1, 32, 32, 32, 2}, detail_t::gelu_chain(3));
}

/// Plate displacements: 4641 -G-> 256 -G-> 128 -G-> 64 -G-> 32 -I-> 8 and
/// 8 -G-> 32 -G-> 64 -G-> 128 -G-> 256 -G-> 512 -I-> 4641.
inline ae_topology plate_ae_full() {
    return {network_spec({4641, 256, 128, 64, 32, 8}, detail_t::gelu_chain(4)),
            network_spec({8, 32, 64, 128, 256, 512, 4641}, detail_t::gelu_chain(5))};
}

/// 2 -G-> 32 -G-> 32 -G-> 32 -I-> 8.
inline network_spec plate_regressor_full() {
    return network_spec({2, 32, 32, 32, 8}, detail_t::gelu_chain(3));
}

/// Per-field thermo encoder: X -G-> 1024 -G-> 512 -G-> 128 -G-> 32 -G-> 16 -I-> 4
/// with X = 4641 (displacement) or 1497 (temperature).
inline network_spec thermo_encoder_full(std::size_t field_width) {
    return network_spec({field_width, 1024, 512, 128, 32, 16, 4}, detail_t::gelu_chain(5));
}

/// Shared decoder: 8 -S-> 16 -S-> 32 -S-> 64 -S-> 128 -G-> 1024 -I-> 6138.
inline network_spec thermo_decoder_full() {
    using a = activation;
    return network_spec({8, 16, 32, 64, 128, 1024, 6138},
                        {a::silu, a::silu, a::silu, a::silu, a::gelu, a::identity});
}

/// 3 -G-> 32 -G-> 32 -G-> 32 -I-> 4, one per field.
inline network_spec thermo_regressor_full() {
    return network_spec({3, 32, 32, 32, 4}, detail_t::gelu_chain(3));
}

// ---------------------------------------------------------------------------
// Desk-scale counterparts: same layer count, same activation pattern, hidden
// widths shrunk proportionally and capped at the data width.

namespace detail_t {
inline std::vector<std::size_t> ladder(std::size_t data_width, std::size_t latent,
                                       std::initializer_list<std::size_t> hidden) {
    std::vector<std::size_t> w{data_width};
    for (std::size_t h : hidden) w.push_back(std::min(h, std::max<std::size_t>(data_width, 1)));
    w.push_back(latent);
    return w;
}
inline std::vector<std::size_t> reversed(std::vector<std::size_t> w) {
    std::reverse(w.begin(), w.end());
    return w;
}
} // namespace detail_t

inline ae_topology unit_cell_ae_desk(std::size_t width, std::size_t latent) {
    using a = activation;
    return {network_spec(detail_t::ladder(width, latent, {96, 48, 24, 16, 8}),
                         detail_t::gelu_chain(5)),
            network_spec(detail_t::reversed(detail_t::ladder(width, latent, {96, 32, 8, 8, 8})),
                         {a::silu, a::silu, a::silu, a::silu, a::gelu, a::identity})};
}

inline ae_topology unit_cell_force_ae_desk(std::size_t force_width, std::size_t latent) {
    using a = activation;
    return {network_spec(detail_t::ladder(force_width, latent, {32, 16, 8}),
                         detail_t::gelu_chain(3)),
            network_spec(detail_t::reversed(detail_t::ladder(force_width, latent, {32, 16, 8})),
                         {a::silu, a::silu, a::silu, a::identity})};
}

inline network_spec unit_cell_staggered_desk(std::size_t force_width, std::size_t latent) {
    using a = activation;
    return network_spec({latent, 8, 16, 32, 64, force_width},
                        {a::identity, a::relu, a::relu, a::relu, a::identity});
}

inline ae_topology plate_morph_ae_desk(std::size_t width, std::size_t latent) {
    return {network_spec(detail_t::ladder(width, latent, {48, 24, 12, 8}),
                         detail_t::gelu_chain(4)),
            network_spec(detail_t::reversed(detail_t::ladder(width, latent, {48, 24, 12, 8})),
                         detail_t::gelu_chain(4))};
}

inline ae_topology plate_ae_desk(std::size_t width, std::size_t latent) {
    return {network_spec(detail_t::ladder(width, latent, {64, 32, 16, 12}),
                         detail_t::gelu_chain(4)),
            network_spec(detail_t::reversed(detail_t::ladder(width, latent, {64, 48, 24, 16, 12})),
                         detail_t::gelu_chain(5))};
}

inline network_spec thermo_encoder_desk(std::size_t field_width, std::size_t latent) {
    return network_spec(detail_t::ladder(field_width, latent, {64, 32, 16, 12, 8}),
                        detail_t::gelu_chain(5));
}

inline network_spec thermo_decoder_desk(std::size_t total_width, std::size_t total_latent) {
    using a = activation;
    return network_spec(
        detail_t::reversed(detail_t::ladder(total_width, total_latent, {64, 48, 24, 16, 12})),
        {a::silu, a::silu, a::silu, a::silu, a::gelu, a::identity});
}

} // namespace topo

// ---------------------------------------------------------------------------
// Published sampling grids.

/// 5 x 5 grid over (xi, eta), xi outer: 25 rows.
inline std::vector<std::array<double, 2>> unit_cell_sample_grid() {
    const std::array<double, 5> s = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::array<double, 2>> grid;
    for (double xi : s)
        for (double eta : s) grid.push_back({xi, eta});
    return grid;
}

/// xi in {0, 1/3, 2/3, 1}, eta in {0, 1/4, 1/2, 3/4, 1}: 20 rows.
inline std::vector<std::array<double, 2>> plate_sample_grid() {
    const std::array<double, 4> xs = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    const std::array<double, 5> es = {0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::array<double, 2>> grid;
    for (double xi : xs)
        for (double eta : es) grid.push_back({xi, eta});
    return grid;
}

/// (xi, eta) in {0, 1/3, 2/3, 1}^2, time steps t = dt, 2 dt, ..., steps * dt
/// with dt = 0.01: combo-major, time innermost. 16 * steps rows.
inline std::vector<std::array<double, 3>> thermo_sample_grid(std::size_t steps = 100) {
    if (steps == 0) throw contract_error("thermo_sample_grid: zero time steps");
    const std::array<double, 4> s = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    const double dt = 0.01;
    std::vector<std::array<double, 3>> grid;
    for (double xi : s)
        for (double eta : s)
            for (std::size_t i = 1; i <= steps; ++i)
                grid.push_back({xi, eta, dt * static_cast<double>(i)});
    return grid;
}

} // namespace aemor
