#pragma once

#include <cmath>
#include <string>

#include "aemor/errors.hpp"

namespace aemor {

enum class activation { identity, relu, gelu, silu };

inline const char* activation_name(activation a) {
    switch (a) {
        case activation::identity: return "identity";
        case activation::relu: return "relu";
        case activation::gelu: return "gelu";
        case activation::silu: return "silu";
    }
    throw contract_error("activation_name: bad enum value");
}

inline activation activation_from_name(const std::string& name) {
    if (name == "identity") return activation::identity;
    if (name == "relu") return activation::relu;
    if (name == "gelu") return activation::gelu;
    if (name == "silu") return activation::silu;
    throw contract_error("unknown activation '" + name + "'");
}

namespace detail {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double inv_sqrt2pi = 0.39894228040143267794;
/// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * (1.0 + std::erf(x * inv_sqrt2)); }
} // namespace detail

/// GELU uses the exact erf form x * Phi(x), not the tanh approximation.
inline double activate(activation a, double x) {
    switch (a) {
        case activation::identity: return x;
        case activation::relu: return x > 0.0 ? x : 0.0;
        case activation::gelu: return x * detail::norm_cdf(x);
        case activation::silu: return x * detail::sigmoid(x);
    }
    throw contract_error("activate: bad enum value");
}

/// Pointwise derivative. ReLU takes the subgradient 0 at x = 0.
inline double activate_deriv(activation a, double x) {
    switch (a) {
        case activation::identity: return 1.0;
        case activation::relu: return x > 0.0 ? 1.0 : 0.0;
        case activation::gelu:
            return detail::norm_cdf(x) + x * detail::inv_sqrt2pi * std::exp(-0.5 * x * x);
        case activation::silu: {
            const double s = detail::sigmoid(x);
            return s * (1.0 + x * (1.0 - s));
        }
    }
    throw contract_error("activate_deriv: bad enum value");
}

} // namespace aemor
