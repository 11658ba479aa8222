#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "aemor/activation.hpp"
#include "aemor/matrix.hpp"
#include "aemor/rng.hpp"

namespace aemor {

/// Layer widths plus one activation per weight layer.
/// widths = [n_in, h_1, ..., n_out], activations.size() == widths.size() - 1.
struct network_spec {
    std::vector<std::size_t> widths;
    std::vector<activation> activations;

    network_spec() = default;
    network_spec(std::vector<std::size_t> w, std::vector<activation> a)
        : widths(std::move(w)), activations(std::move(a)) {
        validate();
    }

    void validate() const {
        if (widths.size() < 2)
            throw contract_error("network_spec: need at least input and output widths");
        for (std::size_t w : widths)
            if (w == 0) throw contract_error("network_spec: zero layer width");
        if (activations.size() != widths.size() - 1)
            throw contract_error("network_spec: " + std::to_string(activations.size()) +
                                 " activations for " + std::to_string(widths.size() - 1) +
                                 " weight layers");
    }

    std::size_t layers() const { return activations.size(); }
    std::size_t input_width() const { return widths.front(); }
    std::size_t output_width() const { return widths.back(); }
};

/// Dense MLP parameters. weights[l] is (widths[l+1] x widths[l]), row-major.
struct mlp_params {
    network_spec spec;
    std::vector<matrix> weights;
    std::vector<vec> biases;

    std::size_t count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }
};

/// Glorot-uniform weights (half-open interval [-b, b), b = sqrt(6/(fan_in+fan_out))),
/// zero biases. Draw order is fixed: layer by layer, weights row-major. Together
/// with the seeded generator this pins initialization bit-for-bit.
inline mlp_params init_params(const network_spec& spec, rng_state& rng) {
    spec.validate();
    mlp_params p;
    p.spec = spec;
    for (std::size_t l = 0; l < spec.layers(); ++l) {
        const std::size_t fan_in = spec.widths[l], fan_out = spec.widths[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        matrix w(fan_out, fan_in);
        for (double& x : w.storage()) x = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(fan_out, 0.0);
    }
    return p;
}

/// Gradient (or moment) storage shaped like a parameter set.
struct mlp_grads {
    std::vector<matrix> w;
    std::vector<vec> b;

    static mlp_grads zeros_like(const mlp_params& p) {
        mlp_grads g;
        for (std::size_t l = 0; l < p.weights.size(); ++l) {
            g.w.emplace_back(p.weights[l].rows(), p.weights[l].cols());
            g.b.emplace_back(p.biases[l].size(), 0.0);
        }
        return g;
    }

    void set_zero() {
        for (auto& m : w)
            for (double& x : m.storage()) x = 0.0;
        for (auto& v : b)
            for (double& x : v) x = 0.0;
    }
};

/// Records one forward pass: the input and each layer's pre-activation.
/// Post-activation values are recomputed during backward from these, and the
/// weights are re-read from the parameter set, so nothing else is stored.
struct forward_tape {
    vec input;
    std::vector<vec> pre_act;
};

inline vec forward(const mlp_params& p, const vec& x, forward_tape* tape = nullptr) {
    if (x.size() != p.spec.input_width())
        throw contract_error("forward: input length " + std::to_string(x.size()) +
                             " for network expecting " + std::to_string(p.spec.input_width()));
    if (tape) {
        tape->input = x;
        tape->pre_act.clear();
        tape->pre_act.reserve(p.spec.layers());
    }
    vec a = x;
    for (std::size_t l = 0; l < p.spec.layers(); ++l) {
        vec z = matvec(p.weights[l], a);
        const vec& bias = p.biases[l];
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += bias[i];
        if (tape) tape->pre_act.push_back(z);
        const activation act = p.spec.activations[l];
        a.resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) a[i] = activate(act, z[i]);
    }
    return a;
}

/// Reverse pass. Accumulates (adds) into `grads`; returns dL/d(input) so
/// chained networks can keep propagating. `out_grad` is dL/d(output).
inline vec backward(const mlp_params& p, const forward_tape& tape, const vec& out_grad,
                    mlp_grads& grads) {
    const std::size_t layers = p.spec.layers();
    if (tape.pre_act.size() != layers)
        throw contract_error("backward: tape has " + std::to_string(tape.pre_act.size()) +
                             " layers, network has " + std::to_string(layers));
    if (out_grad.size() != p.spec.output_width())
        throw contract_error("backward: output gradient length " +
                             std::to_string(out_grad.size()) + " for network emitting " +
                             std::to_string(p.spec.output_width()));

    vec delta = out_grad;
    for (std::size_t l = layers; l-- > 0;) {
        const vec& z = tape.pre_act[l];
        const activation act = p.spec.activations[l];
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] *= activate_deriv(act, z[i]);

        // Layer input: the raw input for l = 0, otherwise act(z_{l-1}).
        matrix& dw = grads.w[l];
        if (l == 0) {
            const vec& a_prev = tape.input;
            for (std::size_t i = 0; i < delta.size(); ++i) {
                double* dwrow = dw.row_ptr(i);
                const double d = delta[i];
                for (std::size_t j = 0; j < a_prev.size(); ++j) dwrow[j] += d * a_prev[j];
            }
        } else {
            const vec& zp = tape.pre_act[l - 1];
            const activation act_prev = p.spec.activations[l - 1];
            for (std::size_t i = 0; i < delta.size(); ++i) {
                double* dwrow = dw.row_ptr(i);
                const double d = delta[i];
                for (std::size_t j = 0; j < zp.size(); ++j)
                    dwrow[j] += d * activate(act_prev, zp[j]);
            }
        }
        vec& db = grads.b[l];
        for (std::size_t i = 0; i < delta.size(); ++i) db[i] += delta[i];

        delta = matvec_t(p.weights[l], delta);
    }
    return delta;
}

inline double mse(const vec& a, const vec& b) {
    if (a.size() != b.size())
        throw contract_error("mse: lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()));
    if (a.empty()) throw contract_error("mse: empty vectors");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

inline double mse(const matrix& a, const matrix& b) {
    if (!a.same_shape(b))
        throw contract_error("mse: shapes " + shape_str(a.rows(), a.cols()) + " and " +
                             shape_str(b.rows(), b.cols()));
    if (a.size() == 0) throw contract_error("mse: empty matrices");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.storage()[i] - b.storage()[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

/// FNV-1a over the raw bytes of all weights and biases. Used by tests to prove
/// a parameter set stayed frozen through a later training stage.
inline std::uint64_t params_digest(const mlp_params& p) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const double* data, std::size_t n) {
        const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        mix(p.weights[l].storage().data(), p.weights[l].size());
        mix(p.biases[l].data(), p.biases[l].size());
    }
    return h;
}

} // namespace aemor
