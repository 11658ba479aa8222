#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "aemor/network.hpp"

namespace aemor {

struct train_config {
    double learning_rate = 1e-3;
    std::size_t epochs = 5000;
    double l1_penalty = 1e-7;
    double l2_penalty = 1e-7;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;
    std::size_t log_every = 1;
    bool standardize_inputs = false; ///< off by default: fields/params enter the nets raw

    void validate() const {
        if (!(learning_rate > 0.0)) throw contract_error("train_config: learning_rate must be > 0");
        if (epochs < 1) throw contract_error("train_config: epochs must be >= 1");
        if (l1_penalty < 0.0 || l2_penalty < 0.0)
            throw contract_error("train_config: penalties must be >= 0");
        if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0)
            throw contract_error("train_config: betas must lie in [0, 1)");
        if (log_every < 1) throw contract_error("train_config: log_every must be >= 1");
    }
};

/// Per-epoch loss values, in epoch order.
using loss_trace = std::vector<double>;

/// Adam moment buffers for a set of jointly optimized networks.
struct adam_state {
    std::vector<mlp_grads> m, v;
    std::size_t step = 0;

    static adam_state for_nets(const std::vector<mlp_params*>& nets) {
        adam_state s;
        for (const mlp_params* p : nets) {
            s.m.push_back(mlp_grads::zeros_like(*p));
            s.v.push_back(mlp_grads::zeros_like(*p));
        }
        return s;
    }
};

/// Elastic-net value and gradient over the weight matrices of one network.
/// Biases are exempt, and the L1 subgradient at exactly 0 is 0, so the update
/// stays deterministic. Gradient is accumulated into `grads`.
inline double elastic_net(const mlp_params& p, double l1, double l2, mlp_grads* grads = nullptr) {
    if (l1 < 0.0 || l2 < 0.0) throw contract_error("elastic_net: penalties must be >= 0");
    double value = 0.0;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const vec& w = p.weights[l].storage();
        vec* gw = grads ? &grads->w[l].storage() : nullptr;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double wi = w[i];
            value += l1 * std::abs(wi) + l2 * wi * wi;
            if (gw) {
                const double sgn = (wi > 0.0) - (wi < 0.0);
                (*gw)[i] += l1 * sgn + 2.0 * l2 * wi;
            }
        }
    }
    return value;
}

/// One bias-corrected Adam update over all networks. Throws on the first
/// non-finite gradient entry, identifying the network, layer, and flat index.
inline void adam_step(std::vector<mlp_params*>& nets, const std::vector<mlp_grads>& grads,
                      adam_state& state, const train_config& cfg) {
    if (nets.size() != grads.size() || nets.size() != state.m.size())
        throw contract_error("adam_step: nets/grads/state count mismatch");
    state.step += 1;
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

    for (std::size_t n = 0; n < nets.size(); ++n) {
        mlp_params& p = *nets[n];
        auto update = [&](vec& param, const vec& g, vec& m, vec& v, std::size_t layer,
                          const char* what) {
            for (std::size_t i = 0; i < param.size(); ++i) {
                const double gi = g[i];
                if (!std::isfinite(gi))
                    throw training_error("adam_step: non-finite gradient in net " +
                                             std::to_string(n) + ", " + what + " layer " +
                                             std::to_string(layer) + ", index " +
                                             std::to_string(i),
                                         state.step, std::nan(""));
                m[i] = b1 * m[i] + (1.0 - b1) * gi;
                v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                param[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
            }
        };
        for (std::size_t l = 0; l < p.weights.size(); ++l) {
            update(p.weights[l].storage(), grads[n].w[l].storage(), state.m[n].w[l].storage(),
                   state.v[n].w[l].storage(), l, "weight");
            update(p.biases[l], grads[n].b[l], state.m[n].b[l], state.v[n].b[l], l, "bias");
        }
    }
}

struct train_result {
    loss_trace trace;
    double final_loss = 0.0;
};

/// Full-batch training loop shared by every architecture. `data_loss_grad`
/// must zero nothing: it receives freshly zeroed gradient buffers, accumulates
/// the data-term gradients, and returns the data-term loss. The elastic net
/// over all nets is added here, so the recorded loss is exactly the quantity
/// being differentiated. Strictly sequential: determinism is part of the contract.
inline train_result fit(std::vector<mlp_params*> nets,
                        const std::function<double(std::vector<mlp_grads>&)>& data_loss_grad,
                        const train_config& cfg) {
    cfg.validate();
    if (nets.empty()) throw contract_error("fit: no parameters to train");
    std::vector<mlp_grads> grads;
    grads.reserve(nets.size());
    for (const mlp_params* p : nets) grads.push_back(mlp_grads::zeros_like(*p));
    adam_state state = adam_state::for_nets(nets);

    train_result res;
    res.trace.reserve(cfg.epochs);
    double last_finite = std::nan("");
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (mlp_grads& g : grads) g.set_zero();
        double loss = data_loss_grad(grads);
        for (std::size_t n = 0; n < nets.size(); ++n)
            loss += elastic_net(*nets[n], cfg.l1_penalty, cfg.l2_penalty, &grads[n]);
        if (!std::isfinite(loss))
            throw training_error("training aborted: non-finite loss at epoch " +
                                     std::to_string(epoch + 1),
                                 epoch + 1, last_finite);
        last_finite = loss;
        try {
            adam_step(nets, grads, state, cfg);
        } catch (const training_error& e) {
            throw training_error(e.what(), epoch + 1, last_finite);
        }
        res.trace.push_back(loss);
    }
    res.final_loss = res.trace.back();
    return res;
}

/// CSV export, header `epoch,loss`, epochs 1-based. `log_every` thins the rows
/// but the final epoch is always written.
inline std::string loss_trace_csv(const loss_trace& trace, std::size_t log_every = 1) {
    if (log_every < 1) throw contract_error("loss_trace_csv: log_every must be >= 1");
    std::string out = "epoch,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const std::size_t epoch = i + 1;
        if (epoch % log_every != 0 && epoch != trace.size()) continue;
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", epoch, trace[i]);
        out += buf;
    }
    return out;
}

} // namespace aemor
