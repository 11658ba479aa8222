#pragma once

#include "aemor/architectures.hpp"
#include "aemor/optimizer.hpp"

namespace aemor {

// Data-term gradient assemblers. Each walks the snapshots in fixed order,
// accumulates exact reverse-mode gradients into the given buffers, and returns
// the data loss. The elastic net is NOT included here: fit() adds it so the
// recorded loss is exactly the differentiated quantity.

inline double ae_data_grad(const autoencoder& ae, const matrix& snaps, mlp_grads& g_enc,
                           mlp_grads& g_dec) {
    const double scale = 2.0 / static_cast<double>(snaps.size());
    double sum = 0.0;
    forward_tape tape_e, tape_d;
    for (std::size_t s = 0; s < snaps.rows(); ++s) {
        const vec phi = snaps.row(s);
        const vec z = forward(ae.encoder, phi, &tape_e);
        const vec rec = forward(ae.decoder, z, &tape_d);
        vec out_grad(rec.size());
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const double d = rec[i] - phi[i];
            sum += d * d;
            out_grad[i] = scale * d;
        }
        const vec z_grad = backward(ae.decoder, tape_d, out_grad, g_dec);
        backward(ae.encoder, tape_e, z_grad, g_enc);
    }
    return sum / static_cast<double>(snaps.size());
}

inline double regressor_data_grad(const latent_regressor& p, const matrix& thetas,
                                  const matrix& z_targets, mlp_grads& g) {
    const double scale = 2.0 / static_cast<double>(z_targets.size());
    double sum = 0.0;
    forward_tape tape;
    for (std::size_t s = 0; s < thetas.rows(); ++s) {
        const vec zhat = forward(p.net, thetas.row(s), &tape);
        vec out_grad(zhat.size());
        for (std::size_t k = 0; k < zhat.size(); ++k) {
            const double d = zhat[k] - z_targets(s, k);
            sum += d * d;
            out_grad[k] = scale * d;
        }
        backward(p.net, tape, out_grad, g);
    }
    return sum / static_cast<double>(z_targets.size());
}

/// Gradient of the two variance-normalized terms. The shared latent makes both
/// decoders' gradients flow back through both encoders. `var_phi` / `var_f`
/// are the frozen denominators.
inline double fa_data_grad(const force_augmented_model& m, const matrix& phi, const matrix& f,
                           double var_phi, double var_f, mlp_grads& g_phi_enc, mlp_grads& g_f_enc,
                           mlp_grads& g_phi_dec, mlp_grads& g_f_dec) {
    const double denom_phi = static_cast<double>(phi.size()) * var_phi;
    const double denom_f = static_cast<double>(f.size()) * var_f;
    double sum_phi = 0.0, sum_f = 0.0;
    forward_tape tape_pe, tape_fe, tape_pd, tape_fd;
    for (std::size_t s = 0; s < phi.rows(); ++s) {
        const vec phi_s = phi.row(s), f_s = f.row(s);
        vec z = forward(m.phi_encoder, phi_s, &tape_pe);
        const vec zf = forward(m.f_encoder, f_s, &tape_fe);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += zf[i];
        const vec phi_hat = forward(m.phi_decoder, z, &tape_pd);
        const vec f_hat = forward(m.f_decoder, z, &tape_fd);

        vec grad_phi(phi_hat.size()), grad_f(f_hat.size());
        for (std::size_t i = 0; i < phi_hat.size(); ++i) {
            const double d = phi_hat[i] - phi_s[i];
            sum_phi += d * d;
            grad_phi[i] = 2.0 * d / denom_phi;
        }
        for (std::size_t i = 0; i < f_hat.size(); ++i) {
            const double d = f_hat[i] - f_s[i];
            sum_f += d * d;
            grad_f[i] = 2.0 * d / denom_f;
        }
        vec z_grad = backward(m.phi_decoder, tape_pd, grad_phi, g_phi_dec);
        const vec z_grad_f = backward(m.f_decoder, tape_fd, grad_f, g_f_dec);
        for (std::size_t i = 0; i < z_grad.size(); ++i) z_grad[i] += z_grad_f[i];
        backward(m.phi_encoder, tape_pe, z_grad, g_phi_enc);
        backward(m.f_encoder, tape_fe, z_grad, g_f_enc);
    }
    return sum_phi / denom_phi + sum_f / denom_f;
}

/// `grads` holds one buffer per encoder in field order, then the decoder's.
inline double mf_data_grad(const multi_field_model& m, const std::vector<const matrix*>& fields,
                           const std::vector<double>& vars, std::vector<mlp_grads>& grads) {
    std::vector<mlp_grads>& g_encoders = grads;
    mlp_grads& g_decoder = grads.back();
    const std::size_t n_fields = fields.size();
    const std::size_t n_s = fields[0]->rows();
    std::vector<double> denoms(n_fields);
    for (std::size_t i = 0; i < n_fields; ++i)
        denoms[i] = static_cast<double>(fields[i]->size()) * vars[i];

    vec sums(n_fields, 0.0);
    std::vector<forward_tape> tapes_e(n_fields);
    forward_tape tape_d;
    for (std::size_t s = 0; s < n_s; ++s) {
        vec z;
        z.reserve(m.total_latent());
        for (std::size_t i = 0; i < n_fields; ++i) {
            const vec zi = forward(m.encoders[i], fields[i]->row(s), &tapes_e[i]);
            z.insert(z.end(), zi.begin(), zi.end());
        }
        const vec out = forward(m.decoder, z, &tape_d);

        vec out_grad(out.size());
        std::size_t offset = 0;
        for (std::size_t i = 0; i < n_fields; ++i) {
            const std::size_t w = m.field_width(i);
            for (std::size_t j = 0; j < w; ++j) {
                const double d = out[offset + j] - (*fields[i])(s, j);
                sums[i] += d * d;
                out_grad[offset + j] = 2.0 * d / denoms[i];
            }
            offset += w;
        }
        const vec z_grad = backward(m.decoder, tape_d, out_grad, g_decoder);
        offset = 0;
        for (std::size_t i = 0; i < n_fields; ++i) {
            const std::size_t k = m.latent_dim(i);
            const vec zi_grad(z_grad.begin() + offset, z_grad.begin() + offset + k);
            backward(m.encoders[i], tapes_e[i], zi_grad, g_encoders[i]);
            offset += k;
        }
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < n_fields; ++i) loss += sums[i] / denoms[i];
    return loss;
}

inline double staggered_data_grad(const staggered_force_net& t, const matrix& latents,
                                  const matrix& forces, mlp_grads& g) {
    const double scale = 2.0 / static_cast<double>(forces.size());
    double sum = 0.0;
    forward_tape tape;
    for (std::size_t s = 0; s < latents.rows(); ++s) {
        const vec fhat = forward(t.net, latents.row(s), &tape);
        vec out_grad(fhat.size());
        for (std::size_t i = 0; i < fhat.size(); ++i) {
            const double d = fhat[i] - forces(s, i);
            sum += d * d;
            out_grad[i] = scale * d;
        }
        backward(t.net, tape, out_grad, g);
    }
    return sum / static_cast<double>(forces.size());
}

// ---------------------------------------------------------------------------
// Stage drivers

inline train_result train_autoencoder(autoencoder& ae, const matrix& snaps,
                                      const train_config& cfg) {
    ae.validate();
    if (snaps.rows() == 0) throw contract_error("train_autoencoder: empty snapshot set");
    if (snaps.cols() != ae.encoder.spec.input_width())
        throw contract_error("train_autoencoder: snapshot width " + std::to_string(snaps.cols()) +
                             " != encoder input " +
                             std::to_string(ae.encoder.spec.input_width()));
    return fit({&ae.encoder, &ae.decoder},
               [&](std::vector<mlp_grads>& g) { return ae_data_grad(ae, snaps, g[0], g[1]); },
               cfg);
}

inline train_result train_regressor_on_targets(latent_regressor& p, const matrix& thetas,
                                               const matrix& targets, const train_config& cfg) {
    if (thetas.rows() == 0) throw contract_error("train_regressor: empty data");
    if (p.param_dim() != thetas.cols())
        throw contract_error("train_regressor: theta width " + std::to_string(thetas.cols()) +
                             " != regressor input " + std::to_string(p.param_dim()));
    if (p.latent_dim() != targets.cols())
        throw contract_error("train_regressor: target width " + std::to_string(targets.cols()) +
                             " != regressor output " + std::to_string(p.latent_dim()));
    return fit({&p.net},
               [&](std::vector<mlp_grads>& g) { return regressor_data_grad(p, thetas, targets, g[0]); },
               cfg);
}

/// Latent targets are computed once from the frozen encoder before the loop;
/// the encoder itself is never touched.
inline train_result train_regressor(latent_regressor& p, const mlp_params& frozen_encoder,
                                    const matrix& thetas, const matrix& snaps,
                                    const train_config& cfg) {
    if (thetas.rows() != snaps.rows())
        throw contract_error("train_regressor: " + std::to_string(thetas.rows()) +
                             " parameter rows for " + std::to_string(snaps.rows()) + " snapshots");
    const matrix targets = encode_rows(frozen_encoder, snaps);
    return train_regressor_on_targets(p, thetas, targets, cfg);
}

/// Joint training of all four nets. Variance denominators are computed here,
/// once, and stay fixed for every epoch.
inline train_result train_force_augmented(force_augmented_model& m, const matrix& phi,
                                          const matrix& f, const train_config& cfg) {
    m.validate();
    if (phi.rows() == 0 || phi.rows() != f.rows())
        throw contract_error("train_force_augmented: field and force snapshot counts disagree");
    const double var_phi = variance(phi.storage());
    const double var_f = variance(f.storage());
    return fit({&m.phi_encoder, &m.f_encoder, &m.phi_decoder, &m.f_decoder},
               [&, var_phi, var_f](std::vector<mlp_grads>& g) {
                   return fa_data_grad(m, phi, f, var_phi, var_f, g[0], g[1], g[2], g[3]);
               },
               cfg);
}

inline train_result train_multi_field(multi_field_model& m,
                                      const std::vector<const matrix*>& fields,
                                      const train_config& cfg) {
    m.validate();
    if (fields.size() != m.field_count())
        throw contract_error("train_multi_field: " + std::to_string(fields.size()) +
                             " fields for " + std::to_string(m.field_count()) + " encoders");
    const std::size_t n_s = fields.empty() ? 0 : fields[0]->rows();
    if (n_s == 0) throw contract_error("train_multi_field: empty data");
    std::vector<double> vars(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i]->rows() != n_s)
            throw contract_error("train_multi_field: snapshot counts disagree across fields");
        vars[i] = variance(fields[i]->storage());
    }
    std::vector<mlp_params*> nets;
    for (auto& e : m.encoders) nets.push_back(&e);
    nets.push_back(&m.decoder);
    return fit(nets,
               [&](std::vector<mlp_grads>& g) { return mf_data_grad(m, fields, vars, g); }, cfg);
}

inline train_result train_staggered(staggered_force_net& t, const matrix& latents,
                                    const matrix& forces, const train_config& cfg) {
    if (latents.rows() != forces.rows())
        throw contract_error("train_staggered: latent and force snapshot counts disagree");
    if (latents.rows() == 0) throw contract_error("train_staggered: empty data");
    if (t.latent_dim() != latents.cols())
        throw contract_error("train_staggered: latent width " + std::to_string(latents.cols()) +
                             " != net input " + std::to_string(t.latent_dim()));
    return fit({&t.net},
               [&](std::vector<mlp_grads>& g) { return staggered_data_grad(t, latents, forces, g[0]); },
               cfg);
}

} // namespace aemor
