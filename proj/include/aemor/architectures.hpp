#pragma once

#include <utility>
#include <vector>

#include "aemor/network.hpp"
#include "aemor/optimizer.hpp"

namespace aemor {

/// Encoder/decoder pair with a shared latent width.
struct autoencoder {
    mlp_params encoder, decoder;

    std::size_t latent_dim() const { return encoder.spec.output_width(); }

    void validate() const {
        if (encoder.spec.output_width() != decoder.spec.input_width())
            throw contract_error("autoencoder: encoder emits " +
                                 std::to_string(encoder.spec.output_width()) +
                                 ", decoder expects " +
                                 std::to_string(decoder.spec.input_width()));
        if (encoder.spec.input_width() != decoder.spec.output_width())
            throw contract_error("autoencoder: encoder input " +
                                 std::to_string(encoder.spec.input_width()) +
                                 " != decoder output " +
                                 std::to_string(decoder.spec.output_width()));
    }
};

/// Maps a parameter point theta to a latent code.
struct latent_regressor {
    mlp_params net;

    std::size_t param_dim() const { return net.spec.input_width(); }
    std::size_t latent_dim() const { return net.spec.output_width(); }
};

/// Two encoders summing into one shared latent, two decoders reading it:
/// solution field (phi, active DOFs) and boundary forces (f, non-active DOFs).
struct force_augmented_model {
    mlp_params phi_encoder, f_encoder, phi_decoder, f_decoder;

    std::size_t latent_dim() const { return phi_encoder.spec.output_width(); }

    void validate() const {
        const std::size_t k = latent_dim();
        if (f_encoder.spec.output_width() != k || phi_decoder.spec.input_width() != k ||
            f_decoder.spec.input_width() != k)
            throw contract_error("force_augmented_model: latent widths disagree");
        if (phi_encoder.spec.input_width() != phi_decoder.spec.output_width())
            throw contract_error("force_augmented_model: phi widths disagree");
        if (f_encoder.spec.input_width() != f_decoder.spec.output_width())
            throw contract_error("force_augmented_model: force widths disagree");
    }
};

/// One encoder per field, latents concatenated in field order, one shared
/// decoder whose output is sliced back into the fields.
struct multi_field_model {
    std::vector<mlp_params> encoders;
    mlp_params decoder;

    std::size_t field_count() const { return encoders.size(); }
    std::size_t latent_dim(std::size_t i) const { return encoders[i].spec.output_width(); }
    std::size_t field_width(std::size_t i) const { return encoders[i].spec.input_width(); }

    std::size_t total_latent() const {
        std::size_t n = 0;
        for (const auto& e : encoders) n += e.spec.output_width();
        return n;
    }
    std::size_t total_width() const {
        std::size_t n = 0;
        for (const auto& e : encoders) n += e.spec.input_width();
        return n;
    }

    void validate() const {
        if (encoders.empty()) throw contract_error("multi_field_model: no encoders");
        if (decoder.spec.input_width() != total_latent())
            throw contract_error("multi_field_model: decoder input " +
                                 std::to_string(decoder.spec.input_width()) +
                                 " != concatenated latent " + std::to_string(total_latent()));
        if (decoder.spec.output_width() != total_width())
            throw contract_error("multi_field_model: decoder output " +
                                 std::to_string(decoder.spec.output_width()) +
                                 " != summed field widths " + std::to_string(total_width()));
    }
};

/// Supervised latent-to-force map, trained after (and never touching) the
/// displacement autoencoder and regressor.
struct staggered_force_net {
    mlp_params net;

    std::size_t latent_dim() const { return net.spec.input_width(); }
    std::size_t force_width() const { return net.spec.output_width(); }
};

// ---------------------------------------------------------------------------
// Forward operations

inline vec ae_encode(const autoencoder& ae, const vec& phi) { return forward(ae.encoder, phi); }
inline vec ae_decode(const autoencoder& ae, const vec& z) { return forward(ae.decoder, z); }
inline vec ae_reconstruct(const autoencoder& ae, const vec& phi) {
    return forward(ae.decoder, forward(ae.encoder, phi));
}

/// Encode every snapshot row; result is n_S x latent.
inline matrix encode_rows(const mlp_params& encoder, const matrix& snaps) {
    matrix z(snaps.rows(), encoder.spec.output_width());
    for (std::size_t s = 0; s < snaps.rows(); ++s) z.set_row(s, forward(encoder, snaps.row(s)));
    return z;
}

inline vec regressor_predict(const latent_regressor& p, const vec& theta) {
    return forward(p.net, theta);
}

inline vec e2e_predict(const latent_regressor& p, const mlp_params& decoder, const vec& theta) {
    if (p.latent_dim() != decoder.spec.input_width())
        throw contract_error("e2e_predict: regressor latent " + std::to_string(p.latent_dim()) +
                             " != decoder input " + std::to_string(decoder.spec.input_width()));
    return forward(decoder, forward(p.net, theta));
}

/// Shared latent of Eq.-style force augmentation: element-wise sum of the two
/// encoder outputs.
inline vec fa_shared_latent(const force_augmented_model& m, const vec& phi, const vec& f) {
    vec z = forward(m.phi_encoder, phi);
    const vec zf = forward(m.f_encoder, f);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += zf[i];
    return z;
}

struct fa_prediction {
    vec phi, f;
};

inline fa_prediction fa_reconstruct(const force_augmented_model& m, const vec& phi, const vec& f) {
    const vec z = fa_shared_latent(m, phi, f);
    return {forward(m.phi_decoder, z), forward(m.f_decoder, z)};
}

inline fa_prediction fa_e2e_predict(const latent_regressor& p, const force_augmented_model& m,
                                    const vec& theta) {
    const vec z = forward(p.net, theta);
    return {forward(m.phi_decoder, z), forward(m.f_decoder, z)};
}

/// Encode each field, concatenate latents in field order, decode once, slice.
inline std::vector<vec> mf_forward(const multi_field_model& m, const std::vector<vec>& fields) {
    m.validate();
    if (fields.size() != m.field_count())
        throw contract_error("mf_forward: " + std::to_string(fields.size()) + " fields for " +
                             std::to_string(m.field_count()) + " encoders");
    vec z;
    z.reserve(m.total_latent());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const vec zi = forward(m.encoders[i], fields[i]);
        z.insert(z.end(), zi.begin(), zi.end());
    }
    const vec out = forward(m.decoder, z);
    std::vector<vec> result;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < m.field_count(); ++i) {
        const std::size_t w = m.field_width(i);
        result.emplace_back(out.begin() + offset, out.begin() + offset + w);
        offset += w;
    }
    return result;
}

inline std::vector<vec> mf_e2e_predict(const std::vector<latent_regressor>& regressors,
                                       const multi_field_model& m, const vec& theta) {
    if (regressors.size() != m.field_count())
        throw contract_error("mf_e2e_predict: " + std::to_string(regressors.size()) +
                             " regressors for " + std::to_string(m.field_count()) + " fields");
    vec z;
    z.reserve(m.total_latent());
    for (std::size_t i = 0; i < regressors.size(); ++i) {
        if (regressors[i].latent_dim() != m.latent_dim(i))
            throw contract_error("mf_e2e_predict: regressor " + std::to_string(i) + " emits " +
                                 std::to_string(regressors[i].latent_dim()) + ", field latent is " +
                                 std::to_string(m.latent_dim(i)));
        const vec zi = forward(regressors[i].net, theta);
        z.insert(z.end(), zi.begin(), zi.end());
    }
    const vec out = forward(m.decoder, z);
    std::vector<vec> result;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < m.field_count(); ++i) {
        const std::size_t w = m.field_width(i);
        result.emplace_back(out.begin() + offset, out.begin() + offset + w);
        offset += w;
    }
    return result;
}

inline vec staggered_force_predict(const staggered_force_net& t, const latent_regressor& p,
                                   const vec& theta) {
    if (p.latent_dim() != t.latent_dim())
        throw contract_error("staggered_force_predict: regressor latent " +
                             std::to_string(p.latent_dim()) + " != force net input " +
                             std::to_string(t.latent_dim()));
    return forward(t.net, forward(p.net, theta));
}

/// Current nodal positions: referential positions plus predicted displacements.
inline vec compose_deformed_configuration(const vec& ref_positions, const vec& displacements) {
    if (ref_positions.size() != displacements.size())
        throw contract_error("compose_deformed_configuration: lengths " +
                             std::to_string(ref_positions.size()) + " and " +
                             std::to_string(displacements.size()));
    vec out = ref_positions;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += displacements[i];
    return out;
}

// ---------------------------------------------------------------------------
// Losses (value form; gradient assembly lives in training.hpp)

/// Mean squared reconstruction error over all n_S * width entries plus the
/// elastic net over encoder and decoder weights.
inline double ae_loss(const autoencoder& ae, const matrix& snaps, double l1, double l2) {
    if (snaps.rows() == 0) throw contract_error("ae_loss: empty snapshot set");
    if (snaps.cols() != ae.encoder.spec.input_width())
        throw contract_error("ae_loss: snapshot width " + std::to_string(snaps.cols()) +
                             " != encoder input " +
                             std::to_string(ae.encoder.spec.input_width()));
    double sum = 0.0;
    for (std::size_t s = 0; s < snaps.rows(); ++s) {
        const vec rec = ae_reconstruct(ae, snaps.row(s));
        const double* truth = snaps.row_ptr(s);
        for (std::size_t i = 0; i < rec.size(); ++i) {
            const double d = rec[i] - truth[i];
            sum += d * d;
        }
    }
    sum /= static_cast<double>(snaps.size());
    return sum + elastic_net(ae.encoder, l1, l2) + elastic_net(ae.decoder, l1, l2);
}

/// Latent regression loss: mean over n_S * n_K squared errors against targets
/// encoded by the frozen encoder, plus the elastic net over the regressor.
inline double regressor_loss(const latent_regressor& p, const mlp_params& frozen_encoder,
                             const matrix& thetas, const matrix& snaps, double l1, double l2) {
    if (thetas.rows() != snaps.rows())
        throw contract_error("regressor_loss: " + std::to_string(thetas.rows()) +
                             " parameter rows for " + std::to_string(snaps.rows()) + " snapshots");
    if (p.latent_dim() != frozen_encoder.spec.output_width())
        throw contract_error("regressor_loss: regressor latent " + std::to_string(p.latent_dim()) +
                             " != encoder latent " +
                             std::to_string(frozen_encoder.spec.output_width()));
    const matrix targets = encode_rows(frozen_encoder, snaps);
    double sum = 0.0;
    for (std::size_t s = 0; s < thetas.rows(); ++s) {
        const vec zhat = forward(p.net, thetas.row(s));
        for (std::size_t k = 0; k < zhat.size(); ++k) {
            const double d = zhat[k] - targets(s, k);
            sum += d * d;
        }
    }
    sum /= static_cast<double>(targets.size());
    return sum + elastic_net(p.net, l1, l2);
}

/// Variance-normalized double reconstruction loss. Var is the population
/// variance over all entries of each training block (floored), the same
/// frozen denominators the training loop uses.
inline double fa_loss(const force_augmented_model& m, const matrix& phi, const matrix& f,
                      double l1, double l2) {
    if (phi.rows() == 0 || phi.rows() != f.rows())
        throw contract_error("fa_loss: field and force snapshot counts disagree");
    const double var_phi = variance(phi.storage());
    const double var_f = variance(f.storage());
    double sum_phi = 0.0, sum_f = 0.0;
    for (std::size_t s = 0; s < phi.rows(); ++s) {
        const fa_prediction pred = fa_reconstruct(m, phi.row(s), f.row(s));
        for (std::size_t i = 0; i < pred.phi.size(); ++i) {
            const double d = pred.phi[i] - phi(s, i);
            sum_phi += d * d;
        }
        for (std::size_t i = 0; i < pred.f.size(); ++i) {
            const double d = pred.f[i] - f(s, i);
            sum_f += d * d;
        }
    }
    double loss = sum_phi / (static_cast<double>(phi.size()) * var_phi) +
                  sum_f / (static_cast<double>(f.size()) * var_f);
    for (const mlp_params* net : {&m.phi_encoder, &m.f_encoder, &m.phi_decoder, &m.f_decoder})
        loss += elastic_net(*net, l1, l2);
    return loss;
}

/// Multi-field loss: one variance-normalized MSE term per field plus the
/// elastic net over every encoder and the decoder. N = 1 degenerates to a
/// variance-normalized ae_loss.
inline double mf_loss(const multi_field_model& m, const std::vector<const matrix*>& fields,
                      double l1, double l2) {
    m.validate();
    if (fields.size() != m.field_count())
        throw contract_error("mf_loss: " + std::to_string(fields.size()) + " fields for " +
                             std::to_string(m.field_count()) + " encoders");
    if (fields.empty() || fields[0]->rows() == 0) throw contract_error("mf_loss: empty data");
    const std::size_t n_s = fields[0]->rows();
    std::vector<double> vars(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i]->rows() != n_s)
            throw contract_error("mf_loss: snapshot counts disagree across fields");
        vars[i] = variance(fields[i]->storage());
    }
    vec sums(fields.size(), 0.0);
    std::vector<vec> row(fields.size());
    for (std::size_t s = 0; s < n_s; ++s) {
        for (std::size_t i = 0; i < fields.size(); ++i) row[i] = fields[i]->row(s);
        const std::vector<vec> pred = mf_forward(m, row);
        for (std::size_t i = 0; i < fields.size(); ++i)
            for (std::size_t j = 0; j < pred[i].size(); ++j) {
                const double d = pred[i][j] - (*fields[i])(s, j);
                sums[i] += d * d;
            }
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i)
        loss += sums[i] / (static_cast<double>(fields[i]->size()) * vars[i]);
    for (const auto& e : m.encoders) loss += elastic_net(e, l1, l2);
    loss += elastic_net(m.decoder, l1, l2);
    return loss;
}

/// Staggered force loss: plain MSE over n_S * n_A * n_B force entries against
/// the net applied to the given (displacement-only) latents, plus its elastic net.
inline double staggered_loss(const staggered_force_net& t, const matrix& latents,
                             const matrix& forces, double l1, double l2) {
    if (latents.rows() != forces.rows())
        throw contract_error("staggered_loss: latent and force snapshot counts disagree");
    if (forces.size() == 0) throw contract_error("staggered_loss: empty data");
    double sum = 0.0;
    for (std::size_t s = 0; s < latents.rows(); ++s) {
        const vec fhat = forward(t.net, latents.row(s));
        for (std::size_t i = 0; i < fhat.size(); ++i) {
            const double d = fhat[i] - forces(s, i);
            sum += d * d;
        }
    }
    return sum / static_cast<double>(forces.size()) + elastic_net(t.net, l1, l2);
}

} // namespace aemor
