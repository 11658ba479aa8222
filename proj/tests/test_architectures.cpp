#include <cmath>

#include <gtest/gtest.h>

#include <aemor/architectures.hpp>
#include <aemor/rng.hpp>
#include <aemor/training.hpp>

#include "test_util.hpp"

using namespace aemor;
using testutil::random_matrix;
using testutil::random_vec;

namespace {

mlp_params random_net(std::vector<std::size_t> widths, rng_state& rng,
                      activation hidden = activation::gelu) {
    std::vector<activation> acts(widths.size() - 1, hidden);
    acts.back() = activation::identity;
    mlp_params p = init_params(network_spec{std::move(widths), std::move(acts)}, rng);
    for (auto& b : p.biases)
        for (double& v : b) v = rng.uniform(-0.2, 0.2);
    return p;
}

/// Net computing a constant: zero weights, bias = value.
mlp_params constant_net(std::size_t in, const vec& out_value) {
    mlp_params p;
    p.spec = network_spec{{in, out_value.size()}, {activation::identity}};
    p.weights.push_back(matrix(out_value.size(), in));
    p.biases.push_back(out_value);
    return p;
}

} // namespace

TEST(Validation, AutoencoderWidthChecks) {
    rng_state rng(1);
    autoencoder ok{random_net({4, 3, 2}, rng), random_net({2, 3, 4}, rng)};
    EXPECT_NO_THROW(ok.validate());
    EXPECT_EQ(ok.latent_dim(), 2u);

    autoencoder latent_mismatch{random_net({4, 2}, rng), random_net({3, 4}, rng)};
    EXPECT_THROW(latent_mismatch.validate(), contract_error);
    autoencoder width_mismatch{random_net({4, 2}, rng), random_net({2, 5}, rng)};
    EXPECT_THROW(width_mismatch.validate(), contract_error);
}

TEST(Validation, ForceAugmentedWidthChecks) {
    rng_state rng(2);
    force_augmented_model ok{random_net({6, 3}, rng), random_net({4, 3}, rng),
                             random_net({3, 6}, rng), random_net({3, 4}, rng)};
    EXPECT_NO_THROW(ok.validate());

    force_augmented_model bad_latent{random_net({6, 3}, rng), random_net({4, 2}, rng),
                                     random_net({3, 6}, rng), random_net({3, 4}, rng)};
    EXPECT_THROW(bad_latent.validate(), contract_error);
    force_augmented_model bad_force_width{random_net({6, 3}, rng), random_net({4, 3}, rng),
                                          random_net({3, 6}, rng), random_net({3, 5}, rng)};
    EXPECT_THROW(bad_force_width.validate(), contract_error);
}

TEST(Validation, MultiFieldWidthChecks) {
    rng_state rng(3);
    multi_field_model ok;
    ok.encoders.push_back(random_net({4, 2}, rng));
    ok.encoders.push_back(random_net({3, 1}, rng));
    ok.decoder = random_net({3, 7}, rng);
    EXPECT_NO_THROW(ok.validate());
    EXPECT_EQ(ok.total_latent(), 3u);
    EXPECT_EQ(ok.total_width(), 7u);

    multi_field_model empty;
    empty.decoder = random_net({1, 1}, rng);
    EXPECT_THROW(empty.validate(), contract_error);

    multi_field_model bad = ok;
    bad.decoder = random_net({4, 7}, rng);
    EXPECT_THROW(bad.validate(), contract_error);
}

TEST(Ops, AutoencoderComposition) {
    rng_state rng(4);
    autoencoder ae{random_net({5, 3, 2}, rng), random_net({2, 3, 5}, rng)};
    const vec x = random_vec(5, rng);
    const vec z = ae_encode(ae, x);
    EXPECT_EQ(z.size(), 2u);
    EXPECT_EQ(ae_decode(ae, z), forward(ae.decoder, z));
    EXPECT_EQ(ae_reconstruct(ae, x), forward(ae.decoder, forward(ae.encoder, x)));
}

TEST(Ops, EncodeRowsMatchesPerRowForward) {
    rng_state rng(5);
    mlp_params enc = random_net({4, 2}, rng);
    const matrix snaps = random_matrix(6, 4, rng);
    const matrix z = encode_rows(enc, snaps);
    ASSERT_EQ(z.rows(), 6u);
    ASSERT_EQ(z.cols(), 2u);
    for (std::size_t s = 0; s < 6; ++s) EXPECT_EQ(z.row(s), forward(enc, snaps.row(s)));
}

TEST(Ops, EndToEndIsDecoderAfterRegressor) {
    rng_state rng(6);
    latent_regressor p{random_net({2, 8, 3}, rng)};
    mlp_params dec = random_net({3, 6}, rng);
    const vec theta = random_vec(2, rng);
    EXPECT_EQ(e2e_predict(p, dec, theta), forward(dec, forward(p.net, theta)));

    mlp_params wrong_dec = random_net({4, 6}, rng);
    EXPECT_THROW(e2e_predict(p, wrong_dec, theta), contract_error);
}

TEST(Ops, SharedLatentIsExactSumOfEncoderOutputs) {
    rng_state rng(7);
    force_augmented_model m{random_net({6, 3}, rng), random_net({4, 3}, rng),
                            random_net({3, 6}, rng), random_net({3, 4}, rng)};
    const vec phi = random_vec(6, rng);
    const vec f = random_vec(4, rng);
    const vec z = fa_shared_latent(m, phi, f);
    const vec z_phi = forward(m.phi_encoder, phi);
    const vec z_f = forward(m.f_encoder, f);
    ASSERT_EQ(z.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(z[i], z_phi[i] + z_f[i]);

    const fa_prediction rec = fa_reconstruct(m, phi, f);
    EXPECT_EQ(rec.phi, forward(m.phi_decoder, z));
    EXPECT_EQ(rec.f, forward(m.f_decoder, z));

    latent_regressor p{random_net({2, 3}, rng)};
    const vec theta = random_vec(2, rng);
    const fa_prediction e2e = fa_e2e_predict(p, m, theta);
    const vec zhat = forward(p.net, theta);
    EXPECT_EQ(e2e.phi, forward(m.phi_decoder, zhat));
    EXPECT_EQ(e2e.f, forward(m.f_decoder, zhat));
}

TEST(Ops, MultiFieldLatentSlicesPartitionInFieldOrder) {
    rng_state rng(8);
    multi_field_model m;
    m.encoders.push_back(random_net({4, 2}, rng));
    m.encoders.push_back(random_net({3, 3}, rng));
    m.decoder = random_net({5, 7}, rng);

    const vec f0 = random_vec(4, rng);
    const vec f1 = random_vec(3, rng);
    const std::vector<vec> out = mf_forward(m, {f0, f1});
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].size(), 4u);
    EXPECT_EQ(out[1].size(), 3u);

    // Concatenate latents by hand in declared order and decode once.
    vec z = forward(m.encoders[0], f0);
    const vec z1 = forward(m.encoders[1], f1);
    z.insert(z.end(), z1.begin(), z1.end());
    const vec whole = forward(m.decoder, z);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(out[0][j], whole[j]);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(out[1][j], whole[4 + j]);

    EXPECT_THROW(mf_forward(m, {f0}), contract_error);
}

TEST(Ops, MultiFieldEndToEndUsesPerFieldRegressors) {
    rng_state rng(9);
    multi_field_model m;
    m.encoders.push_back(random_net({4, 2}, rng));
    m.encoders.push_back(random_net({3, 3}, rng));
    m.decoder = random_net({5, 7}, rng);
    std::vector<latent_regressor> regs;
    regs.push_back(latent_regressor{random_net({2, 2}, rng)});
    regs.push_back(latent_regressor{random_net({2, 3}, rng)});

    const vec theta = random_vec(2, rng);
    const std::vector<vec> out = mf_e2e_predict(regs, m, theta);
    vec z = forward(regs[0].net, theta);
    const vec z1 = forward(regs[1].net, theta);
    z.insert(z.end(), z1.begin(), z1.end());
    const vec whole = forward(m.decoder, z);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(out[0][j], whole[j]);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(out[1][j], whole[4 + j]);

    std::vector<latent_regressor> too_few{regs[0]};
    EXPECT_THROW(mf_e2e_predict(too_few, m, theta), contract_error);
    std::vector<latent_regressor> bad_latent{regs[0], regs[0]};
    EXPECT_THROW(mf_e2e_predict(bad_latent, m, theta), contract_error);
}

TEST(Ops, StaggeredForceIsNetAfterRegressor) {
    rng_state rng(10);
    latent_regressor p{random_net({2, 3}, rng)};
    staggered_force_net t{random_net({3, 5}, rng)};
    const vec theta = random_vec(2, rng);
    EXPECT_EQ(staggered_force_predict(t, p, theta), forward(t.net, forward(p.net, theta)));

    staggered_force_net wrong{random_net({4, 5}, rng)};
    EXPECT_THROW(staggered_force_predict(wrong, p, theta), contract_error);
}

TEST(Ops, ComposeDeformedConfiguration) {
    const vec current = compose_deformed_configuration({0.5, 0.25}, {0.25, 0.05});
    ASSERT_EQ(current.size(), 2u);
    EXPECT_DOUBLE_EQ(current[0], 0.75);
    EXPECT_DOUBLE_EQ(current[1], 0.3);
    EXPECT_THROW(compose_deformed_configuration({1.0}, {1.0, 2.0}), contract_error);
    // Zero displacement returns the reference exactly.
    const vec same = compose_deformed_configuration({1.5, -2.0, 0.0}, {0.0, 0.0, 0.0});
    EXPECT_EQ(same, (vec{1.5, -2.0, 0.0}));
}

TEST(Losses, AeLossConstantMismatchOneIsOnePlusPenalty) {
    // Decoder emits truth + 1 in every entry: data term exactly 1, total 1 + R.
    rng_state rng(11);
    const vec truth = {0.3, -0.7, 1.1};
    matrix snaps(4, 3);
    for (std::size_t s = 0; s < 4; ++s) snaps.set_row(s, truth);

    autoencoder ae;
    ae.encoder = random_net({3, 2}, rng);
    ae.decoder = constant_net(2, {truth[0] + 1.0, truth[1] + 1.0, truth[2] + 1.0});

    const double l1 = 0.01, l2 = 0.02;
    const double r = elastic_net(ae.encoder, l1, l2) + elastic_net(ae.decoder, l1, l2);
    EXPECT_NEAR(ae_loss(ae, snaps, l1, l2), 1.0 + r, 1e-14);
    EXPECT_NEAR(ae_loss(ae, snaps, 0.0, 0.0), 1.0, 1e-14);

    EXPECT_THROW(ae_loss(ae, matrix(0, 3), l1, l2), contract_error);
    EXPECT_THROW(ae_loss(ae, matrix(2, 4), l1, l2), contract_error);
}

TEST(Losses, RegressorLossErrorTwoIsFourPlusPenalty) {
    // Frozen encoder maps everything to 0; regressor answers 2 in every latent
    // coordinate: squared error 4, total 4 + C.
    rng_state rng(12);
    mlp_params frozen = constant_net(5, {0.0, 0.0});
    latent_regressor p;
    p.net = constant_net(3, {2.0, 2.0});
    // Nonzero weights so the penalty term C is exercised too.
    p.net.weights[0](0, 0) = 0.5;
    p.net.weights[0](1, 2) = -0.25;

    const matrix thetas(6, 3);  // all-zero parameter rows: prediction = bias
    const matrix snaps = random_matrix(6, 5, rng);
    const double l1 = 0.1, l2 = 0.3;
    const double c = elastic_net(p.net, l1, l2);
    EXPECT_GT(c, 0.0);
    EXPECT_NEAR(regressor_loss(p, frozen, thetas, snaps, l1, l2), 4.0 + c, 1e-13);

    EXPECT_THROW(regressor_loss(p, frozen, matrix(5, 3), snaps, l1, l2), contract_error);
    latent_regressor wrong{constant_net(3, {1.0, 1.0, 1.0})};
    EXPECT_THROW(regressor_loss(wrong, frozen, thetas, snaps, l1, l2), contract_error);
}

TEST(Losses, ForceAugmentedUnitVarianceUnitMseIsTwoPlusPenalty) {
    // Both blocks have population variance exactly 1 and both reconstructions
    // are off by 1 everywhere: 1/1 + 1/1 + R.
    matrix phi(1, 2);
    phi(0, 0) = 1.0;
    phi(0, 1) = -1.0;
    matrix f(1, 2);
    f(0, 0) = 1.0;
    f(0, 1) = -1.0;

    force_augmented_model m;
    m.phi_encoder = constant_net(2, {0.0});
    m.f_encoder = constant_net(2, {0.0});
    m.phi_decoder = constant_net(1, {2.0, 0.0});  // truth + 1
    m.f_decoder = constant_net(1, {2.0, 0.0});
    m.phi_decoder.weights[0](0, 0) = 0.1;  // nonzero weight feeds the penalty
    // latent is 0, so the weight does not move the output

    const double l1 = 0.2, l2 = 0.4;
    double r = 0.0;
    for (const mlp_params* net : {&m.phi_encoder, &m.f_encoder, &m.phi_decoder, &m.f_decoder})
        r += elastic_net(*net, l1, l2);
    EXPECT_GT(r, 0.0);
    EXPECT_NEAR(fa_loss(m, phi, f, l1, l2), 2.0 + r, 1e-13);

    EXPECT_THROW(fa_loss(m, phi, matrix(2, 2), l1, l2), contract_error);
}

TEST(Losses, MultiFieldSingleFieldEqualsVarianceNormalizedAeLoss) {
    rng_state rng(13);
    multi_field_model m;
    m.encoders.push_back(random_net({4, 2}, rng));
    m.decoder = random_net({2, 4}, rng);
    const matrix data = random_matrix(7, 4, rng);

    autoencoder ae{m.encoders[0], m.decoder};
    const double l1 = 0.05, l2 = 0.07;
    const double expected = ae_loss(ae, data, 0.0, 0.0) / variance(data.storage()) +
                            elastic_net(ae.encoder, l1, l2) + elastic_net(ae.decoder, l1, l2);
    EXPECT_NEAR(mf_loss(m, {&data}, l1, l2), expected, 1e-12 * std::max(1.0, expected));

    EXPECT_THROW(mf_loss(m, {}, l1, l2), contract_error);
    const matrix short_data = random_matrix(3, 4, rng);
    multi_field_model two = m;
    two.encoders.push_back(random_net({4, 2}, rng));
    two.decoder = random_net({4, 8}, rng);
    EXPECT_THROW(mf_loss(two, {&data, &short_data}, l1, l2), contract_error);
}

TEST(Losses, StaggeredMatchesTripleSumOracle) {
    rng_state rng(14);
    staggered_force_net t{random_net({3, 6, 4}, rng)};
    const matrix latents = random_matrix(5, 3, rng);
    const matrix forces = random_matrix(5, 4, rng);
    const double l1 = 0.01, l2 = 0.02;

    double sum = 0.0;
    for (std::size_t s = 0; s < 5; ++s) {
        const vec fhat = forward(t.net, latents.row(s));
        for (std::size_t i = 0; i < 4; ++i) {
            const double d = fhat[i] - forces(s, i);
            sum += d * d;
        }
    }
    const double expected = sum / 20.0 + elastic_net(t.net, l1, l2);
    EXPECT_NEAR(staggered_loss(t, latents, forces, l1, l2), expected,
                1e-12 * std::max(1.0, expected));

    EXPECT_THROW(staggered_loss(t, latents, matrix(4, 4), l1, l2), contract_error);
    EXPECT_THROW(staggered_loss(t, matrix(0, 3), matrix(0, 4), l1, l2), contract_error);
}

// ---------------------------------------------------------------------------
// Gradient assemblers vs central finite differences. Each closure recomputes
// exactly the data term the assembler claims to differentiate.

TEST(Gradients, AutoencoderAssemblerMatchesFiniteDifferences) {
    rng_state rng(21);
    autoencoder ae{random_net({4, 3, 2}, rng), random_net({2, 3, 4}, rng)};
    const matrix snaps = random_matrix(5, 4, rng);

    mlp_grads g_enc = mlp_grads::zeros_like(ae.encoder);
    mlp_grads g_dec = mlp_grads::zeros_like(ae.decoder);
    const double loss0 = ae_data_grad(ae, snaps, g_enc, g_dec);
    EXPECT_NEAR(loss0, ae_loss(ae, snaps, 0.0, 0.0), 1e-13);

    auto loss = [&] { return ae_loss(ae, snaps, 0.0, 0.0); };
    testutil::expect_grads_match({&ae.encoder, &ae.decoder}, {g_enc, g_dec}, loss);
}

TEST(Gradients, RegressorAssemblerMatchesFiniteDifferences) {
    rng_state rng(22);
    latent_regressor p{random_net({2, 6, 3}, rng)};
    const matrix thetas = random_matrix(5, 2, rng);
    const matrix targets = random_matrix(5, 3, rng);

    mlp_grads g = mlp_grads::zeros_like(p.net);
    const double loss0 = regressor_data_grad(p, thetas, targets, g);

    auto loss = [&] {
        double sum = 0.0;
        for (std::size_t s = 0; s < 5; ++s) {
            const vec zhat = forward(p.net, thetas.row(s));
            for (std::size_t k = 0; k < 3; ++k) {
                const double d = zhat[k] - targets(s, k);
                sum += d * d;
            }
        }
        return sum / 15.0;
    };
    EXPECT_NEAR(loss0, loss(), 1e-13);
    testutil::expect_grads_match({&p.net}, {g}, loss);
}

TEST(Gradients, ForceAugmentedAssemblerMatchesFiniteDifferences) {
    rng_state rng(23);
    force_augmented_model m{random_net({5, 3}, rng), random_net({4, 3}, rng),
                            random_net({3, 5}, rng), random_net({3, 4}, rng)};
    const matrix phi = random_matrix(6, 5, rng);
    const matrix f = random_matrix(6, 4, rng);
    const double var_phi = variance(phi.storage());
    const double var_f = variance(f.storage());

    mlp_grads g_pe = mlp_grads::zeros_like(m.phi_encoder);
    mlp_grads g_fe = mlp_grads::zeros_like(m.f_encoder);
    mlp_grads g_pd = mlp_grads::zeros_like(m.phi_decoder);
    mlp_grads g_fd = mlp_grads::zeros_like(m.f_decoder);
    const double loss0 = fa_data_grad(m, phi, f, var_phi, var_f, g_pe, g_fe, g_pd, g_fd);
    EXPECT_NEAR(loss0, fa_loss(m, phi, f, 0.0, 0.0), 1e-12);

    auto loss = [&] { return fa_loss(m, phi, f, 0.0, 0.0); };
    testutil::expect_grads_match({&m.phi_encoder, &m.f_encoder, &m.phi_decoder, &m.f_decoder},
                                 {g_pe, g_fe, g_pd, g_fd}, loss);
}

TEST(Gradients, MultiFieldAssemblerMatchesFiniteDifferences) {
    rng_state rng(24);
    multi_field_model m;
    m.encoders.push_back(random_net({4, 2}, rng));
    m.encoders.push_back(random_net({3, 2}, rng));
    m.decoder = random_net({4, 7}, rng);
    const matrix f0 = random_matrix(5, 4, rng);
    const matrix f1 = random_matrix(5, 3, rng);
    const std::vector<const matrix*> fields{&f0, &f1};
    const std::vector<double> vars{variance(f0.storage()), variance(f1.storage())};

    std::vector<mlp_grads> grads;
    grads.push_back(mlp_grads::zeros_like(m.encoders[0]));
    grads.push_back(mlp_grads::zeros_like(m.encoders[1]));
    grads.push_back(mlp_grads::zeros_like(m.decoder));
    const double loss0 = mf_data_grad(m, fields, vars, grads);
    EXPECT_NEAR(loss0, mf_loss(m, fields, 0.0, 0.0), 1e-12);

    auto loss = [&] { return mf_loss(m, fields, 0.0, 0.0); };
    testutil::expect_grads_match({&m.encoders[0], &m.encoders[1], &m.decoder}, grads, loss);
}

TEST(Gradients, StaggeredAssemblerMatchesFiniteDifferences) {
    rng_state rng(25);
    staggered_force_net t{random_net({3, 5, 4}, rng)};
    const matrix latents = random_matrix(6, 3, rng);
    const matrix forces = random_matrix(6, 4, rng);

    mlp_grads g = mlp_grads::zeros_like(t.net);
    const double loss0 = staggered_data_grad(t, latents, forces, g);
    EXPECT_NEAR(loss0, staggered_loss(t, latents, forces, 0.0, 0.0), 1e-13);

    auto loss = [&] { return staggered_loss(t, latents, forces, 0.0, 0.0); };
    testutil::expect_grads_match({&t.net}, {g}, loss);
}

// ---------------------------------------------------------------------------
// Training wrappers

TEST(Train, AutoencoderLossDecreases) {
    rng_state rng(31);
    autoencoder ae{random_net({4, 3, 2}, rng), random_net({2, 3, 4}, rng)};
    matrix snaps(8, 4);
    for (std::size_t s = 0; s < 8; ++s) {
        const double c = 0.5 + 0.1 * static_cast<double>(s);
        snaps.set_row(s, {c, -c, 0.5 * c, 2.0 * c});
    }
    train_config cfg;
    cfg.epochs = 300;
    cfg.learning_rate = 5e-3;
    const double before = ae_loss(ae, snaps, cfg.l1_penalty, cfg.l2_penalty);
    const train_result res = train_autoencoder(ae, snaps, cfg);
    EXPECT_LT(res.final_loss, before);
    EXPECT_EQ(res.trace.size(), 300u);
    // The recorded trace is the loss actually being minimized.
    EXPECT_NEAR(res.trace[0], before, 1e-12 * std::max(1.0, before));
}

TEST(Train, RegressorLeavesFrozenEncoderUntouched) {
    rng_state rng(32);
    autoencoder ae{random_net({4, 3, 2}, rng), random_net({2, 3, 4}, rng)};
    const matrix snaps = random_matrix(6, 4, rng);
    const matrix thetas = random_matrix(6, 2, rng);
    const std::uint64_t enc_before = params_digest(ae.encoder);
    const std::uint64_t dec_before = params_digest(ae.decoder);

    latent_regressor p{random_net({2, 8, 2}, rng)};
    train_config cfg;
    cfg.epochs = 100;
    const std::uint64_t reg_before = params_digest(p.net);
    train_regressor(p, ae.encoder, thetas, snaps, cfg);
    EXPECT_EQ(params_digest(ae.encoder), enc_before);
    EXPECT_EQ(params_digest(ae.decoder), dec_before);
    EXPECT_NE(params_digest(p.net), reg_before);
}

TEST(Train, StaggeredLeavesLatentsAndShrinksLoss) {
    rng_state rng(33);
    staggered_force_net t{random_net({2, 6, 3}, rng)};
    const matrix latents = random_matrix(8, 2, rng);
    matrix forces(8, 3);
    for (std::size_t s = 0; s < 8; ++s) {
        const vec z = latents.row(s);
        forces.set_row(s, {z[0] + z[1], z[0] - z[1], 0.5 * z[0]});
    }
    train_config cfg;
    cfg.epochs = 400;
    cfg.learning_rate = 5e-3;
    const double before = staggered_loss(t, latents, forces, cfg.l1_penalty, cfg.l2_penalty);
    const train_result res = train_staggered(t, latents, forces, cfg);
    EXPECT_LT(res.final_loss, before);
    EXPECT_LT(res.final_loss, 0.1);
}

TEST(Train, MultiFieldDecreasesAndValidates) {
    rng_state rng(34);
    multi_field_model m;
    m.encoders.push_back(random_net({4, 2}, rng));
    m.encoders.push_back(random_net({2, 1}, rng));
    m.decoder = random_net({3, 6}, rng);
    const matrix f0 = random_matrix(6, 4, rng);
    const matrix f1 = random_matrix(6, 2, rng);
    train_config cfg;
    cfg.epochs = 200;
    const double before = mf_loss(m, {&f0, &f1}, cfg.l1_penalty, cfg.l2_penalty);
    const train_result res = train_multi_field(m, {&f0, &f1}, cfg);
    EXPECT_LT(res.final_loss, before);

    EXPECT_THROW(train_multi_field(m, {&f0}, cfg), contract_error);
}

TEST(Train, ForceAugmentedDecreases) {
    rng_state rng(35);
    force_augmented_model m{random_net({4, 2}, rng), random_net({3, 2}, rng),
                            random_net({2, 4}, rng), random_net({2, 3}, rng)};
    const matrix phi = random_matrix(6, 4, rng);
    const matrix f = random_matrix(6, 3, rng);
    train_config cfg;
    cfg.epochs = 200;
    const double before = fa_loss(m, phi, f, cfg.l1_penalty, cfg.l2_penalty);
    const train_result res = train_force_augmented(m, phi, f, cfg);
    EXPECT_LT(res.final_loss, before);
    EXPECT_THROW(train_force_augmented(m, phi, matrix(3, 3), cfg), contract_error);
}
