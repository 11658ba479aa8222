// End-to-end walkthrough at desk scale: generate a parametric snapshot set,
// train the autoencoder + regressor chain, and query the surrogate at an
// unseen parameter point. Runs in a few seconds with the reduced epoch count.

#include <iostream>

#include <aemor/aemor.hpp>

using namespace aemor;

int main() {
    // 25 snapshots of the synthetic unit-cell manifold on its 5x5 sample grid
    const parametric_problem problem = problem_preset("unit-cell");
    const auto grid = unit_cell_sample_grid();
    matrix samples(grid.size(), 2);
    for (std::size_t i = 0; i < grid.size(); ++i) samples.set_row(i, {grid[i][0], grid[i][1]});
    const snapshot_set set = generate_synthetic(problem, samples, 42);
    const field_block& disp = set.fields.front();
    std::cout << "snapshots: " << set.count() << ", active DOFs: " << disp.active.size()
              << "\n";

    train_config cfg;
    cfg.epochs = 400; // demo-friendly; the full pipeline default is 5000
    cfg.seed = 42;

    rng_state rng(cfg.seed);
    const ae_topology topo = topo::unit_cell_ae_desk(disp.active.size(), 4);
    autoencoder ae{init_params(topo.encoder, rng), init_params(topo.decoder, rng)};
    const train_result ae_res = train_autoencoder(ae, disp.values, cfg);
    std::cout << "autoencoder loss after " << cfg.epochs << " epochs: " << ae_res.final_loss
              << "\n";

    network_spec reg_spec;
    reg_spec.widths = {2, 16, 16, 16, 16, 4};
    reg_spec.activations = {activation::gelu, activation::gelu, activation::gelu,
                            activation::gelu, activation::identity};
    latent_regressor reg{init_params(reg_spec, rng)};
    const train_result rg_res = train_regressor(reg, ae.encoder, set.params, disp.values, cfg);
    std::cout << "regressor loss: " << rg_res.final_loss << "\n";

    // surrogate query at a parameter point not on the training grid
    const vec theta = {0.55, 0.35};
    const vec predicted = e2e_predict(reg, ae.decoder, theta);
    const vec truth_full = unit_cell_full_field(theta[0], theta[1], problem.nx, problem.ny,
                                                vec(2 * problem.nx * problem.ny, 0.0));
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < disp.active.size(); ++k) {
        const double d = predicted[k] - truth_full[disp.active[k]];
        err += d * d;
        ref += truth_full[disp.active[k]] * truth_full[disp.active[k]];
    }
    std::cout << "relative L2 error at held-out theta: " << std::sqrt(err / ref) << "\n";
    return 0;
}
