// Command-line front end: dataset generation, training, prediction,
// evaluation, and POD baseline runs over the aemor library.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <aemor/aemor.hpp>

int main(int argc, char** argv) {
    CLI::App app{"autoencoder model-order-reduction pipeline"};
    app.require_subcommand(1);

    std::string config_path, out, preset;
    std::uint64_t seed = 0;
    std::size_t epochs = 0, latent = 0, stride = 0;
    bool have_seed = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", out, "output path (overrides config)");
        sub->add_option("--preset", preset, "problem preset name (overrides config)");
        sub->add_option("--seed", seed, "RNG seed (overrides config)")
            ->each([&](const std::string&) { have_seed = true; });
        sub->add_option("--epochs", epochs, "training epochs (overrides config)");
        sub->add_option("--latent", latent, "latent dimension (overrides config)");
        sub->add_option("--stride", stride, "time subsampling stride (overrides config)");
    };
    for (const char* name : {"generate", "train", "predict", "eval", "pod"})
        add_common(app.add_subcommand(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        aemor::run_config config;
        if (!config_path.empty())
            config = aemor::parse_run_config(aemor::read_binary_file(config_path));
        config.command = app.get_subcommands().at(0)->get_name();
        if (!out.empty()) config.out = out;
        if (!preset.empty()) config.problem = preset;
        if (have_seed) config.train.seed = seed;
        if (epochs > 0) config.train.epochs = epochs;
        if (latent > 0) config.latent = latent;
        if (stride > 0) config.stride = stride;

        std::cout << aemor::run_command(config) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return aemor::exit_code_for(e);
    }
}
