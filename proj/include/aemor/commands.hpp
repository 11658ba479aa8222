#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "aemor/architectures.hpp"
#include "aemor/fom.hpp"
#include "aemor/generators.hpp"
#include "aemor/io.hpp"
#include "aemor/metrics.hpp"
#include "aemor/presets.hpp"
#include "aemor/training.hpp"

namespace aemor {

/// Parsed run configuration. Every command reads the same structure; required
/// keys are checked per command before any compute starts.
struct run_config {
    std::string command;
    std::string problem;
    std::string kind;
    std::string fom;
    std::string snapshots;
    std::string out;
    std::string bundle;
    std::vector<std::string> bundles;
    std::string encoder_bundle;
    std::string morph_bundle;
    std::optional<std::vector<vec>> theta;   // predict/eval parameter rows
    std::optional<std::vector<vec>> samples; // generate sample rows (else preset grid)
    std::size_t latent = 4;
    std::size_t stride = 1;
    std::vector<std::size_t> grid; // nx, ny override
    std::vector<std::size_t> ranks;
    bool full_scale = false;
    bool imperfection = true;
    train_config train;
};

inline run_config parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config root must be an object");

    static const std::vector<std::string> known = {
        "command",   "problem",       "kind",        "fom",          "snapshots",
        "out",       "bundle",        "bundles",     "encoder_bundle", "morph_bundle",
        "theta",     "samples",       "latent",      "stride",       "grid",
        "ranks",     "full_scale",   "imperfection", "seed",        "epochs",
        "learning_rate", "l1",        "l2",          "log_every"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw config_error("unknown config key '" + key + "'");

    run_config c;
    try {
        auto str = [&](const char* k, std::string& out) {
            if (j.contains(k)) out = j.at(k).get<std::string>();
        };
        str("command", c.command);
        str("problem", c.problem);
        str("kind", c.kind);
        str("fom", c.fom);
        str("snapshots", c.snapshots);
        str("out", c.out);
        str("bundle", c.bundle);
        str("encoder_bundle", c.encoder_bundle);
        str("morph_bundle", c.morph_bundle);
        if (j.contains("bundles")) c.bundles = j.at("bundles").get<std::vector<std::string>>();
        auto rows = [&](const char* k, std::optional<std::vector<vec>>& out) {
            if (!j.contains(k)) return;
            std::vector<vec> r;
            for (const json& e : j.at(k)) r.push_back(e.get<vec>());
            out = std::move(r);
        };
        rows("theta", c.theta);
        rows("samples", c.samples);
        if (j.contains("latent")) c.latent = j.at("latent").get<std::size_t>();
        if (j.contains("stride")) c.stride = j.at("stride").get<std::size_t>();
        if (j.contains("grid")) c.grid = j.at("grid").get<std::vector<std::size_t>>();
        if (j.contains("ranks")) c.ranks = j.at("ranks").get<std::vector<std::size_t>>();
        if (j.contains("full_scale")) c.full_scale = j.at("full_scale").get<bool>();
        if (j.contains("imperfection")) c.imperfection = j.at("imperfection").get<bool>();
        if (j.contains("seed")) c.train.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("epochs")) c.train.epochs = j.at("epochs").get<std::size_t>();
        if (j.contains("learning_rate"))
            c.train.learning_rate = j.at("learning_rate").get<double>();
        if (j.contains("l1")) c.train.l1_penalty = j.at("l1").get<double>();
        if (j.contains("l2")) c.train.l2_penalty = j.at("l2").get<double>();
        if (j.contains("log_every")) c.train.log_every = j.at("log_every").get<std::size_t>();
    } catch (const json::exception& e) {
        throw config_error(std::string("bad config value: ") + e.what());
    }
    return c;
}

/// Process exit code buckets: 2 config, 3 data/contract, 4 numerical, 5 I/O.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const config_error*>(&e)) return 2;
    if (dynamic_cast<const io_error*>(&e)) return 5;
    if (dynamic_cast<const numerical_error*>(&e)) return 4;
    if (dynamic_cast<const data_error*>(&e)) return 3;
    if (dynamic_cast<const contract_error*>(&e)) return 3;
    return 1;
}

namespace detail {

inline void require_key(const std::string& value, const char* key, const char* command) {
    if (value.empty())
        throw config_error(std::string(command) + ": required key '" + key + "' missing");
}

inline matrix rows_to_matrix(const std::vector<vec>& rows, std::size_t expect_cols) {
    matrix m(rows.size(), expect_cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != expect_cols)
            throw contract_error("parameter row " + std::to_string(i) + " has " +
                                 std::to_string(rows[i].size()) + " entries, expected " +
                                 std::to_string(expect_cols));
        m.set_row(i, rows[i]);
    }
    return m;
}

/// Default parameter grids for the snapshot presets.
inline matrix default_sample_grid(const std::string& problem) {
    if (problem == "unit-cell") {
        const auto g = unit_cell_sample_grid();
        matrix m(g.size(), 2);
        for (std::size_t i = 0; i < g.size(); ++i) m.set_row(i, {g[i][0], g[i][1]});
        return m;
    }
    if (problem == "plate") {
        const auto g = plate_sample_grid();
        matrix m(g.size(), 2);
        for (std::size_t i = 0; i < g.size(); ++i) m.set_row(i, {g[i][0], g[i][1]});
        return m;
    }
    if (problem == "thermo") {
        const auto g = thermo_sample_grid();
        matrix m(g.size(), 3);
        for (std::size_t i = 0; i < g.size(); ++i) m.set_row(i, {g[i][0], g[i][1], g[i][2]});
        return m;
    }
    if (problem == "plate-morph") {
        matrix m(21, 1);
        for (std::size_t i = 0; i < 21; ++i) m(i, 0) = static_cast<double>(i) / 20.0;
        return m;
    }
    throw data_error("no default sample grid for problem '" + problem + "'");
}

inline std::string label_for(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    const std::size_t dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
    return base;
}

inline std::string problem_of(const snapshot_set& set, const run_config& config) {
    const std::string prefix = "generator:";
    if (set.provenance.rfind(prefix, 0) == 0) {
        std::string p = set.provenance.substr(prefix.size());
        const std::size_t sp = p.find(' ');
        if (sp != std::string::npos) p = p.substr(0, sp);
        return p;
    }
    return config.problem.empty() ? std::string("external") : config.problem;
}

inline network_spec desk_regressor(std::size_t param_dim, std::size_t latent,
                                   const std::string& problem) {
    std::vector<std::size_t> hidden = {16, 16, 16, 16};
    if (problem == "plate" || problem == "plate-morph" || problem == "thermo")
        hidden = {32, 32, 32};
    network_spec spec;
    spec.widths.push_back(param_dim);
    for (std::size_t h : hidden) spec.widths.push_back(h);
    spec.widths.push_back(latent);
    spec.activations.assign(hidden.size(), activation::gelu);
    spec.activations.push_back(activation::identity);
    return spec;
}

inline ae_topology desk_autoencoder(const std::string& problem, std::size_t width,
                                    std::size_t latent) {
    if (problem == "plate") return topo::plate_ae_desk(width, latent);
    if (problem == "plate-morph") return topo::plate_morph_ae_desk(width, latent);
    return topo::unit_cell_ae_desk(width, latent);
}

/// Snapshot rows of the reference parameter list matching the requested rows
/// exactly (within 1e-12 per component).
inline std::vector<std::size_t> match_theta_rows(const snapshot_set& set,
                                                 const std::vector<vec>& wanted) {
    std::vector<std::size_t> rows;
    for (const vec& t : wanted) {
        if (t.size() != set.param_dim())
            throw contract_error("evaluation point has " + std::to_string(t.size()) +
                                 " parameters, ground truth has " +
                                 std::to_string(set.param_dim()));
        bool found = false;
        for (std::size_t s = 0; s < set.count() && !found; ++s) {
            bool eq = true;
            for (std::size_t j = 0; j < t.size(); ++j)
                eq = eq && std::abs(set.params(s, j) - t[j]) <= 1e-12;
            if (eq) {
                rows.push_back(s);
                found = true;
            }
        }
        if (!found) {
            std::string repr = "(";
            for (std::size_t j = 0; j < t.size(); ++j)
                repr += (j ? "," : "") + fmt17(t[j]);
            throw data_error("evaluation point " + repr +
                             ") is not present in the ground-truth set");
        }
    }
    return rows;
}

} // namespace detail

// ---------------------------------------------------------------------------
// FOM snapshot sets (direct solves over a parameter grid) for the POD flow.

inline snapshot_set fom_snapshot_set(const linear_fom& fom, const matrix& thetas) {
    if (thetas.cols() != fom.param_dim)
        throw contract_error("fom_snapshot_set: " + std::to_string(thetas.cols()) +
                             " parameter columns for '" + fom.name + "' expecting " +
                             std::to_string(fom.param_dim));
    snapshot_set set;
    set.params = thetas;
    set.provenance = "fom:" + fom.name;
    set.param_names.clear();
    for (std::size_t j = 0; j < fom.param_dim; ++j)
        set.param_names.push_back("theta" + std::to_string(j));

    std::vector<field_block> fields;
    for (std::size_t i = 0; i < fom.field_slices.size(); ++i) {
        field_block f;
        f.name = fom.field_slices.size() == 1 ? "solution" : "field" + std::to_string(i);
        f.dofs_per_node = 1;
        f.full_width = fom.field_slices[i].second;
        for (std::size_t k = 0; k < f.full_width; ++k) f.active.push_back(k);
        f.values = matrix(thetas.rows(), f.full_width);
        fields.push_back(std::move(f));
    }
    for (std::size_t s = 0; s < thetas.rows(); ++s) {
        const vec phi = fom.solve(thetas.row(s));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto [row0, width] = fom.field_slices[i];
            for (std::size_t k = 0; k < width; ++k) fields[i].values(s, k) = phi[row0 + k];
        }
    }
    set.fields = std::move(fields);
    set.validate();
    return set;
}

inline matrix default_fom_grid(const linear_fom& fom) {
    std::size_t per_axis = fom.param_dim <= 2 ? 5 : 3;
    std::size_t count = 1;
    for (std::size_t j = 0; j < fom.param_dim; ++j) count *= per_axis;
    matrix m(count, fom.param_dim);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t rem = i;
        for (std::size_t j = 0; j < fom.param_dim; ++j) {
            m(i, fom.param_dim - 1 - j) =
                static_cast<double>(rem % per_axis) / static_cast<double>(per_axis - 1);
            rem /= per_axis;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// generate

inline std::string cmd_generate(const run_config& config) {
    detail::require_key(config.problem, "problem", "generate");
    detail::require_key(config.out, "out", "generate");

    snapshot_set set;
    if (config.problem.rfind("fom-", 0) == 0) {
        const linear_fom fom = builtin_fom(config.problem.substr(4));
        const matrix grid = config.samples
                                ? detail::rows_to_matrix(*config.samples, fom.param_dim)
                                : default_fom_grid(fom);
        set = fom_snapshot_set(fom, grid);
        set.seed = config.train.seed;
    } else {
        parametric_problem problem = problem_preset(config.problem);
        if (!config.grid.empty()) {
            if (config.grid.size() != 2)
                throw config_error("generate: 'grid' must be [nx, ny]");
            problem.nx = config.grid[0];
            problem.ny = config.grid[1];
        }
        problem.full_scale = config.full_scale;
        problem.imperfection = config.imperfection;
        const matrix grid = config.samples
                                ? detail::rows_to_matrix(*config.samples, problem.param_dim)
                                : detail::default_sample_grid(config.problem);
        set = generate_synthetic(problem, grid, config.train.seed);
    }
    if (config.stride > 1) set = subsample_time(set, config.stride);

    write_snapshots(config.out, set);
    write_text_file(config.out + ".params.csv", params_csv(set));

    std::string widths;
    for (const field_block& f : set.fields)
        widths += (widths.empty() ? "" : ", ") + f.name + "=" + std::to_string(f.active.size());
    if (set.force) widths += ", force=" + std::to_string(set.force->values.cols());
    return "generated " + std::to_string(set.count()) + " snapshots (" + widths + ") -> " +
           config.out;
}

// ---------------------------------------------------------------------------
// train

namespace detail {

inline surrogate_bundle base_bundle(const std::string& kind, const snapshot_set& set,
                                    const run_config& config) {
    surrogate_bundle b;
    b.kind = kind;
    b.problem = problem_of(set, config);
    b.param_names = set.param_names;
    b.seed = config.train.seed;
    b.epochs = config.train.epochs;
    return b;
}

inline void write_stage_trace(const std::string& out, const std::string& stage,
                              const loss_trace& trace, const train_config& cfg) {
    const std::string path = stage.empty() ? out + ".loss.csv" : out + "." + stage + ".loss.csv";
    write_text_file(path, loss_trace_csv(trace, cfg.log_every));
}

} // namespace detail

inline std::string cmd_train(const run_config& config) {
    detail::require_key(config.kind, "kind", "train");
    detail::require_key(config.snapshots, "snapshots", "train");
    detail::require_key(config.out, "out", "train");
    {
        bool known = false;
        for (const std::string& k : bundle_kinds()) known = known || k == config.kind;
        if (!known) throw config_error("train: unknown architecture kind '" + config.kind + "'");
    }

    snapshot_set set = read_snapshots(config.snapshots);
    if (config.stride > 1) set = subsample_time(set, config.stride);
    if (set.fields.empty()) throw data_error("train: snapshot set has no fields");
    const std::string problem = detail::problem_of(set, config);
    const train_config& cfg = config.train;
    cfg.validate();
    rng_state rng(cfg.seed);

    const field_block& f0 = set.fields.front();
    const std::size_t width0 = f0.active.size();
    std::string summary;

    if (config.kind == "pod") {
        const matrix snaps_cols = transpose(f0.values);
        pod_basis_t basis = pod_basis(snaps_cols, config.latent);
        // the bundle manifest declares exactly `rank` values; drop the tail
        basis.singular_values.resize(basis.rank());
        surrogate_bundle b = detail::base_bundle("pod", set, config);
        b.field_order = {f0.name};
        b.latent_dims = {basis.rank()};
        b.epochs = 0;
        b.basis = std::move(basis);
        write_bundle(config.out, b);
        write_text_file(config.out + ".loss.csv", "epoch,loss\n");
        return "pod bundle rank " + std::to_string(b.latent_dims[0]) + " -> " + config.out;
    }

    if (config.kind == "ae") {
        autoencoder ae;
        const ae_topology topo = detail::desk_autoencoder(problem, width0, config.latent);
        ae.encoder = init_params(topo.encoder, rng);
        ae.decoder = init_params(topo.decoder, rng);
        const train_result res = train_autoencoder(ae, f0.values, cfg);
        surrogate_bundle b = detail::base_bundle("ae", set, config);
        b.field_order = {f0.name};
        b.latent_dims = {ae.latent_dim()};
        b.final_loss = res.final_loss;
        b.nets = {{"encoder", ae.encoder}, {"decoder", ae.decoder}};
        write_bundle(config.out, b);
        detail::write_stage_trace(config.out, "", res.trace, cfg);
        summary = "ae final loss " + fmt17(res.final_loss);
    } else if (config.kind == "regressor") {
        if (config.encoder_bundle.empty())
            throw data_error("train: stage order violated, the regressor needs a trained "
                             "encoder; train an 'ae' bundle first and pass it as "
                             "'encoder_bundle'");
        const surrogate_bundle up = read_bundle(config.encoder_bundle);
        const trained_net* enc = up.find("encoder");
        if (!enc)
            throw data_error("train: encoder_bundle '" + config.encoder_bundle +
                             "' has no encoder network");
        latent_regressor p;
        p.net = init_params(
            detail::desk_regressor(set.param_dim(), enc->params.spec.output_width(), problem),
            rng);
        const train_result res = train_regressor(p, enc->params, set.params, f0.values, cfg);
        surrogate_bundle b = detail::base_bundle("regressor", set, config);
        b.field_order = {f0.name};
        b.latent_dims = {p.latent_dim()};
        b.final_loss = res.final_loss;
        b.nets = {{"regressor", p.net}};
        write_bundle(config.out, b);
        detail::write_stage_trace(config.out, "", res.trace, cfg);
        summary = "regressor final loss " + fmt17(res.final_loss);
    } else if (config.kind == "e2e") {
        autoencoder ae;
        const ae_topology topo = detail::desk_autoencoder(problem, width0, config.latent);
        ae.encoder = init_params(topo.encoder, rng);
        ae.decoder = init_params(topo.decoder, rng);
        latent_regressor p;
        p.net = init_params(detail::desk_regressor(set.param_dim(), config.latent, problem), rng);
        const train_result ae_res = train_autoencoder(ae, f0.values, cfg);
        const train_result rg_res = train_regressor(p, ae.encoder, set.params, f0.values, cfg);
        surrogate_bundle b = detail::base_bundle("e2e", set, config);
        b.field_order = {f0.name};
        b.latent_dims = {ae.latent_dim()};
        b.final_loss = rg_res.final_loss;
        b.nets = {{"encoder", ae.encoder}, {"decoder", ae.decoder}, {"regressor", p.net}};
        write_bundle(config.out, b);
        detail::write_stage_trace(config.out, "ae", ae_res.trace, cfg);
        detail::write_stage_trace(config.out, "", rg_res.trace, cfg);
        summary = "ae final loss " + fmt17(ae_res.final_loss) + ", regressor final loss " +
                  fmt17(rg_res.final_loss);
    } else if (config.kind == "force-augmented") {
        if (!set.force)
            throw data_error("train: force-augmented model needs a snapshot set with a force "
                             "block");
        force_augmented_model m;
        const ae_topology phi_topo = detail::desk_autoencoder(problem, width0, config.latent);
        const ae_topology f_topo =
            topo::unit_cell_force_ae_desk(set.force->values.cols(), config.latent);
        m.phi_encoder = init_params(phi_topo.encoder, rng);
        m.f_encoder = init_params(f_topo.encoder, rng);
        m.phi_decoder = init_params(phi_topo.decoder, rng);
        m.f_decoder = init_params(f_topo.decoder, rng);
        const train_result fa_res = train_force_augmented(m, f0.values, set.force->values, cfg);

        // regressor learns the shared latents of the trained model
        matrix targets(set.count(), m.latent_dim());
        for (std::size_t s = 0; s < set.count(); ++s)
            targets.set_row(s,
                            fa_shared_latent(m, f0.values.row(s), set.force->values.row(s)));
        latent_regressor p;
        p.net = init_params(detail::desk_regressor(set.param_dim(), config.latent, problem), rng);
        const train_result rg_res = train_regressor_on_targets(p, set.params, targets, cfg);

        surrogate_bundle b = detail::base_bundle("force-augmented", set, config);
        b.field_order = {f0.name};
        b.latent_dims = {m.latent_dim()};
        b.final_loss = rg_res.final_loss;
        b.nets = {{"phi_encoder", m.phi_encoder},
                  {"f_encoder", m.f_encoder},
                  {"phi_decoder", m.phi_decoder},
                  {"f_decoder", m.f_decoder},
                  {"regressor", p.net}};
        write_bundle(config.out, b);
        detail::write_stage_trace(config.out, "fa", fa_res.trace, cfg);
        detail::write_stage_trace(config.out, "", rg_res.trace, cfg);
        summary = "force-augmented final loss " + fmt17(fa_res.final_loss) +
                  ", regressor final loss " + fmt17(rg_res.final_loss);
    } else if (config.kind == "multi-field") {
        if (set.fields.size() < 2)
            throw data_error("train: multi-field model needs at least two fields, set has " +
                             std::to_string(set.fields.size()));
        multi_field_model m;
        std::size_t total_latent = 0, total_width = 0;
        for (const field_block& f : set.fields) {
            m.encoders.push_back(
                init_params(topo::thermo_encoder_desk(f.active.size(), config.latent), rng));
            total_latent += config.latent;
            total_width += f.active.size();
        }
        m.decoder = init_params(topo::thermo_decoder_desk(total_width, total_latent), rng);
        std::vector<const matrix*> fields;
        for (const field_block& f : set.fields) fields.push_back(&f.values);
        const train_result mf_res = train_multi_field(m, fields, cfg);

        surrogate_bundle b = detail::base_bundle("multi-field", set, config);
        std::vector<latent_regressor> regressors;
        train_result last_rg{};
        for (std::size_t i = 0; i < set.fields.size(); ++i) {
            const matrix targets = encode_rows(m.encoders[i], set.fields[i].values);
            latent_regressor p;
            p.net =
                init_params(detail::desk_regressor(set.param_dim(), config.latent, problem), rng);
            last_rg = train_regressor_on_targets(p, set.params, targets, cfg);
            detail::write_stage_trace(config.out, "regressor." + set.fields[i].name,
                                      last_rg.trace, cfg);
            regressors.push_back(std::move(p));
        }
        for (std::size_t i = 0; i < set.fields.size(); ++i) {
            b.field_order.push_back(set.fields[i].name);
            b.latent_dims.push_back(m.encoders[i].spec.output_width());
            b.nets.push_back({"encoder:" + set.fields[i].name, m.encoders[i]});
        }
        b.nets.push_back({"decoder", m.decoder});
        for (std::size_t i = 0; i < set.fields.size(); ++i)
            b.nets.push_back({"regressor:" + set.fields[i].name, regressors[i].net});
        b.final_loss = last_rg.final_loss;
        write_bundle(config.out, b);
        detail::write_stage_trace(config.out, "mf", mf_res.trace, cfg);
        detail::write_stage_trace(config.out, "", last_rg.trace, cfg);
        summary = "multi-field final loss " + fmt17(mf_res.final_loss);
    } else if (config.kind == "staggered") {
        if (!set.force)
            throw data_error("train: staggered force model needs a snapshot set with a force "
                             "block");
        if (config.encoder_bundle.empty())
            throw data_error("train: stage order violated, the staggered force net trains on "
                             "regression-network latents; train an 'e2e' bundle first and pass "
                             "it as 'encoder_bundle'");
        const surrogate_bundle up = read_bundle(config.encoder_bundle);
        const trained_net* reg = up.find("regressor");
        if (!reg)
            throw data_error("train: encoder_bundle '" + config.encoder_bundle +
                             "' has no regressor network (stage order violated)");
        latent_regressor p;
        p.net = reg->params;

        // targets: latents the regressor actually emits at the training points
        matrix latents(set.count(), p.latent_dim());
        for (std::size_t s = 0; s < set.count(); ++s)
            latents.set_row(s, regressor_predict(p, set.params.row(s)));

        staggered_force_net t;
        t.net = init_params(topo::unit_cell_staggered_desk(set.force->values.cols(), p.latent_dim()),
                            rng);
        const train_result res = train_staggered(t, latents, set.force->values, cfg);
        surrogate_bundle b = detail::base_bundle("staggered", set, config);
        b.field_order = {set.force->field};
        b.latent_dims = {p.latent_dim()};
        b.final_loss = res.final_loss;
        b.nets = {{"regressor", p.net}, {"force_net", t.net}};
        write_bundle(config.out, b);
        detail::write_stage_trace(config.out, "", res.trace, cfg);
        summary = "staggered force final loss " + fmt17(res.final_loss);
    } else {
        throw config_error("train: unknown architecture kind '" + config.kind + "'");
    }
    return summary + " -> " + config.out;
}

// ---------------------------------------------------------------------------
// predict

namespace detail {

/// Parameter-driven field predictions of a bundle (field name, active values).
inline std::vector<std::pair<std::string, vec>> predict_fields(const surrogate_bundle& b,
                                                               const vec& theta) {
    if (theta.size() != b.param_names.size())
        throw contract_error("theta has " + std::to_string(theta.size()) +
                             " entries, bundle expects " + std::to_string(b.param_names.size()));
    std::vector<std::pair<std::string, vec>> out;
    if (b.kind == "e2e") {
        latent_regressor p{b.require("regressor").params};
        out.emplace_back(b.field_order.at(0), e2e_predict(p, b.require("decoder").params, theta));
    } else if (b.kind == "force-augmented") {
        force_augmented_model m;
        m.phi_encoder = b.require("phi_encoder").params;
        m.f_encoder = b.require("f_encoder").params;
        m.phi_decoder = b.require("phi_decoder").params;
        m.f_decoder = b.require("f_decoder").params;
        latent_regressor p{b.require("regressor").params};
        const fa_prediction pred = fa_e2e_predict(p, m, theta);
        out.emplace_back(b.field_order.at(0), pred.phi);
    } else if (b.kind == "multi-field") {
        multi_field_model m;
        std::vector<latent_regressor> regs;
        for (const std::string& field : b.field_order) {
            m.encoders.push_back(b.require("encoder:" + field).params);
            regs.push_back(latent_regressor{b.require("regressor:" + field).params});
        }
        m.decoder = b.require("decoder").params;
        std::vector<vec> fields = mf_e2e_predict(regs, m, theta);
        for (std::size_t i = 0; i < b.field_order.size(); ++i)
            out.emplace_back(b.field_order[i], std::move(fields[i]));
    } else if (b.kind == "staggered") {
        // force-only model; no displacement field of its own
    } else if (b.kind == "ae" || b.kind == "regressor") {
        throw data_error("bundle kind '" + b.kind +
                         "' cannot map parameters to fields (no regressor+decoder chain; train "
                         "'e2e')");
    } else if (b.kind == "pod") {
        throw data_error("bundle kind 'pod' lacks a decoder network; use the pod command");
    } else {
        throw data_error("unknown bundle kind '" + b.kind + "'");
    }
    return out;
}

/// Force prediction, for bundle kinds that carry one.
inline std::optional<vec> predict_force(const surrogate_bundle& b, const vec& theta) {
    if (b.kind == "force-augmented") {
        force_augmented_model m;
        m.phi_encoder = b.require("phi_encoder").params;
        m.f_encoder = b.require("f_encoder").params;
        m.phi_decoder = b.require("phi_decoder").params;
        m.f_decoder = b.require("f_decoder").params;
        latent_regressor p{b.require("regressor").params};
        return fa_e2e_predict(p, m, theta).f;
    }
    if (b.kind == "staggered") {
        latent_regressor p{b.require("regressor").params};
        staggered_force_net t{b.require("force_net").params};
        return staggered_force_predict(t, p, theta);
    }
    return std::nullopt;
}

} // namespace detail

inline std::string cmd_predict(const run_config& config) {
    detail::require_key(config.bundle, "bundle", "predict");
    detail::require_key(config.out, "out", "predict");
    if (!config.theta) throw config_error("predict: required key 'theta' missing");

    const surrogate_bundle b = read_bundle(config.bundle);
    std::optional<surrogate_bundle> morph;
    if (!config.morph_bundle.empty()) {
        morph = read_bundle(config.morph_bundle);
        if (morph->kind != "e2e" || morph->field_order.at(0) != "coords")
            throw data_error("predict: morph_bundle must be an 'e2e' bundle over nodal "
                             "coordinates");
    }

    std::string header = "snapshot";
    for (const std::string& p : b.param_names) header += "," + p;
    std::string csv = header + ",field,entry,value\n";
    std::size_t rows = 0;
    for (std::size_t i = 0; i < config.theta->size(); ++i) {
        const vec& theta = (*config.theta)[i];
        std::vector<std::pair<std::string, vec>> fields = detail::predict_fields(b, theta);
        if (const std::optional<vec> f = detail::predict_force(b, theta))
            fields.emplace_back("force(" + b.field_order.at(0) + ")", *f);
        if (morph) {
            const vec coords =
                e2e_predict(latent_regressor{morph->require("regressor").params},
                            morph->require("decoder").params, vec{theta.at(0)});
            for (const auto& [name, values] : fields)
                if (name == b.field_order.at(0)) {
                    fields.emplace_back("coords", coords);
                    fields.emplace_back("current",
                                        compose_deformed_configuration(coords, values));
                    break;
                }
        }
        std::string prefix = std::to_string(i);
        for (double t : theta) prefix += "," + fmt17(t);
        for (const auto& [name, values] : fields)
            for (std::size_t k = 0; k < values.size(); ++k) {
                csv += prefix + "," + name + "," + std::to_string(k) + "," + fmt17(values[k]) +
                       "\n";
                ++rows;
            }
    }
    write_text_file(config.out, csv);
    return "wrote " + std::to_string(rows) + " prediction rows for " +
           std::to_string(config.theta->size()) + " parameter points -> " + config.out;
}

// ---------------------------------------------------------------------------
// eval

inline std::string cmd_eval(const run_config& config) {
    detail::require_key(config.snapshots, "snapshots", "eval");
    detail::require_key(config.out, "out", "eval");
    std::vector<std::string> bundle_paths = config.bundles;
    if (!config.bundle.empty()) bundle_paths.insert(bundle_paths.begin(), config.bundle);
    if (bundle_paths.empty())
        throw config_error("eval: required key 'bundle' or 'bundles' missing");

    const snapshot_set truth = read_snapshots(config.snapshots);
    std::vector<std::size_t> rows;
    if (config.theta) {
        rows = detail::match_theta_rows(truth, *config.theta);
    } else {
        for (std::size_t s = 0; s < truth.count(); ++s) rows.push_back(s);
    }

    std::vector<std::string> names;
    std::vector<std::vector<snapshot_eval>> per_bundle;
    std::string summary;
    for (const std::string& path : bundle_paths) {
        const surrogate_bundle b = read_bundle(path);
        names.push_back(detail::label_for(path));
        std::vector<snapshot_eval> evs;
        double mean_vn = 0.0, mean_force_mse = 0.0;
        std::size_t force_rows = 0;
        for (std::size_t row : rows) {
            const vec theta = truth.params.row(row);
            std::vector<field_eval> fevals;
            std::vector<std::size_t> counts;
            if (b.kind == "ae") {
                const field_block& f = truth.field(b.field_order.at(0));
                autoencoder ae{b.require("encoder").params, b.require("decoder").params};
                fevals.push_back(eval_field(f, row, ae_reconstruct(ae, f.values.row(row))));
                counts.push_back(f.active.size());
            } else if (b.kind == "pod") {
                const field_block& f = truth.field(b.field_order.at(0));
                const pod_basis_t& basis = *b.basis;
                if (basis.dim() != f.active.size())
                    throw data_error("eval: pod basis dimension " +
                                     std::to_string(basis.dim()) +
                                     " does not match field width " +
                                     std::to_string(f.active.size()));
                const vec truth_row = f.values.row(row);
                const vec a = matvec_t(basis.xi, truth_row);
                fevals.push_back(eval_field(f, row, matvec(basis.xi, a)));
                counts.push_back(f.active.size());
            } else {
                for (auto& [name, values] : detail::predict_fields(b, theta)) {
                    const field_block& f = truth.field(name);
                    fevals.push_back(eval_field(f, row, values));
                    counts.push_back(f.active.size());
                }
            }
            if (truth.force) {
                if (const std::optional<vec> fp = detail::predict_force(b, theta)) {
                    fevals.push_back(eval_force(truth, row, *fp));
                    counts.push_back(truth.force->values.cols());
                    mean_force_mse += fevals.back().mse;
                    ++force_rows;
                }
            }
            snapshot_eval ev = aggregate_eval(row, theta, std::move(fevals), counts);
            mean_vn += ev.vn_mse;
            evs.push_back(std::move(ev));
        }
        mean_vn /= rows.empty() ? 1.0 : static_cast<double>(rows.size());
        summary += names.back() + ": mean vn_mse " + fmt17(mean_vn);
        if (force_rows > 0)
            summary +=
                ", mean force mse " + fmt17(mean_force_mse / static_cast<double>(force_rows));
        summary += "\n";
        per_bundle.push_back(std::move(evs));
    }

    write_text_file(config.out, eval_report_csv(truth.param_names, names, per_bundle));
    write_text_file(config.out + ".nodes.csv", node_error_csv(truth, names, per_bundle));
    return summary + "report -> " + config.out;
}

// ---------------------------------------------------------------------------
// pod

inline std::string cmd_pod(const run_config& config) {
    detail::require_key(config.fom, "fom", "pod");
    detail::require_key(config.snapshots, "snapshots", "pod");
    detail::require_key(config.out, "out", "pod");

    const linear_fom fom = builtin_fom(config.fom);
    const snapshot_set set = read_snapshots(config.snapshots);
    std::size_t total_width = 0;
    for (const field_block& f : set.fields) total_width += f.active.size();
    if (total_width != fom.dim)
        throw data_error("pod: snapshot width " + std::to_string(total_width) +
                         " does not match FOM dimension " + std::to_string(fom.dim));

    // full solution matrix, one column per snapshot, fields stacked by slice
    matrix snaps(fom.dim, set.count());
    {
        std::size_t row0 = 0;
        for (const field_block& f : set.fields) {
            for (std::size_t s = 0; s < set.count(); ++s)
                for (std::size_t k = 0; k < f.active.size(); ++k)
                    snaps(row0 + k, s) = f.values(s, k);
            row0 += f.active.size();
        }
    }

    std::vector<std::size_t> ranks = config.ranks;
    if (ranks.empty())
        for (std::size_t r = 1; r <= std::min({fom.dim, set.count(), std::size_t{32}}); ++r)
            ranks.push_back(r);

    const pod_basis_t full = pod_basis(snaps, std::min(fom.dim, set.count()));
    const bool blocked = fom.field_slices.size() > 1;

    std::string csv = "r,recon_error,tail_sigma,mean_solve_error,max_solve_error,"
                      "max_reduced_residual";
    if (blocked) csv += ",block_mean_error,mono_mean_error";
    csv += "\n";

    for (std::size_t r : ranks) {
        if (r == 0 || r > full.rank())
            throw config_error("pod: rank " + std::to_string(r) + " outside 1.." +
                               std::to_string(full.rank()));
        pod_basis_t basis;
        basis.xi = matrix(full.xi.rows(), r);
        for (std::size_t i = 0; i < full.xi.rows(); ++i)
            for (std::size_t j = 0; j < r; ++j) basis.xi(i, j) = full.xi(i, j);
        basis.singular_values.assign(full.singular_values.begin(),
                                     full.singular_values.begin() + r);

        // reconstruction error vs the optimal-truncation tail
        double recon_sq = 0.0;
        for (std::size_t s = 0; s < set.count(); ++s) {
            vec col(fom.dim);
            for (std::size_t i = 0; i < fom.dim; ++i) col[i] = snaps(i, s);
            const vec a = matvec_t(basis.xi, col);
            const vec back = matvec(basis.xi, a);
            for (std::size_t i = 0; i < fom.dim; ++i) {
                const double d = back[i] - col[i];
                recon_sq += d * d;
            }
        }
        double tail_sq = 0.0;
        for (std::size_t i = r; i < full.singular_values.size(); ++i)
            tail_sq += full.singular_values[i] * full.singular_values[i];

        double err_sum = 0.0, err_max = 0.0, resid_max = 0.0;
        double block_err_sum = 0.0, mono_err_sum = 0.0;
        block_basis bb;
        pod_basis_t mono;
        if (blocked) {
            std::size_t row0 = 0;
            for (const auto& [slice0, width] : fom.field_slices) {
                matrix sub(width, set.count());
                for (std::size_t i = 0; i < width; ++i)
                    for (std::size_t c = 0; c < set.count(); ++c) sub(i, c) = snaps(row0 + i, c);
                bb.blocks.push_back(pod_basis(sub, std::min(r, std::min(width, set.count()))));
                row0 += width;
            }
            const std::size_t mono_r = std::min(bb.total_rank(), full.rank());
            mono.xi = matrix(full.xi.rows(), mono_r);
            for (std::size_t i = 0; i < full.xi.rows(); ++i)
                for (std::size_t jj = 0; jj < mono_r; ++jj) mono.xi(i, jj) = full.xi(i, jj);
            mono.singular_values.assign(full.singular_values.begin(),
                                        full.singular_values.begin() + mono_r);
        }
        matrix K(fom.dim, fom.dim);
        vec rh(fom.dim);
        for (std::size_t s = 0; s < set.count(); ++s) {
            const vec theta = set.params.row(s);
            const vec direct = fom.solve(theta);
            const reduced_solution red = reduce_and_solve(fom, basis, theta);
            double err_sq = 0.0;
            for (std::size_t i = 0; i < fom.dim; ++i) {
                const double d = red.phi_approx[i] - direct[i];
                err_sq += d * d;
            }
            const double err = std::sqrt(err_sq);
            err_sum += err;
            err_max = std::max(err_max, err);

            fom.assemble(theta, K, rh);
            vec resid = matvec(K, red.phi_approx);
            for (std::size_t i = 0; i < fom.dim; ++i) resid[i] -= rh[i];
            resid_max = std::max(resid_max, norm2(matvec_t(basis.xi, resid)));

            if (blocked) {
                const std::vector<vec> per_field = block_reduce_and_solve(fom, bb, theta);
                double bsq = 0.0;
                for (std::size_t fi = 0; fi < per_field.size(); ++fi) {
                    const auto [slice0, width] = fom.field_slices[fi];
                    for (std::size_t i = 0; i < width; ++i) {
                        const double d = per_field[fi][i] - direct[slice0 + i];
                        bsq += d * d;
                    }
                }
                block_err_sum += std::sqrt(bsq);

                const reduced_solution mred = reduce_and_solve(fom, mono, theta);
                double msq = 0.0;
                for (std::size_t i = 0; i < fom.dim; ++i) {
                    const double d = mred.phi_approx[i] - direct[i];
                    msq += d * d;
                }
                mono_err_sum += std::sqrt(msq);
            }
        }
        const double n = static_cast<double>(set.count());
        csv += std::to_string(r) + "," + fmt17(std::sqrt(recon_sq)) + "," +
               fmt17(std::sqrt(tail_sq)) + "," + fmt17(err_sum / n) + "," + fmt17(err_max) +
               "," + fmt17(resid_max);
        if (blocked) csv += "," + fmt17(block_err_sum / n) + "," + fmt17(mono_err_sum / n);
        csv += "\n";
    }
    write_text_file(config.out, csv);
    return "pod sweep over " + std::to_string(ranks.size()) + " ranks on " + fom.name + " -> " +
           config.out;
}

/// Single entry point used by the binary and by tests.
inline std::string run_command(const run_config& config) {
    if (config.command == "generate") return cmd_generate(config);
    if (config.command == "train") return cmd_train(config);
    if (config.command == "predict") return cmd_predict(config);
    if (config.command == "eval") return cmd_eval(config);
    if (config.command == "pod") return cmd_pod(config);
    throw config_error("unknown command '" + config.command +
                       "' (have: generate, train, predict, eval, pod)");
}

} // namespace aemor
