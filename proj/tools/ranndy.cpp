#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ranndy/coherent.h"
#include "ranndy/graphon_analysis.h"
#include "ranndy/hyperopt.h"
#include "ranndy/rng.h"
#include "ranndy/systems.h"
#include "ranndy/version.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

//------------------------------------------------------------------------------
// Shared helpers
//------------------------------------------------------------------------------
struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    std::string mode_override;
};

void add_common(CLI::App* cmd, CommonOptions& opts)
{
    cmd->add_option("--config", opts.config_path, "Run configuration (flat JSON)");
    cmd->add_option("--out", opts.out_dir, "Output directory")->required();
    cmd->add_option("--seed", opts.seed_override, "Override the config seed");
    cmd->add_option("--mode", opts.mode_override, "Override the solver mode")
        ->check(CLI::IsMember({"self_adjoint", "non_self_adjoint"}));
}

ranndy::RunConfig resolve_config(const CommonOptions& opts)
{
    ranndy::RunConfig config =
        opts.config_path.empty() ? ranndy::RunConfig{} : ranndy::load_run_config(opts.config_path);
    if (opts.seed_override)
        config.seed = *opts.seed_override;
    if (!opts.mode_override.empty())
        config.mode = ranndy::mode_from_string(opts.mode_override);
    ranndy::validate(config);
    return config;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ranndy::IoError("cannot open file for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw ranndy::IoError("write failed: " + path.string());
}

// Provenance record written next to every output set.
void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const std::vector<std::string>& argv, const CommonOptions& opts,
                    std::uint64_t seed, const json& inputs, const std::vector<std::string>& outputs,
                    double elapsed_seconds, const json& extra = json::object())
{
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["argv"] = argv;
    manifest["config_path"] = opts.config_path;
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    manifest["seed"] = seed;
    manifest["elapsed_seconds"] = elapsed_seconds;
    manifest["version"] = ranndy::version;
    if (!extra.empty())
        manifest["parameters"] = extra;
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_snapshot_files(const ranndy::SnapshotData& data, const fs::path& out_dir)
{
    ranndy::write_matrix(data.X, out_dir / "X.bin");
    ranndy::write_matrix(data.Y, out_dir / "Y.bin");
    ranndy::export_csv(data.X, out_dir / "X.csv");
    ranndy::export_csv(data.Y, out_dir / "Y.csv");

    json meta;
    meta["system"] = data.system_label;
    meta["lag"] = data.lag;
    meta["rows"] = data.X.rows();
    meta["cols"] = data.X.cols();
    write_text(out_dir / "data.json", meta.dump(2) + "\n");
}

ranndy::SnapshotData load_snapshot_dir(const fs::path& dir)
{
    ranndy::SnapshotData data;
    data.X = ranndy::read_matrix(dir / "X.bin");
    data.Y = ranndy::read_matrix(dir / "Y.bin");
    const fs::path meta_path = dir / "data.json";
    if (fs::exists(meta_path)) {
        std::ifstream in(meta_path);
        json meta = json::parse(in, nullptr, true);
        data.system_label = meta.value("system", std::string{});
        data.lag = meta.value("lag", 1.0);
    }
    ranndy::validate(data);
    return data;
}

void write_omega_json(const fs::path& path, const ranndy::OmegaVector& omega,
                      const ranndy::RunConfig& config, const json& extra = json::object())
{
    json j;
    const Eigen::VectorXd flat = omega.to_flat();
    j["omega"] = std::vector<double>(flat.data(), flat.data() + flat.size());
    j["activation"] = ranndy::to_string(config.activation);
    j["mode"] = ranndy::to_string(config.mode);
    j["seed"] = config.seed;
    j["layer_sizes"] = config.layer_sizes;
    for (const auto& [key, value] : extra.items())
        j[key] = value;
    write_text(path, j.dump(2) + "\n");
}

ranndy::OmegaVector read_omega_json(const fs::path& path, const ranndy::RunConfig& config)
{
    std::ifstream in(path);
    if (!in)
        throw ranndy::IoError("cannot open omega file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ranndy::ConfigError("omega file is not valid JSON: " + std::string(e.what()));
    }
    const auto flat_vec = j.at("omega").get<std::vector<double>>();
    if (j.contains("seed") && j["seed"].get<std::uint64_t>() != config.seed)
        throw ranndy::ConfigError("omega file was trained with a different seed than the config");
    if (j.contains("layer_sizes") && j["layer_sizes"].get<std::vector<int>>() != config.layer_sizes)
        throw ranndy::ConfigError("omega file was trained with different layer sizes than the config");
    Eigen::VectorXd flat(static_cast<Eigen::Index>(flat_vec.size()));
    for (std::size_t i = 0; i < flat_vec.size(); ++i)
        flat[static_cast<Eigen::Index>(i)] = flat_vec[i];
    return ranndy::OmegaVector::from_flat(flat);
}

std::string csv_field(double v) { return ranndy::format_double(v); }

//------------------------------------------------------------------------------
// generate
//------------------------------------------------------------------------------
struct GenerateOptions {
    std::string system;
    int steps = 100000;
    double x0 = 0.5;
    int burn_in = 100;
    int grid_resolution = 1000;
    int m = -1; // per-system default resolved below
    double t0 = 0.0;
    double t1 = 40.0;
    int n_saves = 2;
    double dt = 1e-3;
    double lag = -1.0;
    double x0_range = 1.5;
    ranndy::BickleyConstants bickley; // step default 0.01, see systems.h
};

json run_generate(const GenerateOptions& gen, const ranndy::RunConfig& config,
                  const fs::path& out_dir)
{
    json params;
    params["system"] = gen.system;

    if (gen.system == "graphon") {
        ranndy::GraphonSpec graphon = ranndy::preset_graphon();
        graphon.grid_resolution = gen.grid_resolution;
        const ranndy::SnapshotData data =
            ranndy::graphon_snapshots(graphon, gen.steps, gen.x0, config.seed, gen.burn_in);
        write_snapshot_files(data, out_dir);
        params["steps"] = gen.steps;
        params["x0"] = gen.x0;
        params["burn_in"] = gen.burn_in;
        params["grid_resolution"] = gen.grid_resolution;
        return params;
    }

    if (gen.system == "bickley") {
        const int m = gen.m > 0 ? gen.m : 5000;
        const auto saves =
            ranndy::bickley_trajectories(m, gen.t0, gen.t1, std::max(2, gen.n_saves), config.seed,
                                         gen.bickley);
        ranndy::SnapshotData data;
        data.X = saves.front();
        data.Y = saves.back();
        data.lag = gen.t1 - gen.t0;
        data.system_label = "bickley";
        ranndy::validate(data);
        write_snapshot_files(data, out_dir);
        for (std::size_t s = 1; s + 1 < saves.size(); ++s)
            ranndy::write_matrix(saves[s], out_dir / ("snapshot_" + std::to_string(s) + ".bin"));
        params["m"] = m;
        params["t0"] = gen.t0;
        params["t1"] = gen.t1;
        params["n_saves"] = std::max(2, gen.n_saves);
        params["U0"] = gen.bickley.U0;
        params["L"] = gen.bickley.L;
        params["r0"] = gen.bickley.r0;
        params["amplitude"] = gen.bickley.amplitude;
        params["phase_speed_ratio"] = gen.bickley.phase_speed_ratio;
        params["rk4_step"] = gen.bickley.step;
        return params;
    }

    if (gen.system == "ou" || gen.system == "double_well") {
        ranndy::SdeSpec sde =
            gen.system == "ou" ? ranndy::preset_ou() : ranndy::preset_double_well();
        sde.dt = gen.dt;
        if (gen.lag > 0.0)
            sde.lag = gen.lag;
        const int m = gen.m > 0 ? gen.m : (gen.system == "ou" ? 1000 : 10000);

        ranndy::InitialSampler sampler;
        if (gen.system == "ou")
            sampler = [](std::mt19937_64& rng) {
                return Eigen::VectorXd::Constant(1, ranndy::normal01(rng));
            };
        else {
            const double range = gen.x0_range;
            sampler = [range](std::mt19937_64& rng) {
                return Eigen::VectorXd::Constant(1, range * (2.0 * ranndy::uniform01(rng) - 1.0));
            };
        }

        ranndy::SnapshotData data = ranndy::euler_maruyama(sde, m, sampler, config.seed);
        data.system_label = gen.system;
        write_snapshot_files(data, out_dir);
        params["m"] = m;
        params["dt"] = sde.dt;
        params["lag"] = sde.lag;
        if (gen.system == "double_well")
            params["x0_range"] = gen.x0_range;
        return params;
    }

    throw ranndy::ConfigError("unknown system '" + gen.system
                              + "' (expected graphon, bickley, ou or double_well)");
}

//------------------------------------------------------------------------------
// train
//------------------------------------------------------------------------------
json run_train(const fs::path& data_dir, const ranndy::RunConfig& config, const fs::path& out_dir)
{
    const ranndy::SnapshotData data = load_snapshot_dir(data_dir);
    const ranndy::FeatureMapSpec spec =
        ranndy::build_feature_map(config, static_cast<int>(data.X.rows()));

    const ranndy::TrainingTrace trace = ranndy::optimize(spec, config, data);
    ranndy::export_trace_csv(trace, out_dir / "trace.csv");

    json extra;
    extra["loss"] = trace.epochs.back().loss;
    extra["epochs"] = trace.epochs.size();
    extra["converged"] = trace.converged;
    write_omega_json(out_dir / "omega_final.json", trace.final_omega, config, extra);

    json params;
    params["epochs"] = trace.epochs.size();
    params["converged"] = trace.converged;
    params["final_loss"] = trace.epochs.back().loss;
    return params;
}

//------------------------------------------------------------------------------
// decompose
//------------------------------------------------------------------------------
json run_decompose(const fs::path& data_dir, const std::string& omega_path,
                   const std::vector<double>& omega_values, const ranndy::RunConfig& config,
                   const fs::path& out_dir)
{
    const ranndy::SnapshotData data = load_snapshot_dir(data_dir);
    const ranndy::FeatureMapSpec spec =
        ranndy::build_feature_map(config, static_cast<int>(data.X.rows()));

    ranndy::OmegaVector omega;
    if (!omega_path.empty()) {
        omega = read_omega_json(omega_path, config);
    } else if (!omega_values.empty()) {
        Eigen::VectorXd flat(static_cast<Eigen::Index>(omega_values.size()));
        for (std::size_t i = 0; i < omega_values.size(); ++i)
            flat[static_cast<Eigen::Index>(i)] = omega_values[i];
        omega = ranndy::OmegaVector::from_flat(flat);
    } else {
        omega = ranndy::OmegaVector::from_config(config);
    }
    ranndy::validate_scales(omega);

    const Eigen::MatrixXd psi0 = ranndy::evaluate_features(spec, omega, data.X);
    const Eigen::MatrixXd psi1 = ranndy::evaluate_features(spec, omega, data.Y);
    const ranndy::CovarianceSet cov = ranndy::estimate_covariances(psi0, psi1);

    const ranndy::SpectralResult result =
        config.mode == ranndy::SolverMode::SelfAdjoint
            ? ranndy::solve_self_adjoint(cov, config.n_outputs, config.pinv_rel_tol)
            : ranndy::solve_non_self_adjoint(cov, config.n_outputs, config.pinv_rel_tol);
    const Eigen::VectorXd spectrum = ranndy::full_spectrum(cov, config.mode, config.pinv_rel_tol);

    ranndy::save_spectral_result(result, out_dir);

    std::string values_csv = "index,value\n";
    for (Eigen::Index i = 0; i < result.values.size(); ++i)
        values_csv += std::to_string(i + 1) + "," + csv_field(result.values[i]) + "\n";
    write_text(out_dir / "values.csv", values_csv);

    std::string spectrum_csv = "index,value\n";
    for (Eigen::Index i = 0; i < spectrum.size(); ++i)
        spectrum_csv += std::to_string(i + 1) + "," + csv_field(spectrum[i]) + "\n";
    write_text(out_dir / "spectrum.csv", spectrum_csv);

    // Eigen/singular function values at the training snapshots.
    const Eigen::MatrixXd functions = result.W_o.transpose() * psi0;
    ranndy::write_matrix(functions, out_dir / "eigenfunctions.bin");
    std::string fun_csv;
    for (Eigen::Index r = 0; r < data.X.rows(); ++r)
        fun_csv += "x_" + std::to_string(r + 1) + ",";
    for (Eigen::Index i = 0; i < functions.rows(); ++i)
        fun_csv += "f_" + std::to_string(i + 1) + (i + 1 < functions.rows() ? "," : "\n");
    for (Eigen::Index c = 0; c < functions.cols(); ++c) {
        for (Eigen::Index r = 0; r < data.X.rows(); ++r)
            fun_csv += csv_field(data.X(r, c)) + ",";
        for (Eigen::Index i = 0; i < functions.rows(); ++i)
            fun_csv += csv_field(functions(i, c)) + (i + 1 < functions.rows() ? "," : "\n");
    }
    write_text(out_dir / "eigenfunctions.csv", fun_csv);

    write_omega_json(out_dir / "omega_used.json", omega, config);

    json params;
    params["n_outputs"] = config.n_outputs;
    params["mode"] = ranndy::to_string(config.mode);
    params["retained_rank"] = spectrum.size();
    return params;
}

//------------------------------------------------------------------------------
// reconstruct
//------------------------------------------------------------------------------
json run_reconstruct(const fs::path& data_dir, const fs::path& decomp_dir,
                     const ranndy::RunConfig& config, int rank, int grid_points,
                     const fs::path& out_dir)
{
    const ranndy::SnapshotData data = load_snapshot_dir(data_dir);
    if (!data.system_label.empty() && data.system_label != "graphon")
        throw ranndy::ConfigError("reconstruct expects graphon walk data, got system '"
                                  + data.system_label + "'");
    if (rank < 0)
        throw ranndy::ConfigError("rank must be nonnegative");

    const ranndy::FeatureMapSpec spec =
        ranndy::build_feature_map(config, static_cast<int>(data.X.rows()));
    const ranndy::OmegaVector omega = read_omega_json(decomp_dir / "omega_used.json", config);
    const ranndy::SpectralResult result = ranndy::load_spectral_result(decomp_dir);

    const Eigen::VectorXd grid = ranndy::uniform_grid(grid_points);
    const Eigen::VectorXd phi1 =
        ranndy::fit_sample_density(spec, omega, data.X, grid, config.pinv_rel_tol);
    const Eigen::VectorXd pi_hat = ranndy::estimate_invariant_density(phi1, grid);

    const ranndy::GraphonSpec graphon = ranndy::preset_graphon();
    const auto [degree, Z_hat] = ranndy::graphon_degree(graphon, grid);

    const ranndy::GraphonReconstruction rec =
        ranndy::reconstruct(result, spec, omega, pi_hat, Z_hat, grid, rank);

    ranndy::heatmap(rec.g_hat, out_dir / "g_hat.pgm");
    ranndy::heatmap(rec.p_hat, out_dir / "p_hat.pgm");

    std::string pi_csv = "x,pi\n";
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        pi_csv += csv_field(grid[i]) + "," + csv_field(pi_hat[i]) + "\n";
    write_text(out_dir / "pi_hat.csv", pi_csv);

    // Analytic preset references for the error norms.
    Eigen::MatrixXd g_ref(grid.size(), grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        for (Eigen::Index j = 0; j < grid.size(); ++j)
            g_ref(i, j) = graphon.g(grid[i], grid[j]);
    const Eigen::MatrixXd p_ref = degree.cwiseInverse().asDiagonal() * g_ref;

    const double g_err = ranndy::relative_l2_error(rec.g_hat_raw, g_ref);
    const double p_err = ranndy::relative_l2_error(rec.p_hat_raw, p_ref);
    write_text(out_dir / "error_norms.csv",
               "metric,value\ng_rel_l2," + csv_field(g_err) + "\np_rel_l2," + csv_field(p_err)
                   + "\n");

    json params;
    params["rank"] = rank;
    params["grid_points"] = grid_points;
    params["Z_hat"] = Z_hat;
    params["g_rel_l2"] = g_err;
    params["p_rel_l2"] = p_err;
    return params;
}

//------------------------------------------------------------------------------
// cluster
//------------------------------------------------------------------------------
json run_cluster(const fs::path& data_dir, const fs::path& decomp_dir,
                 const ranndy::RunConfig& config, int k, int restarts, const fs::path& out_dir)
{
    const ranndy::SnapshotData data = load_snapshot_dir(data_dir);
    const ranndy::FeatureMapSpec spec =
        ranndy::build_feature_map(config, static_cast<int>(data.X.rows()));
    const ranndy::OmegaVector omega = read_omega_json(decomp_dir / "omega_used.json", config);
    const ranndy::SpectralResult result = ranndy::load_spectral_result(decomp_dir);

    const ranndy::ClusterAssignment assignment =
        ranndy::coherent_sets(spec, omega, result, data.X, k, config.seed, restarts);

    std::string csv;
    if (data.X.rows() == 2)
        csv = "x,y,label\n";
    else {
        for (Eigen::Index r = 0; r < data.X.rows(); ++r)
            csv += "x_" + std::to_string(r + 1) + ",";
        csv += "label\n";
    }
    for (Eigen::Index i = 0; i < assignment.labels.size(); ++i) {
        for (Eigen::Index r = 0; r < data.X.rows(); ++r)
            csv += csv_field(data.X(r, i)) + ",";
        csv += std::to_string(assignment.labels[i]) + "\n";
    }
    write_text(out_dir / "clusters.csv", csv);

    json params;
    params["k"] = k;
    params["restarts"] = restarts;
    params["inertia"] = assignment.inertia;
    return params;
}

} // namespace

//------------------------------------------------------------------------------
// Entry point
//------------------------------------------------------------------------------
int main(int argc, char** argv)
{
    CLI::App app{"Transfer operator decompositions from randomized feature maps"};
    app.require_subcommand(1);

    CommonOptions generate_opts, train_opts, decompose_opts, reconstruct_opts, cluster_opts;
    GenerateOptions gen;

    CLI::App* generate_cmd =
        app.add_subcommand("generate", "Generate benchmark snapshot data");
    generate_cmd->add_option("system", gen.system, "graphon, bickley, ou or double_well")
        ->required();
    add_common(generate_cmd, generate_opts);
    generate_cmd->add_option("--steps", gen.steps, "Graphon walk length");
    generate_cmd->add_option("--x0", gen.x0, "Graphon walk start in [0,1]");
    generate_cmd->add_option("--burn-in", gen.burn_in, "Discarded initial transitions");
    generate_cmd->add_option("--grid-resolution", gen.grid_resolution,
                             "Graphon sampling grid cells");
    generate_cmd->add_option("--m", gen.m, "Number of snapshot pairs / particles");
    generate_cmd->add_option("--t0", gen.t0, "Bickley start time");
    generate_cmd->add_option("--t1", gen.t1, "Bickley end time");
    generate_cmd->add_option("--n-saves", gen.n_saves, "Bickley intermediate snapshots");
    generate_cmd->add_option("--rk4-step", gen.bickley.step, "Bickley nominal RK4 step");
    generate_cmd->add_option("--u0", gen.bickley.U0, "Bickley background speed");
    generate_cmd->add_option("--jet-l", gen.bickley.L, "Bickley length scale");
    generate_cmd->add_option("--jet-r0", gen.bickley.r0, "Bickley wavenumber scale");
    generate_cmd->add_option("--amplitudes", gen.bickley.amplitude, "Bickley wave amplitudes");
    generate_cmd->add_option("--phase-speeds", gen.bickley.phase_speed_ratio,
                             "Bickley phase speeds as fractions of U0");
    generate_cmd->add_option("--dt", gen.dt, "SDE integrator step");
    generate_cmd->add_option("--lag", gen.lag, "SDE lag time");
    generate_cmd->add_option("--x0-range", gen.x0_range, "Double-well initial range");

    std::string train_data;
    CLI::App* train_cmd = app.add_subcommand("train", "Optimize the scale parameters omega");
    train_cmd->add_option("--data", train_data, "Directory with X.bin/Y.bin")->required();
    add_common(train_cmd, train_opts);

    std::string decomp_data, decomp_omega;
    std::vector<double> decomp_omega_values;
    CLI::App* decompose_cmd =
        app.add_subcommand("decompose", "Solve for eigen/singular values and functions");
    decompose_cmd->add_option("--data", decomp_data, "Directory with X.bin/Y.bin")->required();
    decompose_cmd->add_option("--omega", decomp_omega, "omega_final.json from train");
    decompose_cmd->add_option("--omega-values", decomp_omega_values,
                              "Explicit omega components (flat order)");
    add_common(decompose_cmd, decompose_opts);

    std::string rec_data, rec_decomp;
    int rec_rank = 3, rec_grid = 200;
    CLI::App* reconstruct_cmd =
        app.add_subcommand("reconstruct", "Reconstruct the graphon and transition density");
    reconstruct_cmd->add_option("--data", rec_data, "Graphon walk data directory")->required();
    reconstruct_cmd->add_option("--decomp", rec_decomp, "Decomposition directory")->required();
    reconstruct_cmd->add_option("--rank", rec_rank, "Reconstruction rank");
    reconstruct_cmd->add_option("--grid-points", rec_grid, "Evaluation grid size");
    add_common(reconstruct_cmd, reconstruct_opts);

    std::string cluster_data, cluster_decomp;
    int cluster_k = 9, cluster_restarts = 10;
    CLI::App* cluster_cmd =
        app.add_subcommand("cluster", "Cluster singular-function embeddings into coherent sets");
    cluster_cmd->add_option("--data", cluster_data, "Snapshot data directory")->required();
    cluster_cmd->add_option("--decomp", cluster_decomp, "Decomposition directory")->required();
    cluster_cmd->add_option("--k", cluster_k, "Number of clusters");
    cluster_cmd->add_option("--restarts", cluster_restarts, "k-means restarts");
    add_common(cluster_cmd, cluster_opts);

    CLI11_PARSE(app, argc, argv);

    const std::vector<std::string> argv_record(argv, argv + argc);
    try {
        const auto start = std::chrono::steady_clock::now();
        const auto elapsed = [&] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        };

        if (generate_cmd->parsed()) {
            const ranndy::RunConfig config = resolve_config(generate_opts);
            fs::create_directories(generate_opts.out_dir);
            const json params = run_generate(gen, config, generate_opts.out_dir);
            write_manifest(generate_opts.out_dir, "generate", argv_record, generate_opts,
                           config.seed, json::object(),
                           {"X.bin", "Y.bin", "X.csv", "Y.csv", "data.json"}, elapsed(), params);
        } else if (train_cmd->parsed()) {
            const ranndy::RunConfig config = resolve_config(train_opts);
            fs::create_directories(train_opts.out_dir);
            const json params = run_train(train_data, config, train_opts.out_dir);
            write_manifest(train_opts.out_dir, "train", argv_record, train_opts, config.seed,
                           json{{"data", train_data}}, {"trace.csv", "omega_final.json"},
                           elapsed(), params);
        } else if (decompose_cmd->parsed()) {
            const ranndy::RunConfig config = resolve_config(decompose_opts);
            fs::create_directories(decompose_opts.out_dir);
            const json params = run_decompose(decomp_data, decomp_omega, decomp_omega_values,
                                              config, decompose_opts.out_dir);
            std::vector<std::string> outputs = {"values.bin",       "values.csv",
                                                "spectrum.csv",     "W_o.bin",
                                                "eigenfunctions.bin", "eigenfunctions.csv",
                                                "omega_used.json"};
            if (config.mode == ranndy::SolverMode::NonSelfAdjoint)
                outputs.push_back("W_o_left.bin");
            write_manifest(decompose_opts.out_dir, "decompose", argv_record, decompose_opts,
                           config.seed, json{{"data", decomp_data}, {"omega", decomp_omega}},
                           outputs, elapsed(), params);
        } else if (reconstruct_cmd->parsed()) {
            const ranndy::RunConfig config = resolve_config(reconstruct_opts);
            fs::create_directories(reconstruct_opts.out_dir);
            const json params = run_reconstruct(rec_data, rec_decomp, config, rec_rank, rec_grid,
                                                reconstruct_opts.out_dir);
            write_manifest(reconstruct_opts.out_dir, "reconstruct", argv_record, reconstruct_opts,
                           config.seed, json{{"data", rec_data}, {"decomp", rec_decomp}},
                           {"g_hat.pgm", "g_hat.pgm.txt", "p_hat.pgm", "p_hat.pgm.txt",
                            "pi_hat.csv", "error_norms.csv"},
                           elapsed(), params);
        } else if (cluster_cmd->parsed()) {
            const ranndy::RunConfig config = resolve_config(cluster_opts);
            fs::create_directories(cluster_opts.out_dir);
            const json params = run_cluster(cluster_data, cluster_decomp, config, cluster_k,
                                            cluster_restarts, cluster_opts.out_dir);
            write_manifest(cluster_opts.out_dir, "cluster", argv_record, cluster_opts, config.seed,
                           json{{"data", cluster_data}, {"decomp", cluster_decomp}},
                           {"clusters.csv"}, elapsed(), params);
        }
    } catch (const ranndy::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ranndy::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const ranndy::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
