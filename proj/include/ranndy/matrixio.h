#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ranndy/errors.h"

namespace ranndy {

enum class Activation { Tanh, Relu, Gaussian };
enum class SolverMode { SelfAdjoint, NonSelfAdjoint };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation activation);
SolverMode mode_from_string(const std::string& name);
std::string to_string(SolverMode mode);

// Paired snapshot matrices: column i of Y is the state one lag time after
// column i of X.
struct SnapshotData {
    Eigen::MatrixXd X;
    Eigen::MatrixXd Y;
    double lag = 1.0;
    std::string system_label;
};

void validate(const SnapshotData& data);

// Run configuration, loaded from a flat JSON object. Unknown keys are
// rejected so hyperparameter typos fail loudly instead of silently falling
// back to a default.
struct RunConfig {
    std::uint64_t seed = 42;
    std::vector<int> layer_sizes = {128};
    Activation activation = Activation::Tanh;
    // Flat order [activation params..., weight scale, bias scale].
    std::vector<double> omega_init = {0.1, 0.1};
    double learning_rate = 0.1;
    int max_epochs = 100;
    double rel_loss_tol = 1e-6;
    double pinv_rel_tol = 1e-8;
    int n_outputs = 5;
    SolverMode mode = SolverMode::SelfAdjoint;
    // 0 = trace over the full projected operator; otherwise sum of the
    // top-n projected values only.
    int trace_top_n = 0;
};

void validate(const RunConfig& config);
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

// Binary matrix format: magic "RNDY", two little-endian uint64 (rows, cols),
// then rows*cols little-endian IEEE-754 doubles in row-major order.
void write_matrix(const Eigen::MatrixXd& M, const std::filesystem::path& path);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

// One matrix row per line, comma separated, shortest decimal rendering that
// parses back to the identical double.
void export_csv(const Eigen::MatrixXd& M, const std::filesystem::path& path);

std::string format_double(double value);

} // namespace ranndy
