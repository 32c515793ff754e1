#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "ranndy/matrixio.h"

namespace ranndy {

// Tunable scale parameters of the parametric dictionary. Flat order is
// [activation params..., weight scale, bias scale].
struct OmegaVector {
    double weight_scale = 1.0; // multiplies every base weight matrix
    double bias_scale = 1.0;   // multiplies every base bias vector
    std::vector<double> activation_params; // gaussian: single bandwidth gamma

    Eigen::Index size() const { return static_cast<Eigen::Index>(activation_params.size()) + 2; }
    Eigen::VectorXd to_flat() const;
    static OmegaVector from_flat(const Eigen::VectorXd& flat);
    static OmegaVector from_config(const RunConfig& config);
};

std::string to_string(const OmegaVector& omega);

// Throws unless every component is finite and strictly positive.
void validate_scales(const OmegaVector& omega);

// Fixed random base parameters of the dictionary. The base is a pure function
// of (seed, layer_sizes, input_dim); the scales in OmegaVector are applied at
// evaluation time, so the evaluated features are a smooth deterministic
// function of omega.
struct FeatureMapSpec {
    std::vector<Eigen::MatrixXd> base_weights; // layer l: layer_sizes[l] x fan_in_l
    std::vector<Eigen::VectorXd> base_biases;  // layer l: layer_sizes[l]
    Activation activation = Activation::Tanh;
    std::uint64_t seed = 0;
    std::vector<int> layer_sizes;
    int input_dim = 0;

    int output_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.back(); }
};

// Base parameters are standard normal draws from a single mt19937_64 stream
// (see rng.h), consumed in the order: layer 0 weights row-major, layer 0
// biases, layer 1 weights, layer 1 biases, ...
FeatureMapSpec build_feature_map(std::uint64_t seed, const std::vector<int>& layer_sizes,
                                 Activation activation, int input_dim);
FeatureMapSpec build_feature_map(const RunConfig& config, int input_dim);

// Psi(omega) in R^{N x m}: column i is psi(x_i, omega), the layer-wise
// composition h <- sigma(weight_scale * W * h + bias_scale * b).
Eigen::MatrixXd evaluate_features(const FeatureMapSpec& spec, const OmegaVector& omega,
                                  const Eigen::MatrixXd& X);

} // namespace ranndy
