#include "ranndy/feature_map.h"

#include <cmath>

#include "ranndy/rng.h"

namespace ranndy {

//------------------------------------------------------------------------------
// OmegaVector
//------------------------------------------------------------------------------
Eigen::VectorXd OmegaVector::to_flat() const
{
    Eigen::VectorXd flat(size());
    for (std::size_t i = 0; i < activation_params.size(); ++i)
        flat[static_cast<Eigen::Index>(i)] = activation_params[i];
    flat[size() - 2] = weight_scale;
    flat[size() - 1] = bias_scale;
    return flat;
}

OmegaVector OmegaVector::from_flat(const Eigen::VectorXd& flat)
{
    if (flat.size() < 2)
        throw ConfigError("omega vector needs at least weight and bias scales");
    OmegaVector omega;
    omega.activation_params.assign(flat.data(), flat.data() + flat.size() - 2);
    omega.weight_scale = flat[flat.size() - 2];
    omega.bias_scale = flat[flat.size() - 1];
    return omega;
}

OmegaVector OmegaVector::from_config(const RunConfig& config)
{
    Eigen::VectorXd flat(static_cast<Eigen::Index>(config.omega_init.size()));
    for (std::size_t i = 0; i < config.omega_init.size(); ++i)
        flat[static_cast<Eigen::Index>(i)] = config.omega_init[i];
    return from_flat(flat);
}

std::string to_string(const OmegaVector& omega)
{
    std::string s = "[";
    const Eigen::VectorXd flat = omega.to_flat();
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        if (i > 0)
            s += ", ";
        s += format_double(flat[i]);
    }
    return s + "]";
}

void validate_scales(const OmegaVector& omega)
{
    const Eigen::VectorXd flat = omega.to_flat();
    for (Eigen::Index i = 0; i < flat.size(); ++i)
        if (!std::isfinite(flat[i]) || !(flat[i] > 0.0))
            throw ConfigError("omega components must be strictly positive, got " + to_string(omega));
}

//------------------------------------------------------------------------------
// Base parameter sampling
//------------------------------------------------------------------------------
FeatureMapSpec build_feature_map(std::uint64_t seed, const std::vector<int>& layer_sizes,
                                 Activation activation, int input_dim)
{
    if (input_dim < 1)
        throw ConfigError("state dimension d must be positive");
    if (layer_sizes.empty())
        throw ConfigError("layer_sizes must not be empty");

    FeatureMapSpec spec;
    spec.activation = activation;
    spec.seed = seed;
    spec.layer_sizes = layer_sizes;
    spec.input_dim = input_dim;

    std::mt19937_64 gen(seed);
    int fan_in = input_dim;
    for (int size : layer_sizes) {
        if (size < 1)
            throw ConfigError("layer_sizes entries must be positive");
        Eigen::MatrixXd W(size, fan_in);
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c)
                W(r, c) = normal01(gen);
        Eigen::VectorXd b(size);
        for (Eigen::Index r = 0; r < b.size(); ++r)
            b[r] = normal01(gen);
        spec.base_weights.push_back(std::move(W));
        spec.base_biases.push_back(std::move(b));
        fan_in = size;
    }
    return spec;
}

FeatureMapSpec build_feature_map(const RunConfig& config, int input_dim)
{
    return build_feature_map(config.seed, config.layer_sizes, config.activation, input_dim);
}

//------------------------------------------------------------------------------
// Evaluation
//------------------------------------------------------------------------------
Eigen::MatrixXd evaluate_features(const FeatureMapSpec& spec, const OmegaVector& omega,
                                  const Eigen::MatrixXd& X)
{
    if (X.rows() != spec.input_dim)
        throw ConfigError("input has " + std::to_string(X.rows()) + " rows, feature map expects "
                          + std::to_string(spec.input_dim));

    double gamma = 1.0;
    if (spec.activation == Activation::Gaussian) {
        if (omega.activation_params.size() != 1)
            throw ConfigError("gaussian activation needs a single bandwidth parameter");
        gamma = omega.activation_params[0];
    }

    Eigen::MatrixXd h = X;
    for (std::size_t l = 0; l < spec.base_weights.size(); ++l) {
        if (spec.base_weights[l].cols() != h.rows())
            throw NumericError("feature map layer " + std::to_string(l) + ": fan-in "
                               + std::to_string(spec.base_weights[l].cols()) + " does not match input of size "
                               + std::to_string(h.rows()));
        Eigen::MatrixXd z = (omega.weight_scale * spec.base_weights[l]) * h;
        z.colwise() += omega.bias_scale * spec.base_biases[l];
        switch (spec.activation) {
        case Activation::Tanh:
            h = z.array().tanh();
            break;
        case Activation::Relu:
            h = z.array().max(0.0);
            break;
        case Activation::Gaussian:
            h = (-gamma * z.array().square()).exp();
            break;
        }
    }
    return h;
}

} // namespace ranndy
