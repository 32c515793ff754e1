#pragma once

#include <cstdint>
#include <vector>

#include "ranndy/spectral.h"

namespace ranndy {

struct ClusterAssignment {
    Eigen::VectorXi labels;  // length m, values in [0, k)
    Eigen::MatrixXd centers; // k x n
    double inertia = 0.0;    // sum of squared distances to assigned centers
};

struct KmeansOptions {
    int max_iterations = 300;
    double shift_tol = 1e-8;
};

// Lloyd iterations with k-means++ seeding, best of `restarts` runs by
// (inertia, restart index). Deterministic for a fixed seed. When
// iteration_inertia is given, the inertia after every assignment pass is
// appended (restarts concatenated in order).
ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                         int restarts = 10, const KmeansOptions& options = {},
                         std::vector<double>* iteration_inertia = nullptr);

// Embeds the columns of X by the right singular functions of a
// non-self-adjoint decomposition and clusters the embedded points.
ClusterAssignment coherent_sets(const FeatureMapSpec& spec, const OmegaVector& omega,
                                const SpectralResult& result, const Eigen::MatrixXd& X, int k,
                                std::uint64_t seed, int restarts = 10);

// Agreement between two partitions, invariant under label permutation
// (1 = identical, ~0 = chance level).
double adjusted_rand_index(const Eigen::VectorXi& a, const Eigen::VectorXi& b);

} // namespace ranndy
