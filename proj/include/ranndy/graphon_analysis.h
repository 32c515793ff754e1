#pragma once

#include <filesystem>
#include <utility>

#include "ranndy/spectral.h"
#include "ranndy/systems.h"

namespace ranndy {

// Rank-truncated reconstruction of the transition density p and the graphon g
// from dominant eigenpairs, evaluated on a grid of cell midpoints in [0,1].
struct GraphonReconstruction {
    int rank = 0;
    Eigen::VectorXd grid;
    Eigen::MatrixXd p_hat;     // clipped at 0
    Eigen::MatrixXd g_hat;     // clipped to [0, 1]
    Eigen::MatrixXd p_hat_raw; // unclipped values for error metrics
    Eigen::MatrixXd g_hat_raw;
    Eigen::VectorXd pi_hat;
    double Z_hat = 0.0;
};

// Midpoints of `points` equal cells of [0,1]; quadrature weight is 1/points.
Eigen::VectorXd uniform_grid(int points);

// Invariant density from the values of the leading Perron-Frobenius
// eigenfunction on the grid: sign fixed positive, negative quadrature noise
// clipped at 0, then normalized to unit integral. More than 10% of the mass
// negative is rejected as not a density.
Eigen::VectorXd estimate_invariant_density(const Eigen::VectorXd& phi1_on_grid,
                                           const Eigen::VectorXd& grid);

// Histogram estimate of the invariant density from walk samples (cross-check
// for the eigenfunction route).
Eigen::VectorXd estimate_invariant_density(const std::vector<double>& samples,
                                           const Eigen::VectorXd& grid);

// Least-squares fit of the sampled state density in the dictionary span:
// Lebesgue Gram matrix by grid quadrature against empirical feature means.
// Returns the (possibly signed) fitted values on the grid.
Eigen::VectorXd fit_sample_density(const FeatureMapSpec& spec, const OmegaVector& omega,
                                   const Eigen::MatrixXd& samples, const Eigen::VectorXd& grid,
                                   double rel_tol);

// Degree function d(x) = int g(x,y) dy on the grid and Z = int d(x) dx.
std::pair<Eigen::VectorXd, double> graphon_degree(const GraphonSpec& graphon,
                                                  const Eigen::VectorXd& grid);

// p(x,y) = sum_i lambda_i phi_i(x) pi(y) phi_i(y) and
// g(x,y) = Z sum_i lambda_i pi(x) phi_i(x) pi(y) phi_i(y) over i <= rank,
// where phi_on_grid holds the Koopman eigenfunction values (n x grid).
GraphonReconstruction reconstruct_from_values(const Eigen::VectorXd& values,
                                              const Eigen::MatrixXd& phi_on_grid,
                                              const Eigen::VectorXd& pi_hat, double Z_hat,
                                              const Eigen::VectorXd& grid, int rank);

// Convenience wrapper that evaluates the eigenfunctions of `result` on the
// grid through the feature map.
GraphonReconstruction reconstruct(const SpectralResult& result, const FeatureMapSpec& spec,
                                  const OmegaVector& omega, const Eigen::VectorXd& pi_hat,
                                  double Z_hat, const Eigen::VectorXd& grid, int rank);

// 8-bit grayscale binary PGM (P5), min-max normalized with row 0 on top; a
// constant matrix renders mid-gray. The sidecar <path>.txt records min/max.
void heatmap(const Eigen::MatrixXd& M, const std::filesystem::path& path);

double relative_l2_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& reference);

} // namespace ranndy
