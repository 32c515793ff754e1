#pragma once

#include <filesystem>
#include <optional>

#include "ranndy/covariance.h"
#include "ranndy/feature_map.h"

namespace ranndy {

// Closed-form output layer: the eigen/singular values of the projected
// operator together with the dictionary coefficients of the corresponding
// functions. Values are sorted descending; the largest-magnitude entry of
// each W_o column is positive.
struct SpectralResult {
    Eigen::VectorXd values;
    Eigen::MatrixXd W_o;                      // N x n, right functions
    std::optional<Eigen::MatrixXd> W_o_left;  // N x n, non-self-adjoint only
    SolverMode mode = SolverMode::SelfAdjoint;
};

// Eigenpairs of C00^+ C01 via whitening: T = C00^{-1/2} (truncated), then the
// symmetric eigenproblem for T^T ((C01 + C10)/2) T. The returned W_o satisfies
// W_o^T C00 W_o = I.
SpectralResult solve_self_adjoint(const CovarianceSet& cov, int n, double rel_tol);

// Singular triplets of the forward-backward composition: SVD of
// K = T0^T C01 T1 with T0 = C00^{-1/2}, T1 = C11^{-1/2}. values holds the
// singular values s_i, so the composed operator has eigenvalues s_i^2;
// W_o^T C00 W_o = I and W_o_left^T C11 W_o_left = I.
SpectralResult solve_non_self_adjoint(const CovarianceSet& cov, int n, double rel_tol);

// Function values W_o^T psi(X, omega) at the columns of X (n x m).
Eigen::MatrixXd evaluate_functions(const FeatureMapSpec& spec, const OmegaVector& omega,
                                   const SpectralResult& result, const Eigen::MatrixXd& X);

// All retained eigen/singular values (descending), for spectral-gap
// inspection beyond the n requested outputs.
Eigen::VectorXd full_spectrum(const CovarianceSet& cov, SolverMode mode, double rel_tol);

// Binary serialization into a directory: values.bin (1 x n), W_o.bin and,
// in the non-self-adjoint case, W_o_left.bin.
void save_spectral_result(const SpectralResult& result, const std::filesystem::path& dir);
SpectralResult load_spectral_result(const std::filesystem::path& dir);

} // namespace ranndy
