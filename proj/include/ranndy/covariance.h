#pragma once

#include <Eigen/Dense>

namespace ranndy {

// Empirical second-moment matrices of an evaluated dictionary. C00 and C11
// are exactly symmetric by construction and C10 = C01^T.
struct CovarianceSet {
    Eigen::MatrixXd C00;
    Eigen::MatrixXd C01;
    Eigen::MatrixXd C10;
    Eigen::MatrixXd C11;
    Eigen::Index m_samples = 0;
};

// C00 = (1/m) Psi0 Psi0^T, C01 = (1/m) Psi0 Psi1^T, and so on.
CovarianceSet estimate_covariances(const Eigen::MatrixXd& psi0, const Eigen::MatrixXd& psi1);

// Truncated spectral pseudoinverse of a symmetric PSD matrix: eigenvalues
// with lambda > rel_tol * lambda_max are inverted, the rest dropped. A matrix
// with no positive eigenvalues maps to the zero matrix.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M, double rel_tol);

// Truncated whitening transform: T^T M T = I on the retained eigenspace and
// T T^T equals the truncated pseudoinverse of M.
struct Whitening {
    Eigen::MatrixXd T; // N x rank
    Eigen::Index rank = 0;
};

Whitening whiten(const Eigen::MatrixXd& M, double rel_tol);

} // namespace ranndy
