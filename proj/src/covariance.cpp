#include "ranndy/covariance.h"

#include <cmath>
#include <string>

#include "ranndy/errors.h"

namespace ranndy {

//------------------------------------------------------------------------------
// Covariance estimation
//------------------------------------------------------------------------------
namespace {

Eigen::MatrixXd symmetric_gram(const Eigen::MatrixXd& psi, double inv_m)
{
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(psi.rows(), psi.rows());
    C.selfadjointView<Eigen::Lower>().rankUpdate(psi, inv_m);
    C.triangularView<Eigen::StrictlyUpper>() = C.transpose();
    return C;
}

// Symmetrized eigendecomposition shared by pseudo_inverse and whiten.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose_symmetric(const Eigen::MatrixXd& M)
{
    if (M.rows() != M.cols())
        throw ConfigError("expected a square matrix, got " + std::to_string(M.rows()) + "x"
                          + std::to_string(M.cols()));
    const double asymmetry = (M - M.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if (asymmetry > 1e-8 * scale)
        throw NumericError("matrix is not symmetric (max asymmetry " + std::to_string(asymmetry) + ")");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (M + M.transpose()));
    if (solver.info() != Eigen::Success)
        throw NumericError("symmetric eigendecomposition failed");
    return solver;
}

} // namespace

CovarianceSet estimate_covariances(const Eigen::MatrixXd& psi0, const Eigen::MatrixXd& psi1)
{
    if (psi0.rows() != psi1.rows() || psi0.cols() != psi1.cols())
        throw ConfigError("feature matrices must have identical shape, got "
                          + std::to_string(psi0.rows()) + "x" + std::to_string(psi0.cols()) + " and "
                          + std::to_string(psi1.rows()) + "x" + std::to_string(psi1.cols()));
    if (psi0.cols() < 2)
        throw ConfigError("covariance estimation needs at least m = 2 samples");

    const double inv_m = 1.0 / static_cast<double>(psi0.cols());
    CovarianceSet cov;
    cov.C00 = symmetric_gram(psi0, inv_m);
    cov.C01 = inv_m * (psi0 * psi1.transpose());
    cov.C10 = cov.C01.transpose();
    cov.C11 = symmetric_gram(psi1, inv_m);
    cov.m_samples = psi0.cols();
    return cov;
}

//------------------------------------------------------------------------------
// Truncated spectral pseudoinverse and whitening
//------------------------------------------------------------------------------
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M, double rel_tol)
{
    const auto solver = decompose_symmetric(M);
    const Eigen::VectorXd& lambda = solver.eigenvalues(); // ascending
    const double lambda_max = lambda[lambda.size() - 1];
    if (!(lambda_max > 0.0))
        return Eigen::MatrixXd::Zero(M.rows(), M.cols());

    const double threshold = rel_tol * lambda_max;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (lambda[i] > threshold)
            inv[i] = 1.0 / lambda[i];
    return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose();
}

Whitening whiten(const Eigen::MatrixXd& M, double rel_tol)
{
    const auto solver = decompose_symmetric(M);
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const double lambda_max = lambda[lambda.size() - 1];

    Whitening w;
    if (!(lambda_max > 0.0)) {
        w.T = Eigen::MatrixXd::Zero(M.rows(), 0);
        return w;
    }

    const double threshold = rel_tol * lambda_max;
    Eigen::Index first = 0;
    while (first < lambda.size() && !(lambda[first] > threshold))
        ++first;
    w.rank = lambda.size() - first;
    w.T = solver.eigenvectors().rightCols(w.rank)
          * lambda.tail(w.rank).cwiseSqrt().cwiseInverse().asDiagonal();
    return w;
}

} // namespace ranndy
