#include "ranndy/spectral.h"

#include <string>

namespace ranndy {

//------------------------------------------------------------------------------
// Helpers
//------------------------------------------------------------------------------
namespace {

// Make the largest-magnitude entry of each column positive. A paired matrix
// (left singular functions) flips with its partner so products are preserved.
void fix_column_signs(Eigen::MatrixXd& W, Eigen::MatrixXd* paired = nullptr)
{
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
        Eigen::Index idx = 0;
        W.col(j).cwiseAbs().maxCoeff(&idx);
        if (W(idx, j) < 0.0) {
            W.col(j) *= -1.0;
            if (paired)
                paired->col(j) *= -1.0;
        }
    }
}

void check_requested_outputs(int n, Eigen::Index rank, const char* which)
{
    if (n < 1)
        throw ConfigError("number of outputs must be positive");
    if (n > rank)
        throw NumericError("requested " + std::to_string(n) + " outputs but " + which
                           + " has effective rank " + std::to_string(rank));
}

} // namespace

//------------------------------------------------------------------------------
// Solvers
//------------------------------------------------------------------------------
SpectralResult solve_self_adjoint(const CovarianceSet& cov, int n, double rel_tol)
{
    const Whitening wh = whiten(cov.C00, rel_tol);
    check_requested_outputs(n, wh.rank, "C00");

    const Eigen::MatrixXd S =
        wh.T.transpose() * (0.5 * (cov.C01 + cov.C10)) * wh.T;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
    if (solver.info() != Eigen::Success)
        throw NumericError("projected eigenproblem failed");

    SpectralResult result;
    result.mode = SolverMode::SelfAdjoint;
    result.values = solver.eigenvalues().tail(n).reverse();
    Eigen::MatrixXd U(wh.rank, n);
    for (int j = 0; j < n; ++j)
        U.col(j) = solver.eigenvectors().col(wh.rank - 1 - j);
    result.W_o = wh.T * U;
    fix_column_signs(result.W_o);
    return result;
}

SpectralResult solve_non_self_adjoint(const CovarianceSet& cov, int n, double rel_tol)
{
    const Whitening wh0 = whiten(cov.C00, rel_tol);
    const Whitening wh1 = whiten(cov.C11, rel_tol);
    check_requested_outputs(n, std::min(wh0.rank, wh1.rank), "C00/C11");

    const Eigen::MatrixXd K = wh0.T.transpose() * cov.C01 * wh1.T;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);

    SpectralResult result;
    result.mode = SolverMode::NonSelfAdjoint;
    result.values = svd.singularValues().head(n);
    result.W_o = wh0.T * svd.matrixU().leftCols(n);
    Eigen::MatrixXd left = wh1.T * svd.matrixV().leftCols(n);
    fix_column_signs(result.W_o, &left);
    result.W_o_left = std::move(left);
    return result;
}

Eigen::MatrixXd evaluate_functions(const FeatureMapSpec& spec, const OmegaVector& omega,
                                   const SpectralResult& result, const Eigen::MatrixXd& X)
{
    if (result.W_o.rows() != spec.output_dim())
        throw NumericError("output layer has " + std::to_string(result.W_o.rows())
                           + " rows but the dictionary produces " + std::to_string(spec.output_dim())
                           + " features");
    return result.W_o.transpose() * evaluate_features(spec, omega, X);
}

Eigen::VectorXd full_spectrum(const CovarianceSet& cov, SolverMode mode, double rel_tol)
{
    if (mode == SolverMode::SelfAdjoint) {
        const Whitening wh = whiten(cov.C00, rel_tol);
        const Eigen::MatrixXd S = wh.T.transpose() * (0.5 * (cov.C01 + cov.C10)) * wh.T;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
        if (solver.info() != Eigen::Success)
            throw NumericError("projected eigenproblem failed");
        return solver.eigenvalues().reverse();
    }
    const Whitening wh0 = whiten(cov.C00, rel_tol);
    const Whitening wh1 = whiten(cov.C11, rel_tol);
    const Eigen::MatrixXd K = wh0.T.transpose() * cov.C01 * wh1.T;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(K);
    return svd.singularValues();
}

//------------------------------------------------------------------------------
// Serialization
//------------------------------------------------------------------------------
void save_spectral_result(const SpectralResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_matrix(result.values.transpose(), dir / "values.bin");
    write_matrix(result.W_o, dir / "W_o.bin");
    if (result.W_o_left)
        write_matrix(*result.W_o_left, dir / "W_o_left.bin");
}

SpectralResult load_spectral_result(const std::filesystem::path& dir)
{
    SpectralResult result;
    const Eigen::MatrixXd values = read_matrix(dir / "values.bin");
    if (values.rows() != 1)
        throw IoError("values.bin must be a 1 x n matrix: " + (dir / "values.bin").string());
    result.values = values.row(0).transpose();
    result.W_o = read_matrix(dir / "W_o.bin");
    const auto left_path = dir / "W_o_left.bin";
    if (std::filesystem::exists(left_path)) {
        result.W_o_left = read_matrix(left_path);
        result.mode = SolverMode::NonSelfAdjoint;
    } else {
        result.mode = SolverMode::SelfAdjoint;
    }
    return result;
}

} // namespace ranndy
