#include <doctest.h>

#include "ranndy/spectral.h"
#include "ranndy/systems.h"
#include "test_support.h"

using namespace ranndy;
using test_support::TempDir;
using test_support::random_matrix;

namespace {

CovarianceSet diagonal_cov(const Eigen::VectorXd& c00, const Eigen::VectorXd& c01,
                           const Eigen::VectorXd& c11)
{
    CovarianceSet cov;
    cov.C00 = c00.asDiagonal();
    cov.C01 = c01.asDiagonal();
    cov.C10 = cov.C01.transpose();
    cov.C11 = c11.asDiagonal();
    cov.m_samples = 100;
    return cov;
}

} // namespace

TEST_CASE("self-adjoint: zero lag makes the projected operator a projection")
{
    const Eigen::MatrixXd psi = random_matrix(6, 40, 2);
    const CovarianceSet cov = estimate_covariances(psi, psi);
    const SpectralResult result = solve_self_adjoint(cov, 6, 1e-10);
    CHECK((result.values.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("self-adjoint: diagonal case by inspection")
{
    const CovarianceSet cov = diagonal_cov(Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.9, 0.5),
                                           Eigen::Vector2d(1.0, 1.0));
    const SpectralResult result = solve_self_adjoint(cov, 2, 1e-10);
    CHECK(result.values[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(result.values[1] == doctest::Approx(0.5).epsilon(1e-12));
    // signed identity columns
    CHECK(result.W_o(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.W_o(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(result.W_o(1, 0)) < 1e-12);
    CHECK(std::abs(result.W_o(0, 1)) < 1e-12);
}

TEST_CASE("self-adjoint: matches a dense generalized eigensolve")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Eigen::Index N = 4 + seed;
        const Eigen::MatrixXd psi0 = random_matrix(N, 50, 100 + seed);
        const Eigen::MatrixXd psi1 = random_matrix(N, 50, 200 + seed);
        const CovarianceSet cov = estimate_covariances(psi0, psi1);

        const SpectralResult result = solve_self_adjoint(cov, static_cast<int>(N), 1e-12);

        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(
            0.5 * (cov.C01 + cov.C10), cov.C00);
        const Eigen::VectorXd expected = dense.eigenvalues().reverse();
        CHECK((result.values - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("self-adjoint: C00-orthonormality and eigenvalue residual")
{
    const Eigen::MatrixXd psi0 = random_matrix(6, 60, 7);
    const Eigen::MatrixXd psi1 = random_matrix(6, 60, 8);
    CovarianceSet cov = estimate_covariances(psi0, psi1);
    cov.C01 = 0.5 * (cov.C01 + cov.C10); // reversible estimate
    cov.C10 = cov.C01;

    const SpectralResult result = solve_self_adjoint(cov, 6, 1e-12);
    const Eigen::MatrixXd gram = result.W_o.transpose() * cov.C00 * result.W_o;
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-6);

    const Eigen::MatrixXd residual =
        cov.C01 * result.W_o - cov.C00 * result.W_o * result.values.asDiagonal();
    CHECK(residual.norm() <= 1e-7 * cov.C01.norm());
}

TEST_CASE("self-adjoint: values sorted, sign convention, rank error")
{
    const Eigen::MatrixXd psi0 = random_matrix(5, 30, 17);
    const Eigen::MatrixXd psi1 = random_matrix(5, 30, 18);
    const CovarianceSet cov = estimate_covariances(psi0, psi1);
    const SpectralResult result = solve_self_adjoint(cov, 5, 1e-10);

    for (Eigen::Index i = 1; i < result.values.size(); ++i)
        CHECK(result.values[i - 1] >= result.values[i]);
    for (Eigen::Index j = 0; j < result.W_o.cols(); ++j) {
        Eigen::Index idx = 0;
        result.W_o.col(j).cwiseAbs().maxCoeff(&idx);
        CHECK(result.W_o(idx, j) > 0.0);
    }

    // rank-deficient: features live in a 3-dimensional span
    const Eigen::MatrixXd mixer = random_matrix(5, 3, 19);
    const Eigen::MatrixXd low0 = mixer * random_matrix(3, 30, 20);
    const Eigen::MatrixXd low1 = mixer * random_matrix(3, 30, 21);
    const CovarianceSet low_cov = estimate_covariances(low0, low1);
    CHECK_THROWS_WITH_AS(solve_self_adjoint(low_cov, 5, 1e-8), doctest::Contains("rank"),
                         NumericError);
}

TEST_CASE("non-self-adjoint: diagonal case and zero lag")
{
    const CovarianceSet cov = diagonal_cov(Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.8, 0.3),
                                           Eigen::Vector2d(1.0, 1.0));
    const SpectralResult result = solve_non_self_adjoint(cov, 2, 1e-10);
    CHECK(result.values[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(result.values[1] == doctest::Approx(0.3).epsilon(1e-12));
    REQUIRE(result.W_o_left.has_value());

    const Eigen::MatrixXd psi = random_matrix(5, 40, 23);
    const CovarianceSet zero_lag = estimate_covariances(psi, psi);
    const SpectralResult identity = solve_non_self_adjoint(zero_lag, 5, 1e-10);
    CHECK((identity.values.array() - 1.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("non-self-adjoint: eigenproblem of the forward-backward matrix")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Eigen::Index N = 4 + seed;
        const Eigen::MatrixXd psi0 = random_matrix(N, 60, 300 + seed);
        const Eigen::MatrixXd psi1 = random_matrix(N, 60, 400 + seed);
        const CovarianceSet cov = estimate_covariances(psi0, psi1);

        const SpectralResult result = solve_non_self_adjoint(cov, static_cast<int>(N), 1e-12);

        // dense nonsymmetric eigensolve of C00^+ C01 C11^+ C10
        const Eigen::MatrixXd A = pseudo_inverse(cov.C00, 1e-12) * cov.C01
                                  * pseudo_inverse(cov.C11, 1e-12) * cov.C10;
        Eigen::EigenSolver<Eigen::MatrixXd> dense(A);
        Eigen::VectorXd dense_values = dense.eigenvalues().real();
        std::sort(dense_values.data(), dense_values.data() + dense_values.size(),
                  std::greater<double>());

        const Eigen::VectorXd squared = result.values.array().square();
        CHECK((squared - dense_values.head(N)).cwiseAbs().maxCoeff() < 1e-7);

        // W_o columns are eigenvectors of the forward-backward matrix
        const Eigen::MatrixXd residual = A * result.W_o - result.W_o * squared.asDiagonal();
        CHECK(residual.norm() < 1e-7 * std::max(1.0, A.norm()));

        // both orthonormality constraints
        CHECK((result.W_o.transpose() * cov.C00 * result.W_o
               - Eigen::MatrixXd::Identity(N, N))
                  .norm()
              < 1e-6);
        CHECK((result.W_o_left->transpose() * cov.C11 * *result.W_o_left
               - Eigen::MatrixXd::Identity(N, N))
                  .norm()
              < 1e-6);

        // singular values of a whitened product never exceed 1
        CHECK(result.values.minCoeff() >= 0.0);
        CHECK(result.values.maxCoeff() <= 1.0 + 1e-6);
    }
}

TEST_CASE("values are invariant under invertible re-mixing of the dictionary")
{
    const Eigen::MatrixXd psi0 = random_matrix(6, 80, 51);
    const Eigen::MatrixXd psi1 = random_matrix(6, 80, 52);
    const Eigen::MatrixXd R =
        random_matrix(6, 6, 53) + 3.0 * Eigen::MatrixXd::Identity(6, 6);

    const SpectralResult base =
        solve_self_adjoint(estimate_covariances(psi0, psi1), 6, 1e-12);
    const SpectralResult mixed =
        solve_self_adjoint(estimate_covariances(R * psi0, R * psi1), 6, 1e-12);
    CHECK((base.values - mixed.values).cwiseAbs().maxCoeff() < 1e-8);

    const SpectralResult base_sv =
        solve_non_self_adjoint(estimate_covariances(psi0, psi1), 6, 1e-12);
    const SpectralResult mixed_sv =
        solve_non_self_adjoint(estimate_covariances(R * psi0, R * psi1), 6, 1e-12);
    CHECK((base_sv.values - mixed_sv.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("evaluate_functions on OU data: constant first function, linear second")
{
    const SdeSpec ou = preset_ou();
    const SnapshotData data = euler_maruyama(
        ou, 20000, [](std::mt19937_64& gen) { return Eigen::VectorXd::Constant(1, normal01(gen)); },
        99);

    const auto spec = build_feature_map(7, {50}, Activation::Tanh, 1);
    OmegaVector omega;
    omega.weight_scale = 0.5;
    omega.bias_scale = 0.5;

    const Eigen::MatrixXd psi0 = evaluate_features(spec, omega, data.X);
    const Eigen::MatrixXd psi1 = evaluate_features(spec, omega, data.Y);
    const CovarianceSet cov = estimate_covariances(psi0, psi1);

    const SpectralResult result = solve_self_adjoint(cov, 3, 1e-6);
    const Eigen::MatrixXd phi = evaluate_functions(spec, omega, result, data.X);

    // empirical C00-orthonormality of the eigenfunctions
    const Eigen::MatrixXd gram = phi * phi.transpose() / static_cast<double>(phi.cols());
    CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-6);

    // first eigenfunction is the constant (its spread is tail-dominated, so
    // compare the standard deviation against the mean level)
    const Eigen::VectorXd f1 = phi.row(0).transpose();
    CHECK(std::abs(result.values[0] - 1.0) < 0.01);
    CHECK(std::sqrt((f1.array() - f1.mean()).square().mean()) < 0.05 * std::abs(f1.mean()));

    // second eigenfunction correlates with x (the OU spectrum is Hermite)
    const Eigen::VectorXd f2 = phi.row(1).transpose();
    const Eigen::VectorXd x = data.X.row(0).transpose();
    const double fx = ((f2.array() - f2.mean()) * (x.array() - x.mean())).mean();
    const double corr = fx
                        / std::sqrt((f2.array() - f2.mean()).square().mean()
                                    * (x.array() - x.mean()).square().mean());
    CHECK(std::abs(corr) > 0.99);
}

TEST_CASE("spectral result serialization round-trip")
{
    TempDir tmp("spectral");
    const Eigen::MatrixXd psi0 = random_matrix(4, 30, 61);
    const Eigen::MatrixXd psi1 = random_matrix(4, 30, 62);
    const CovarianceSet cov = estimate_covariances(psi0, psi1);

    const SpectralResult result = solve_non_self_adjoint(cov, 3, 1e-10);
    save_spectral_result(result, tmp.path());
    const SpectralResult back = load_spectral_result(tmp.path());
    CHECK(back.mode == SolverMode::NonSelfAdjoint);
    CHECK(back.values == result.values);
    CHECK(back.W_o == result.W_o);
    CHECK(*back.W_o_left == *result.W_o_left);

    TempDir tmp2("spectral_sa");
    const SpectralResult sa = solve_self_adjoint(cov, 2, 1e-10);
    save_spectral_result(sa, tmp2.path());
    CHECK(!std::filesystem::exists(tmp2.path() / "W_o_left.bin"));
    CHECK(load_spectral_result(tmp2.path()).mode == SolverMode::SelfAdjoint);
}
