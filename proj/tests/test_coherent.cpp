#include <doctest.h>

#include "ranndy/coherent.h"
#include "ranndy/systems.h"
#include "test_support.h"

using namespace ranndy;
using test_support::random_matrix;

namespace {

Eigen::MatrixXd two_clouds(int per_cloud, std::uint64_t seed)
{
    Eigen::MatrixXd points(2 * per_cloud, 2);
    std::mt19937_64 gen(seed);
    for (int i = 0; i < per_cloud; ++i) {
        points(i, 0) = normal01(gen) * 0.2;
        points(i, 1) = normal01(gen) * 0.2;
        points(per_cloud + i, 0) = 10.0 + normal01(gen) * 0.2;
        points(per_cloud + i, 1) = normal01(gen) * 0.2;
    }
    return points;
}

} // namespace

TEST_CASE("kmeans: separable clouds are recovered up to label permutation")
{
    const Eigen::MatrixXd points = two_clouds(40, 3);
    const ClusterAssignment result = kmeans(points, 2, 7, 5);

    Eigen::VectorXi truth(80);
    truth.head(40).setZero();
    truth.tail(40).setOnes();
    CHECK(adjusted_rand_index(result.labels, truth) == doctest::Approx(1.0));
}

TEST_CASE("kmeans: k = 1 gives the mean, k = m gives zero inertia")
{
    const Eigen::MatrixXd points = random_matrix(25, 3, 11);

    const ClusterAssignment one = kmeans(points, 1, 5);
    CHECK((one.centers.row(0) - points.colwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
    const double total = (points.rowwise() - points.colwise().mean()).rowwise().squaredNorm().sum();
    CHECK(one.inertia == doctest::Approx(total).epsilon(1e-10));

    const ClusterAssignment all = kmeans(points, 25, 5);
    CHECK(all.inertia == doctest::Approx(0.0));
}

TEST_CASE("kmeans: inertia is consistent with labels and centers")
{
    const Eigen::MatrixXd points = random_matrix(60, 4, 17);
    const ClusterAssignment result = kmeans(points, 5, 23);

    double recomputed = 0.0;
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(5);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        recomputed += (points.row(i) - result.centers.row(result.labels[i])).squaredNorm();
        counts[result.labels[i]] += 1;
    }
    CHECK(std::abs(recomputed - result.inertia) < 1e-9);
    CHECK(counts.minCoeff() >= 1); // every cluster nonempty
}

TEST_CASE("kmeans: inertia is non-increasing across Lloyd iterations")
{
    const Eigen::MatrixXd points = random_matrix(200, 3, 31);
    std::vector<double> log;
    kmeans(points, 4, 9, 1, {}, &log);
    REQUIRE(log.size() >= 2);
    for (std::size_t i = 1; i < log.size(); ++i)
        CHECK(log[i] <= log[i - 1] + 1e-12);
}

TEST_CASE("kmeans: deterministic for a fixed seed")
{
    const Eigen::MatrixXd points = random_matrix(100, 3, 41);
    const ClusterAssignment a = kmeans(points, 6, 13, 10);
    const ClusterAssignment b = kmeans(points, 6, 13, 10);
    CHECK(a.labels == b.labels);
    CHECK(a.centers == b.centers);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("kmeans: argument and degeneracy errors")
{
    const Eigen::MatrixXd points = random_matrix(10, 2, 43);
    CHECK_THROWS_AS(kmeans(points, 0, 1), ConfigError);
    CHECK_THROWS_AS(kmeans(points, 11, 1), ConfigError);

    Eigen::MatrixXd repeated(6, 2);
    repeated << 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2;
    CHECK_THROWS_AS(kmeans(repeated, 3, 1), NumericError);
    CHECK_NOTHROW(kmeans(repeated, 2, 1));
}

TEST_CASE("adjusted rand index")
{
    Eigen::VectorXi a(6), b(6), c(6);
    a << 0, 0, 1, 1, 2, 2;
    b << 2, 2, 0, 0, 1, 1; // permuted labels
    CHECK(adjusted_rand_index(a, a) == doctest::Approx(1.0));
    CHECK(adjusted_rand_index(a, b) == doctest::Approx(1.0));

    c << 0, 0, 0, 1, 1, 1;
    const double partial = adjusted_rand_index(a, c);
    CHECK(partial < 1.0);
    CHECK(partial > 0.0);

    // independent labelings hover near zero
    std::mt19937_64 gen(7);
    Eigen::VectorXi r1(2000), r2(2000);
    for (int i = 0; i < 2000; ++i) {
        r1[i] = static_cast<int>(gen() % 4);
        r2[i] = static_cast<int>(gen() % 4);
    }
    CHECK(std::abs(adjusted_rand_index(r1, r2)) < 0.05);

    CHECK_THROWS_AS(adjusted_rand_index(a, Eigen::VectorXi::Zero(5)), ConfigError);
}

TEST_CASE("coherent_sets: requires a non-self-adjoint decomposition")
{
    const auto spec = build_feature_map(3, {16}, Activation::Tanh, 2);
    OmegaVector omega;
    omega.weight_scale = 0.3;
    omega.bias_scale = 0.3;

    const Eigen::MatrixXd X = random_matrix(2, 50, 5);
    const Eigen::MatrixXd psi = evaluate_features(spec, omega, X);
    const CovarianceSet cov = estimate_covariances(psi, psi);

    const SpectralResult self_adjoint = solve_self_adjoint(cov, 3, 1e-8);
    CHECK_THROWS_AS(coherent_sets(spec, omega, self_adjoint, X, 3, 1), ConfigError);
}

TEST_CASE("coherent_sets on a pure shear flow clusters into horizontal bands")
{
    // with zero wave amplitudes y is conserved, so the dominant singular
    // functions depend on y alone and the clusters are y-bands
    BickleyConstants constants;
    constants.amplitude = {0.0, 0.0, 0.0};
    const auto saves = bickley_trajectories(2000, 0.0, 8.0, 2, 19, constants);
    SnapshotData data;
    data.X = saves[0];
    data.Y = saves[1];
    data.lag = 8.0;
    data.system_label = "shear";

    RunConfig config;
    config.seed = 3;
    config.layer_sizes = {96};
    config.n_outputs = 4;
    config.mode = SolverMode::NonSelfAdjoint;
    const auto spec = build_feature_map(config, 2);
    OmegaVector omega;
    omega.weight_scale = 0.15;
    omega.bias_scale = 0.15;

    const Eigen::MatrixXd psi0 = evaluate_features(spec, omega, data.X);
    const Eigen::MatrixXd psi1 = evaluate_features(spec, omega, data.Y);
    const CovarianceSet cov = estimate_covariances(psi0, psi1);
    const SpectralResult result = solve_non_self_adjoint(cov, 4, 1e-8);

    // the singular functions are x-invariant: evaluating at the same y but
    // different x gives nearly identical values
    Eigen::MatrixXd probe_a(2, 40), probe_b(2, 40);
    for (int i = 0; i < 40; ++i) {
        const double y = -3.5 + 7.0 * i / 39.0;
        probe_a.col(i) << 2.0, y;
        probe_b.col(i) << 14.0, y;
    }
    const Eigen::MatrixXd fa = evaluate_functions(spec, omega, result, probe_a);
    const Eigen::MatrixXd fb = evaluate_functions(spec, omega, result, probe_b);
    const double range = fa.maxCoeff() - fa.minCoeff();
    CHECK((fa - fb).cwiseAbs().maxCoeff() < 0.1 * range);

    // clusters form bands: tight in y, unstructured in x
    const ClusterAssignment assignment = coherent_sets(spec, omega, result, data.X, 3, 11);
    double y_within = 0.0, x_within = 0.0;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> xs, ys;
        for (Eigen::Index i = 0; i < assignment.labels.size(); ++i)
            if (assignment.labels[i] == c) {
                xs.push_back(data.X(0, i));
                ys.push_back(data.X(1, i));
            }
        const auto stddev = [](const std::vector<double>& v) {
            double mean = 0.0;
            for (double x : v)
                mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v)
                var += (x - mean) * (x - mean);
            return std::sqrt(var / static_cast<double>(v.size()));
        };
        y_within += stddev(ys) / 3.0;
        x_within += stddev(xs) / 3.0;
    }
    const double y_total = 8.0 / std::sqrt(12.0); // uniform [-4, 4]
    const double x_total = 20.0 / std::sqrt(12.0);
    CHECK(y_within < 0.5 * y_total);  // bands are narrow in y
    CHECK(x_within > 0.75 * x_total); // and span the channel in x
}
