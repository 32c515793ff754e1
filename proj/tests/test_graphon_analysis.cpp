#include <doctest.h>

#include <cmath>
#include <fstream>

#include "ranndy/graphon_analysis.h"
#include "test_support.h"

using namespace ranndy;
using test_support::TempDir;

namespace {

// Two disconnected blocks [0, 0.5] x [0, 0.5] with weight a and
// (0.5, 1] x (0.5, 1] with weight b. Everything about its transfer operator
// is closed-form: pi is piecewise constant, the two unit eigenvalues have
// blockwise-constant eigenfunctions, p = 2 within a block, g recovers a/b.
struct BlockModel {
    double a, b;

    GraphonSpec spec() const
    {
        GraphonSpec graphon;
        const double va = a, vb = b;
        graphon.g = [va, vb](double x, double y) {
            if (x <= 0.5 && y <= 0.5)
                return va;
            if (x > 0.5 && y > 0.5)
                return vb;
            return 0.0;
        };
        return graphon;
    }

    double Z() const { return (a + b) / 4.0; }
    double pi1() const { return 2.0 * a / (a + b); }
    double pi2() const { return 2.0 * b / (a + b); }

    // second eigenfunction, orthonormal to 1 in the pi-weighted inner product
    double phi2_low() const { return -std::sqrt(b / a); }
    double phi2_high() const { return std::sqrt(a / b); }
};

} // namespace

TEST_CASE("uniform grid midpoints")
{
    const Eigen::VectorXd grid = uniform_grid(4);
    CHECK(grid[0] == 0.125);
    CHECK(grid[3] == 0.875);
    CHECK_THROWS_AS(uniform_grid(1), ConfigError);
}

TEST_CASE("graphon degree quadrature")
{
    GraphonSpec uniform;
    uniform.g = [](double, double) { return 1.0; };
    const auto [degree, Z] = graphon_degree(uniform, uniform_grid(100));
    CHECK((degree.array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(Z == doctest::Approx(1.0).epsilon(1e-12));

    const BlockModel model{0.8, 0.4};
    const auto [d2, Z2] = graphon_degree(model.spec(), uniform_grid(200));
    CHECK(Z2 == doctest::Approx(model.Z()).epsilon(1e-12));
    CHECK(d2[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d2[199] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("invariant density from eigenfunction values: clip, normalize, reject")
{
    const Eigen::VectorXd grid = uniform_grid(50);

    // flat density with a little negative quadrature noise
    Eigen::VectorXd values = Eigen::VectorXd::Ones(50);
    values[3] = -0.01;
    const Eigen::VectorXd pi = estimate_invariant_density(values, grid);
    CHECK(pi.minCoeff() >= 0.0);
    CHECK(pi.sum() / 50.0 == doctest::Approx(1.0).epsilon(1e-12)); // unit integral
    CHECK(pi[3] == 0.0);

    // global sign flip is repaired
    const Eigen::VectorXd flipped = estimate_invariant_density(-values, grid);
    CHECK((flipped - pi).cwiseAbs().maxCoeff() < 1e-14);

    // more than 10% negative mass is not a density
    Eigen::VectorXd mixed = Eigen::VectorXd::Ones(50);
    mixed.tail(10).setConstant(-1.0);
    CHECK_THROWS_WITH_AS(estimate_invariant_density(mixed, grid),
                         doctest::Contains("not a density"), NumericError);
}

TEST_CASE("invariant density of the block model is piecewise constant")
{
    const BlockModel model{0.8, 0.4};
    const Eigen::VectorXd grid = uniform_grid(100);
    Eigen::VectorXd pi_values(100);
    for (int i = 0; i < 100; ++i)
        pi_values[i] = grid[i] <= 0.5 ? model.pi1() : model.pi2();
    const Eigen::VectorXd pi = estimate_invariant_density(pi_values, grid);
    CHECK(pi[0] == doctest::Approx(model.pi1()).epsilon(1e-12));
    CHECK(pi[99] == doctest::Approx(model.pi2()).epsilon(1e-12));
}

TEST_CASE("invariant density from samples: uniform within 0.02 sup-norm")
{
    GraphonSpec uniform;
    uniform.g = [](double, double) { return 1.0; };
    const auto walk = graphon_walk(uniform, 200000, 0.5, 29);
    const std::vector<double> samples(walk.begin() + 1, walk.end());

    const Eigen::VectorXd grid = uniform_grid(10);
    const Eigen::VectorXd pi = estimate_invariant_density(samples, grid);
    CHECK(pi.sum() / 10.0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((pi.array() - 1.0).abs().maxCoeff() < 0.02);
}

TEST_CASE("dictionary density fit recovers the stationary density of the preset graphon")
{
    GraphonSpec graphon = preset_graphon();
    graphon.grid_resolution = 500;
    const SnapshotData data = graphon_snapshots(graphon, 40000, 0.2, 31, 100);

    RunConfig config;
    config.seed = 5;
    config.layer_sizes = {256, 512, 256};
    const auto spec = build_feature_map(config, 1);
    OmegaVector omega; // scales near the trace-loss ridge for this system
    omega.weight_scale = 0.33;
    omega.bias_scale = 0.27;

    const Eigen::VectorXd grid = uniform_grid(200);
    const Eigen::VectorXd fitted = fit_sample_density(spec, omega, data.X, grid, 1e-8);
    const Eigen::VectorXd pi = estimate_invariant_density(fitted, grid);
    CHECK(pi.sum() / 200.0 == doctest::Approx(1.0).epsilon(1e-6));

    const auto [degree, Z] = graphon_degree(graphon, grid);
    const Eigen::VectorXd pi_true = degree / Z;
    CHECK((pi - pi_true).norm() / pi_true.norm() < 0.1);

    // histogram cross-check agrees with the fit
    const std::vector<double> samples(data.X.data(), data.X.data() + data.X.cols());
    const Eigen::VectorXd pi_hist = estimate_invariant_density(samples, grid);
    CHECK((pi - pi_hist).norm() / pi_hist.norm() < 0.15);
}

TEST_CASE("block-model reconstruction from exact eigenpairs")
{
    const BlockModel model{0.8, 0.4};
    const Eigen::VectorXd grid = uniform_grid(100);

    Eigen::VectorXd values(2);
    values << 1.0, 1.0;
    Eigen::MatrixXd phi(2, 100);
    Eigen::VectorXd pi(100);
    for (int i = 0; i < 100; ++i) {
        const bool low = grid[i] <= 0.5;
        phi(0, i) = 1.0;
        phi(1, i) = low ? model.phi2_low() : model.phi2_high();
        pi[i] = low ? model.pi1() : model.pi2();
    }

    const GraphonReconstruction rec =
        reconstruct_from_values(values, phi, pi, model.Z(), grid, 2);

    // g recovers the blocks
    CHECK(rec.g_hat(10, 20) == doctest::Approx(model.a).epsilon(1e-10));
    CHECK(rec.g_hat(80, 90) == doctest::Approx(model.b).epsilon(1e-10));
    CHECK(std::abs(rec.g_hat(10, 90)) < 0.05);
    CHECK(std::abs(rec.g_hat_raw(10, 90)) < 1e-10);

    // p is the within-block uniform density
    CHECK(rec.p_hat(10, 20) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(rec.p_hat(10, 90)) < 1e-10);

    // row integrals of p are 1 for every x
    const Eigen::VectorXd row_integrals = rec.p_hat.rowwise().sum() / 100.0;
    CHECK((row_integrals.array() - 1.0).abs().maxCoeff() < 0.05);

    // symmetry of g before clipping
    CHECK((rec.g_hat_raw - rec.g_hat_raw.transpose()).cwiseAbs().maxCoeff() < 1e-6);

    // rank improvement is monotone: rank 1 misses the block split entirely
    const GraphonReconstruction rank1 =
        reconstruct_from_values(values, phi, pi, model.Z(), grid, 1);
    Eigen::MatrixXd g_ref(100, 100);
    const GraphonSpec spec = model.spec();
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j)
            g_ref(i, j) = spec.g(grid[i], grid[j]);
    const double err2 = relative_l2_error(rec.g_hat_raw, g_ref);
    const double err1 = relative_l2_error(rank1.g_hat_raw, g_ref);
    CHECK(err2 < 1e-9);
    CHECK(err1 > err2);

    // rank 0 gives zero matrices
    const GraphonReconstruction rank0 =
        reconstruct_from_values(values, phi, pi, model.Z(), grid, 0);
    CHECK(rank0.g_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rank0.p_hat.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(reconstruct_from_values(values, phi, pi, model.Z(), grid, 3), NumericError);
}

TEST_CASE("heatmap: gray constant, monotone ramp, sidecar")
{
    TempDir tmp("heatmap");
    const auto path = tmp.path() / "m.pgm";

    heatmap(Eigen::MatrixXd::Zero(4, 4), path);
    {
        std::ifstream in(path, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(content.substr(0, 9) == "P5\n4 4\n25");
        const std::string pixels = content.substr(content.size() - 16);
        for (char p : pixels)
            CHECK(static_cast<unsigned char>(p) == 128);
    }

    Eigen::MatrixXd ramp(1, 5);
    ramp << 0, 1, 2, 3, 4;
    heatmap(ramp, path);
    {
        std::ifstream in(path, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const std::string pixels = content.substr(content.size() - 5);
        CHECK(static_cast<unsigned char>(pixels[0]) == 0);
        CHECK(static_cast<unsigned char>(pixels[4]) == 255);
        for (int i = 1; i < 5; ++i)
            CHECK(static_cast<unsigned char>(pixels[i]) > static_cast<unsigned char>(pixels[i - 1]));

        std::ifstream sidecar(path.string() + ".txt");
        std::string line1, line2;
        std::getline(sidecar, line1);
        std::getline(sidecar, line2);
        CHECK(line1 == "min 0");
        CHECK(line2 == "max 4");
    }
}

TEST_CASE("relative error helper")
{
    Eigen::MatrixXd ref(2, 2);
    ref << 3, 0, 0, 4;
    CHECK(relative_l2_error(ref, ref) == 0.0);
    CHECK(relative_l2_error(2.0 * ref, ref) == doctest::Approx(1.0));
    CHECK_THROWS_AS(relative_l2_error(ref, Eigen::MatrixXd::Zero(2, 2)), ConfigError);
}
