#include "ranndy/graphon_analysis.h"

#include <cmath>
#include <fstream>

namespace ranndy {

//------------------------------------------------------------------------------
// Grids and densities
//------------------------------------------------------------------------------
Eigen::VectorXd uniform_grid(int points)
{
    if (points < 2)
        throw ConfigError("grid needs at least 2 points");
    Eigen::VectorXd grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = (i + 0.5) / points;
    return grid;
}

Eigen::VectorXd estimate_invariant_density(const Eigen::VectorXd& phi1_on_grid,
                                           const Eigen::VectorXd& grid)
{
    if (phi1_on_grid.size() != grid.size() || grid.size() == 0)
        throw ConfigError("eigenfunction values and grid must have matching nonzero size");

    Eigen::VectorXd values = phi1_on_grid;
    if (values.sum() < 0.0)
        values *= -1.0; // overall sign is arbitrary

    const double positive_mass = values.cwiseMax(0.0).sum();
    const double negative_mass = -values.cwiseMin(0.0).sum();
    if (!(positive_mass > 0.0) || negative_mass > 0.1 * (positive_mass + negative_mass))
        throw NumericError("leading eigenfunction is not a density: "
                           + format_double(negative_mass) + " of its mass is negative");

    values = values.cwiseMax(0.0);
    const double h = 1.0 / static_cast<double>(grid.size());
    return values / (values.sum() * h);
}

Eigen::VectorXd estimate_invariant_density(const std::vector<double>& samples,
                                           const Eigen::VectorXd& grid)
{
    if (samples.empty() || grid.size() == 0)
        throw ConfigError("density estimation needs nonempty samples and grid");

    const auto cells = static_cast<int>(grid.size());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(cells);
    for (double s : samples) {
        int cell = static_cast<int>(std::floor(s * cells));
        cell = std::clamp(cell, 0, cells - 1);
        counts[cell] += 1.0;
    }
    const double h = 1.0 / cells;
    return counts / (counts.sum() * h);
}

Eigen::VectorXd fit_sample_density(const FeatureMapSpec& spec, const OmegaVector& omega,
                                   const Eigen::MatrixXd& samples, const Eigen::VectorXd& grid,
                                   double rel_tol)
{
    if (samples.rows() != 1)
        throw ConfigError("dictionary density fit expects one-dimensional samples");

    const Eigen::MatrixXd psi_grid =
        evaluate_features(spec, omega, grid.transpose()); // N x G
    const double h = 1.0 / static_cast<double>(grid.size());

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(psi_grid.rows(), psi_grid.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(psi_grid, h);
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

    const Eigen::VectorXd means =
        evaluate_features(spec, omega, samples).rowwise().mean();
    const Eigen::VectorXd coeffs = pseudo_inverse(gram, rel_tol) * means;
    return psi_grid.transpose() * coeffs;
}

std::pair<Eigen::VectorXd, double> graphon_degree(const GraphonSpec& graphon,
                                                  const Eigen::VectorXd& grid)
{
    const Eigen::Index G = grid.size();
    if (G == 0)
        throw ConfigError("degree quadrature needs a nonempty grid");
    const double h = 1.0 / static_cast<double>(G);

    Eigen::VectorXd degree(G);
    for (Eigen::Index i = 0; i < G; ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < G; ++j)
            sum += graphon.g(grid[i], grid[j]);
        degree[i] = sum * h;
    }
    return {degree, degree.sum() * h};
}

//------------------------------------------------------------------------------
// Reconstruction
//------------------------------------------------------------------------------
GraphonReconstruction reconstruct_from_values(const Eigen::VectorXd& values,
                                              const Eigen::MatrixXd& phi_on_grid,
                                              const Eigen::VectorXd& pi_hat, double Z_hat,
                                              const Eigen::VectorXd& grid, int rank)
{
    if (rank < 0 || rank > values.size() || rank > phi_on_grid.rows())
        throw NumericError("reconstruction rank " + std::to_string(rank) + " exceeds the "
                           + std::to_string(values.size()) + " available eigenpairs");
    if (phi_on_grid.cols() != grid.size() || pi_hat.size() != grid.size())
        throw ConfigError("eigenfunction values, density and grid sizes do not match");

    const Eigen::Index G = grid.size();
    GraphonReconstruction rec;
    rec.rank = rank;
    rec.grid = grid;
    rec.pi_hat = pi_hat;
    rec.Z_hat = Z_hat;

    // phi_hat_i = pi * phi_i are the Perron-Frobenius eigenfunctions.
    const Eigen::MatrixXd phi = phi_on_grid.topRows(rank);                    // rank x G
    const Eigen::MatrixXd phi_hat = phi * pi_hat.asDiagonal();                // rank x G
    const Eigen::VectorXd lambda = values.head(rank);

    rec.p_hat_raw = phi.transpose() * lambda.asDiagonal() * phi_hat;          // p(x, y)
    rec.g_hat_raw = Z_hat * phi_hat.transpose() * lambda.asDiagonal() * phi_hat;
    if (rank == 0) {
        rec.p_hat_raw = Eigen::MatrixXd::Zero(G, G);
        rec.g_hat_raw = Eigen::MatrixXd::Zero(G, G);
    }
    rec.p_hat = rec.p_hat_raw.cwiseMax(0.0);
    rec.g_hat = rec.g_hat_raw.cwiseMax(0.0).cwiseMin(1.0);
    return rec;
}

GraphonReconstruction reconstruct(const SpectralResult& result, const FeatureMapSpec& spec,
                                  const OmegaVector& omega, const Eigen::VectorXd& pi_hat,
                                  double Z_hat, const Eigen::VectorXd& grid, int rank)
{
    const Eigen::MatrixXd phi = evaluate_functions(spec, omega, result, grid.transpose());
    return reconstruct_from_values(result.values, phi, pi_hat, Z_hat, grid, rank);
}

//------------------------------------------------------------------------------
// Heatmap export
//------------------------------------------------------------------------------
void heatmap(const Eigen::MatrixXd& M, const std::filesystem::path& path)
{
    if (M.size() == 0)
        throw ConfigError("cannot render an empty matrix");
    if (!M.allFinite())
        throw NumericError("cannot render a matrix with non-finite entries");

    const double lo = M.minCoeff();
    const double hi = M.maxCoeff();
    const double range = hi - lo;

    std::string buf = "P5\n" + std::to_string(M.cols()) + " " + std::to_string(M.rows()) + "\n255\n";
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            int pixel = 128;
            if (range > 0.0)
                pixel = static_cast<int>(std::lround((M(r, c) - lo) / range * 255.0));
            buf.push_back(static_cast<char>(std::clamp(pixel, 0, 255)));
        }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open image for writing: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("write failed for image: " + path.string());

    std::ofstream sidecar(path.string() + ".txt", std::ios::trunc);
    if (!sidecar)
        throw IoError("cannot open sidecar for writing: " + path.string() + ".txt");
    sidecar << "min " << format_double(lo) << "\nmax " << format_double(hi) << "\n";
}

double relative_l2_error(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& reference)
{
    const double ref_norm = reference.norm();
    if (!(ref_norm > 0.0))
        throw ConfigError("relative error against a zero reference is undefined");
    return (estimate - reference).norm() / ref_norm;
}

} // namespace ranndy
