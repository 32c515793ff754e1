#include "ranndy/hyperopt.h"

#include <cmath>
#include <fstream>
#include <limits>

#include "ranndy/parallel.h"

namespace ranndy {

//------------------------------------------------------------------------------
// Trace loss
//------------------------------------------------------------------------------
namespace {

// Soft whitening transform: T^T M T = diag(lambda^2 / (lambda^2 + eps^2)),
// a smooth spectral filter with the same scale eps = rel_tol * lambda_max as
// the truncated pseudoinverse and the same limit for rel_tol -> 0. The hard
// cutoff makes the trace jump whenever an eigenvalue crosses the threshold,
// which turns the loss surface into a staircase the gradient ascent cannot
// climb; the smooth filter removes the jumps while leaving every direction
// with lambda >> eps untouched.
Eigen::MatrixXd soft_whitening(const Eigen::MatrixXd& M, double rel_tol)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
    if (solver.info() != Eigen::Success)
        throw NumericError("trace loss: eigendecomposition failed");
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const double lambda_max = lambda[lambda.size() - 1];
    if (!(lambda_max > 0.0))
        return Eigen::MatrixXd::Zero(M.rows(), 0);

    const double eps = rel_tol * lambda_max;
    Eigen::VectorXd filter(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double l = std::max(lambda[i], 0.0);
        filter[i] = std::sqrt(l / (l * l + eps * eps));
    }
    return solver.eigenvectors() * filter.asDiagonal();
}

} // namespace

double trace_loss(const FeatureMapSpec& spec, const OmegaVector& omega, const SnapshotData& data,
                  SolverMode mode, double rel_tol, int top_n)
{
    const Eigen::MatrixXd psi0 = evaluate_features(spec, omega, data.X);
    const Eigen::MatrixXd psi1 = evaluate_features(spec, omega, data.Y);
    if (!psi0.allFinite() || !psi1.allFinite())
        throw NumericError("trace loss: non-finite features at omega = " + to_string(omega));

    const CovarianceSet cov = estimate_covariances(psi0, psi1);
    if (!cov.C00.allFinite() || !cov.C01.allFinite() || !cov.C11.allFinite())
        throw NumericError("trace loss: non-finite covariances at omega = " + to_string(omega));

    double loss = 0.0;
    if (mode == SolverMode::SelfAdjoint) {
        const Eigen::MatrixXd T = soft_whitening(cov.C00, rel_tol);
        const Eigen::MatrixXd S = T.transpose() * (0.5 * (cov.C01 + cov.C10)) * T;
        if (top_n == 0) {
            loss = S.trace();
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
            const int n = std::min<Eigen::Index>(top_n, S.rows());
            loss = solver.eigenvalues().tail(n).sum();
        }
    } else {
        const Eigen::MatrixXd T0 = soft_whitening(cov.C00, rel_tol);
        const Eigen::MatrixXd T1 = soft_whitening(cov.C11, rel_tol);
        const Eigen::MatrixXd K = T0.transpose() * cov.C01 * T1;
        if (top_n == 0) {
            loss = K.squaredNorm();
        } else {
            Eigen::BDCSVD<Eigen::MatrixXd> svd(K);
            const int n = std::min<Eigen::Index>(top_n, svd.singularValues().size());
            loss = svd.singularValues().head(n).squaredNorm();
        }
    }
    if (!std::isfinite(loss))
        throw NumericError("trace loss: non-finite value at omega = " + to_string(omega));
    return loss;
}

//------------------------------------------------------------------------------
// Finite-difference gradient
//------------------------------------------------------------------------------
Eigen::VectorXd fd_gradient(const std::function<double(const OmegaVector&)>& f,
                            const OmegaVector& omega, double fd_step)
{
    if (!(fd_step > 0.0))
        throw ConfigError("fd_step must be positive");

    const Eigen::VectorXd flat = omega.to_flat();
    Eigen::VectorXd grad(flat.size());
    for (Eigen::Index j = 0; j < flat.size(); ++j) {
        const double h = fd_step * std::max(std::abs(flat[j]), 1e-3);
        if (!(flat[j] - h > 0.0))
            throw ConfigError("fd step " + format_double(h) + " leaves omega component "
                              + std::to_string(j) + " non-positive");
        Eigen::VectorXd up = flat, down = flat;
        up[j] += h;
        down[j] -= h;
        const double f_up = f(OmegaVector::from_flat(up));
        const double f_down = f(OmegaVector::from_flat(down));
        grad[j] = (f_up - f_down) / (2.0 * h);
    }
    return grad;
}

Eigen::VectorXd trace_loss_gradient(const FeatureMapSpec& spec, const OmegaVector& omega,
                                    const SnapshotData& data, SolverMode mode, double fd_step,
                                    double rel_tol, int top_n)
{
    return fd_gradient(
        [&](const OmegaVector& w) { return trace_loss(spec, w, data, mode, rel_tol, top_n); },
        omega, fd_step);
}

//------------------------------------------------------------------------------
// Gradient ascent with backtracking
//------------------------------------------------------------------------------
TrainingTrace optimize(const FeatureMapSpec& spec, const RunConfig& config,
                       const SnapshotData& data)
{
    validate(config);
    validate(data);

    OmegaVector omega = OmegaVector::from_config(config);
    validate_scales(omega);

    const auto loss_at = [&](const OmegaVector& w) {
        return trace_loss(spec, w, data, config.mode, config.pinv_rel_tol, config.trace_top_n);
    };

    double current_loss;
    try {
        current_loss = loss_at(omega);
    } catch (const NumericError& e) {
        throw NumericError(std::string(e.what())
                           + "; non-finite loss at the initial omega, try a smaller scale");
    }

    // Ascent gradient with stencil widening: on stretches where the loss is
    // flat at the nominal scale (degenerate feature maps far from the ridge),
    // the stencil grows until it sees structure, so the optimizer can escape
    // regions where any fixed-scale slope is pure noise.
    const auto ascent_gradient = [&](const OmegaVector& at, double at_loss) {
        const Eigen::VectorXd flat = at.to_flat();
        double cap = 0.8; // stencil points must stay strictly positive
        for (Eigen::Index j = 0; j < flat.size(); ++j)
            cap = std::min(cap, 0.9 * flat[j] / std::max(std::abs(flat[j]), 1e-3));
        double step = std::min(ascent_fd_step, cap);
        Eigen::VectorXd g;
        for (;;) {
            g = fd_gradient(loss_at, at, step);
            const double seen = (g.cwiseProduct(flat)).cwiseAbs().maxCoeff() * step;
            if (seen > 1e-7 * std::max(std::abs(at_loss), 1.0) || step * 4.0 > cap)
                return g;
            step *= 4.0;
        }
    };

    TrainingTrace trace;
    Eigen::VectorXd grad = ascent_gradient(omega, current_loss);
    trace.epochs.push_back({0, omega, current_loss, grad.norm()});

    for (int k = 1; k <= config.max_epochs; ++k) {
        if (grad.norm() < grad_norm_tolerance) {
            trace.converged = true;
            break;
        }

        const Eigen::VectorXd flat = omega.to_flat();

        double eta = config.learning_rate;
        OmegaVector candidate;
        double candidate_loss = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int halving = 0; halving <= 20; ++halving) {
            // Trust region per component: no scale may more than double or
            // lose more than half in one epoch. Secant slopes across
            // micro-structure are huge, and an unclipped step would fly into
            // feature saturation; clipping per component keeps one collapsing
            // scale from freezing the others.
            Eigen::VectorXd stepped = flat;
            for (Eigen::Index j = 0; j < flat.size(); ++j)
                stepped[j] += std::clamp(eta * grad[j], -0.5 * flat[j], flat[j]);
            candidate = OmegaVector::from_flat(stepped);
            try {
                candidate_loss = loss_at(candidate);
            } catch (const NumericError&) {
                eta *= 0.5; // diverged features, shrink the step
                continue;
            }
            if (candidate_loss >= current_loss) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) {
            // No non-decreasing step exists at line-search resolution: the
            // optimizer is parked on a local maximum of the empirical loss.
            // Record the stop as a zero-change epoch so the convergence flag
            // stays consistent with the recorded loss sequence.
            trace.epochs.push_back({k, omega, current_loss, grad.norm()});
            trace.converged = true;
            break;
        }

        const double omega_move =
            ((candidate.to_flat() - flat).cwiseAbs().cwiseQuotient(flat)).maxCoeff();
        omega = candidate;
        grad = ascent_gradient(omega, candidate_loss);
        trace.epochs.push_back({k, omega, candidate_loss, grad.norm()});

        const double change = std::abs(candidate_loss - current_loss);
        current_loss = candidate_loss;
        // A flat stretch can be a valley still being crossed; require omega
        // itself to have stopped moving before declaring convergence.
        if (change <= config.rel_loss_tol * std::max(std::abs(current_loss), 1e-12)
            && omega_move <= 1e-2) {
            trace.converged = true;
            break;
        }
    }

    trace.final_omega = omega;
    return trace;
}

//------------------------------------------------------------------------------
// Grid search
//------------------------------------------------------------------------------
GridSearchResult grid_search(const std::function<FeatureMapSpec(const OmegaVector&)>& spec_builder,
                             const RunConfig& config, const SnapshotData& data,
                             const std::vector<OmegaVector>& grid)
{
    if (grid.empty())
        throw ConfigError("grid_search needs a nonempty grid");

    GridSearchResult result;
    result.losses = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()),
                                              std::numeric_limits<double>::quiet_NaN());

    parallel_for(0, static_cast<std::int64_t>(grid.size()), [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            const FeatureMapSpec spec = spec_builder(grid[static_cast<std::size_t>(i)]);
            try {
                result.losses[i] = trace_loss(spec, grid[static_cast<std::size_t>(i)], data,
                                              config.mode, config.pinv_rel_tol, config.trace_top_n);
            } catch (const NumericError&) {
                // leave NaN: this grid point produced non-finite features
            }
        }
    });

    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < result.losses.size(); ++i)
        if (std::isfinite(result.losses[i]) && (best < 0 || result.losses[i] > result.losses[best]))
            best = i;
    if (best < 0)
        throw NumericError("grid_search: all grid points produced non-finite loss");
    result.best = grid[static_cast<std::size_t>(best)];
    return result;
}

//------------------------------------------------------------------------------
// CSV export
//------------------------------------------------------------------------------
void export_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path)
{
    if (trace.epochs.empty())
        throw ConfigError("cannot export an empty training trace");

    std::string buf = "epoch";
    const std::size_t n_params = trace.epochs.front().omega.activation_params.size();
    for (std::size_t i = 0; i < n_params; ++i)
        buf += n_params == 1 ? ",omega_a" : ",omega_a_" + std::to_string(i + 1);
    buf += ",omega_W,omega_b,loss,grad_norm\n";

    for (const EpochRecord& rec : trace.epochs) {
        buf += std::to_string(rec.k);
        const Eigen::VectorXd flat = rec.omega.to_flat();
        for (Eigen::Index i = 0; i < flat.size(); ++i)
            buf += "," + format_double(flat[i]);
        buf += "," + format_double(rec.loss);
        buf += "," + format_double(rec.grad_norm);
        buf.push_back('\n');
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open trace CSV for writing: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("write failed for trace CSV: " + path.string());
}

} // namespace ranndy
