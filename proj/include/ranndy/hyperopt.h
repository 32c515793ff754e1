#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "ranndy/spectral.h"

namespace ranndy {

struct EpochRecord {
    int k = 0;
    OmegaVector omega;
    double loss = 0.0;
    double grad_norm = 0.0;
};

// One record per epoch, starting at k = 0 (the initial point). converged is
// true only when the stop was triggered by the relative-loss or gradient-norm
// tolerance, not by the epoch limit.
struct TrainingTrace {
    std::vector<EpochRecord> epochs;
    bool converged = false;
    OmegaVector final_omega;
};

constexpr double default_fd_step = 1e-4;
constexpr double grad_norm_tolerance = 1e-10;

// Relative step used by optimize() for its ascent gradients. The empirical
// trace has micro-steps where eigenvalues cross the truncation threshold; a
// 1e-4 stencil resolves those steps instead of the ridge, so the optimizer
// differences over a wider stencil.
constexpr double ascent_fd_step = 0.05;

// tr(C00^+ C01) for the self-adjoint operator, tr(C00^+ C01 C11^+ C10) for
// the forward-backward composition. Both are evaluated through the whitened
// basis, which yields the same value as the pseudoinverse products but keeps
// the computed spectrum real. top_n = 0 sums over the full projected
// operator; top_n > 0 sums only the n largest projected values.
double trace_loss(const FeatureMapSpec& spec, const OmegaVector& omega, const SnapshotData& data,
                  SolverMode mode, double rel_tol, int top_n = 0);

// Central finite differences with per-component step
// h_j = fd_step * max(|omega_j|, 1e-3); every stencil point must stay
// strictly positive.
Eigen::VectorXd fd_gradient(const std::function<double(const OmegaVector&)>& f,
                            const OmegaVector& omega, double fd_step);

Eigen::VectorXd trace_loss_gradient(const FeatureMapSpec& spec, const OmegaVector& omega,
                                    const SnapshotData& data, SolverMode mode, double fd_step,
                                    double rel_tol, int top_n = 0);

// Gradient ascent omega <- omega + eta * grad with backtracking: a step that
// would decrease the loss (or leave the positive domain) halves the rate for
// that step, up to 20 times, so the recorded loss sequence is monotonically
// non-decreasing and scales stay strictly positive. Stops on rel_loss_tol,
// grad_norm < grad_norm_tolerance, or max_epochs.
TrainingTrace optimize(const FeatureMapSpec& spec, const RunConfig& config,
                       const SnapshotData& data);

struct GridSearchResult {
    OmegaVector best;
    Eigen::VectorXd losses; // aligned with the grid; NaN where evaluation failed
};

// Evaluates the loss at every grid point and returns the best (ties broken by
// grid order). spec_builder maps a grid point to the feature map used for it,
// which also covers sweeps that resample the base distribution per point.
GridSearchResult grid_search(const std::function<FeatureMapSpec(const OmegaVector&)>& spec_builder,
                             const RunConfig& config, const SnapshotData& data,
                             const std::vector<OmegaVector>& grid);

// epoch, omega components (flat order), loss, grad_norm.
void export_trace_csv(const TrainingTrace& trace, const std::filesystem::path& path);

} // namespace ranndy
