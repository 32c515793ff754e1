#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ranndy/matrixio.h"

namespace ranndy {

//------------------------------------------------------------------------------
// Graphon random walks
//------------------------------------------------------------------------------

// Edge-weight function on [0,1]^2 together with the grid resolution used for
// degree quadrature and inverse-CDF transition sampling.
struct GraphonSpec {
    std::function<double(double, double)> g;
    int grid_resolution = 1000;
};

// Three-bump symmetric benchmark graphon.
GraphonSpec preset_graphon();

// Markov chain with transition density p(x, .) proportional to g(x, .): the
// next state is drawn by inverse CDF over the piecewise-constant density on
// the sampling grid (uniform within the chosen cell). Returns steps+1 states.
std::vector<double> graphon_walk(const GraphonSpec& spec, int steps, double x0,
                                 std::uint64_t seed);

// Walk packaged as lag-1 snapshot pairs, with the first burn_in transitions
// discarded.
SnapshotData graphon_snapshots(const GraphonSpec& spec, int steps, double x0,
                               std::uint64_t seed, int burn_in = 100);

//------------------------------------------------------------------------------
// Stochastic differential equations (Euler-Maruyama)
//------------------------------------------------------------------------------

struct SdeSpec {
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> drift;
    std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)> diffusion;
    int dim = 1;
    double dt = 1e-3;
    double lag = 0.5; // must be an integer multiple of dt
};

SdeSpec preset_ou();          // dX = -X dt + sqrt(2) dW
SdeSpec preset_double_well(); // dX = -(4x^3 - 4x) dt + sqrt(2) dW

using InitialSampler = std::function<Eigen::VectorXd(std::mt19937_64&)>;

// m independent trajectories integrated over one lag time. Per-trajectory RNG
// streams are derived from (seed, index), so the result does not depend on
// how trajectories are scheduled across workers.
SnapshotData euler_maruyama(const SdeSpec& spec, int m, const InitialSampler& x0_sampler,
                            std::uint64_t seed);

// Single path recorded every lag interval: dim x (records+1) matrix with the
// initial state in column 0.
Eigen::MatrixXd sde_trajectory(const SdeSpec& spec, int records, const Eigen::VectorXd& x0,
                               std::uint64_t seed);

//------------------------------------------------------------------------------
// Bickley jet
//------------------------------------------------------------------------------

// Stream function Psi = -U0 L tanh(y/L)
//                     + U0 L sech^2(y/L) sum_n eps_n cos(k_n x - k_n c_n t)
// with k_n = 2n/r0; velocities u = -dPsi/dy, v = dPsi/dx. Lengths in Mm,
// time in days.
struct BickleyConstants {
    double U0 = 5.4138;
    double L = 1.77;
    double r0 = 6.371;
    std::array<double, 3> amplitude = {0.075, 0.4, 0.3};
    std::array<double, 3> phase_speed_ratio = {0.1446, 0.205, 0.461}; // c_n / U0
    // Nominal RK4 step. 0.01 keeps the step-halving difference below 1e-6
    // over short horizons; larger steps fail that convergence check.
    double step = 0.01;
};

Eigen::Vector2d bickley_velocity(double x, double y, double t, const BickleyConstants& constants);

// m particles started uniformly in [0,20] x [-4,4], integrated with fixed-step
// RK4 and recorded at n_saves evenly spaced times in [t0, t1] (endpoints
// included for n_saves >= 2; t1 only for n_saves == 1). Integration uses the
// unwrapped x coordinate; saved positions wrap x into [0, 20).
std::vector<Eigen::MatrixXd> bickley_trajectories(int m, double t0, double t1, int n_saves,
                                                  std::uint64_t seed,
                                                  const BickleyConstants& constants = {});

} // namespace ranndy
