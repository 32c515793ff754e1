#include "ranndy/systems.h"

#include <algorithm>
#include <cmath>

#include "ranndy/parallel.h"
#include "ranndy/rng.h"

namespace ranndy {

//------------------------------------------------------------------------------
// Graphon random walks
//------------------------------------------------------------------------------
GraphonSpec preset_graphon()
{
    GraphonSpec spec;
    spec.g = [](double x, double y) {
        const double b1 = 0.2 * std::exp(-((x - 0.2) * (x - 0.2) + (y - 0.2) * (y - 0.2)) / 0.02);
        const double b2 = 0.1 * std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / 0.02);
        const double dx = (x - 0.8) * (x - 0.8);
        const double dy = (y - 0.8) * (y - 0.8);
        const double b3 = 0.2 * std::exp(-(dx * dx + dy * dy) / 0.0005);
        return b1 + b2 + b3;
    };
    return spec;
}

std::vector<double> graphon_walk(const GraphonSpec& spec, int steps, double x0,
                                 std::uint64_t seed)
{
    if (steps < 1)
        throw ConfigError("graphon walk needs at least one step");
    if (spec.grid_resolution < 2)
        throw ConfigError("graphon grid resolution must be at least 2");
    if (x0 < 0.0 || x0 > 1.0)
        throw ConfigError("graphon walk start must lie in [0, 1]");

    const int R = spec.grid_resolution;
    const double cell = 1.0 / R;
    std::vector<double> cum(R);
    std::vector<double> row(R);

    std::mt19937_64 gen = make_stream(seed, 0);
    std::vector<double> walk(static_cast<std::size_t>(steps) + 1);
    walk[0] = x0;

    for (int t = 0; t < steps; ++t) {
        const double x = walk[static_cast<std::size_t>(t)];
        double total = 0.0;
        for (int j = 0; j < R; ++j) {
            row[j] = spec.g(x, (j + 0.5) * cell);
            total += row[j];
            cum[j] = total;
        }
        if (!(total > 0.0))
            throw NumericError("graphon walk hit an absorbing state at x = " + format_double(x));

        const double u = uniform01(gen) * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        const int j = std::min<int>(static_cast<int>(it - cum.begin()), R - 1);
        const double lower = j > 0 ? cum[j - 1] : 0.0;
        const double frac = row[j] > 0.0 ? (u - lower) / row[j] : 0.5;
        walk[static_cast<std::size_t>(t) + 1] = (j + std::clamp(frac, 0.0, 1.0)) * cell;
    }
    return walk;
}

SnapshotData graphon_snapshots(const GraphonSpec& spec, int steps, double x0,
                               std::uint64_t seed, int burn_in)
{
    if (burn_in < 0)
        throw ConfigError("burn-in must be nonnegative");
    const std::vector<double> walk = graphon_walk(spec, steps + burn_in, x0, seed);

    SnapshotData data;
    data.X.resize(1, steps);
    data.Y.resize(1, steps);
    for (int i = 0; i < steps; ++i) {
        data.X(0, i) = walk[static_cast<std::size_t>(burn_in + i)];
        data.Y(0, i) = walk[static_cast<std::size_t>(burn_in + i) + 1];
    }
    data.lag = 1.0;
    data.system_label = "graphon";
    validate(data);
    return data;
}

//------------------------------------------------------------------------------
// Euler-Maruyama
//------------------------------------------------------------------------------
namespace {

int lag_steps(const SdeSpec& spec)
{
    if (!(spec.dt > 0.0) || !(spec.lag > 0.0))
        throw ConfigError("sde dt and lag must be positive");
    const double ratio = spec.lag / spec.dt;
    const auto steps = static_cast<long long>(std::llround(ratio));
    if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("lag must be a positive integer multiple of dt");
    return static_cast<int>(steps);
}

void advance(const SdeSpec& spec, Eigen::VectorXd& x, int n_steps, std::mt19937_64& gen,
             Eigen::VectorXd& drift_buf, Eigen::MatrixXd& sigma_buf, Eigen::VectorXd& noise_buf)
{
    const double sqrt_dt = std::sqrt(spec.dt);
    for (int s = 0; s < n_steps; ++s) {
        spec.drift(x, drift_buf);
        spec.diffusion(x, sigma_buf);
        for (int k = 0; k < spec.dim; ++k)
            noise_buf[k] = normal01(gen);
        x += spec.dt * drift_buf + sqrt_dt * (sigma_buf * noise_buf);
    }
}

} // namespace

SnapshotData euler_maruyama(const SdeSpec& spec, int m, const InitialSampler& x0_sampler,
                            std::uint64_t seed)
{
    if (m < 2)
        throw ConfigError("euler_maruyama needs at least m = 2 trajectories");
    const int n_steps = lag_steps(spec);

    SnapshotData data;
    data.X.resize(spec.dim, m);
    data.Y.resize(spec.dim, m);
    data.lag = spec.lag;

    parallel_for(0, m, [&](std::int64_t lo, std::int64_t hi) {
        Eigen::VectorXd drift_buf(spec.dim), noise_buf(spec.dim);
        Eigen::MatrixXd sigma_buf(spec.dim, spec.dim);
        for (std::int64_t i = lo; i < hi; ++i) {
            std::mt19937_64 gen = make_stream(seed, static_cast<std::uint64_t>(i));
            Eigen::VectorXd x = x0_sampler(gen);
            if (x.size() != spec.dim)
                throw ConfigError("initial sampler returned a state of wrong dimension");
            data.X.col(i) = x;
            advance(spec, x, n_steps, gen, drift_buf, sigma_buf, noise_buf);
            if (!x.allFinite())
                throw NumericError("sde trajectory " + std::to_string(i) + " diverged");
            data.Y.col(i) = x;
        }
    });
    validate(data);
    return data;
}

Eigen::MatrixXd sde_trajectory(const SdeSpec& spec, int records, const Eigen::VectorXd& x0,
                               std::uint64_t seed)
{
    if (records < 1)
        throw ConfigError("sde_trajectory needs at least one record");
    if (x0.size() != spec.dim)
        throw ConfigError("initial state has wrong dimension");
    const int n_steps = lag_steps(spec);

    Eigen::MatrixXd path(spec.dim, records + 1);
    path.col(0) = x0;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd drift_buf(spec.dim), noise_buf(spec.dim);
    Eigen::MatrixXd sigma_buf(spec.dim, spec.dim);
    std::mt19937_64 gen = make_stream(seed, 0);
    for (int r = 1; r <= records; ++r) {
        advance(spec, x, n_steps, gen, drift_buf, sigma_buf, noise_buf);
        if (!x.allFinite())
            throw NumericError("sde trajectory diverged at record " + std::to_string(r));
        path.col(r) = x;
    }
    return path;
}

SdeSpec preset_ou()
{
    SdeSpec spec;
    spec.dim = 1;
    spec.dt = 1e-3;
    spec.lag = 0.5;
    spec.drift = [](const Eigen::VectorXd& x, Eigen::VectorXd& out) { out = -x; };
    spec.diffusion = [](const Eigen::VectorXd&, Eigen::MatrixXd& out) {
        out(0, 0) = std::sqrt(2.0);
    };
    return spec;
}

SdeSpec preset_double_well()
{
    // Potential V(x) = (x^2 - 1)^2 at inverse temperature beta = 1.
    SdeSpec spec;
    spec.dim = 1;
    spec.dt = 1e-3;
    spec.lag = 1.0;
    spec.drift = [](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
        out[0] = -4.0 * x[0] * x[0] * x[0] + 4.0 * x[0];
    };
    spec.diffusion = [](const Eigen::VectorXd&, Eigen::MatrixXd& out) {
        out(0, 0) = std::sqrt(2.0);
    };
    return spec;
}

//------------------------------------------------------------------------------
// Bickley jet
//------------------------------------------------------------------------------
Eigen::Vector2d bickley_velocity(double x, double y, double t, const BickleyConstants& c)
{
    const double sech = 1.0 / std::cosh(y / c.L);
    const double sech2 = sech * sech;
    const double tanh_y = std::tanh(y / c.L);

    double sum_cos = 0.0;
    double sum_k_sin = 0.0;
    for (int n = 0; n < 3; ++n) {
        const double k_n = 2.0 * (n + 1) / c.r0;
        const double theta = k_n * (x - c.phase_speed_ratio[static_cast<std::size_t>(n)] * c.U0 * t);
        sum_cos += c.amplitude[static_cast<std::size_t>(n)] * std::cos(theta);
        sum_k_sin += c.amplitude[static_cast<std::size_t>(n)] * k_n * std::sin(theta);
    }

    Eigen::Vector2d v;
    v[0] = c.U0 * sech2 + 2.0 * c.U0 * sech2 * tanh_y * sum_cos; // -dPsi/dy
    v[1] = -c.U0 * c.L * sech2 * sum_k_sin;                      //  dPsi/dx
    return v;
}

namespace {

void rk4_segment(Eigen::Vector2d& p, double t0, double t1, double nominal_step,
                 const BickleyConstants& constants)
{
    const double length = t1 - t0;
    const int n = std::max(1, static_cast<int>(std::llround(length / nominal_step)));
    const double h = length / n;
    double t = t0;
    for (int s = 0; s < n; ++s) {
        const Eigen::Vector2d k1 = bickley_velocity(p[0], p[1], t, constants);
        const Eigen::Vector2d p2 = p + 0.5 * h * k1;
        const Eigen::Vector2d k2 = bickley_velocity(p2[0], p2[1], t + 0.5 * h, constants);
        const Eigen::Vector2d p3 = p + 0.5 * h * k2;
        const Eigen::Vector2d k3 = bickley_velocity(p3[0], p3[1], t + 0.5 * h, constants);
        const Eigen::Vector2d p4 = p + h * k3;
        const Eigen::Vector2d k4 = bickley_velocity(p4[0], p4[1], t + h, constants);
        p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = t0 + (s + 1) * h;
    }
}

double wrap_x(double x)
{
    return x - 20.0 * std::floor(x / 20.0);
}

} // namespace

std::vector<Eigen::MatrixXd> bickley_trajectories(int m, double t0, double t1, int n_saves,
                                                  std::uint64_t seed,
                                                  const BickleyConstants& constants)
{
    if (m < 1)
        throw ConfigError("bickley_trajectories needs at least one particle");
    if (!(t1 > t0))
        throw ConfigError("bickley_trajectories needs t1 > t0");
    if (n_saves < 1)
        throw ConfigError("n_saves must be positive");
    if (!(constants.step > 0.0))
        throw ConfigError("rk4 step must be positive");

    std::vector<double> save_times(static_cast<std::size_t>(n_saves));
    if (n_saves == 1) {
        save_times[0] = t1;
    } else {
        for (int s = 0; s < n_saves; ++s)
            save_times[static_cast<std::size_t>(s)] = t0 + (t1 - t0) * s / (n_saves - 1);
    }

    std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(n_saves));
    for (auto& M : out)
        M.resize(2, m);

    parallel_for(0, m, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            std::mt19937_64 gen = make_stream(seed, static_cast<std::uint64_t>(i));
            Eigen::Vector2d p;
            p[0] = 20.0 * uniform01(gen);
            p[1] = -4.0 + 8.0 * uniform01(gen);

            double t = t0;
            for (int s = 0; s < n_saves; ++s) {
                const double target = save_times[static_cast<std::size_t>(s)];
                if (target > t) {
                    rk4_segment(p, t, target, constants.step, constants);
                    t = target;
                }
                if (!p.allFinite())
                    throw NumericError("bickley integration diverged at t = " + format_double(t));
                out[static_cast<std::size_t>(s)](0, i) = wrap_x(p[0]);
                out[static_cast<std::size_t>(s)](1, i) = p[1];
            }
        }
    });
    return out;
}

} // namespace ranndy
