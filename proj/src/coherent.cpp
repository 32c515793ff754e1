#include "ranndy/coherent.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ranndy/rng.h"

namespace ranndy {

//------------------------------------------------------------------------------
// k-means
//------------------------------------------------------------------------------
namespace {

Eigen::Index count_distinct_rows(const Eigen::MatrixXd& points)
{
    std::vector<Eigen::Index> order(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            if (points(a, c) != points(b, c))
                return points(a, c) < points(b, c);
        }
        return false;
    });
    Eigen::Index distinct = points.rows() > 0 ? 1 : 0;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (points.row(order[i]) != points.row(order[i - 1]))
            ++distinct;
    return distinct;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& points, int k, std::mt19937_64& gen)
{
    const Eigen::Index m = points.rows();
    Eigen::MatrixXd centers(k, points.cols());

    Eigen::Index first = std::min<Eigen::Index>(
        static_cast<Eigen::Index>(uniform01(gen) * static_cast<double>(m)), m - 1);
    centers.row(0) = points.row(first);

    Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            const double u = uniform01(gen) * total;
            double acc = 0.0;
            chosen = m - 1;
            for (Eigen::Index i = 0; i < m; ++i) {
                acc += d2[i];
                if (acc > u) {
                    chosen = i;
                    break;
                }
            }
        }
        centers.row(c) = points.row(chosen);
        d2 = d2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

double assign_labels(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                     Eigen::VectorXi& labels, Eigen::VectorXd& point_d2)
{
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (Eigen::Index c = 0; c < centers.rows(); ++c) {
            const double d = (points.row(i) - centers.row(c)).squaredNorm();
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        labels[i] = best_c;
        point_d2[i] = best;
        inertia += best;
    }
    return inertia;
}

} // namespace

ClusterAssignment kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts,
                         const KmeansOptions& options, std::vector<double>* iteration_inertia)
{
    const Eigen::Index m = points.rows();
    if (k < 1)
        throw ConfigError("k must be positive");
    if (restarts < 1)
        throw ConfigError("restarts must be positive");
    if (k > m)
        throw ConfigError("k = " + std::to_string(k) + " exceeds the number of points "
                          + std::to_string(m));
    const Eigen::Index distinct = count_distinct_rows(points);
    if (k > distinct)
        throw NumericError("k-means needs at least k distinct points, got "
                           + std::to_string(distinct) + " distinct of " + std::to_string(m));

    ClusterAssignment best;
    bool have_best = false;

    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 gen = make_stream(seed, static_cast<std::uint64_t>(r));
        Eigen::MatrixXd centers = kmeanspp_seed(points, k, gen);
        Eigen::VectorXi labels(m);
        Eigen::VectorXd point_d2(m);
        double inertia = 0.0;

        for (int iter = 0; iter < options.max_iterations; ++iter) {
            inertia = assign_labels(points, centers, labels, point_d2);
            if (iteration_inertia)
                iteration_inertia->push_back(inertia);

            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
            Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
            for (Eigen::Index i = 0; i < m; ++i) {
                sums.row(labels[i]) += points.row(i);
                counts[labels[i]] += 1;
            }

            if ((counts.array() == 0).any()) {
                // Re-seed each empty cluster at the point farthest from its
                // assigned center, then redo the assignment.
                Eigen::VectorXd claimable = point_d2;
                for (int c = 0; c < k; ++c) {
                    if (counts[c] > 0)
                        continue;
                    Eigen::Index worst = 0;
                    claimable.maxCoeff(&worst);
                    centers.row(c) = points.row(worst);
                    claimable[worst] = -1.0;
                }
                continue;
            }

            Eigen::MatrixXd updated(k, points.cols());
            for (int c = 0; c < k; ++c)
                updated.row(c) = sums.row(c) / counts[c];
            const double shift = (updated - centers).rowwise().norm().maxCoeff();
            centers = updated;
            if (shift <= options.shift_tol)
                break;
        }

        inertia = assign_labels(points, centers, labels, point_d2);
        if (iteration_inertia)
            iteration_inertia->push_back(inertia);

        if (!have_best || inertia < best.inertia) {
            best.labels = labels;
            best.centers = centers;
            best.inertia = inertia;
            have_best = true;
        }
    }
    return best;
}

//------------------------------------------------------------------------------
// Coherent sets
//------------------------------------------------------------------------------
ClusterAssignment coherent_sets(const FeatureMapSpec& spec, const OmegaVector& omega,
                                const SpectralResult& result, const Eigen::MatrixXd& X, int k,
                                std::uint64_t seed, int restarts)
{
    if (result.mode != SolverMode::NonSelfAdjoint)
        throw ConfigError("coherent_sets requires a non-self-adjoint decomposition");
    const Eigen::MatrixXd embedded = evaluate_functions(spec, omega, result, X).transpose();
    return kmeans(embedded, k, seed, restarts);
}

//------------------------------------------------------------------------------
// Adjusted Rand index
//------------------------------------------------------------------------------
double adjusted_rand_index(const Eigen::VectorXi& a, const Eigen::VectorXi& b)
{
    if (a.size() != b.size() || a.size() == 0)
        throw ConfigError("partitions must have equal nonzero length");
    const auto m = static_cast<double>(a.size());

    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> count_a, count_b;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        count_a[a[i]] += 1.0;
        count_b[b[i]] += 1.0;
    }

    const auto choose2 = [](double n) { return 0.5 * n * (n - 1.0); };
    double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, n] : joint)
        sum_joint += choose2(n);
    for (const auto& [key, n] : count_a)
        sum_a += choose2(n);
    for (const auto& [key, n] : count_b)
        sum_b += choose2(n);

    const double expected = sum_a * sum_b / choose2(m);
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected)
        return 1.0; // both partitions trivial
    return (sum_joint - expected) / (max_index - expected);
}

} // namespace ranndy
