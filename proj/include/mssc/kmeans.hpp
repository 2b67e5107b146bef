#ifndef MSSC_KMEANS_HPP
#define MSSC_KMEANS_HPP

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mssc/clustering.hpp"
#include "mssc/constraints.hpp"
#include "mssc/dataset.hpp"
#include "mssc/rng.hpp"

namespace mssc {

struct HeuristicResult {
    Clustering clustering;
    double objective = std::numeric_limits<double>::infinity();
    int restarts_used = 0;
    bool converged = false;
};

/// k-means++ seeding: first center uniform, each next center sampled with
/// probability proportional to the squared distance to the nearest chosen
/// center. Deterministic for a given seed. The returned sizes are zeros
/// (no assignment exists yet).
inline Centroids kmeans_pp_seed(const Dataset& d, int k, std::uint64_t rng_seed) {
    const Eigen::Index n = d.n();
    if (k < 1 || k > n) throw std::invalid_argument("kmeans_pp_seed: k out of range");
    Rng rng(rng_seed);
    Centroids out;
    out.c.resize(k, d.m());
    out.sizes.assign(static_cast<std::size_t>(k), 0);

    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());

    Eigen::Index first = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    out.c.row(0) = d.points.row(first);
    chosen[static_cast<std::size_t>(first)] = 1;

    for (int j = 1; j < k; ++j) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dist = (d.points.row(i) - out.c.row(j - 1)).squaredNorm();
            if (dist < d2(i)) d2(i) = dist;
            if (!chosen[static_cast<std::size_t>(i)]) total += d2(i);
        }
        Eigen::Index pick = -1;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (chosen[static_cast<std::size_t>(i)]) continue;
                target -= d2(i);
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick < 0) {
            // all remaining candidates coincide with chosen centers
            for (Eigen::Index i = 0; i < n && pick < 0; ++i)
                if (!chosen[static_cast<std::size_t>(i)]) pick = i;
        }
        out.c.row(j) = d.points.row(pick);
        chosen[static_cast<std::size_t>(pick)] = 1;
    }
    return out;
}

namespace detail {

/// One Lloyd descent honoring must-link/cannot-link during assignment
/// (Wagstaff's rule, points processed in index order). Returns nullopt when
/// some point has no admissible center or an empty cluster cannot be
/// repaired without breaking a constraint.
inline std::optional<HeuristicResult> lloyd_constrained(const Dataset& d, const Centroids& init,
                                                        const ConstraintSet* cs, int max_iters) {
    const Eigen::Index n = d.n();
    const int k = init.k();
    if (k < 1 || k > n) throw std::invalid_argument("lloyd: init has k out of range");

    Eigen::MatrixXd centers = init.c;
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    std::vector<int> prev;
    bool converged = false;

    std::vector<char> has_ml(static_cast<std::size_t>(n), 0);
    if (cs)
        for (auto [a, b] : cs->must_link()) {
            has_ml[static_cast<std::size_t>(a)] = 1;
            has_ml[static_cast<std::size_t>(b)] = 1;
        }

    const auto violates = [&](Eigen::Index i, int c) {
        if (!cs) return false;
        for (auto [a, b] : cs->must_link()) {
            if (a == i && labels[static_cast<std::size_t>(b)] >= 0 &&
                labels[static_cast<std::size_t>(b)] != c)
                return true;
            if (b == i && labels[static_cast<std::size_t>(a)] >= 0 &&
                labels[static_cast<std::size_t>(a)] != c)
                return true;
        }
        for (auto [a, b] : cs->cannot_link()) {
            if (a == i && labels[static_cast<std::size_t>(b)] == c) return true;
            if (b == i && labels[static_cast<std::size_t>(a)] == c) return true;
        }
        return false;
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        prev = labels;
        std::fill(labels.begin(), labels.end(), -1);
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);

        for (Eigen::Index i = 0; i < n; ++i) {
            int best = -1;
            double best_dist = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double dist = (d.points.row(i) - centers.row(c)).squaredNorm();
                if (dist < best_dist && !violates(i, c)) {
                    best_dist = dist;
                    best = c;
                }
            }
            if (best < 0) return std::nullopt;
            labels[static_cast<std::size_t>(i)] = best;
            ++sizes[static_cast<std::size_t>(best)];
        }

        // repair empty clusters by stealing the point farthest from its
        // centroid; points tied to a must-link partner cannot move alone
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) continue;
            Eigen::Index steal = -1;
            double worst = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const int owner = labels[static_cast<std::size_t>(i)];
                if (sizes[static_cast<std::size_t>(owner)] < 2) continue;
                if (has_ml[static_cast<std::size_t>(i)]) continue;
                const double dist = (d.points.row(i) - centers.row(owner)).squaredNorm();
                if (dist > worst) {
                    worst = dist;
                    steal = i;
                }
            }
            if (steal < 0) return std::nullopt;
            --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(steal)])];
            labels[static_cast<std::size_t>(steal)] = c;
            ++sizes[static_cast<std::size_t>(c)];
        }

        for (int c = 0; c < k; ++c) centers.row(c).setZero();
        std::vector<int> count(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            centers.row(labels[static_cast<std::size_t>(i)]) += d.points.row(i);
            ++count[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(count[static_cast<std::size_t>(c)]);

        if (labels == prev) {
            converged = true;
            break;
        }
    }

    HeuristicResult res;
    res.clustering = canonicalize(labels);
    if (res.clustering.k != k) return std::nullopt;
    res.objective = mssc_objective(d, res.clustering);
    res.converged = converged;
    res.restarts_used = 1;
    return res;
}

}  // namespace detail

/// Plain Lloyd iteration from a given initialization.
inline HeuristicResult lloyd(const Dataset& d, const Centroids& init, int max_iters = 300) {
    auto res = detail::lloyd_constrained(d, init, nullptr, max_iters);
    // unconstrained descent always succeeds for k <= n
    return *res;
}

/// COP-k-means: best result over `restarts` seeded attempts, each honoring
/// the constraint set during assignment. Returns nullopt when every restart
/// fails. Throws on an infeasible constraint set, which is a different
/// condition than all restarts failing.
inline std::optional<HeuristicResult> cop_kmeans(const Dataset& d, int k, const ConstraintSet& cs,
                                                 int restarts, std::uint64_t rng_seed,
                                                 int max_iters = 300) {
    if (cs.n() != static_cast<int>(d.n()))
        throw std::invalid_argument("cop_kmeans: constraint set size mismatch");
    std::optional<HeuristicResult> best;
    int succeeded = 0;
    for (int r = 0; r < restarts; ++r) {
        const Centroids init = kmeans_pp_seed(d, k, Rng::derive(rng_seed, static_cast<std::uint64_t>(r)));
        auto res = detail::lloyd_constrained(d, init, cs.empty() ? nullptr : &cs, max_iters);
        if (!res) continue;
        ++succeeded;
        if (!best || res->objective < best->objective ||
            (res->objective == best->objective && res->clustering.labels < best->clustering.labels)) {
            best = res;
        }
    }
    if (best) best->restarts_used = succeeded;
    return best;
}

}  // namespace mssc

#endif  // MSSC_KMEANS_HPP
