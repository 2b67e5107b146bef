#ifndef MSSC_CLUSTERING_HPP
#define MSSC_CLUSTERING_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mssc/dataset.hpp"

namespace mssc {

/// A total assignment of n points to k non-empty clusters, kept in canonical
/// form: cluster indices appear in first-occurrence order, so label
/// sequences are directly comparable and ties break deterministically.
struct Clustering {
    std::vector<int> labels;
    int k = 0;

    Clustering() = default;
    Clustering(std::vector<int> l, int k_) : labels(std::move(l)), k(k_) {}

    std::size_t n() const { return labels.size(); }

    bool operator==(const Clustering& o) const { return k == o.k && labels == o.labels; }
};

/// Re-map labels to first-occurrence order and count the clusters actually
/// present. Throws if any value is negative.
inline Clustering canonicalize(const std::vector<int>& labels) {
    std::vector<int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int l = labels[i];
        if (l < 0) throw std::invalid_argument("negative cluster label");
        if (static_cast<std::size_t>(l) >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, -1);
        if (remap[static_cast<std::size_t>(l)] < 0) {
            int next = 0;
            for (int v : remap)
                if (v >= 0) ++next;
            remap[static_cast<std::size_t>(l)] = next;
        }
        out[i] = remap[static_cast<std::size_t>(l)];
    }
    int k = 0;
    for (int v : out) k = std::max(k, v + 1);
    return Clustering(std::move(out), k);
}

inline bool is_canonical(const Clustering& c) {
    int seen = 0;
    for (int l : c.labels) {
        if (l < 0 || l > seen) return false;
        if (l == seen) ++seen;
    }
    return seen == c.k;
}

/// Checks the non-trivial-assignment invariant: every index in [0,k) used.
inline bool is_valid_assignment(const Clustering& c) {
    if (c.k < 1 || c.labels.empty()) return false;
    std::vector<int> count(static_cast<std::size_t>(c.k), 0);
    for (int l : c.labels) {
        if (l < 0 || l >= c.k) return false;
        ++count[static_cast<std::size_t>(l)];
    }
    for (int v : count)
        if (v == 0) return false;
    return true;
}

struct Centroids {
    Eigen::MatrixXd c;       // k x m
    std::vector<int> sizes;  // per-cluster counts

    int k() const { return static_cast<int>(c.rows()); }
};

inline Centroids centroids(const Dataset& d, const Clustering& cl) {
    const Eigen::Index n = d.n(), m = d.m();
    Centroids out;
    out.c.setZero(cl.k, m);
    out.sizes.assign(static_cast<std::size_t>(cl.k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int j = cl.labels[static_cast<std::size_t>(i)];
        out.c.row(j) += d.points.row(i);
        ++out.sizes[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < cl.k; ++j) out.c.row(j) /= static_cast<double>(out.sizes[static_cast<std::size_t>(j)]);
    return out;
}

/// Sum of squared distances to assigned centroids, accumulated per cluster
/// in centered form to avoid cancellation on large-magnitude features.
inline double mssc_objective(const Dataset& d, const Clustering& cl) {
    const Centroids cen = centroids(d, cl);
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.n(); ++i) {
        const int j = cl.labels[static_cast<std::size_t>(i)];
        total += (d.points.row(i) - cen.c.row(j)).squaredNorm();
    }
    return total;
}

/// The normalized cluster projector of a clustering: 1/|C_j| on
/// within-cluster entries, 0 elsewhere. Satisfies Ze=e, tr(Z)=k, Z>=0,
/// Z^2=Z, rank k.
struct ProjectorMatrix {
    Eigen::MatrixXd Z;
    int k = 0;
};

inline ProjectorMatrix projector_from_clustering(const Clustering& cl) {
    const std::size_t n = cl.n();
    std::vector<int> sizes(static_cast<std::size_t>(cl.k), 0);
    for (int l : cl.labels) ++sizes[static_cast<std::size_t>(l)];
    ProjectorMatrix p;
    p.k = cl.k;
    p.Z.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (cl.labels[i] == cl.labels[j])
                p.Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    1.0 / sizes[static_cast<std::size_t>(cl.labels[i])];
    return p;
}

/// tr(W) - <W,Z>; equals mssc_objective exactly when Z comes from a genuine
/// clustering.
inline double objective_from_projector(const GramMatrix& g, const ProjectorMatrix& p) {
    return g.trace_w - g.W.cwiseProduct(p.Z).sum();
}

struct RecoveredClustering {
    Clustering clustering;
    bool k_matches = true;
};

/// Greedy sweep recovery: point 0 seeds cluster 0 together with every i
/// having Z_{0i} > threshold; the first unassigned point seeds the next
/// cluster, until all points are assigned. The result is canonical. The
/// k_matches flag reports whether the recovered cluster count equals Z's k;
/// the caller decides whether to repair via heuristic rounding.
inline RecoveredClustering clustering_from_projector(const ProjectorMatrix& p, double threshold) {
    const Eigen::Index n = p.Z.rows();
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (Eigen::Index seed = 0; seed < n; ++seed) {
        if (labels[static_cast<std::size_t>(seed)] >= 0) continue;
        labels[static_cast<std::size_t>(seed)] = next;
        for (Eigen::Index i = seed + 1; i < n; ++i)
            if (labels[static_cast<std::size_t>(i)] < 0 && p.Z(seed, i) > threshold)
                labels[static_cast<std::size_t>(i)] = next;
        ++next;
    }
    RecoveredClustering out;
    out.clustering = Clustering(std::move(labels), next);
    out.k_matches = (next == p.k);
    return out;
}

/// Number of partitions of n elements into exactly k non-empty blocks,
/// saturating at `cap` to keep the arithmetic overflow-free.
inline std::uint64_t stirling2(int n, int k, std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 4) {
    if (k <= 0 || k > n) return 0;
    std::vector<std::uint64_t> row(static_cast<std::size_t>(k) + 1, 0);
    row[1] = 1; // S(1,1)
    for (int i = 2; i <= n; ++i) {
        for (int j = std::min(i, k); j >= 1; --j) {
            std::uint64_t v = row[static_cast<std::size_t>(j)];
            std::uint64_t prev = row[static_cast<std::size_t>(j) - 1];
            std::uint64_t scaled = (v > cap / static_cast<std::uint64_t>(j)) ? cap : v * static_cast<std::uint64_t>(j);
            row[static_cast<std::size_t>(j)] = std::min(cap, scaled + prev);
        }
        row[0] = 0;
    }
    return row[static_cast<std::size_t>(k)];
}

/// Visit every partition of [n] into exactly k non-empty blocks as a
/// restricted-growth string (which is already the canonical label form),
/// in lexicographic order. The callback may return false to stop early.
inline void for_each_partition(int n, int k, const std::function<bool(const std::vector<int>&)>& visit) {
    if (k < 1 || k > n) return;
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    bool stop = false;
    std::function<void(int, int)> rec = [&](int i, int maxv) {
        if (stop) return;
        if (i == n) {
            if (maxv + 1 == k) stop = !visit(a);
            return;
        }
        // prune branches that can no longer reach k blocks
        if (maxv + 1 + (n - i) < k) return;
        const int upper = std::min(maxv + 1, k - 1);
        for (int v = 0; v <= upper && !stop; ++v) {
            const int nmax = std::max(maxv, v);
            if (nmax + 1 + (n - 1 - i) < k) continue;
            a[static_cast<std::size_t>(i)] = v;
            rec(i + 1, nmax);
        }
    };
    rec(1, 0);
}

struct BruteForceResult {
    Clustering clustering;
    double objective = std::numeric_limits<double>::infinity();
};

/// Exhaustive MSSC oracle over restricted-growth strings. Enumeration order
/// is lexicographic on canonical label sequences, so keeping the first
/// strict minimum implements the documented tie-break.
inline BruteForceResult brute_force_optimum(const Dataset& d, int k,
                                            std::uint64_t partition_cap = 10000000ULL) {
    const int n = static_cast<int>(d.n());
    if (k < 1 || k > n) throw std::invalid_argument("brute_force_optimum: k out of range");
    if (stirling2(n, k) > partition_cap)
        throw std::invalid_argument("brute_force_optimum: instance too large");

    BruteForceResult best;
    Clustering cur;
    cur.k = k;
    for_each_partition(n, k, [&](const std::vector<int>& labels) {
        cur.labels = labels;
        const double obj = mssc_objective(d, cur);
        if (obj < best.objective) {
            best.objective = obj;
            best.clustering = cur;
        }
        return true;
    });
    return best;
}

}  // namespace mssc

#endif  // MSSC_CLUSTERING_HPP
