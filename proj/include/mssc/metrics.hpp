#ifndef MSSC_METRICS_HPP
#define MSSC_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mssc/clustering.hpp"
#include "mssc/dataset.hpp"

namespace mssc {

/// Cross-tabulation of two clusterings over the same points.
struct ContingencyTable {
    std::vector<std::vector<std::int64_t>> counts; // k1 x k2
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t n = 0;

    int k1() const { return static_cast<int>(counts.size()); }
    int k2() const { return counts.empty() ? 0 : static_cast<int>(counts[0].size()); }
};

inline ContingencyTable contingency(const Clustering& a, const Clustering& b) {
    if (a.n() != b.n()) throw std::invalid_argument("contingency: clusterings of different length");
    ContingencyTable t;
    t.n = static_cast<std::int64_t>(a.n());
    t.counts.assign(static_cast<std::size_t>(a.k), std::vector<std::int64_t>(static_cast<std::size_t>(b.k), 0));
    t.row_sums.assign(static_cast<std::size_t>(a.k), 0);
    t.col_sums.assign(static_cast<std::size_t>(b.k), 0);
    for (std::size_t i = 0; i < a.n(); ++i) {
        const int r = a.labels[i], c = b.labels[i];
        ++t.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        ++t.row_sums[static_cast<std::size_t>(r)];
        ++t.col_sums[static_cast<std::size_t>(c)];
    }
    return t;
}

namespace detail {

inline double entropy(const std::vector<std::int64_t>& sums, std::int64_t n) {
    double h = 0.0;
    for (std::int64_t s : sums) {
        if (s <= 0) continue;
        const double p = static_cast<double>(s) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    return h;
}

inline double comb2(std::int64_t x) {
    return x < 2 ? 0.0 : 0.5 * static_cast<double>(x) * static_cast<double>(x - 1);
}

}  // namespace detail

/// Mutual information (natural log); zero-count terms are skipped.
inline double mutual_information(const ContingencyTable& t) {
    const double n = static_cast<double>(t.n);
    double mi = 0.0;
    for (int i = 0; i < t.k1(); ++i) {
        for (int j = 0; j < t.k2(); ++j) {
            const std::int64_t nij = t.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (nij == 0) continue;
            const double a = static_cast<double>(t.row_sums[static_cast<std::size_t>(i)]);
            const double b = static_cast<double>(t.col_sums[static_cast<std::size_t>(j)]);
            mi += (static_cast<double>(nij) / n) * std::log(n * static_cast<double>(nij) / (a * b));
        }
    }
    return std::max(0.0, mi);
}

/// Expected mutual information of two random clusterings with the table's
/// marginals, under the exact hypergeometric model.
inline double expected_mutual_information(const ContingencyTable& t) {
    const std::int64_t n = t.n;
    std::vector<double> lf(static_cast<std::size_t>(n) + 2, 0.0);
    for (std::size_t x = 2; x < lf.size(); ++x) lf[x] = lf[x - 1] + std::log(static_cast<double>(x));
    const auto logfact = [&](std::int64_t x) { return lf[static_cast<std::size_t>(x)]; };

    double emi = 0.0;
    for (std::int64_t a : t.row_sums) {
        for (std::int64_t b : t.col_sums) {
            const std::int64_t lo = std::max<std::int64_t>(1, a + b - n);
            const std::int64_t hi = std::min(a, b);
            for (std::int64_t nij = lo; nij <= hi; ++nij) {
                const double log_term = logfact(a) + logfact(b) + logfact(n - a) + logfact(n - b) -
                                        logfact(n) - logfact(nij) - logfact(a - nij) - logfact(b - nij) -
                                        logfact(n - a - b + nij);
                const double contribution = (static_cast<double>(nij) / static_cast<double>(n)) *
                                            std::log(static_cast<double>(n) * static_cast<double>(nij) /
                                                     (static_cast<double>(a) * static_cast<double>(b)));
                emi += contribution * std::exp(log_term);
            }
        }
    }
    return emi;
}

/// AMI with arithmetic averaging of the entropies. 1 on identical
/// clusterings; ~0 in expectation for independent random labelings.
inline double adjusted_mutual_information(const ContingencyTable& t) {
    const int r = t.k1(), c = t.k2();
    // both partitions trivial: everything in one cluster, or all singletons
    if ((r == 1 && c == 1) || (t.n > 0 && r == t.n && c == t.n)) return 1.0;
    const double mi = mutual_information(t);
    const double emi = expected_mutual_information(t);
    const double h1 = detail::entropy(t.row_sums, t.n);
    const double h2 = detail::entropy(t.col_sums, t.n);
    double denom = 0.5 * (h1 + h2) - emi;
    const double eps = std::numeric_limits<double>::epsilon();
    denom = denom < 0 ? std::min(denom, -eps) : std::max(denom, eps);
    return (mi - emi) / denom;
}

/// Pair-counting adjusted Rand index via contingency combinations.
inline double adjusted_rand_score(const ContingencyTable& t) {
    if (t.n < 2) throw std::invalid_argument("adjusted_rand_score: need n >= 2");
    double sum_nij = 0.0;
    for (const auto& row : t.counts)
        for (std::int64_t v : row) sum_nij += detail::comb2(v);
    double sum_a = 0.0, sum_b = 0.0;
    for (std::int64_t v : t.row_sums) sum_a += detail::comb2(v);
    for (std::int64_t v : t.col_sums) sum_b += detail::comb2(v);
    const double c2n = detail::comb2(t.n);
    const double expected = sum_a * sum_b / c2n;
    const double denom = 0.5 * (sum_a + sum_b) - expected;
    if (denom == 0.0) return 1.0;
    return (sum_nij - expected) / denom;
}

struct HomogeneityCompleteness {
    double h = 1.0;
    double c = 1.0;
    double v = 1.0;
};

/// Homogeneity, completeness and their weighted harmonic mean. Rows of the
/// table are the reference classes, columns the prediction. At beta=1 the
/// v score is the NMI reported in the result tables.
inline HomogeneityCompleteness homogeneity_completeness_v(const ContingencyTable& t, double beta = 1.0) {
    if (beta < 0) throw std::invalid_argument("homogeneity_completeness_v: beta must be >= 0");
    const double n = static_cast<double>(t.n);
    const double h_row = detail::entropy(t.row_sums, t.n);
    const double h_col = detail::entropy(t.col_sums, t.n);

    // H(rows | cols) and H(cols | rows)
    double h_rc = 0.0, h_cr = 0.0;
    for (int i = 0; i < t.k1(); ++i) {
        for (int j = 0; j < t.k2(); ++j) {
            const std::int64_t nij = t.counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (nij == 0) continue;
            const double p = static_cast<double>(nij) / n;
            h_rc -= p * std::log(static_cast<double>(nij) /
                                 static_cast<double>(t.col_sums[static_cast<std::size_t>(j)]));
            h_cr -= p * std::log(static_cast<double>(nij) /
                                 static_cast<double>(t.row_sums[static_cast<std::size_t>(i)]));
        }
    }

    HomogeneityCompleteness out;
    out.h = h_row > 0.0 ? 1.0 - h_rc / h_row : 1.0;
    out.c = h_col > 0.0 ? 1.0 - h_cr / h_col : 1.0;
    const double denom = beta * out.h + out.c;
    out.v = denom > 0.0 ? (1.0 + beta) * out.h * out.c / denom : 0.0;
    return out;
}

/// Geometric mean of pairwise precision and recall; 0 when either
/// denominator vanishes (e.g. all-singleton clusterings).
inline double fowlkes_mallows(const ContingencyTable& t) {
    if (t.n < 2) throw std::invalid_argument("fowlkes_mallows: need n >= 2");
    double tp = 0.0;
    for (const auto& row : t.counts)
        for (std::int64_t v : row) tp += detail::comb2(v);
    double same_a = 0.0, same_b = 0.0;
    for (std::int64_t v : t.row_sums) same_a += detail::comb2(v);
    for (std::int64_t v : t.col_sums) same_b += detail::comb2(v);
    if (same_a == 0.0 || same_b == 0.0) return 0.0;
    return tp / std::sqrt(same_a * same_b);
}

/// Variance ratio criterion [B/(k-1)] / [W/(n-k)]. Perfectly tight clusters
/// (W = 0) return +infinity.
inline double calinski_harabasz(const Dataset& d, const Clustering& cl) {
    const Eigen::Index n = d.n();
    if (cl.k < 2 || cl.k > static_cast<int>(n) - 1)
        throw std::invalid_argument("calinski_harabasz: need 2 <= k <= n-1");
    const Centroids cen = centroids(d, cl);
    const Eigen::RowVectorXd mean = d.points.colwise().mean();
    double between = 0.0;
    for (int j = 0; j < cl.k; ++j)
        between += static_cast<double>(cen.sizes[static_cast<std::size_t>(j)]) *
                   (cen.c.row(j) - mean).squaredNorm();
    const double within = mssc_objective(d, cl);
    if (within == 0.0) return std::numeric_limits<double>::infinity();
    return (between / (cl.k - 1)) / (within / (static_cast<double>(n) - cl.k));
}

/// Davies-Bouldin index; throws on coincident centroids (degenerate
/// clustering with an undefined ratio).
inline double davies_bouldin(const Dataset& d, const Clustering& cl) {
    if (cl.k < 2) throw std::invalid_argument("davies_bouldin: need k >= 2");
    const Centroids cen = centroids(d, cl);
    std::vector<double> spread(static_cast<std::size_t>(cl.k), 0.0);
    for (Eigen::Index i = 0; i < d.n(); ++i) {
        const int j = cl.labels[static_cast<std::size_t>(i)];
        spread[static_cast<std::size_t>(j)] += (d.points.row(i) - cen.c.row(j)).squaredNorm();
    }
    for (int j = 0; j < cl.k; ++j)
        spread[static_cast<std::size_t>(j)] =
            std::sqrt(spread[static_cast<std::size_t>(j)] / cen.sizes[static_cast<std::size_t>(j)]);

    double total = 0.0;
    for (int i = 0; i < cl.k; ++i) {
        double worst = 0.0;
        for (int j = 0; j < cl.k; ++j) {
            if (i == j) continue;
            const double dist = (cen.c.row(i) - cen.c.row(j)).norm();
            if (dist == 0.0) throw std::domain_error("davies_bouldin: coincident centroids");
            worst = std::max(worst, (spread[static_cast<std::size_t>(i)] +
                                     spread[static_cast<std::size_t>(j)]) /
                                        dist);
        }
        total += worst;
    }
    return total / cl.k;
}

/// Mean silhouette over all points, with plain Euclidean distances.
/// Points in singleton clusters score 0.
inline double silhouette(const Dataset& d, const Clustering& cl) {
    const Eigen::Index n = d.n();
    if (cl.k < 2 || cl.k > static_cast<int>(n) - 1)
        throw std::invalid_argument("silhouette: need 2 <= k <= n-1");
    std::vector<int> sizes(static_cast<std::size_t>(cl.k), 0);
    for (int l : cl.labels) ++sizes[static_cast<std::size_t>(l)];

    double total = 0.0;
    std::vector<double> mean_dist(static_cast<std::size_t>(cl.k));
    for (Eigen::Index i = 0; i < n; ++i) {
        const int own = cl.labels[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(own)] == 1) continue; // s_i = 0
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_dist[static_cast<std::size_t>(cl.labels[static_cast<std::size_t>(j)])] +=
                (d.points.row(i) - d.points.row(j)).norm();
        }
        const double a = mean_dist[static_cast<std::size_t>(own)] /
                         (sizes[static_cast<std::size_t>(own)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < cl.k; ++c) {
            if (c == own) continue;
            b = std::min(b, mean_dist[static_cast<std::size_t>(c)] / sizes[static_cast<std::size_t>(c)]);
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

/// One row of the result tables: the optimum value plus nine measure
/// scores. Extrinsic cells are absent on ground-truth rows.
struct MetricReport {
    double d_sos = 0.0;
    std::optional<double> ami, ars, h, c, nmi, fms;
    std::optional<double> chc, dbi, s_score;
    int k = 0;
    bool is_ground_truth_row = false;
};

}  // namespace mssc

#endif  // MSSC_METRICS_HPP
