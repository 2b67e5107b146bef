#ifndef MSSC_BRANCH_AND_BOUND_HPP
#define MSSC_BRANCH_AND_BOUND_HPP

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mssc/clustering.hpp"
#include "mssc/constraints.hpp"
#include "mssc/dataset.hpp"
#include "mssc/kmeans.hpp"
#include "mssc/sdp.hpp"

namespace mssc {

enum class SolveStatus { optimal, gap_limit, node_limit, time_limit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::gap_limit: return "gap_limit";
        case SolveStatus::node_limit: return "node_limit";
        case SolveStatus::time_limit: return "time_limit";
    }
    return "unknown";
}

struct SolverConfig {
    double gap_tol = 1e-6;                // relative optimality gap
    std::uint64_t node_limit = 100000;
    double time_limit_seconds = 0.0;      // 0 = unlimited
    std::uint64_t rng_seed = 12345;
    int root_kmeans_restarts = 20;
    int node_cop_restarts = 5;
    std::uint64_t enumeration_budget = 2000; // close nodes exactly below this partition count

    double sdp_tol = 1e-6;
    int sdp_max_iters = 20000;
    int root_rounds = 5;
    int root_cuts_per_round = 500;
    int node_rounds = 1;
    int node_cuts_per_round = 100;
    int node_sdp_max_iters = 4000;
    int clique_sample_budget = 20000;
    double eps_cut = 1e-4;

    std::ostream* log = nullptr; // progress lines in key=value form
};

struct BBNode {
    std::uint64_t id = 0;
    ConstraintSet constraints{1};
    double lower_bound = 0.0;
    int depth = 0;
    CutPool cuts; // inherited from the parent's active pool
};

struct SolveResult {
    Clustering optimum;
    double objective = std::numeric_limits<double>::infinity();
    double certified_gap = std::numeric_limits<double>::infinity();
    std::uint64_t nodes_explored = 0;
    double wall_time = 0.0;
    SolveStatus status = SolveStatus::gap_limit;
};

/// The most ambiguous undecided pair: argmax of min(Z_ij, Z_ii - Z_ij),
/// the entry farthest from being clearly "co-clustered" or "separated".
/// Absent when every pair is decided or no pair is meaningfully ambiguous.
inline std::optional<IndexPair> branching_pair(const Eigen::MatrixXd& z, const ConstraintSet& cs,
                                               double ambiguity_threshold = 1e-6) {
    const int n = static_cast<int>(z.rows());
    std::optional<IndexPair> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (cs.decided(i, j)) continue;
            const double score = std::min(z(i, j), z(i, i) - z(i, j));
            if (score > best_score) {
                best_score = score;
                best = IndexPair{i, j};
            }
        }
    if (!best || best_score < ambiguity_threshold) {
        if (best && best_score < ambiguity_threshold) return std::nullopt;
        return best;
    }
    return best;
}

namespace detail_bb {

/// Branching fallback for nodes whose relaxation looks integral: the
/// strongest co-clustered undecided pair (largest Z_ij). Its must-link
/// child merges two groups, so the chain of integral nodes shrinks toward
/// the enumeration threshold instead of cycling through separated pairs.
inline std::optional<IndexPair> any_undecided_pair(const Eigen::MatrixXd& z, const ConstraintSet& cs) {
    const int n = static_cast<int>(z.rows());
    std::optional<IndexPair> best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (cs.decided(i, j)) continue;
            if (z(i, j) > best_score) {
                best_score = z(i, j);
                best = IndexPair{i, j};
            }
        }
    return best;
}

/// Exact optimum over all completions of a node: partitions of the
/// must-link groups into k clusters that respect group-level cannot-links.
/// Returns nullopt when no completion exists.
inline std::optional<BruteForceResult> enumerate_node(const Dataset& d, int k, const ConstraintSet& cs) {
    const auto groups = cs.groups();
    const int g = static_cast<int>(groups.size());
    if (k > g) return std::nullopt;

    // group-level cannot-link pairs in groups() indexing
    std::vector<int> group_of(static_cast<std::size_t>(cs.n()), -1);
    for (int gi = 0; gi < g; ++gi)
        for (int member : groups[static_cast<std::size_t>(gi)])
            group_of[static_cast<std::size_t>(member)] = gi;
    std::vector<IndexPair> cl;
    for (auto [a, b] : cs.cannot_link())
        cl.push_back(ordered_pair(group_of[static_cast<std::size_t>(a)], group_of[static_cast<std::size_t>(b)]));

    std::optional<BruteForceResult> best;
    std::vector<int> point_labels(static_cast<std::size_t>(cs.n()));
    for_each_partition(g, k, [&](const std::vector<int>& glabels) {
        for (auto [a, b] : cl)
            if (glabels[static_cast<std::size_t>(a)] == glabels[static_cast<std::size_t>(b)]) return true;
        for (int gi = 0; gi < g; ++gi)
            for (int member : groups[static_cast<std::size_t>(gi)])
                point_labels[static_cast<std::size_t>(member)] = glabels[static_cast<std::size_t>(gi)];
        Clustering c = canonicalize(point_labels);
        const double obj = mssc_objective(d, c);
        if (!best || obj < best->objective) {
            best = BruteForceResult{std::move(c), obj};
        }
        return true;
    });
    return best;
}

}  // namespace detail_bb

/// Exact MSSC: best-first branch-and-bound on must-link/cannot-link
/// dichotomies with SDP lower bounds, COP-k-means upper bounds and
/// projector rounding. Nodes whose completion count is small are finished
/// by exact enumeration instead of further branching.
inline SolveResult solve_exact(const Dataset& d, int k, const SolverConfig& cfg = {}) {
    const int n = static_cast<int>(d.n());
    if (k < 2) throw std::invalid_argument("solve_exact: k must be at least 2");
    if (k > n) throw std::invalid_argument("solve_exact: k exceeds the number of points");
    const auto t_start = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    SolveResult out;

    if (k == n) { // all singletons, zero objective, solved at the root
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i;
        out.optimum = Clustering(std::move(labels), k);
        out.objective = 0.0;
        out.certified_gap = 0.0;
        out.nodes_explored = 1;
        out.status = SolveStatus::optimal;
        out.wall_time = elapsed();
        return out;
    }

    const GramMatrix g = gram(d);

    // root incumbent: best of seeded k-means++ runs
    Clustering incumbent;
    double inc_obj = std::numeric_limits<double>::infinity();
    const auto offer = [&](const Clustering& c, double obj) {
        if (obj < inc_obj || (obj == inc_obj && c.labels < incumbent.labels)) {
            incumbent = c;
            inc_obj = obj;
            if (cfg.log)
                *cfg.log << "event=incumbent objective=" << inc_obj << " time=" << elapsed() << "\n";
        }
    };
    for (int r = 0; r < cfg.root_kmeans_restarts; ++r) {
        const auto seed = kmeans_pp_seed(d, k, Rng::derive(cfg.rng_seed, static_cast<std::uint64_t>(r)));
        const HeuristicResult h = lloyd(d, seed);
        offer(h.clustering, h.objective);
    }

    struct QueueEntry {
        double bound;
        std::uint64_t id;
        bool operator>(const QueueEntry& o) const {
            if (bound != o.bound) return bound > o.bound;
            return id > o.id;
        }
    };
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> frontier;
    std::vector<BBNode> nodes;
    nodes.push_back(BBNode{0, ConstraintSet(n), 0.0, 0, CutPool{}});
    frontier.push({0.0, 0});
    std::uint64_t next_id = 1;

    double closed_lb = std::numeric_limits<double>::infinity(); // min over closed subtrees
    const auto prune_threshold = [&] { return inc_obj - cfg.gap_tol * std::abs(inc_obj); };

    SolveStatus stop_status = SolveStatus::optimal;
    bool stopped = false;

    while (!frontier.empty()) {
        if (out.nodes_explored >= cfg.node_limit) {
            stop_status = SolveStatus::node_limit;
            stopped = true;
            break;
        }
        if (cfg.time_limit_seconds > 0.0 && elapsed() > cfg.time_limit_seconds) {
            stop_status = SolveStatus::time_limit;
            stopped = true;
            break;
        }

        const QueueEntry top = frontier.top();
        frontier.pop();
        BBNode node = std::move(nodes[static_cast<std::size_t>(top.id)]);
        node.lower_bound = std::max(node.lower_bound, top.bound);

        if (node.lower_bound >= prune_threshold()) {
            closed_lb = std::min(closed_lb, node.lower_bound);
            continue;
        }
        ++out.nodes_explored;

        if (cfg.log && out.nodes_explored % 100 == 0)
            *cfg.log << "node=" << node.id << " depth=" << node.depth << " bound=" << node.lower_bound
                     << " incumbent=" << inc_obj << " gap="
                     << (inc_obj - node.lower_bound) / std::max(std::abs(inc_obj), 1e-12)
                     << " frontier=" << frontier.size() << "\n";

        const int groups = node.constraints.group_count();

        // infeasible by pigeonhole: more than k pairwise-separated groups
        if (node.constraints.has_cl_clique_exceeding(k)) continue;

        if (node.constraints.all_decided()) {
            if (groups != k) continue; // no completion
            auto exact = detail_bb::enumerate_node(d, k, node.constraints);
            if (!exact) continue;
            offer(exact->clustering, exact->objective);
            closed_lb = std::min(closed_lb, exact->objective);
            continue;
        }

        if (stirling2(groups, k) <= cfg.enumeration_budget) {
            auto exact = detail_bb::enumerate_node(d, k, node.constraints);
            if (!exact) continue;
            offer(exact->clustering, exact->objective);
            closed_lb = std::min(closed_lb, exact->objective);
            continue;
        }

        // SDP bound with cutting planes
        SdpProblem problem{g, k, node.constraints, node.cuts};
        SdpOptions opt;
        opt.tol = cfg.sdp_tol;
        opt.eps_cut = cfg.eps_cut;
        opt.clique_sample_budget = cfg.clique_sample_budget;
        opt.rng_seed = Rng::derive(cfg.rng_seed, 0x5dffb2e1ULL + node.id);
        const bool is_root = node.id == 0;
        opt.max_iters = is_root ? cfg.sdp_max_iters : cfg.node_sdp_max_iters;
        if (cfg.time_limit_seconds > 0.0)
            opt.time_budget_seconds = std::max(1e-3, cfg.time_limit_seconds - elapsed());
        const int rounds = is_root ? cfg.root_rounds : cfg.node_rounds;
        const int cuts_per_round = is_root ? cfg.root_cuts_per_round : cfg.node_cuts_per_round;

        SdpResult sdp = cutting_loop(problem, rounds, cuts_per_round, cfg.sdp_tol, opt);
        node.lower_bound = std::max(node.lower_bound, sdp.safe_lower_bound);

        // incumbent attempts: COP-k-means under the node constraints, then
        // rounding the relaxed Z (any valid clustering is a global candidate)
        if (auto h = cop_kmeans(d, k, node.constraints, cfg.node_cop_restarts,
                                Rng::derive(cfg.rng_seed, 0x9e3779b9ULL + node.id)))
            offer(h->clustering, h->objective);
        const RecoveredClustering rounded =
            clustering_from_projector(ProjectorMatrix{sdp.Z, k}, 1.0 / (2.0 * n));
        if (rounded.k_matches && is_valid_assignment(rounded.clustering)) {
            const Centroids init = centroids(d, rounded.clustering);
            const HeuristicResult polished = lloyd(d, init);
            offer(polished.clustering, polished.objective);
        }

        if (node.lower_bound >= prune_threshold()) {
            closed_lb = std::min(closed_lb, node.lower_bound);
            continue;
        }

        std::optional<IndexPair> pick = branching_pair(sdp.Z, node.constraints);
        if (!pick) pick = detail_bb::any_undecided_pair(sdp.Z, node.constraints);
        if (!pick) { // should be unreachable: all_decided was handled above
            auto exact = detail_bb::enumerate_node(d, k, node.constraints);
            if (exact) {
                offer(exact->clustering, exact->objective);
                closed_lb = std::min(closed_lb, exact->objective);
            }
            continue;
        }

        const auto [bi, bj] = *pick;
        if (auto ml = node.constraints.with_must_link(bi, bj)) {
            nodes.push_back(BBNode{next_id, std::move(*ml), node.lower_bound, node.depth + 1, problem.cuts});
            frontier.push({node.lower_bound, next_id});
            ++next_id;
        }
        if (auto cl = node.constraints.with_cannot_link(bi, bj)) {
            nodes.push_back(BBNode{next_id, std::move(*cl), node.lower_bound, node.depth + 1, problem.cuts});
            frontier.push({node.lower_bound, next_id});
            ++next_id;
        }
    }

    double global_lb = std::min(closed_lb, inc_obj);
    if (stopped) {
        // open nodes still bound the remaining search space
        while (!frontier.empty()) {
            global_lb = std::min(global_lb, frontier.top().bound);
            frontier.pop();
        }
    }
    out.optimum = incumbent;
    out.objective = inc_obj;
    out.certified_gap = std::max(0.0, (inc_obj - global_lb) / std::max(std::abs(inc_obj), 1e-12));
    out.wall_time = elapsed();
    out.status = out.certified_gap <= cfg.gap_tol ? SolveStatus::optimal
                 : stopped                        ? stop_status
                                                  : SolveStatus::gap_limit;
    if (cfg.log)
        *cfg.log << "event=done status=" << to_string(out.status) << " objective=" << out.objective
                 << " gap=" << out.certified_gap << " nodes=" << out.nodes_explored
                 << " time=" << out.wall_time << "\n";
    return out;
}

}  // namespace mssc

#endif  // MSSC_BRANCH_AND_BOUND_HPP
