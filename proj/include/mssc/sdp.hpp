#ifndef MSSC_SDP_HPP
#define MSSC_SDP_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mssc/constraints.hpp"
#include "mssc/dataset.hpp"
#include "mssc/rng.hpp"

namespace mssc {

/// Valid inequalities collected across solves. Triangles are stored as
/// (apex; j, h) with j < h, cliques as sorted (k+1)-subsets.
struct CutPool {
    std::vector<std::array<int, 3>> triangle;
    std::vector<IndexPair> pair;
    std::vector<std::vector<int>> clique;

    std::size_t size() const { return triangle.size() + pair.size() + clique.size(); }
};

struct SdpProblem {
    GramMatrix gram;
    int k = 0;
    ConstraintSet constraints{1};
    CutPool cuts;
};

struct SdpResult {
    Eigen::MatrixXd Z;            // approximate relaxation solution (exactly PSD)
    double raw_value = 0.0;       // -<W,Z> at the approximate solution
    double safe_lower_bound = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    bool infeasible_hint = false; // diverging residuals; advisory only
};

struct SdpOptions {
    double tol = 1e-6;
    int max_iters = 20000;
    double eps_cut = 1e-4;
    int cuts_per_round = 500;
    int rounds = 5;
    int clique_sample_budget = 20000;
    std::uint64_t rng_seed = 1;
    double time_budget_seconds = 0.0; // 0 = unlimited
    double margin_coeff = 1e-11;      // floating-point slop on the certificate
};

namespace detail_sdp {

constexpr double kSqrt2 = 1.4142135623730950488;

/// Scaled upper-triangle vectorization: dot(svec(A), svec(B)) = <A,B>_F.
struct SvecSpace {
    int n = 0;
    int dim = 0;

    explicit SvecSpace(int n_) : n(n_), dim(n_ * (n_ + 1) / 2) {}

    int idx(int i, int j) const {
        if (i > j) std::swap(i, j);
        return j * (j + 1) / 2 + i;
    }

    Eigen::VectorXd to_svec(const Eigen::MatrixXd& m) const {
        Eigen::VectorXd v(dim);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= j; ++i) v(idx(i, j)) = (i == j) ? m(i, j) : kSqrt2 * m(i, j);
        return v;
    }

    Eigen::MatrixXd from_svec(const Eigen::VectorXd& v) const {
        Eigen::MatrixXd m(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= j; ++i) {
                const double x = (i == j) ? v(idx(i, j)) : v(idx(i, j)) / kSqrt2;
                m(i, j) = x;
                m(j, i) = x;
            }
        return m;
    }
};

/// One linear functional on symmetric matrices, expressed in svec
/// coordinates. Coefficients are accumulated on matrix entries.
struct LinearRow {
    std::vector<std::pair<int, double>> entries;
    double rhs = 0.0;

    void add(const SvecSpace& sp, int i, int j, double coeff) {
        const double c = (i == j) ? coeff : coeff / kSqrt2;
        entries.emplace_back(sp.idx(i, j), c);
    }
};

struct ProblemMatrices {
    SvecSpace sp{1};
    std::vector<LinearRow> eq_rows;
    std::vector<LinearRow> cut_rows; // normalized to <G,Z> >= rhs, slack per row

    int n_eq() const { return static_cast<int>(eq_rows.size()); }
    int n_cut() const { return static_cast<int>(cut_rows.size()); }
};

inline ProblemMatrices build_rows(const SdpProblem& p) {
    const int n = static_cast<int>(p.gram.W.rows());
    ProblemMatrices pm;
    pm.sp = SvecSpace(n);

    // Ze = e
    for (int i = 0; i < n; ++i) {
        LinearRow r;
        for (int l = 0; l < n; ++l) r.add(pm.sp, std::min(i, l), std::max(i, l), 1.0);
        r.rhs = 1.0;
        pm.eq_rows.push_back(std::move(r));
    }
    // tr(Z) = k
    {
        LinearRow r;
        for (int i = 0; i < n; ++i) r.add(pm.sp, i, i, 1.0);
        r.rhs = static_cast<double>(p.k);
        pm.eq_rows.push_back(std::move(r));
    }
    // must-link (a,b): row a of Z equals row b, spanning pairs per group
    for (const auto& group : p.constraints.groups()) {
        for (std::size_t t = 1; t < group.size(); ++t) {
            const int a = group[0], b = group[t];
            for (int l = 0; l < n; ++l) {
                LinearRow r;
                r.add(pm.sp, std::min(a, l), std::max(a, l), 1.0);
                r.add(pm.sp, std::min(b, l), std::max(b, l), -1.0);
                r.rhs = 0.0;
                pm.eq_rows.push_back(std::move(r));
            }
        }
    }
    // cannot-link (a,b): Z_ab = 0
    for (auto [a, b] : p.constraints.cannot_link()) {
        LinearRow r;
        r.add(pm.sp, a, b, 1.0);
        r.rhs = 0.0;
        pm.eq_rows.push_back(std::move(r));
    }

    // cuts
    for (const auto& t : p.cuts.triangle) {
        LinearRow r; // Z_ii + Z_jh - Z_ij - Z_ih >= 0
        const int i = t[0], j = t[1], h = t[2];
        r.add(pm.sp, i, i, 1.0);
        r.add(pm.sp, std::min(j, h), std::max(j, h), 1.0);
        r.add(pm.sp, std::min(i, j), std::max(i, j), -1.0);
        r.add(pm.sp, std::min(i, h), std::max(i, h), -1.0);
        r.rhs = 0.0;
        pm.cut_rows.push_back(std::move(r));
    }
    for (auto [i, j] : p.cuts.pair) {
        LinearRow r1; // Z_ii - Z_ij >= 0
        r1.add(pm.sp, i, i, 1.0);
        r1.add(pm.sp, i, j, -1.0);
        pm.cut_rows.push_back(std::move(r1));
        LinearRow r2; // Z_jj - Z_ij >= 0
        r2.add(pm.sp, j, j, 1.0);
        r2.add(pm.sp, i, j, -1.0);
        pm.cut_rows.push_back(std::move(r2));
    }
    const double clique_rhs = 1.0 / static_cast<double>(n - p.k + 1);
    for (const auto& subset : p.cuts.clique) {
        LinearRow r; // sum of pairwise entries >= 1/(n-k+1)
        for (std::size_t a = 0; a < subset.size(); ++a)
            for (std::size_t b = a + 1; b < subset.size(); ++b) r.add(pm.sp, subset[a], subset[b], 1.0);
        r.rhs = clique_rhs;
        pm.cut_rows.push_back(std::move(r));
    }
    return pm;
}

/// Double centering HWH: the Gram matrix of mean-centered points. For every
/// Z with Ze = e, tr(HWH) - <HWH, Z> = tr(W) - <W, Z>, so bounds computed on
/// the centered problem apply verbatim; centering just shrinks the norms.
inline Eigen::MatrixXd center_gram(const Eigen::MatrixXd& w) {
    const Eigen::Index n = w.rows();
    const Eigen::VectorXd row_mean = w.rowwise().mean();
    const double total_mean = row_mean.mean();
    Eigen::MatrixXd c = w;
    c.colwise() -= row_mean;
    c.rowwise() -= row_mean.transpose();
    c.array() += total_mean;
    return 0.5 * (c + c.transpose());
}

}  // namespace detail_sdp

/// Solve the rank-free relaxation under the node constraints and pool cuts
/// with a consensus splitting method: one block projects onto the PSD cone
/// (eigen-decomposition), one onto the affine subspace (row sums, trace,
/// must-link row equalities, cannot-link zeros, cut rows with slacks), one
/// onto the nonnegative orthant. The certified safe_lower_bound comes from
/// a dual candidate assembled from the cone multipliers: any (y, mu>=0,
/// N>=0) gives the valid bound b'y + h'mu + k*min(0, lambda_min(S)) with
/// S = C - A*y - G*mu - N, because tr(Z) = k on the feasible set.
inline SdpResult solve_relaxation(const SdpProblem& problem, double tol = 1e-6, int max_iters = 20000,
                                  const SdpOptions& opt = {}) {
    using namespace detail_sdp;
    const int n = static_cast<int>(problem.gram.W.rows());
    const int k = problem.k;
    const auto t_start = std::chrono::steady_clock::now();

    const Eigen::MatrixXd wc = center_gram(problem.gram.W);
    const double trace_wc = wc.trace();
    const double scale = 1.0 + wc.norm();
    const ProblemMatrices pm = build_rows(problem);
    const SvecSpace& sp = pm.sp;

    const int n_eq = pm.n_eq();
    const int n_cut = pm.n_cut();
    const int total = sp.dim + n_cut;

    // assemble M = [A 0; G -I] and q = [b; h]
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_eq + n_cut, total);
    Eigen::VectorXd q(n_eq + n_cut);
    for (int r = 0; r < n_eq; ++r) {
        for (auto [c, v] : pm.eq_rows[static_cast<std::size_t>(r)].entries) M(r, c) += v;
        q(r) = pm.eq_rows[static_cast<std::size_t>(r)].rhs;
    }
    for (int r = 0; r < n_cut; ++r) {
        for (auto [c, v] : pm.cut_rows[static_cast<std::size_t>(r)].entries) M(n_eq + r, c) += v;
        M(n_eq + r, sp.dim + r) = -1.0;
        q(n_eq + r) = pm.cut_rows[static_cast<std::size_t>(r)].rhs;
    }

    Eigen::MatrixXd mmt = M * M.transpose();
    const double ridge = 1e-11 * (1.0 + mmt.diagonal().mean());
    mmt.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> mmt_fac(mmt);

    // equality-only normal matrix for the dual least-squares fit
    Eigen::MatrixXd a_eq = M.topLeftCorner(n_eq, sp.dim);
    Eigen::MatrixXd aat = a_eq * a_eq.transpose();
    aat.diagonal().array() += 1e-11 * (1.0 + aat.diagonal().mean());
    Eigen::LDLT<Eigen::MatrixXd> aat_fac(aat);

    // linear objective in svec coordinates (scaled)
    Eigen::VectorXd c_tilde = Eigen::VectorXd::Zero(total);
    c_tilde.head(sp.dim) = sp.to_svec(-wc / scale);

    // start from the uniform feasible projector
    Eigen::MatrixXd z0 = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    const double alpha = n > 1 ? static_cast<double>(k - 1) / (n - 1) : 0.0;
    z0 += alpha * (Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n));
    Eigen::VectorXd zbar(total);
    zbar.head(sp.dim) = sp.to_svec(z0);
    for (int r = 0; r < n_cut; ++r) {
        double g = 0.0;
        for (auto [c, v] : pm.cut_rows[static_cast<std::size_t>(r)].entries) g += v * zbar(c);
        zbar(sp.dim + r) = std::max(0.0, g - q(n_eq + r));
    }

    Eigen::VectorXd x1 = zbar, x2 = zbar, x3 = zbar;
    Eigen::VectorXd u1 = Eigen::VectorXd::Zero(total), u2 = u1, u3 = u1;
    double rho = 1.0;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    SdpResult res;
    double pri = std::numeric_limits<double>::infinity();
    double dua = std::numeric_limits<double>::infinity();
    int iter = 0;

    const auto project_affine = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd resid = M * v - q;
        return (v - M.transpose() * mmt_fac.solve(resid)).eval();
    };
    const auto project_psd = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd out = v;
        eig.compute(sp.from_svec(v.head(sp.dim)));
        const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
        const Eigen::MatrixXd zp =
            eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
        out.head(sp.dim) = sp.to_svec(0.5 * (zp + zp.transpose()));
        return out;
    };

    for (iter = 1; iter <= max_iters; ++iter) {
        x1 = project_affine(zbar - u1);
        x2 = project_psd(zbar - u2);
        x3 = (zbar - u3).cwiseMax(0.0);

        const Eigen::VectorXd zprev = zbar;
        zbar = ((x1 + x2 + x3 + u1 + u2 + u3) - c_tilde / rho) / 3.0;
        u1 += x1 - zbar;
        u2 += x2 - zbar;
        u3 += x3 - zbar;

        const double zn = 1.0 + zbar.norm();
        pri = std::sqrt((x1 - zbar).squaredNorm() + (x2 - zbar).squaredNorm() +
                        (x3 - zbar).squaredNorm()) /
              (std::sqrt(3.0) * zn);
        dua = rho * std::sqrt(3.0) * (zbar - zprev).norm() / zn;
        if (std::max(pri, dua) <= tol) {
            res.converged = true;
            break;
        }

        if (iter % 100 == 0) {
            if (pri > 10.0 * dua && rho < 1e6) {
                rho *= 2.0;
                u1 *= 0.5;
                u2 *= 0.5;
                u3 *= 0.5;
            } else if (dua > 10.0 * pri && rho > 1e-6) {
                rho *= 0.5;
                u1 *= 2.0;
                u2 *= 2.0;
                u3 *= 2.0;
            }
            if (opt.time_budget_seconds > 0.0) {
                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
                if (elapsed > opt.time_budget_seconds) break;
            }
        }
    }
    res.iterations = std::min(iter, max_iters);
    res.primal_residual = pri;
    res.dual_residual = dua;
    res.infeasible_hint = !res.converged && pri > 1e-2;

    res.Z = sp.from_svec(x2.head(sp.dim));
    res.raw_value = -problem.gram.W.cwiseProduct(res.Z).sum();

    // dual certificate: mu and N from the cone multipliers (exactly
    // nonnegative by construction of the projections), y by least squares
    Eigen::VectorXd lam2 = rho * u2;
    Eigen::VectorXd lam3 = (rho * u3).cwiseMax(0.0);
    Eigen::VectorXd mu = lam3.tail(n_cut);
    Eigen::VectorXd n_vec = lam3.head(sp.dim);

    Eigen::VectorXd target = c_tilde.head(sp.dim) - lam2.head(sp.dim) - n_vec;
    for (int r = 0; r < n_cut; ++r)
        for (auto [c, v] : pm.cut_rows[static_cast<std::size_t>(r)].entries) target(c) -= mu(r) * v;
    const Eigen::VectorXd y = aat_fac.solve(a_eq * target);

    Eigen::VectorXd s_vec = c_tilde.head(sp.dim) - a_eq.transpose() * y - n_vec;
    for (int r = 0; r < n_cut; ++r)
        for (auto [c, v] : pm.cut_rows[static_cast<std::size_t>(r)].entries) s_vec(c) -= mu(r) * v;
    eig.compute(sp.from_svec(s_vec));
    const double lam_min = eig.eigenvalues().minCoeff();

    double bound = 0.0;
    for (int r = 0; r < n_eq; ++r) bound += y(r) * q(r);
    for (int r = 0; r < n_cut; ++r) bound += mu(r) * q(n_eq + r);
    bound += k * std::min(0.0, lam_min);
    bound *= scale;

    const double slop = opt.margin_coeff * (1.0 + wc.norm()) * n;
    double safe = trace_wc + bound - slop;
    if (!std::isfinite(safe)) safe = 0.0;
    res.safe_lower_bound = std::max(0.0, safe);
    return res;
}

/// Most violated triangle inequalities at Z, up to `limit`, sorted by
/// violation descending with lexicographic tie-break.
inline std::vector<std::array<int, 3>> separate_triangle(const Eigen::MatrixXd& z, int limit,
                                                         double eps_cut = 1e-4) {
    const int n = static_cast<int>(z.rows());
    std::vector<std::pair<double, std::array<int, 3>>> found;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            for (int h = j + 1; h < n; ++h) {
                if (h == i) continue;
                const double viol = z(i, j) + z(i, h) - z(i, i) - z(j, h);
                if (viol > eps_cut) found.push_back({viol, {i, j, h}});
            }
        }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (static_cast<int>(found.size()) > limit) found.resize(static_cast<std::size_t>(limit));
    std::vector<std::array<int, 3>> out;
    out.reserve(found.size());
    for (auto& f : found) out.push_back(f.second);
    return out;
}

/// Most violated pair inequalities (violation = Z_ij - min(Z_ii, Z_jj)).
inline std::vector<IndexPair> separate_pair(const Eigen::MatrixXd& z, int limit, double eps_cut = 1e-4) {
    const int n = static_cast<int>(z.rows());
    std::vector<std::pair<double, IndexPair>> found;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double viol = z(i, j) - std::min(z(i, i), z(j, j));
            if (viol > eps_cut) found.push_back({viol, {i, j}});
        }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (static_cast<int>(found.size()) > limit) found.resize(static_cast<std::size_t>(limit));
    std::vector<IndexPair> out;
    out.reserve(found.size());
    for (auto& f : found) out.push_back(f.second);
    return out;
}

/// Violated clique inequalities on (k+1)-subsets: exhaustive when the
/// subset count fits the sample budget, otherwise greedy growth (adding the
/// point with least pairwise mass) plus random sampling.
inline std::vector<std::vector<int>> separate_clique(const Eigen::MatrixXd& z, int k, int n,
                                                     int sample_budget, std::uint64_t rng_seed,
                                                     double eps_cut = 1e-4, int limit = 500) {
    if (k + 1 > n) return {};
    const int size = k + 1;
    const double rhs = 1.0 / static_cast<double>(n - k + 1);

    const auto pair_sum = [&](const std::vector<int>& subset) {
        double s = 0.0;
        for (std::size_t a = 0; a < subset.size(); ++a)
            for (std::size_t b = a + 1; b < subset.size(); ++b) s += z(subset[a], subset[b]);
        return s;
    };

    std::set<std::vector<int>> seen;
    std::vector<std::pair<double, std::vector<int>>> found;
    const auto consider = [&](std::vector<int> subset) {
        std::sort(subset.begin(), subset.end());
        if (!seen.insert(subset).second) return;
        const double viol = rhs - pair_sum(subset);
        if (viol > eps_cut) found.push_back({viol, std::move(subset)});
    };

    // count C(n, k+1) with saturation
    double count = 1.0;
    for (int t = 0; t < size; ++t) count *= static_cast<double>(n - t) / (t + 1);

    if (count <= static_cast<double>(sample_budget)) {
        std::vector<int> subset(static_cast<std::size_t>(size));
        std::function<void(int, int)> rec = [&](int start, int depth) {
            if (depth == size) {
                consider(subset);
                return;
            }
            for (int v = start; v <= n - (size - depth); ++v) {
                subset[static_cast<std::size_t>(depth)] = v;
                rec(v + 1, depth + 1);
            }
        };
        rec(0, 0);
    } else {
        // greedy: grow from each seed by the point adding least mass
        for (int seed = 0; seed < n; ++seed) {
            std::vector<int> subset{seed};
            std::vector<char> used(static_cast<std::size_t>(n), 0);
            used[static_cast<std::size_t>(seed)] = 1;
            while (static_cast<int>(subset.size()) < size) {
                int best = -1;
                double best_mass = std::numeric_limits<double>::infinity();
                for (int c = 0; c < n; ++c) {
                    if (used[static_cast<std::size_t>(c)]) continue;
                    double mass = 0.0;
                    for (int s : subset) mass += z(s, c);
                    if (mass < best_mass) {
                        best_mass = mass;
                        best = c;
                    }
                }
                subset.push_back(best);
                used[static_cast<std::size_t>(best)] = 1;
            }
            consider(subset);
        }
        Rng rng(rng_seed);
        const int draws = std::max(0, sample_budget - n);
        for (int d = 0; d < draws; ++d) {
            std::vector<int> subset;
            std::vector<char> used(static_cast<std::size_t>(n), 0);
            while (static_cast<int>(subset.size()) < size) {
                const int c = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
                if (!used[static_cast<std::size_t>(c)]) {
                    used[static_cast<std::size_t>(c)] = 1;
                    subset.push_back(c);
                }
            }
            consider(subset);
        }
    }

    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (static_cast<int>(found.size()) > limit) found.resize(static_cast<std::size_t>(limit));
    std::vector<std::vector<int>> out;
    out.reserve(found.size());
    for (auto& f : found) out.push_back(std::move(f.second));
    return out;
}

/// Iterated separation: solve, add the most violated cuts across all three
/// families, purge inactive ones, re-solve. The problem's pool is updated in
/// place so branch-and-bound children can inherit the active cuts. The
/// reported bound is the best certificate over the rounds (each one is valid
/// for every genuine clustering at this node).
inline SdpResult cutting_loop(SdpProblem& problem, int rounds, int cuts_per_round, double tol,
                              const SdpOptions& opt = {}) {
    SdpResult res = solve_relaxation(problem, tol, opt.max_iters, opt);
    double best_bound = res.safe_lower_bound;

    for (int round = 0; round < rounds; ++round) {
        const Eigen::MatrixXd& z = res.Z;
        const int n = static_cast<int>(z.rows());

        // purge cuts whose slack exceeds 10*eps_cut at the current solution
        const double slack_cap = 10.0 * opt.eps_cut;
        CutPool kept;
        for (const auto& t : problem.cuts.triangle) {
            const double slack = z(t[0], t[0]) + z(t[1], t[2]) - z(t[0], t[1]) - z(t[0], t[2]);
            if (slack <= slack_cap) kept.triangle.push_back(t);
        }
        for (auto [i, j] : problem.cuts.pair) {
            const double slack = std::min(z(i, i), z(j, j)) - z(i, j);
            if (slack <= slack_cap) kept.pair.emplace_back(i, j);
        }
        const double clique_rhs = 1.0 / static_cast<double>(n - problem.k + 1);
        for (const auto& subset : problem.cuts.clique) {
            double s = 0.0;
            for (std::size_t a = 0; a < subset.size(); ++a)
                for (std::size_t b = a + 1; b < subset.size(); ++b) s += z(subset[a], subset[b]);
            if (s - clique_rhs <= slack_cap) kept.clique.push_back(subset);
        }

        // gather fresh violations; priority is by violation across families
        struct Candidate {
            double viol;
            int family; // 0 triangle, 1 pair, 2 clique
            std::array<int, 3> tri;
            IndexPair pr;
            std::vector<int> cl;
        };
        std::vector<Candidate> cands;
        for (const auto& t : separate_triangle(z, cuts_per_round, opt.eps_cut))
            cands.push_back({z(t[0], t[1]) + z(t[0], t[2]) - z(t[0], t[0]) - z(t[1], t[2]), 0, t, {}, {}});
        for (const auto& prr : separate_pair(z, cuts_per_round, opt.eps_cut))
            cands.push_back(
                {z(prr.first, prr.second) - std::min(z(prr.first, prr.first), z(prr.second, prr.second)),
                 1,
                 {},
                 prr,
                 {}});
        for (const auto& cl : separate_clique(z, problem.k, n, opt.clique_sample_budget,
                                              Rng::derive(opt.rng_seed, static_cast<std::uint64_t>(round)),
                                              opt.eps_cut, cuts_per_round)) {
            double s = 0.0;
            for (std::size_t a = 0; a < cl.size(); ++a)
                for (std::size_t b = a + 1; b < cl.size(); ++b) s += z(cl[a], cl[b]);
            cands.push_back({clique_rhs - s, 2, {}, {}, cl});
        }
        std::stable_sort(cands.begin(), cands.end(),
                         [](const Candidate& a, const Candidate& b) { return a.viol > b.viol; });

        std::set<std::array<int, 3>> tri_seen(kept.triangle.begin(), kept.triangle.end());
        std::set<IndexPair> pair_seen(kept.pair.begin(), kept.pair.end());
        std::set<std::vector<int>> clique_seen(kept.clique.begin(), kept.clique.end());
        int added = 0;
        for (const auto& c : cands) {
            if (added >= cuts_per_round) break;
            if (c.family == 0 && tri_seen.insert(c.tri).second) {
                kept.triangle.push_back(c.tri);
                ++added;
            } else if (c.family == 1 && pair_seen.insert(c.pr).second) {
                kept.pair.push_back(c.pr);
                ++added;
            } else if (c.family == 2 && clique_seen.insert(c.cl).second) {
                kept.clique.push_back(c.cl);
                ++added;
            }
        }
        problem.cuts = std::move(kept);
        if (added == 0) break;

        res = solve_relaxation(problem, tol, opt.max_iters, opt);
        const double improvement = res.safe_lower_bound - best_bound;
        best_bound = std::max(best_bound, res.safe_lower_bound);
        if (improvement < 1e-4 * std::abs(best_bound)) break;
    }
    res.safe_lower_bound = best_bound;
    return res;
}

}  // namespace mssc

#endif  // MSSC_SDP_HPP
