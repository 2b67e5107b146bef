#ifndef MSSC_EXPERIMENT_HPP
#define MSSC_EXPERIMENT_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mssc/branch_and_bound.hpp"
#include "mssc/clustering.hpp"
#include "mssc/dataset.hpp"
#include "mssc/metrics.hpp"
#include "mssc/rng.hpp"

namespace mssc {

struct ExperimentSpec {
    std::vector<std::string> dataset_paths;
    std::optional<std::string> label_column; // for CSV inputs
    int k_window = 2;
    SolverConfig solver;
    std::string output_dir = ".";
    std::uint64_t rng_seed = 12345;
};

struct ExperimentRow {
    std::string instance;
    MetricReport report;
    std::optional<SolveStatus> status; // absent on ground-truth rows
};

namespace detail_exp {

inline std::optional<double> guarded_chc(const Dataset& d, const Clustering& c) {
    if (c.k < 2 || c.k > static_cast<int>(d.n()) - 1) return std::nullopt;
    return calinski_harabasz(d, c);
}

inline std::optional<double> guarded_dbi(const Dataset& d, const Clustering& c) {
    if (c.k < 2) return std::nullopt;
    try {
        return davies_bouldin(d, c);
    } catch (const std::domain_error&) {
        return std::nullopt; // coincident centroids
    }
}

inline std::optional<double> guarded_sil(const Dataset& d, const Clustering& c) {
    if (c.k < 2 || c.k > static_cast<int>(d.n()) - 1) return std::nullopt;
    return silhouette(d, c);
}

inline void fill_intrinsic(const Dataset& d, const Clustering& c, MetricReport& r) {
    r.chc = guarded_chc(d, c);
    r.dbi = guarded_dbi(d, c);
    r.s_score = guarded_sil(d, c);
}

inline void fill_extrinsic(const Clustering& truth, const Clustering& found, MetricReport& r) {
    const ContingencyTable t = contingency(truth, found);
    r.ami = adjusted_mutual_information(t);
    r.ars = adjusted_rand_score(t);
    const HomogeneityCompleteness hc = homogeneity_completeness_v(t, 1.0);
    r.h = hc.h;
    r.c = hc.c;
    r.nmi = hc.v;
    r.fms = fowlkes_mallows(t);
}

}  // namespace detail_exp

/// The table protocol for one dataset: a ground-truth row (gray in the
/// result tables; extrinsic cells blank since self-comparison is trivially
/// 1), then one row per k in the sweep {k >= 2, |k - k_true| <= window},
/// each solved to certified optimality within the configured limits.
inline std::vector<ExperimentRow> run_experiment_on(const std::vector<Dataset>& datasets,
                                                    const ExperimentSpec& spec) {
    std::vector<ExperimentRow> rows;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        const Dataset& d = datasets[di];
        if (!d.truth_labels || !d.k_true)
            throw std::invalid_argument("experiment: dataset '" + d.name + "' has no ground-truth labels");
        const int k_true = *d.k_true;
        const Clustering truth = canonicalize(*d.truth_labels);
        const int n = static_cast<int>(d.n());

        ExperimentRow gt;
        gt.instance = d.name;
        gt.report.k = k_true;
        gt.report.is_ground_truth_row = true;
        gt.report.d_sos = mssc_objective(d, truth);
        detail_exp::fill_intrinsic(d, truth, gt.report);
        rows.push_back(std::move(gt));

        const int k_lo = std::max(2, k_true - spec.k_window);
        const int k_hi = std::min(n - 1, k_true + spec.k_window);
        for (int k = k_lo; k <= k_hi; ++k) {
            SolverConfig cfg = spec.solver;
            cfg.rng_seed = Rng::derive(spec.rng_seed, di * 64 + static_cast<std::uint64_t>(k));
            const SolveResult sol = solve_exact(d, k, cfg);

            ExperimentRow row;
            row.instance = d.name;
            row.report.k = k;
            row.report.d_sos = sol.objective;
            row.status = sol.status;
            detail_exp::fill_extrinsic(truth, sol.optimum, row.report);
            detail_exp::fill_intrinsic(d, sol.optimum, row.report);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

/// File-loading variant: .arff goes through the ARFF reader, everything
/// else through the CSV reader with the spec's label column.
inline std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
    std::vector<Dataset> datasets;
    for (const std::string& path : spec.dataset_paths) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
        const bool arff = path.size() >= 5 && path.substr(path.size() - 5) == ".arff";
        Dataset d = arff ? parse_arff(in) : parse_csv(in, spec.label_column, path);
        if (!arff) {
            // strip directory and extension for the instance name
            std::string name = path;
            const auto slash = name.find_last_of("/\\");
            if (slash != std::string::npos) name = name.substr(slash + 1);
            const auto dot = name.find_last_of('.');
            if (dot != std::string::npos) name = name.substr(0, dot);
            d.name = name;
        }
        datasets.push_back(std::move(d));
    }
    return run_experiment_on(datasets, spec);
}

// ---------------------------------------------------------------------------
// report serialization

namespace detail_exp {

inline std::string fmt(double v, const char* spec_str = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec_str, v);
    return buf;
}

inline std::string cell(const std::optional<double>& v, const char* spec_str = "%.12g") {
    return v ? fmt(*v, spec_str) : std::string();
}

}  // namespace detail_exp

inline const std::vector<std::string>& report_measure_names() {
    static const std::vector<std::string> names = {"AMI", "ARS", "h",   "c",   "NMI",
                                                   "FMS", "CHC", "DBI", "S_score"};
    return names;
}

inline std::optional<double> report_measure(const MetricReport& r, const std::string& name) {
    if (name == "AMI") return r.ami;
    if (name == "ARS") return r.ars;
    if (name == "h") return r.h;
    if (name == "c") return r.c;
    if (name == "NMI") return r.nmi;
    if (name == "FMS") return r.fms;
    if (name == "CHC") return r.chc;
    if (name == "DBI") return r.dbi;
    if (name == "S_score") return r.s_score;
    throw std::invalid_argument("unknown measure '" + name + "'");
}

inline bool measure_lower_is_better(const std::string& name) { return name == "DBI"; }

/// Machine-readable table, one row per (instance, k); ground-truth rows have
/// blank extrinsic cells and a blank status.
inline void write_reports_csv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
    out << "instance,k,d_SOS,AMI,ARS,h,c,NMI,FMS,CHC,DBI,S_score,status\n";
    for (const auto& r : rows) {
        using detail_exp::cell;
        using detail_exp::fmt;
        out << r.instance << "," << r.report.k << "," << fmt(r.report.d_sos) << ","
            << cell(r.report.ami) << "," << cell(r.report.ars) << "," << cell(r.report.h) << ","
            << cell(r.report.c) << "," << cell(r.report.nmi) << "," << cell(r.report.fms) << ","
            << cell(r.report.chc) << "," << cell(r.report.dbi) << "," << cell(r.report.s_score) << ","
            << (r.status ? to_string(*r.status) : "") << "\n";
    }
}

/// Human-readable table mirroring the result tables: two decimals, the best
/// value per measure within each instance sweep in bold (ground-truth rows
/// excluded from the comparison and marked with a trailing *).
inline void write_reports_markdown(const std::vector<ExperimentRow>& rows, std::ostream& out) {
    out << "| instance | k | d_SOS | AMI | ARS | h | c | NMI | FMS | CHC | DBI | S_score | status |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";

    // best value per (instance, measure) among non-truth rows
    std::map<std::pair<std::string, std::string>, double> best;
    for (const auto& r : rows) {
        if (r.report.is_ground_truth_row) continue;
        for (const auto& m : report_measure_names()) {
            const auto v = report_measure(r.report, m);
            if (!v) continue;
            auto key = std::make_pair(r.instance, m);
            auto it = best.find(key);
            if (it == best.end())
                best.emplace(key, *v);
            else if (measure_lower_is_better(m) ? *v < it->second : *v > it->second)
                it->second = *v;
        }
    }

    for (const auto& r : rows) {
        using detail_exp::fmt;
        out << "| " << r.instance << (r.report.is_ground_truth_row ? " *" : "") << " | " << r.report.k
            << " | " << fmt(r.report.d_sos, "%.2f") << " |";
        for (const auto& m : report_measure_names()) {
            const auto v = report_measure(r.report, m);
            if (!v) {
                out << "  |";
                continue;
            }
            std::string s = fmt(*v, "%.2f");
            if (!r.report.is_ground_truth_row) {
                auto it = best.find(std::make_pair(r.instance, m));
                if (it != best.end() && *v == it->second) s = "**" + s + "**";
            }
            out << " " << s << " |";
        }
        out << " " << (r.status ? to_string(*r.status) : "") << " |\n";
    }
}

inline std::optional<SolveStatus> status_from_string(const std::string& s) {
    if (s == "optimal") return SolveStatus::optimal;
    if (s == "gap_limit") return SolveStatus::gap_limit;
    if (s == "node_limit") return SolveStatus::node_limit;
    if (s == "time_limit") return SolveStatus::time_limit;
    return std::nullopt;
}

/// Read back a reports CSV produced by write_reports_csv.
inline std::vector<ExperimentRow> parse_reports_csv(std::istream& in) {
    std::vector<ExperimentRow> rows;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty reports file", 1);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_csv_row(line, line_no);
        if (f.size() != 13) throw ParseError("expected 13 columns", line_no);
        ExperimentRow r;
        r.instance = f[0];
        r.report.k = std::stoi(f[1]);
        r.report.d_sos = std::stod(f[2]);
        const auto opt_cell = [&](const std::string& s) -> std::optional<double> {
            if (detail::trim(s).empty()) return std::nullopt;
            return std::stod(s);
        };
        r.report.ami = opt_cell(f[3]);
        r.report.ars = opt_cell(f[4]);
        r.report.h = opt_cell(f[5]);
        r.report.c = opt_cell(f[6]);
        r.report.nmi = opt_cell(f[7]);
        r.report.fms = opt_cell(f[8]);
        r.report.chc = opt_cell(f[9]);
        r.report.dbi = opt_cell(f[10]);
        r.report.s_score = opt_cell(f[11]);
        r.status = status_from_string(detail::trim(f[12]));
        r.report.is_ground_truth_row = !r.report.ami.has_value();
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// k_opt summary (the Table-5 protocol)

struct SummaryRow {
    std::string measure;
    double pct[3] = {0.0, 0.0, 0.0}; // |k_true - k_opt| = 0, 1, 2
};

/// Per measure, the percentage of datasets whose best-scoring k lands at
/// each distance from k_true. Ties for the best value break toward the k
/// closest to k_true, then toward the smaller k. Ground-truth rows supply
/// k_true and are excluded from the competition.
inline std::vector<SummaryRow> summarize_kopt(const std::vector<ExperimentRow>& rows,
                                              const std::vector<std::string>& measures =
                                                  report_measure_names()) {
    // group rows by instance, preserving first-appearance order
    std::vector<std::string> order;
    std::map<std::string, std::vector<const ExperimentRow*>> by_instance;
    for (const auto& r : rows) {
        auto [it, inserted] = by_instance.try_emplace(r.instance);
        if (inserted) order.push_back(r.instance);
        it->second.push_back(&r);
    }

    std::vector<SummaryRow> out;
    for (const auto& m : measures) {
        SummaryRow s;
        s.measure = m;
        int counted = 0;
        int bucket[3] = {0, 0, 0};
        for (const auto& inst : order) {
            const auto& group = by_instance[inst];
            std::optional<int> k_true;
            for (const auto* r : group)
                if (r->report.is_ground_truth_row) k_true = r->report.k;
            if (!k_true) continue;

            std::optional<double> best_v;
            std::optional<int> k_opt;
            const bool lower = measure_lower_is_better(m);
            for (const auto* r : group) {
                if (r->report.is_ground_truth_row) continue;
                const auto v = report_measure(r->report, m);
                if (!v) continue;
                bool better = false;
                if (!best_v) {
                    better = true;
                } else if (lower ? *v < *best_v : *v > *best_v) {
                    better = true;
                } else if (*v == *best_v) {
                    const int da = std::abs(r->report.k - *k_true);
                    const int db = std::abs(*k_opt - *k_true);
                    better = da < db || (da == db && r->report.k < *k_opt);
                }
                if (better) {
                    best_v = *v;
                    k_opt = r->report.k;
                }
            }
            if (!k_opt) continue;
            ++counted;
            ++bucket[std::min(std::abs(*k_opt - *k_true), 2)];
        }
        if (counted > 0)
            for (int b = 0; b < 3; ++b) s.pct[b] = 100.0 * bucket[b] / counted;
        out.push_back(std::move(s));
    }
    return out;
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << "measure,pct_0,pct_1,pct_2\n";
    for (const auto& r : rows)
        out << r.measure << "," << detail_exp::fmt(r.pct[0], "%.2f") << ","
            << detail_exp::fmt(r.pct[1], "%.2f") << "," << detail_exp::fmt(r.pct[2], "%.2f") << "\n";
}

inline void write_summary_markdown(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << "| measure | 0 (%) | 1 (%) | 2 (%) |\n|---|---|---|---|\n";
    for (const auto& r : rows)
        out << "| " << r.measure << " | " << detail_exp::fmt(r.pct[0], "%.2f") << " | "
            << detail_exp::fmt(r.pct[1], "%.2f") << " | " << detail_exp::fmt(r.pct[2], "%.2f")
            << " |\n";
}

// ---------------------------------------------------------------------------
// PCA projection for plot data

/// Project onto the two leading principal components. Columns are mean
/// centered first; each component's largest-magnitude loading is made
/// positive so the output is sign-deterministic.
inline Eigen::MatrixXd pca_project(const Dataset& d) {
    const Eigen::Index n = d.n(), m = d.m();
    if (m < 2) throw std::invalid_argument("pca_project: need at least two feature columns");
    Eigen::MatrixXd centered = d.points.rowwise() - d.points.colwise().mean();
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / std::max<double>(1.0, static_cast<double>(n - 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    Eigen::MatrixXd dirs(m, 2);
    dirs.col(0) = eig.eigenvectors().col(m - 1);
    dirs.col(1) = eig.eigenvectors().col(m - 2);
    for (int c = 0; c < 2; ++c) {
        Eigen::Index imax;
        dirs.col(c).cwiseAbs().maxCoeff(&imax);
        if (dirs(imax, c) < 0) dirs.col(c) = -dirs.col(c);
    }
    return centered * dirs;
}

// ---------------------------------------------------------------------------
// bundled synthetic generators (no network access needed for experiments)

/// Well-separated Gaussian blobs: centers on a circle with the requested
/// minimum inter-center distance, points dealt round-robin.
inline Dataset gen_blobs(int n, int k, std::uint64_t seed, double separation = 10.0,
                         double spread = 1.0, int m = 2) {
    if (k < 1 || n < k || m < 2) throw std::invalid_argument("gen_blobs: bad parameters");
    Rng rng(seed);
    const double radius = k == 1 ? 0.0 : separation / (2.0 * std::sin(M_PI / k));
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(k, m);
    for (int j = 0; j < k; ++j) {
        const double angle = 2.0 * M_PI * j / k;
        centers(j, 0) = radius * std::cos(angle);
        centers(j, 1) = radius * std::sin(angle);
    }
    Dataset d;
    d.name = "blobs";
    d.points.resize(n, m);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int j = i % k;
        for (int c = 0; c < m; ++c) d.points(i, c) = centers(j, c) + spread * rng.normal();
        labels[static_cast<std::size_t>(i)] = j;
    }
    d.truth_labels = canonicalize(labels).labels;
    d.k_true = k;
    for (int j = 0; j < k; ++j) d.label_names.push_back("c" + std::to_string(j));
    return d;
}

/// Interleaved 2-D spiral arms; the provider labeling follows the arms,
/// which squared-Euclidean clustering cannot reproduce.
inline Dataset gen_spirals(int n, int k, std::uint64_t seed, double noise = 0.1) {
    if (k < 1 || n < k) throw std::invalid_argument("gen_spirals: bad parameters");
    Rng rng(seed);
    Dataset d;
    d.name = "spirals";
    d.points.resize(n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    const int per_arm = (n + k - 1) / k;
    for (int i = 0; i < n; ++i) {
        const int arm = i % k;
        const int step = i / k;
        const double t = per_arm > 1 ? static_cast<double>(step) / (per_arm - 1) : 0.0;
        const double theta = 3.0 * M_PI * t + 2.0 * M_PI * arm / k;
        const double r = 1.0 + 4.0 * t;
        d.points(i, 0) = r * std::cos(theta) + noise * rng.normal();
        d.points(i, 1) = r * std::sin(theta) + noise * rng.normal();
        labels[static_cast<std::size_t>(i)] = arm;
    }
    d.truth_labels = canonicalize(labels).labels;
    d.k_true = k;
    for (int j = 0; j < k; ++j) d.label_names.push_back("arm" + std::to_string(j));
    return d;
}

/// Blobs with spread comparable to separation, so the provider clusters
/// overlap heavily.
inline Dataset gen_overlap(int n, int k, std::uint64_t seed) {
    return gen_blobs(n, k, seed, /*separation=*/2.0, /*spread=*/1.0);
}

// ---------------------------------------------------------------------------
// key=value config for the experiment subcommand

/// Lines of `key = value`, '#' comments. Recognized keys: data (repeatable),
/// label_column, k_window, out_dir, seed, gap_tol, node_limit, time_limit,
/// root_restarts, enumeration_budget.
inline ExperimentSpec parse_experiment_config(std::istream& in) {
    ExperimentSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key == "data") {
            spec.dataset_paths.push_back(value);
        } else if (key == "label_column") {
            spec.label_column = value;
        } else if (key == "k_window") {
            spec.k_window = std::stoi(value);
        } else if (key == "out_dir") {
            spec.output_dir = value;
        } else if (key == "seed") {
            spec.rng_seed = std::stoull(value);
        } else if (key == "gap_tol") {
            spec.solver.gap_tol = std::stod(value);
        } else if (key == "node_limit") {
            spec.solver.node_limit = std::stoull(value);
        } else if (key == "time_limit") {
            spec.solver.time_limit_seconds = std::stod(value);
        } else if (key == "root_restarts") {
            spec.solver.root_kmeans_restarts = std::stoi(value);
        } else if (key == "enumeration_budget") {
            spec.solver.enumeration_budget = std::stoull(value);
        } else {
            throw ParseError("unknown config key '" + key + "'", line_no);
        }
    }
    if (spec.dataset_paths.empty()) throw ParseError("config names no datasets");
    return spec;
}

}  // namespace mssc

#endif  // MSSC_EXPERIMENT_HPP
