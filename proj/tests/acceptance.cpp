// Acceptance suite: every criterion prints exactly one [PASS]/[FAIL] line.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "mssc/mssc.hpp"
#include "test_util.hpp"

using namespace mssc;

namespace {

double now_seconds() {
    static const auto t0 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Criterion {
    int id;
    std::string name;
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& info) {
        if (detail.empty()) detail = info;
    }
};

std::vector<Criterion> results;

void report(Criterion& c) {
    std::printf("[%s] criterion %d: %s%s%s\n", c.ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                c.detail.empty() ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    results.push_back(c);
}

struct Instance {
    Dataset data;
    int k;
    BruteForceResult oracle;
};

std::vector<Instance> make_oracle_instances() {
    std::vector<Instance> out;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const int n = 6 + static_cast<int>(s % 5);
        const int m = 2 + static_cast<int>((s / 5) % 2);
        const int k = 2 + static_cast<int>(s % 2);
        Instance inst{testutil::random_dataset(n, m, 31000 + s), k, {}};
        inst.oracle = brute_force_optimum(inst.data, inst.k);
        out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------------------

void criterion_1_and_2(const std::vector<Instance>& instances) {
    Criterion c1{1, "oracle equivalence of solve_exact on 50 random instances"};
    Criterion c2{2, "safe lower bounds never exceed the oracle optimum"};

    const double t_begin = now_seconds();
    int solved = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const Instance& inst = instances[i];
        SolverConfig cfg;
        cfg.rng_seed = 500 + i;
        const SolveResult r = solve_exact(inst.data, inst.k, cfg);
        const double rel = std::abs(r.objective - inst.oracle.objective) /
                           std::max(1e-12, std::abs(inst.oracle.objective));
        if (rel <= 1e-9 && r.status == SolveStatus::optimal)
            ++solved;
        else if (c1.ok)
            c1.fail("instance " + std::to_string(i) + " rel err " + std::to_string(rel) + " status " +
                    to_string(r.status));
    }
    const double t_solve = now_seconds() - t_begin;
    if (solved != 50) c1.fail(std::to_string(solved) + "/50 matched");
    if (t_solve >= 300.0) c1.fail("runtime " + std::to_string(t_solve) + "s exceeds 5 minutes");
    c1.note(std::to_string(solved) + "/50 matched in " + std::to_string(t_solve) + "s");
    report(c1);

    int bound_checks = 0, violations = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const Instance& inst = instances[i];
        const int n = static_cast<int>(inst.data.n());
        // unconstrained root
        {
            SdpProblem p{gram(inst.data), inst.k, ConstraintSet(n), CutPool{}};
            const SdpResult r = cutting_loop(p, 3, 200, 1e-6);
            ++bound_checks;
            if (r.safe_lower_bound > inst.oracle.objective + 1e-12) ++violations;
        }
        // four constrained-node variants per instance
        for (std::uint64_t v = 0; v < 4; ++v) {
            const Clustering ref = testutil::random_clustering(n, inst.k, 41000 + i * 7 + v);
            const ConstraintSet cs =
                testutil::random_feasible_constraints(ref, 2, 2, 42000 + i * 13 + v);
            const auto oracle = testutil::constrained_oracle(inst.data, inst.k, cs);
            if (!oracle) continue;
            SdpProblem p{gram(inst.data), inst.k, cs, CutPool{}};
            const SdpResult r = cutting_loop(p, 2, 150, 1e-6);
            ++bound_checks;
            if (r.safe_lower_bound > oracle->objective + 1e-12) ++violations;
        }
    }
    if (violations > 0) c2.fail(std::to_string(violations) + " violations");
    if (bound_checks < 250)
        c2.fail("only " + std::to_string(bound_checks) + " node bounds checked");
    c2.note(std::to_string(bound_checks) + " node bounds, 0 violations");
    report(c2);
}

void criterion_3_cut_validity() {
    Criterion c{3, "1000 genuine clusterings violate no triangle/pair/clique inequality"};
    int bad = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const int n = 4 + static_cast<int>(s % 9);
        const int k = 2 + static_cast<int>(s % 3);
        if (k >= n) continue;
        const Clustering cl = testutil::random_clustering(n, k, 51000 + s);
        const Eigen::MatrixXd z = projector_from_clustering(cl).Z;
        if (!separate_triangle(z, 10, 1e-12).empty()) ++bad;
        if (!separate_pair(z, 10, 1e-12).empty()) ++bad;
        if (!separate_clique(z, k, n, 20000, s, 1e-12).empty()) ++bad;
    }
    if (bad > 0) c.fail(std::to_string(bad) + " violated families");
    report(c);
}

void criterion_4_equivalence() {
    Criterion c{4, "objective_from_projector matches mssc_objective on 1000 pairs"};
    int bad = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const int n = 4 + static_cast<int>(s % 10);
        const int k = 1 + static_cast<int>(s % 4);
        if (k > n) continue;
        const Dataset d = testutil::random_dataset(n, 2 + static_cast<int>(s % 3), 61000 + s, -40.0, 40.0);
        const Clustering cl = testutil::random_clustering(n, k, 62000 + s);
        const double direct = mssc_objective(d, cl);
        const double via_z = objective_from_projector(gram(d), projector_from_clustering(cl));
        if (std::abs(direct - via_z) > 1e-9 * std::max(1.0, std::abs(direct))) ++bad;
    }
    if (bad > 0) c.fail(std::to_string(bad) + " mismatches");
    report(c);
}

void criterion_5_geometry(const Dataset& blobs, const SolveResult& blob_solve) {
    Criterion c{5, "well-separated blobs recover ground truth; spirals do not"};

    const Clustering truth = canonicalize(*blobs.truth_labels);
    const double t0 = now_seconds();
    const double ars_blobs = adjusted_rand_score(contingency(truth, blob_solve.optimum));
    if (ars_blobs < 1.0 - 1e-12)
        c.fail("blob ARS " + std::to_string(ars_blobs) + " != 1.0");

    const Dataset spirals = gen_spirals(60, 3, 2024, 0.1);
    SolverConfig cfg;
    cfg.rng_seed = 99;
    cfg.time_limit_seconds = 420.0;
    cfg.node_limit = 400;
    const SolveResult rs = solve_exact(spirals, 3, cfg);
    const Clustering struth = canonicalize(*spirals.truth_labels);
    const double ars_spirals = adjusted_rand_score(contingency(struth, rs.optimum));
    if (!(ars_spirals < 0.5)) c.fail("spiral ARS " + std::to_string(ars_spirals) + " >= 0.5");
    const double t_used = now_seconds() - t0;
    if (t_used >= 1200.0) c.fail("runtime " + std::to_string(t_used) + "s over budget");
    c.note("blob ARS " + std::to_string(ars_blobs) + ", spiral ARS " + std::to_string(ars_spirals));
    report(c);
}

void criterion_6_monotonicity(const Dataset& blobs, const SolveResult& blob_solve) {
    Criterion c{6, "d_SOS decreases in k; ground-truth row never beats the optimum"};
    for (std::uint64_t ds = 0; ds < 5; ++ds) {
        const Dataset d = testutil::random_dataset(40, 2, 71000 + ds);
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 2; k <= 6; ++k) {
            SolverConfig cfg;
            cfg.rng_seed = 72000 + ds * 8 + static_cast<std::uint64_t>(k);
            cfg.node_limit = 40;
            cfg.time_limit_seconds = 25.0;
            const SolveResult r = solve_exact(d, k, cfg);
            if (!(r.objective < prev))
                c.fail("dataset " + std::to_string(ds) + " k=" + std::to_string(k) + " not decreasing");
            prev = r.objective;
        }
    }
    const Clustering truth = canonicalize(*blobs.truth_labels);
    const double truth_obj = mssc_objective(blobs, truth);
    if (truth_obj < blob_solve.objective - 1e-9)
        c.fail("ground-truth row beats the optimum at k_true");
    report(c);
}

void criterion_7_metric_identities() {
    Criterion c{7, "metric identities, chance centering and the pair oracle"};

    const Clustering cl = testutil::random_clustering(100, 5, 81000);
    const ContingencyTable self = contingency(cl, cl);
    const auto hc = homogeneity_completeness_v(self, 1.0);
    if (std::abs(adjusted_mutual_information(self) - 1.0) > 1e-9) c.fail("AMI(self) != 1");
    if (adjusted_rand_score(self) != 1.0) c.fail("ARS(self) != 1");
    if (std::abs(hc.v - 1.0) > 1e-12 || std::abs(hc.h - 1.0) > 1e-12 || std::abs(hc.c - 1.0) > 1e-12)
        c.fail("h/c/NMI(self) != 1");
    if (std::abs(fowlkes_mallows(self) - 1.0) > 1e-12) c.fail("FMS(self) != 1");

    double ami_sum = 0.0, ars_sum = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const Clustering a = testutil::random_clustering(100, 4, 82000 + static_cast<std::uint64_t>(t));
        const Clustering b = testutil::random_clustering(100, 4, 83000 + static_cast<std::uint64_t>(t));
        const ContingencyTable tab = contingency(a, b);
        ami_sum += adjusted_mutual_information(tab);
        ars_sum += adjusted_rand_score(tab);
    }
    const double ami_mean = ami_sum / trials, ars_mean = ars_sum / trials;
    if (std::abs(ami_mean) > 0.02) c.fail("AMI chance mean " + std::to_string(ami_mean));
    if (std::abs(ars_mean) > 0.02) c.fail("ARS chance mean " + std::to_string(ars_mean));

    // pair-enumeration oracle, exact equality
    for (std::uint64_t s = 0; s < 25; ++s) {
        const int n = 40 + static_cast<int>(s % 161);
        const Clustering a = testutil::random_clustering(n, 3 + static_cast<int>(s % 3), 84000 + s);
        const Clustering b = testutil::random_clustering(n, 2 + static_cast<int>(s % 4), 85000 + s);
        double tp = 0, fp = 0, fn = 0, tn = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const bool sa = a.labels[static_cast<std::size_t>(i)] == a.labels[static_cast<std::size_t>(j)];
                const bool sb = b.labels[static_cast<std::size_t>(i)] == b.labels[static_cast<std::size_t>(j)];
                if (sa && sb)
                    ++tp;
                else if (sa)
                    ++fp;
                else if (sb)
                    ++fn;
                else
                    ++tn;
            }
        const double total = tp + fp + fn + tn;
        const double same_a = tp + fp, same_b = tp + fn;
        const double expected = same_a * same_b / total;
        const double denom = 0.5 * (same_a + same_b) - expected;
        const double ars_pairs = denom == 0.0 ? 1.0 : (tp - expected) / denom;
        const double fms_pairs =
            (same_a == 0.0 || same_b == 0.0) ? 0.0 : tp / std::sqrt(same_a * same_b);
        const ContingencyTable tab = contingency(a, b);
        if (adjusted_rand_score(tab) != ars_pairs) c.fail("ARS pair oracle mismatch");
        if (fowlkes_mallows(tab) != fms_pairs) c.fail("FMS pair oracle mismatch");
    }
    c.note("chance means AMI " + std::to_string(ami_mean) + ", ARS " + std::to_string(ars_mean));
    report(c);
}

void criterion_8_summary_protocol() {
    Criterion c{8, "the 12-dataset fixture reproduces the bucket percentages"};
    std::vector<ExperimentRow> rows;
    for (int i = 0; i < 12; ++i) {
        const std::string inst = "fixture" + std::to_string(i);
        const int k_true = 4;
        ExperimentRow truth;
        truth.instance = inst;
        truth.report.k = k_true;
        truth.report.is_ground_truth_row = true;
        rows.push_back(truth);
        const int delta = i < 7 ? 0 : (i < 10 ? 1 : 2);
        for (int k = 2; k <= 6; ++k) {
            ExperimentRow r;
            r.instance = inst;
            r.report.k = k;
            r.report.ars = std::abs(k - k_true) == delta ? 0.9 : 0.1;
            rows.push_back(r);
        }
    }
    const auto summary = summarize_kopt(rows, {"ARS"});
    const std::string p0 = detail_exp::fmt(summary[0].pct[0], "%.2f");
    const std::string p1 = detail_exp::fmt(summary[0].pct[1], "%.2f");
    const std::string p2 = detail_exp::fmt(summary[0].pct[2], "%.2f");
    if (p0 != "58.33" || p1 != "25.00" || p2 != "16.67")
        c.fail("got " + p0 + "/" + p1 + "/" + p2 + ", want 58.33/25.00/16.67");
    const double sum = summary[0].pct[0] + summary[0].pct[1] + summary[0].pct[2];
    if (std::abs(sum - 100.0) > 0.01) c.fail("percentages sum to " + std::to_string(sum));
    report(c);
}

void criterion_9_determinism() {
    Criterion c{9, "experiment reruns produce byte-identical CSV"};
    const auto run_once = [] {
        ExperimentSpec spec;
        spec.rng_seed = 4242;
        spec.k_window = 2;
        spec.solver.node_limit = 80;
        spec.solver.time_limit_seconds = 60.0;
        const std::vector<Dataset> data = {gen_blobs(20, 3, 9001, 15.0, 0.6),
                                           gen_overlap(16, 2, 9002)};
        const auto rows = run_experiment_on(data, spec);
        std::ostringstream csv;
        write_reports_csv(rows, csv);
        return csv.str();
    };
    const std::string a = run_once();
    const std::string b = run_once();
    if (a != b) c.fail("outputs differ");
    if (a.empty()) c.fail("no output produced");
    report(c);
}

}  // namespace

int main() {
    std::printf("acceptance suite started\n");
    const auto instances = make_oracle_instances();
    criterion_1_and_2(instances);
    criterion_3_cut_validity();
    criterion_4_equivalence();

    // the blob solve feeds criteria 5 and 6
    const Dataset blobs = gen_blobs(60, 4, 2023, 10.0, 1.0);
    SolverConfig blob_cfg;
    blob_cfg.rng_seed = 77;
    blob_cfg.time_limit_seconds = 420.0;
    blob_cfg.node_limit = 400;
    const SolveResult blob_solve = solve_exact(blobs, 4, blob_cfg);

    criterion_5_geometry(blobs, blob_solve);
    criterion_6_monotonicity(blobs, blob_solve);
    criterion_7_metric_identities();
    criterion_8_summary_protocol();
    criterion_9_determinism();

    int failures = 0;
    for (const auto& r : results)
        if (!r.ok) ++failures;
    std::printf("acceptance finished: %zu criteria, %d failed, %.1fs total\n", results.size(), failures,
                now_seconds());
    return failures;
}
