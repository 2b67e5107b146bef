// Command-line driver: exact MSSC solving, clustering evaluation, the table
// experiment protocol, k_opt summaries, PCA plot data and synthetic data
// generation. Exit codes: 0 success, 1 input error, 2 solver limit hit.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mssc/mssc.hpp"

namespace {

mssc::Dataset load_dataset(const std::string& path, const std::optional<std::string>& label_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    const bool arff = path.size() >= 5 && path.substr(path.size() - 5) == ".arff";
    mssc::Dataset d = arff ? mssc::parse_arff(in) : mssc::parse_csv(in, label_column, path);
    if (!arff) {
        std::string name = std::filesystem::path(path).stem().string();
        d.name = name;
    }
    return d;
}

std::vector<int> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = mssc::detail::trim(line);
        if (t.empty()) continue;
        try {
            labels.push_back(std::stoi(t));
        } catch (const std::exception&) {
            throw mssc::ParseError("expected an integer label, got '" + t + "'", line_no);
        }
    }
    if (labels.empty()) throw std::runtime_error("no labels in '" + path + "'");
    return labels;
}

void write_labels(const mssc::Clustering& c, std::ostream& out) {
    for (int l : c.labels) out << l << "\n";
}

void print_metric_row(const mssc::MetricReport& r, std::ostream& out) {
    const auto put = [&](const char* name, const std::optional<double>& v) {
        out << name << "=";
        if (v)
            out << *v;
        else
            out << "nan";
        out << "\n";
    };
    out << "d_SOS=" << r.d_sos << "\n";
    put("AMI", r.ami);
    put("ARS", r.ars);
    put("h", r.h);
    put("c", r.c);
    put("NMI", r.nmi);
    put("FMS", r.fms);
    put("CHC", r.chc);
    put("DBI", r.dbi);
    put("S_score", r.s_score);
}

int run(int argc, char** argv) {
    CLI::App app{"Exact minimum sum-of-squares clustering with certified bounds"};
    app.require_subcommand(1);

    // ---- solve ----
    auto* solve = app.add_subcommand("solve", "Solve MSSC to certified optimality");
    std::string solve_path, solve_out, dump_z_path;
    std::optional<std::string> solve_labels;
    int solve_k = 2;
    mssc::SolverConfig solve_cfg;
    bool quiet = false;
    solve->add_option("data", solve_path, "dataset file (.csv or .arff)")->required();
    solve->add_option("--k", solve_k, "number of clusters")->required();
    solve->add_option("--labels", solve_labels, "label column name (CSV input)");
    solve->add_option("--gap-tol", solve_cfg.gap_tol, "relative optimality gap");
    solve->add_option("--time-limit", solve_cfg.time_limit_seconds, "wall time limit in seconds");
    solve->add_option("--node-limit", solve_cfg.node_limit, "branch-and-bound node limit");
    solve->add_option("--seed", solve_cfg.rng_seed, "random seed");
    solve->add_option("--out", solve_out, "write the optimum labels to this file");
    solve->add_option("--dump-z", dump_z_path, "debug: dump the root relaxation Z and active cuts");
    solve->add_flag("--quiet", quiet, "suppress progress log");

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "Compare two labelings of one dataset");
    std::string eval_path, eval_a, eval_b;
    std::optional<std::string> eval_label_col;
    evaluate->add_option("data", eval_path)->required();
    evaluate->add_option("labels-a", eval_a, "reference labels (single-column CSV)")->required();
    evaluate->add_option("labels-b", eval_b, "candidate labels (single-column CSV)")->required();
    evaluate->add_option("--labels", eval_label_col, "label column name (CSV input)");

    // ---- experiment ----
    auto* experiment = app.add_subcommand("experiment", "Run the k-sweep table protocol");
    std::string config_path;
    experiment->add_option("config", config_path, "key=value config file")->required();

    // ---- summarize ----
    auto* summarize = app.add_subcommand("summarize", "k_opt summary from a reports CSV");
    std::string reports_path;
    bool summary_markdown = false;
    summarize->add_option("reports", reports_path)->required();
    summarize->add_flag("--markdown", summary_markdown, "print markdown instead of CSV");

    // ---- pca ----
    auto* pca = app.add_subcommand("pca", "Project onto the first two principal components");
    std::string pca_path, pca_out;
    std::optional<std::string> pca_label_col;
    pca->add_option("data", pca_path)->required();
    pca->add_option("--labels", pca_label_col, "label column name (CSV input)");
    pca->add_option("--out", pca_out, "output CSV (default stdout)");

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    std::string gen_kind, gen_out;
    int gen_n = 60, gen_k = 3;
    std::uint64_t gen_seed = 1;
    double gen_sep = 10.0, gen_spread = 1.0, gen_noise = 0.1;
    gen->add_option("kind", gen_kind, "blobs | spirals | overlap")->required();
    gen->add_option("--n", gen_n, "number of points");
    gen->add_option("--k", gen_k, "number of provider clusters");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--separation", gen_sep, "blob center separation");
    gen->add_option("--spread", gen_spread, "blob standard deviation");
    gen->add_option("--noise", gen_noise, "spiral noise level");
    gen->add_option("--out", gen_out, "output CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (*solve) {
        const mssc::Dataset d = load_dataset(solve_path, solve_labels);
        if (!quiet) solve_cfg.log = &std::cerr;
        const mssc::SolveResult res = mssc::solve_exact(d, solve_k, solve_cfg);
        std::cout << "status=" << mssc::to_string(res.status) << " objective=" << res.objective
                  << " gap=" << res.certified_gap << " nodes=" << res.nodes_explored
                  << " time=" << res.wall_time << "\n";
        if (!solve_out.empty()) {
            std::ofstream out(solve_out);
            write_labels(res.optimum, out);
        } else {
            write_labels(res.optimum, std::cout);
        }
        if (!dump_z_path.empty()) {
            mssc::SdpProblem problem{mssc::gram(d), solve_k, mssc::ConstraintSet(static_cast<int>(d.n())),
                                     mssc::CutPool{}};
            mssc::SdpOptions opt;
            opt.rng_seed = solve_cfg.rng_seed;
            const mssc::SdpResult root = mssc::cutting_loop(problem, 5, 500, 1e-6, opt);
            std::ofstream out(dump_z_path);
            out << "# root relaxation Z (" << d.n() << "x" << d.n() << "), bound "
                << root.safe_lower_bound << "\n";
            for (Eigen::Index i = 0; i < root.Z.rows(); ++i) {
                for (Eigen::Index j = 0; j < root.Z.cols(); ++j) out << (j ? "," : "") << root.Z(i, j);
                out << "\n";
            }
            out << "# active cuts\n";
            for (const auto& t : problem.cuts.triangle)
                out << "triangle," << t[0] << "," << t[1] << "," << t[2] << "\n";
            for (const auto& p : problem.cuts.pair) out << "pair," << p.first << "," << p.second << "\n";
            for (const auto& c : problem.cuts.clique) {
                out << "clique";
                for (int v : c) out << "," << v;
                out << "\n";
            }
        }
        return res.status == mssc::SolveStatus::optimal ? 0 : 2;
    }

    if (*evaluate) {
        const mssc::Dataset d = load_dataset(eval_path, eval_label_col);
        const mssc::Clustering a = mssc::canonicalize(load_labels(eval_a));
        const mssc::Clustering b = mssc::canonicalize(load_labels(eval_b));
        if (a.n() != static_cast<std::size_t>(d.n()) || b.n() != static_cast<std::size_t>(d.n()))
            throw std::runtime_error("label files do not match the dataset length");
        mssc::MetricReport r;
        r.k = b.k;
        r.d_sos = mssc::mssc_objective(d, b);
        mssc::detail_exp::fill_extrinsic(a, b, r);
        mssc::detail_exp::fill_intrinsic(d, b, r);
        print_metric_row(r, std::cout);
        return 0;
    }

    if (*experiment) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
        const mssc::ExperimentSpec spec = mssc::parse_experiment_config(in);
        const auto rows = mssc::run_experiment(spec);
        std::filesystem::create_directories(spec.output_dir);
        {
            std::ofstream out(spec.output_dir + "/reports.csv");
            mssc::write_reports_csv(rows, out);
        }
        {
            std::ofstream out(spec.output_dir + "/reports.md");
            mssc::write_reports_markdown(rows, out);
        }
        std::cout << "wrote " << spec.output_dir << "/reports.csv and reports.md\n";
        for (const auto& row : rows)
            if (row.status && *row.status != mssc::SolveStatus::optimal) return 2;
        return 0;
    }

    if (*summarize) {
        std::ifstream in(reports_path);
        if (!in) throw std::runtime_error("cannot open reports '" + reports_path + "'");
        const auto rows = mssc::parse_reports_csv(in);
        const auto summary = mssc::summarize_kopt(rows);
        if (summary_markdown)
            mssc::write_summary_markdown(summary, std::cout);
        else
            mssc::write_summary_csv(summary, std::cout);
        return 0;
    }

    if (*pca) {
        const mssc::Dataset d = load_dataset(pca_path, pca_label_col);
        const Eigen::MatrixXd proj = mssc::pca_project(d);
        std::ostream* out = &std::cout;
        std::ofstream file;
        if (!pca_out.empty()) {
            file.open(pca_out);
            out = &file;
        }
        *out << "pc1,pc2";
        if (d.truth_labels) *out << ",class";
        *out << "\n";
        char buf[64];
        for (Eigen::Index i = 0; i < proj.rows(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g", proj(i, 0), proj(i, 1));
            *out << buf;
            if (d.truth_labels) *out << "," << (*d.truth_labels)[static_cast<std::size_t>(i)];
            *out << "\n";
        }
        return 0;
    }

    if (*gen) {
        mssc::Dataset d;
        if (gen_kind == "blobs")
            d = mssc::gen_blobs(gen_n, gen_k, gen_seed, gen_sep, gen_spread);
        else if (gen_kind == "spirals")
            d = mssc::gen_spirals(gen_n, gen_k, gen_seed, gen_noise);
        else if (gen_kind == "overlap")
            d = mssc::gen_overlap(gen_n, gen_k, gen_seed);
        else
            throw std::runtime_error("unknown generator '" + gen_kind + "'");
        std::ostream* out = &std::cout;
        std::ofstream file;
        if (!gen_out.empty()) {
            file.open(gen_out);
            out = &file;
        }
        mssc::write_csv(d, *out);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
