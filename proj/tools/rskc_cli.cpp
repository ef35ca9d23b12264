// Command-line front end: cluster a CSV file, run the simulation study,
// choose K, or write a synthetic data set.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rskc/report_io.hpp"
#include "rskc/rskc.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct InputOptions {
    std::string path;
    std::string na = "NA";
    bool no_header = false;
    std::string standardize = "none";
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("input", in.path, "CSV file, one case per row")->required();
    cmd->add_option("--na", in.na, "Token marking a missing value")->capture_default_str();
    cmd->add_flag("--no-header", in.no_header, "First row holds data, not feature names");
    cmd->add_option("--standardize", in.standardize, "Per-case standardization before clustering")
        ->check(CLI::IsMember({"none", "rows", "rows-robust"}))
        ->capture_default_str();
}

rskc::DataMatrix load_input(const InputOptions& in) {
    if (!fs::exists(in.path)) {
        throw rskc::DataError("input file not found: " + in.path);
    }
    auto x = rskc::load_csv(in.path, !in.no_header, in.na);
    if (in.standardize == "rows") {
        return rskc::standardize_rows(x, false);
    }
    if (in.standardize == "rows-robust") {
        return rskc::standardize_rows(x, true);
    }
    return x;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw rskc::DataError("cannot create output directory " + dir + ": " + ec.message());
    }
}

struct ClusterArgs {
    InputOptions in;
    std::string algo = "rskc";
    int k = 0;
    double l1 = 0;
    std::optional<double> alpha;
    std::optional<int> trim_count;
    std::uint64_t seed = 1;
    int starts = 10;
    int max_iter = 100;
    std::string out_dir = ".";
    unsigned threads = 1;
    double outlier_c = 3.5;
    bool weighted_silhouette = false;
};

int run_cluster(const ClusterArgs& a) {
    const auto algo = rskc::parse_algorithm(a.algo);
    if (a.k < 2) {
        throw rskc::ParameterError("--k must be at least 2");
    }
    const auto x = load_input(a.in);

    double alpha = a.alpha.value_or(0);
    if (a.trim_count) {
        if (*a.trim_count < 0) {
            throw rskc::ParameterError("--trim-count must be non-negative");
        }
        alpha = static_cast<double>(*a.trim_count) / static_cast<double>(x.n());
    }
    double l1 = a.l1;
    if (rskc::is_sparse(algo) && l1 == 0) {
        throw rskc::ParameterError("--l1 is required for " + a.algo);
    }

    rskc::FitOptions opts;
    opts.seed = a.seed;
    opts.n_starts = a.starts;
    opts.max_iter = a.max_iter;
    opts.threads = a.threads;
    const auto fit = rskc::fit_algorithm(algo, x, a.k, l1, alpha, opts);

    const auto outliers = rskc::flag_outliers(x, fit, a.outlier_c);
    const auto sil = rskc::silhouette(x, fit, outliers, a.weighted_silhouette);

    ensure_dir(a.out_dir);
    const fs::path dir(a.out_dir);
    rskc::write_assignments_csv(rskc::assignment_rows(x, fit, outliers, sil), (dir / "assignments.csv").string());
    if (fit.weights) {
        rskc::write_weights_csv(x, *fit.weights, (dir / "weights.csv").string());
    }

    nlohmann::json j;
    j["schema_version"] = rskc::kSchemaVersion;
    j["algorithm"] = rskc::algorithm_name(algo);
    j["parameters"] = {{"k", a.k},
                       {"l1_bound", rskc::is_sparse(algo) ? nlohmann::json(l1) : nlohmann::json()},
                       {"alpha", alpha},
                       {"trim_count", fit.trim_count},
                       {"n_starts", opts.n_starts},
                       {"max_iter", opts.max_iter},
                       {"standardize", a.in.standardize},
                       {"outlier_c", a.outlier_c}};
    j["n"] = x.n();
    j["p"] = x.p();
    j["seed"] = fit.seed;
    j["objective"] = fit.objective;
    j["n_iter"] = fit.n_iter;
    j["best_start"] = fit.best_start;
    j["degenerate_weights"] = fit.degenerate_weights;
    j["trimmed_weighted"] = rskc::case_labels(x, fit.trimmed_weighted);
    j["trimmed_euclidean"] = rskc::case_labels(x, fit.trimmed_euclidean);
    j["n_trimmed_weighted"] = fit.trimmed_weighted.size();
    j["n_trimmed_euclidean"] = fit.trimmed_euclidean.size();
    j["flagged_outliers"] = rskc::case_labels(x, outliers);
    j["cluster_sizes"] = fit.partition.cluster_sizes();
    nlohmann::json avg = nlohmann::json::array();
    for (double v : sil.cluster_average) {
        avg.push_back(std::isnan(v) ? nlohmann::json() : nlohmann::json(v));
    }
    j["cluster_avg_silhouette"] = avg;
    if (fit.weights) {
        j["nonzero_weights"] = fit.weights->nonzero();
    }
    rskc::write_json(j, (dir / "summary.json").string());

    std::cout << "wrote " << (dir / "assignments.csv").string() << '\n';
    return 0;
}

struct SimulateArgs {
    std::string models = "clean,model1,model2";
    std::string algos = "km,tkm,skm,rskc";
    int reps = 100;
    std::uint64_t master_seed = 1;
    std::string out_dir = ".";
    double l1 = 6.2;
    double alpha = 1.0 / 60;
    int starts = 200;
    unsigned threads = 1;
    bool cer_all = false;
};

int run_simulate(const SimulateArgs& a) {
    rskc::ExperimentConfig config;
    config.models = split_list(a.models);
    for (const auto& m : config.models) {
        rskc::sim_model(m);
    }
    config.algorithms.clear();
    for (const auto& name : split_list(a.algos)) {
        config.algorithms.push_back(rskc::parse_algorithm(name));
    }
    if (a.reps < 0) {
        throw rskc::ParameterError("--reps must be non-negative");
    }
    config.replicates = a.reps;
    config.master_seed = a.master_seed;
    config.l1_bound = a.l1;
    config.alpha = a.alpha;
    config.fit.n_starts = a.starts;
    config.threads = a.threads;
    config.cer_exclude_trimmed = !a.cer_all;

    const auto report = rskc::run_experiment(config);

    ensure_dir(a.out_dir);
    const fs::path dir(a.out_dir);
    rskc::write_replicates_csv(report, (dir / "replicates.csv").string());
    rskc::write_json(rskc::experiment_summary_json(report, config), (dir / "summary.json").string());

    for (const auto& agg : report.aggregate()) {
        std::cout << agg.model << ' ' << rskc::algorithm_short_name(agg.algorithm) << ": median CER "
                  << agg.cer.median << ", mean non-zero weights " << agg.nonzero_weights.mean << '\n';
    }
    for (const auto& f : report.failures) {
        std::cerr << "failed: " << f.model << ' ' << rskc::algorithm_short_name(f.algorithm) << " replicate "
                  << f.replicate << ": " << f.message << '\n';
    }
    return 0;
}

struct SelectKArgs {
    InputOptions in;
    std::string range = "2:5";
    double alpha = 0;
    std::optional<double> l1;
    int splits = 10;
    int refs = 20;
    std::uint64_t seed = 1;
    bool verbose = false;
};

std::pair<int, int> parse_range(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        throw rskc::ParameterError("--k-range must look like a:b, got '" + s + "'");
    }
    try {
        std::size_t used = 0;
        const int lo = std::stoi(s.substr(0, colon), &used);
        if (used != colon) {
            throw std::invalid_argument(s);
        }
        const auto rest = s.substr(colon + 1);
        const int hi = std::stoi(rest, &used);
        if (used != rest.size()) {
            throw std::invalid_argument(s);
        }
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw rskc::ParameterError("--k-range must look like a:b, got '" + s + "'");
    }
}

int run_select_k(const SelectKArgs& a) {
    const auto [lo, hi] = parse_range(a.range);
    if (lo < 2 || hi < lo) {
        throw rskc::ParameterError("invalid K range " + a.range);
    }
    const auto x = load_input(a.in);
    rskc::ClestParams params;
    params.n_splits = a.splits;
    params.n_ref = a.refs;
    params.seed = a.seed;
    const double l1 = a.l1.value_or(std::sqrt(static_cast<double>(x.p())));
    const auto result = rskc::clest_select_k(x, lo, hi, a.alpha, l1, params);
    if (a.verbose) {
        for (std::size_t i = 0; i < result.candidates.size() && i < result.observed.size(); ++i) {
            std::cerr << "K=" << result.candidates[i] << " observed " << result.observed[i] << " reference "
                      << result.reference[i] << '\n';
        }
    }
    std::cout << result.k << '\n';
    return 0;
}

struct GenerateArgs {
    std::string model = "model1";
    std::uint64_t seed = 1;
    std::string out;
    std::string truth;
};

int run_generate(const GenerateArgs& a) {
    const auto sim = rskc::generate_dataset(rskc::sim_model(a.model), a.seed);
    rskc::write_csv(sim.data, a.out);
    if (!a.truth.empty()) {
        std::ofstream out(a.truth);
        if (!out) {
            throw rskc::DataError("cannot open output file: " + a.truth);
        }
        out << "case_id,cluster\n";
        for (std::size_t i = 0; i < sim.data.n(); ++i) {
            out << sim.data.case_ids()[i] << ',' << sim.truth.assign[i] + 1 << '\n';
        }
    }
    return 0;
}

}

int main(int argc, char** argv) {
    CLI::App app{"Robust and sparse K-means clustering"};
    app.require_subcommand(1);

    ClusterArgs ca;
    auto* cluster = app.add_subcommand("cluster", "Cluster the cases of a CSV file");
    add_input_options(cluster, ca.in);
    cluster->add_option("--algo", ca.algo, "kmeans, tkmeans, skmeans or rskc")->capture_default_str();
    cluster->add_option("--k", ca.k, "Number of clusters")->required();
    cluster->add_option("--l1", ca.l1, "L1 bound on the weights (sparse algorithms)");
    auto* alpha_opt = cluster->add_option("--alpha", ca.alpha, "Trimming proportion");
    auto* trim_opt = cluster->add_option("--trim-count", ca.trim_count, "Number of cases to trim");
    alpha_opt->excludes(trim_opt);
    cluster->add_option("--seed", ca.seed, "Random seed")->capture_default_str();
    cluster->add_option("--starts", ca.starts, "Random starts")->capture_default_str();
    cluster->add_option("--max-iter", ca.max_iter, "Lloyd iteration cap")->capture_default_str();
    cluster->add_option("--out-dir", ca.out_dir, "Directory for the output files")->capture_default_str();
    cluster->add_option("--threads", ca.threads, "Worker threads (0 = all cores)")->capture_default_str();
    cluster->add_option("--outlier-c", ca.outlier_c, "MAD multiplier for outlier flags")->capture_default_str();
    cluster->add_flag("--weighted-silhouette", ca.weighted_silhouette, "Use weighted distances for silhouettes");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Run the simulation study");
    simulate->add_option("--models", sa.models, "Comma-separated models")->capture_default_str();
    simulate->add_option("--algos", sa.algos, "Comma-separated algorithms")->capture_default_str();
    simulate->add_option("--reps", sa.reps, "Replicates per model")->capture_default_str();
    simulate->add_option("--master-seed", sa.master_seed, "Seed all replicate seeds derive from")
        ->capture_default_str();
    simulate->add_option("--out-dir", sa.out_dir, "Directory for the report files")->capture_default_str();
    simulate->add_option("--l1", sa.l1, "L1 bound for the sparse algorithms")->capture_default_str();
    simulate->add_option("--alpha", sa.alpha, "Trimming proportion for the trimmed algorithms")
        ->capture_default_str();
    simulate->add_option("--starts", sa.starts, "Random starts per fit")->capture_default_str();
    simulate->add_option("--threads", sa.threads, "Worker threads (0 = all cores)")->capture_default_str();
    simulate->add_flag("--cer-all", sa.cer_all, "Score trimmed cases in the CER too");

    SelectKArgs ka;
    auto* select_k = app.add_subcommand("select-k", "Choose the number of clusters by resampling");
    add_input_options(select_k, ka.in);
    select_k->add_option("--k-range", ka.range, "Candidate range a:b")->capture_default_str();
    select_k->add_option("--alpha", ka.alpha, "Trimming proportion")->capture_default_str();
    select_k->add_option("--l1", ka.l1, "L1 bound (default sqrt(p))");
    select_k->add_option("--splits", ka.splits, "Train/test splits per data set")->capture_default_str();
    select_k->add_option("--refs", ka.refs, "Reference data sets")->capture_default_str();
    select_k->add_option("--seed", ka.seed, "Random seed")->capture_default_str();
    select_k->add_flag("--verbose", ka.verbose, "Print the statistic per candidate to stderr");

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "Write a synthetic data set");
    generate->add_option("--model", ga.model, "intro, naive_demo, clean, model1 or model2")->capture_default_str();
    generate->add_option("--seed", ga.seed, "Random seed")->capture_default_str();
    generate->add_option("--out", ga.out, "Output CSV")->required();
    generate->add_option("--truth", ga.truth, "Also write the true labels to this CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*cluster) {
            return run_cluster(ca);
        }
        if (*simulate) {
            return run_simulate(sa);
        }
        if (*select_k) {
            return run_select_k(ka);
        }
        return run_generate(ga);
    } catch (const rskc::ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const rskc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
