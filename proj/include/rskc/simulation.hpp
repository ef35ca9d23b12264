#ifndef RSKC_SIMULATION_HPP
#define RSKC_SIMULATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cluster.hpp"
#include "data_matrix.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "stats.hpp"

/**
 * @file simulation.hpp
 * @brief Synthetic Gaussian cluster models and the replicated comparison of the four algorithms.
 */

namespace rskc {

/// A single overwritten entry (0-based case and feature).
struct OutlierEntry {
    std::size_t case_index;
    std::size_t feature;
    double value;
};

/**
 * @brief K equal-size spherical Gaussian clusters.
 *
 * Cluster c (0-based) has mean `mu * (c - (K - 1) / 2)` on each of the first
 * `clustering_features` features and 0 elsewhere; all other features are noise.
 */
struct SimModel {
    std::string name;
    std::size_t n = 0;
    std::size_t p = 0;
    int k = 0;
    double mu = 0;
    std::size_t clustering_features = 0;
    std::vector<OutlierEntry> outliers;

    std::vector<std::size_t> true_features() const {
        std::vector<std::size_t> out(clustering_features);
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
};

inline const std::vector<std::string>& sim_model_names() {
    static const std::vector<std::string> names{"intro", "naive_demo", "clean", "model1", "model2"};
    return names;
}

/**
 * The predefined models:
 * - `intro`: n = 300, p = 1000, means -3/0/3 on 2 features.
 * - `naive_demo`: n = 300, p = 5, means -2/0/2 on 2 features; features 4 and 5 of cases 1-3 set to 25.
 * - `clean`: n = 60, p = 500, means -1/0/1 on 50 features.
 * - `model1`: `clean` with x[1, 500] = 25 (a noise feature).
 * - `model2`: `clean` with x[1, 1] = 25 (a clustering feature).
 */
inline SimModel sim_model(const std::string& name) {
    SimModel m;
    m.name = name;
    m.k = 3;
    if (name == "intro") {
        m.n = 300;
        m.p = 1000;
        m.mu = 3;
        m.clustering_features = 2;
    } else if (name == "naive_demo") {
        m.n = 300;
        m.p = 5;
        m.mu = 2;
        m.clustering_features = 2;
        for (std::size_t i = 0; i < 3; ++i) {
            m.outliers.push_back({i, 3, 25});
            m.outliers.push_back({i, 4, 25});
        }
    } else if (name == "clean" || name == "model1" || name == "model2") {
        m.n = 60;
        m.p = 500;
        m.mu = 1;
        m.clustering_features = 50;
        if (name == "model1") {
            m.outliers.push_back({0, 499, 25});
        } else if (name == "model2") {
            m.outliers.push_back({0, 0, 25});
        }
    } else {
        std::string valid;
        for (const auto& v : sim_model_names()) {
            valid += (valid.empty() ? "" : ", ") + v;
        }
        throw ParameterError("unknown model '" + name + "'; valid models: " + valid);
    }
    return m;
}

/**
 * @brief A generated data set together with its true labels.
 */
struct SimData {
    DataMatrix data;
    Partition truth;
};

/**
 * Draw a data set from `model`. Cases are ordered by cluster (cluster 1
 * first); entries are filled row by row with independent standard normals
 * plus the cluster mean, then the outlier entries are overwritten.
 */
inline SimData generate_dataset(const SimModel& model, std::uint64_t seed) {
    if (model.k < 1 || model.n % static_cast<std::size_t>(model.k) != 0) {
        throw ParameterError("model " + model.name + ": n must be a multiple of K");
    }
    if (model.clustering_features > model.p) {
        throw ParameterError("model " + model.name + ": more clustering features than features");
    }
    const std::size_t size = model.n / static_cast<std::size_t>(model.k);
    Rng rng(seed);

    std::vector<double> values(model.n * model.p);
    std::vector<int> labels(model.n);
    for (std::size_t i = 0; i < model.n; ++i) {
        const auto c = static_cast<int>(i / size);
        labels[i] = c;
        const double center = model.mu * (c - (model.k - 1) / 2.0);
        for (std::size_t j = 0; j < model.p; ++j) {
            values[i * model.p + j] = rng.normal() + (j < model.clustering_features ? center : 0.0);
        }
    }
    for (const auto& o : model.outliers) {
        if (o.case_index >= model.n || o.feature >= model.p) {
            throw ParameterError("model " + model.name + ": outlier entry out of range");
        }
        values[o.case_index * model.p + o.feature] = o.value;
    }
    return SimData{DataMatrix(model.n, model.p, std::move(values)), Partition(std::move(labels), model.k)};
}

inline Algorithm parse_algorithm(const std::string& name) {
    if (name == "km" || name == "kmeans") {
        return Algorithm::kmeans;
    }
    if (name == "tkm" || name == "tkmeans") {
        return Algorithm::trimmed_kmeans;
    }
    if (name == "skm" || name == "skmeans") {
        return Algorithm::sparse_kmeans;
    }
    if (name == "rskc" || name == "rsk") {
        return Algorithm::rsk_means;
    }
    throw ParameterError("unknown algorithm '" + name + "'; valid algorithms: km, tkm, skm, rskc");
}

/// Short label used in experiment reports.
inline std::string algorithm_short_name(Algorithm a) {
    switch (a) {
    case Algorithm::kmeans:
        return "km";
    case Algorithm::trimmed_kmeans:
        return "tkm";
    case Algorithm::sparse_kmeans:
        return "skm";
    case Algorithm::rsk_means:
        return "rskc";
    }
    return "unknown";
}

/// Fit any of the four algorithms with a uniform parameter set; `l1_bound` and `alpha` are ignored where unused.
inline ClusterFit fit_algorithm(Algorithm a, const DataMatrix& x, int k, double l1_bound, double alpha,
                                const FitOptions& opts) {
    switch (a) {
    case Algorithm::kmeans:
        return kmeans(x, k, opts);
    case Algorithm::trimmed_kmeans:
        return trimmed_kmeans(x, k, alpha, opts);
    case Algorithm::sparse_kmeans:
        return sparse_kmeans(x, k, l1_bound, opts);
    case Algorithm::rsk_means:
        return rsk_means(x, k, l1_bound, alpha, opts);
    }
    throw ParameterError("unknown algorithm");
}

struct ExperimentConfig {
    std::vector<std::string> models{"clean", "model1", "model2"};
    std::vector<Algorithm> algorithms{Algorithm::kmeans, Algorithm::trimmed_kmeans, Algorithm::sparse_kmeans,
                                      Algorithm::rsk_means};
    int replicates = 100;
    std::uint64_t master_seed = 1;
    FitOptions fit;
    double l1_bound = 6.2;
    double alpha = 1.0 / 60;
    /// Number of top-weighted features inspected by the average precision.
    std::size_t top_m = 50;
    /// Leave the cases an algorithm trimmed out of its CER.
    bool cer_exclude_trimmed = true;
    /// Replicates processed concurrently; reported numbers do not depend on it.
    unsigned threads = 1;
};

struct ReplicateRow {
    std::string model;
    Algorithm algorithm = Algorithm::kmeans;
    int replicate = 0;
    std::uint64_t seed = 0;
    double cer = 0;
    std::size_t nonzero_weights = 0;
    /// Sparse fits only.
    std::optional<std::size_t> avg_precision;
    /// Median weight over the clustering features; sparse fits only.
    std::optional<double> median_clustering_weight;

    bool operator==(const ReplicateRow&) const = default;
};

struct ReplicateFailure {
    std::string model;
    Algorithm algorithm = Algorithm::kmeans;
    int replicate = 0;
    std::string message;
};

/// Mean, sample SD and median of one metric.
struct Summary {
    std::size_t count = 0;
    double mean = 0;
    double sd = 0;
    double median = 0;
};

inline Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    s.mean = rskc::mean(values);
    s.sd = sample_sd(values);
    s.median = rskc::median(values);
    return s;
}

struct AggregateRow {
    std::string model;
    Algorithm algorithm = Algorithm::kmeans;
    Summary cer;
    Summary nonzero_weights;
    Summary avg_precision;
    Summary median_clustering_weight;
};

/**
 * @brief Per-replicate results of an experiment, with aggregates derived on demand.
 */
struct ExperimentReport {
    std::vector<ReplicateRow> rows;
    std::vector<ReplicateFailure> failures;

    /// One row per (model, algorithm), in order of first appearance.
    std::vector<AggregateRow> aggregate() const {
        std::vector<AggregateRow> out;
        std::vector<std::vector<const ReplicateRow*>> groups;
        for (const auto& r : rows) {
            auto it = std::find_if(out.begin(), out.end(),
                                   [&](const AggregateRow& a) { return a.model == r.model && a.algorithm == r.algorithm; });
            if (it == out.end()) {
                out.push_back(AggregateRow{r.model, r.algorithm, {}, {}, {}, {}});
                groups.emplace_back();
                it = out.end() - 1;
            }
            groups[static_cast<std::size_t>(it - out.begin())].push_back(&r);
        }
        for (std::size_t g = 0; g < out.size(); ++g) {
            std::vector<double> c, nz, ap, mw;
            for (const auto* r : groups[g]) {
                c.push_back(r->cer);
                nz.push_back(static_cast<double>(r->nonzero_weights));
                if (r->avg_precision) {
                    ap.push_back(static_cast<double>(*r->avg_precision));
                }
                if (r->median_clustering_weight) {
                    mw.push_back(*r->median_clustering_weight);
                }
            }
            out[g].cer = summarize(c);
            out[g].nonzero_weights = summarize(nz);
            out[g].avg_precision = summarize(ap);
            out[g].median_clustering_weight = summarize(mw);
        }
        return out;
    }
};

inline const AggregateRow* find_aggregate(const std::vector<AggregateRow>& rows, const std::string& model,
                                          Algorithm algorithm) {
    for (const auto& a : rows) {
        if (a.model == model && a.algorithm == algorithm) {
            return &a;
        }
    }
    return nullptr;
}

inline std::uint64_t model_code(const std::string& name) {
    const auto& names = sim_model_names();
    return static_cast<std::uint64_t>(std::find(names.begin(), names.end(), name) - names.begin());
}

/// Seed of replicate `rep` of `model` under `master`; shared by all algorithms in the replicate.
inline std::uint64_t replicate_seed(std::uint64_t master, const std::string& model, int rep) {
    return derive_seed(derive_seed(master, model_code(model)), static_cast<std::uint64_t>(rep));
}

/// Score one fit against the truth of a simulated data set.
inline ReplicateRow score_fit(const SimModel& model, const SimData& sim, const ClusterFit& fit, std::size_t top_m,
                              bool cer_exclude_trimmed) {
    ReplicateRow row;
    row.model = model.name;
    row.algorithm = fit.algorithm;
    row.seed = fit.seed;
    if (cer_exclude_trimmed) {
        row.cer = cer(sim.truth, fit.partition, fit.trimmed);
    } else {
        row.cer = cer(sim.truth, fit.full_partition);
    }
    if (fit.weights) {
        const auto& w = fit.weights->w;
        row.nonzero_weights = fit.weights->nonzero();
        row.avg_precision = average_precision(w, model.true_features(), std::min(top_m, model.p));
        std::vector<double> cw(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(model.clustering_features));
        row.median_clustering_weight = cw.empty() ? 0.0 : median(cw);
    } else {
        row.nonzero_weights = model.p;
    }
    return row;
}

/**
 * Generate `config.replicates` data sets per model and fit every algorithm to
 * each. Trimmed K-means and RSK-means use `config.alpha`; the sparse fits use
 * `config.l1_bound`; K is the model's cluster count. Fit errors are recorded
 * as failures and the run continues.
 */
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    if (config.replicates < 0) {
        throw ParameterError("replicate count must be non-negative");
    }
    std::vector<SimModel> models;
    for (const auto& name : config.models) {
        models.push_back(sim_model(name));
    }

    const auto reps = static_cast<std::size_t>(config.replicates);
    const auto n_alg = config.algorithms.size();
    struct Slot {
        std::optional<ReplicateRow> row;
        std::optional<ReplicateFailure> failure;
    };
    std::vector<Slot> slots(models.size() * reps * n_alg);

    parallel_for(models.size() * reps, config.threads, [&](std::size_t task) {
        const auto& model = models[task / reps];
        const int rep = static_cast<int>(task % reps);
        const auto data_seed = replicate_seed(config.master_seed, model.name, rep);
        const auto sim = generate_dataset(model, data_seed);

        for (std::size_t a = 0; a < n_alg; ++a) {
            auto& slot = slots[task * n_alg + a];
            const auto algorithm = config.algorithms[a];
            FitOptions opts = config.fit;
            opts.seed = derive_seed(data_seed, static_cast<std::uint64_t>(algorithm) + 1);
            opts.threads = 1;
            try {
                auto fit = fit_algorithm(algorithm, sim.data, model.k, config.l1_bound, config.alpha, opts);
                auto row = score_fit(model, sim, fit, config.top_m, config.cer_exclude_trimmed);
                row.replicate = rep;
                slot.row = std::move(row);
            } catch (const std::exception& e) {
                slot.failure = ReplicateFailure{model.name, algorithm, rep, e.what()};
            }
        }
    });

    ExperimentReport report;
    for (auto& s : slots) {
        if (s.row) {
            report.rows.push_back(std::move(*s.row));
        }
        if (s.failure) {
            report.failures.push_back(std::move(*s.failure));
        }
    }
    return report;
}

}

#endif
