#ifndef RSKC_CLUSTER_HPP
#define RSKC_CLUSTER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "data_matrix.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "partition.hpp"
#include "random.hpp"
#include "weights.hpp"

/**
 * @file cluster.hpp
 * @brief K-means, trimmed K-means, sparse K-means and robust sparse K-means.
 *
 * All four share one weighted, trimmed Lloyd refinement. Plain K-means is the
 * special case with unit weights and no trimming; sparse K-means alternates
 * that refinement with a closed-form weight update; the robust variant adds a
 * second trimmed set, built from unweighted distances, before each weight update.
 */

namespace rskc {

/**
 * @brief K-by-p matrix of cluster centers, row-major.
 */
struct Centers {
    std::size_t k = 0;
    std::size_t p = 0;
    std::vector<double> values;

    Centers() = default;
    Centers(std::size_t clusters, std::size_t features) : k(clusters), p(features), values(clusters * features, 0) {}

    std::span<const double> row(std::size_t c) const { return {values.data() + c * p, p}; }
    std::span<double> row(std::size_t c) { return {values.data() + c * p, p}; }

    static Centers from_rows(const std::vector<std::vector<double>>& rows) {
        Centers out(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t c = 0; c < rows.size(); ++c) {
            std::copy(rows[c].begin(), rows[c].end(), out.row(c).begin());
        }
        return out;
    }

    bool operator==(const Centers&) const = default;
};

enum class Algorithm { kmeans, trimmed_kmeans, sparse_kmeans, rsk_means };

inline std::string algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::kmeans:
        return "kmeans";
    case Algorithm::trimmed_kmeans:
        return "tkmeans";
    case Algorithm::sparse_kmeans:
        return "skmeans";
    case Algorithm::rsk_means:
        return "rskc";
    }
    return "unknown";
}

inline bool is_sparse(Algorithm a) {
    return a == Algorithm::sparse_kmeans || a == Algorithm::rsk_means;
}

struct FitOptions {
    int n_starts = 10;
    /// Cap on Lloyd iterations per refinement.
    int max_iter = 100;
    /// Relative L1 change in the weights below which the sparse outer loop stops.
    double tol = 1e-4;
    std::uint64_t seed = 0;
    /// Cap on weight updates for the sparse algorithms.
    int max_outer = 20;
    /// Worker threads for independent starts; 0 uses hardware concurrency.
    unsigned threads = 1;
};

/**
 * @brief Result of one clustering run.
 *
 * `partition` marks every case in `trimmed` as `kTrimmed`; `full_partition`
 * gives every case, trimmed or not, the cluster of its nearest (weighted) center.
 */
struct ClusterFit {
    Algorithm algorithm = Algorithm::kmeans;
    Partition partition;
    Partition full_partition;
    Centers centers;
    std::optional<WeightVector> weights;
    CaseSet trimmed_weighted;   // O_W
    CaseSet trimmed_euclidean;  // O_E
    CaseSet trimmed;            // O = O_W u O_E
    /// Within-cluster SS (non-trimmed cases) for K-means and trimmed K-means;
    /// weighted between-cluster dispersion sum_j w_j B_j (excluding O) for the sparse fits.
    double objective = 0;
    int n_iter = 0;
    std::uint64_t seed = 0;
    std::size_t trim_count = 0;
    int best_start = 0;
    /// Set when a weight update faced no positive between-cluster term; the previous weights were kept.
    bool degenerate_weights = false;
    /// Per-iteration objective of the selected start: Lloyd objective for the plain
    /// algorithms, relative weight change for the sparse ones.
    std::vector<double> trace;
    /// Weights after each outer iteration of the selected start (sparse fits only).
    std::vector<WeightVector> weight_history;
};

/// Number of cases trimmed for proportion `alpha`: floor(alpha * n), guarded against representation error.
inline std::size_t trim_count_for(double alpha, std::size_t n) {
    if (!(alpha >= 0 && alpha < 1)) {
        throw ParameterError("trimming proportion must lie in [0, 1)");
    }
    return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-9));
}

namespace detail {

// Features with positive weight, for distance evaluation.
struct ActiveFeatures {
    std::vector<std::size_t> index;
    std::vector<double> weight;
    double total = 0;
};

inline ActiveFeatures active_features(std::span<const double> weights, std::size_t p) {
    ActiveFeatures out;
    for (std::size_t j = 0; j < p; ++j) {
        const double w = weights.empty() ? 1.0 : weights[j];
        if (w > 0) {
            out.index.push_back(j);
            out.weight.push_back(w);
            out.total += w;
        }
    }
    return out;
}

/**
 * Weighted squared distance between case `i` and `center`. With missing data,
 * only features observed for the case are summed and the result is scaled by
 * (total active weight) / (active weight observed). A case observing none of the
 * active features is at distance 0 from every center.
 */
inline double distance(const DataMatrix& x, std::size_t i, std::span<const double> center, const ActiveFeatures& af) {
    auto row = x.row(i);
    double d = 0;
    if (!x.has_missing()) {
        for (std::size_t a = 0; a < af.index.size(); ++a) {
            const auto j = af.index[a];
            const double diff = row[j] - center[j];
            d += af.weight[a] * diff * diff;
        }
        return d;
    }
    auto obs = x.observed_row(i);
    double seen = 0;
    for (std::size_t a = 0; a < af.index.size(); ++a) {
        const auto j = af.index[a];
        if (obs[j]) {
            const double diff = row[j] - center[j];
            d += af.weight[a] * diff * diff;
            seen += af.weight[a];
        }
    }
    return seen > 0 ? d * (af.total / seen) : 0.0;
}

// Nearest center per case (ties to the lowest index) and the distance to it.
inline void nearest_centers(const DataMatrix& x, const Centers& centers, const ActiveFeatures& af,
                            std::vector<int>& assign, std::vector<double>& dist) {
    assign.assign(x.n(), 0);
    dist.assign(x.n(), 0);
    for (std::size_t i = 0; i < x.n(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < centers.k; ++c) {
            const double d = distance(x, i, centers.row(c), af);
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        assign[i] = best_c;
        dist[i] = best;
    }
}

/// The `count` cases with the largest distances; at equal distance the lower index is trimmed first.
inline CaseSet largest(const std::vector<double>& dist, std::size_t count) {
    if (count == 0) {
        return {};
    }
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    order.resize(count);
    return make_case_set(std::move(order));
}

// Per-feature means over non-trimmed members; features no member observes fall back to the overall feature mean.
inline Centers center_means(const DataMatrix& x, const std::vector<int>& assign, int k, const CaseSet& trimmed,
                            bool require_nonempty) {
    const auto p = x.p();
    Centers centers(static_cast<std::size_t>(k), p);
    std::vector<double> counts(static_cast<std::size_t>(k) * p, 0);
    std::vector<std::size_t> members(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < x.n(); ++i) {
        if (assign[i] == kTrimmed || case_set_contains(trimmed, i)) {
            continue;
        }
        const auto c = static_cast<std::size_t>(assign[i]);
        ++members[c];
        auto row = x.row(i);
        auto obs = x.observed_row(i);
        auto out = centers.row(c);
        for (std::size_t j = 0; j < p; ++j) {
            if (obs[j]) {
                out[j] += row[j];
                counts[c * p + j] += 1;
            }
        }
    }
    for (std::size_t c = 0; c < centers.k; ++c) {
        if (require_nonempty && members[c] == 0) {
            throw ParameterError("cluster " + std::to_string(c + 1) + " has no non-trimmed members");
        }
        auto out = centers.row(c);
        for (std::size_t j = 0; j < p; ++j) {
            out[j] = counts[c * p + j] > 0 ? out[j] / counts[c * p + j] : x.feature_mean(j);
        }
    }
    return centers;
}

inline Centers centers_from_cases(const DataMatrix& x, const std::vector<std::size_t>& cases) {
    Centers centers(cases.size(), x.p());
    for (std::size_t c = 0; c < cases.size(); ++c) {
        auto out = centers.row(c);
        for (std::size_t j = 0; j < x.p(); ++j) {
            out[j] = x.observed(cases[c], j) ? x(cases[c], j) : x.feature_mean(j);
        }
    }
    return centers;
}

/**
 * Give every empty cluster the non-trimmed case farthest from its own center,
 * taken from a cluster that keeps at least one member.
 */
inline void repair_empty_clusters(std::vector<int>& assign, const std::vector<double>& dist, int k,
                                  const CaseSet& trimmed) {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < assign.size(); ++i) {
        if (!case_set_contains(trimmed, i)) {
            ++sizes[static_cast<std::size_t>(assign[i])];
        }
    }
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (sizes[c] > 0) {
            continue;
        }
        std::size_t pick = assign.size();
        double far = -1;
        for (std::size_t i = 0; i < assign.size(); ++i) {
            if (case_set_contains(trimmed, i) || sizes[static_cast<std::size_t>(assign[i])] < 2) {
                continue;
            }
            if (dist[i] > far) {
                far = dist[i];
                pick = i;
            }
        }
        if (pick == assign.size()) {
            throw NumericalError("cannot repair empty cluster " + std::to_string(c + 1));
        }
        --sizes[static_cast<std::size_t>(assign[pick])];
        assign[pick] = static_cast<int>(c);
        ++sizes[c];
    }
}

inline void check_k(const DataMatrix& x, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > x.n()) {
        throw ParameterError("number of clusters " + std::to_string(k) + " must lie in [1, " +
                             std::to_string(x.n()) + "]");
    }
}

}

/**
 * Assign each case to the center minimizing `sum_j w_j (x_ij - mu_kj)^2`,
 * ties going to the lowest cluster index. An empty `weights` span means unit weights.
 */
inline Partition assign_cases(const DataMatrix& x, const Centers& centers, std::span<const double> weights = {}) {
    if (centers.p != x.p() || centers.k == 0) {
        throw ParameterError("centers do not match the data dimensions");
    }
    auto af = detail::active_features(weights, x.p());
    std::vector<int> assign;
    std::vector<double> dist;
    detail::nearest_centers(x, centers, af, assign, dist);
    return Partition(std::move(assign), static_cast<int>(centers.k));
}

/// Per-feature means of each cluster's members, skipping trimmed cases and unobserved entries.
inline Centers update_centers(const DataMatrix& x, const Partition& part, const CaseSet& trimmed = {}) {
    if (part.size() != x.n()) {
        throw ParameterError("partition size does not match the number of cases");
    }
    return detail::center_means(x, part.assign, part.k, trimmed, true);
}

/**
 * @brief Outcome of one weighted, trimmed Lloyd refinement.
 */
struct LloydResult {
    /// Nearest-center label of every case, trimmed or not.
    std::vector<int> assign;
    CaseSet trimmed;
    Centers centers;
    /// Weighted within-cluster SS over non-trimmed cases, with respect to `centers`.
    double objective = 0;
    int iterations = 0;
    bool converged = false;
    /// Objective after each center update.
    std::vector<double> trace;
};

namespace detail {

/**
 * Fully observed data restricted to the positively weighted features, stored
 * contiguously so the distance loop vectorizes.
 */
class DenseView {
public:
    DenseView(const DataMatrix& x, const ActiveFeatures& af) : n_(x.n()), dims_(af.index.size()), weight_(af.weight) {
        z_.resize(n_ * dims_);
        for (std::size_t i = 0; i < n_; ++i) {
            auto row = x.row(i);
            for (std::size_t a = 0; a < dims_; ++a) {
                z_[i * dims_ + a] = row[af.index[a]];
            }
        }
    }

    std::size_t n() const { return n_; }
    std::size_t dims() const { return dims_; }

    std::vector<double> project(const Centers& c, const ActiveFeatures& af) const {
        std::vector<double> out(c.k * dims_);
        for (std::size_t r = 0; r < c.k; ++r) {
            for (std::size_t a = 0; a < dims_; ++a) {
                out[r * dims_ + a] = c.row(r)[af.index[a]];
            }
        }
        return out;
    }

    double distance(std::size_t i, const double* center) const {
        const double* z = z_.data() + i * dims_;
        const double* w = weight_.data();
        double d = 0;
        for (std::size_t a = 0; a < dims_; ++a) {
            const double diff = z[a] - center[a];
            d += w[a] * diff * diff;
        }
        return d;
    }

    void means(const std::vector<int>& assign, const std::vector<std::uint8_t>& keep, std::size_t k,
               std::vector<double>& out) const {
        out.assign(k * dims_, 0);
        std::vector<double> counts(k, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            if (!keep[i]) {
                continue;
            }
            const auto c = static_cast<std::size_t>(assign[i]);
            counts[c] += 1;
            const double* z = z_.data() + i * dims_;
            double* o = out.data() + c * dims_;
            for (std::size_t a = 0; a < dims_; ++a) {
                o[a] += z[a];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t a = 0; a < dims_; ++a) {
                out[c * dims_ + a] /= counts[c];
            }
        }
    }

private:
    std::size_t n_;
    std::size_t dims_;
    std::vector<double> weight_;
    std::vector<double> z_;
};

/// Data with missing entries, distances rescaled for unobserved features.
class MaskedView {
public:
    MaskedView(const DataMatrix& x, const ActiveFeatures& af) : x_(x), af_(af) {}

    std::size_t n() const { return x_.n(); }
    std::size_t dims() const { return x_.p(); }

    std::vector<double> project(const Centers& c, const ActiveFeatures&) const { return c.values; }

    double distance(std::size_t i, const double* center) const {
        return detail::distance(x_, i, {center, x_.p()}, af_);
    }

    void means(const std::vector<int>& assign, const std::vector<std::uint8_t>& keep, std::size_t k,
               std::vector<double>& out) const {
        std::vector<int> masked(assign);
        for (std::size_t i = 0; i < masked.size(); ++i) {
            if (!keep[i]) {
                masked[i] = kTrimmed;
            }
        }
        out = center_means(x_, masked, static_cast<int>(k), {}, false).values;
    }

private:
    const DataMatrix& x_;
    const ActiveFeatures& af_;
};

template<class View>
LloydResult lloyd_loop(const View& view, std::vector<double> centers, std::size_t k, std::size_t trim_count,
                       int max_iter) {
    const auto n = view.n();
    const auto dims = view.dims();
    LloydResult out;
    std::vector<int> assign(n);
    std::vector<double> dist(n);
    std::vector<std::uint8_t> keep(n);

    for (int it = 1; it <= std::max(max_iter, 1); ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = view.distance(i, centers.data() + c * dims);
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                }
            }
            assign[i] = best_c;
            dist[i] = best;
        }
        auto trimmed = largest(dist, trim_count);
        repair_empty_clusters(assign, dist, static_cast<int>(k), trimmed);
        std::fill(keep.begin(), keep.end(), 1);
        for (auto i : trimmed) {
            keep[i] = 0;
        }
        view.means(assign, keep, k, centers);

        double obj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (keep[i]) {
                obj += view.distance(i, centers.data() + static_cast<std::size_t>(assign[i]) * dims);
            }
        }
        out.trace.push_back(obj);
        out.iterations = it;

        const bool same = it > 1 && assign == out.assign && trimmed == out.trimmed;
        out.assign = assign;
        out.trimmed = std::move(trimmed);
        out.objective = obj;
        if (same) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}

/**
 * Lloyd iterations from the given centers: assign every case to its nearest
 * weighted center, trim the `trim_count` farthest, recompute centers from the
 * rest. Stops when neither assignments nor the trimmed set change, or after
 * `max_iter` iterations.
 *
 * Empty clusters are refilled with the non-trimmed case farthest from its own
 * center. Returned centers cover all features, including zero-weight ones.
 */
inline LloydResult lloyd_refine(const DataMatrix& x, std::span<const double> weights, const Centers& init,
                                std::size_t trim_count, int max_iter) {
    const auto k = init.k;
    if (k == 0 || init.p != x.p()) {
        throw ParameterError("initial centers do not match the data dimensions");
    }
    if (trim_count + k > x.n()) {
        throw ParameterError("trimming " + std::to_string(trim_count) + " cases leaves fewer than K cases");
    }
    auto af = detail::active_features(weights, x.p());
    if (af.index.empty()) {
        throw ParameterError("all feature weights are zero");
    }

    LloydResult out;
    if (x.has_missing()) {
        detail::MaskedView view(x, af);
        out = detail::lloyd_loop(view, view.project(init, af), k, trim_count, max_iter);
    } else {
        detail::DenseView view(x, af);
        out = detail::lloyd_loop(view, view.project(init, af), k, trim_count, max_iter);
    }
    out.centers = detail::center_means(x, out.assign, static_cast<int>(k), out.trimmed, true);
    return out;
}

namespace detail {

inline std::vector<Centers> draw_starts(const DataMatrix& x, int k, const FitOptions& opts) {
    if (opts.n_starts < 1) {
        throw ParameterError("n_starts must be at least 1");
    }
    Rng rng(opts.seed);
    std::vector<Centers> starts;
    for (int s = 0; s < opts.n_starts; ++s) {
        starts.push_back(centers_from_cases(x, rng.sample_without_replacement(x.n(), static_cast<std::size_t>(k))));
    }
    return starts;
}

inline Partition with_trimmed(std::vector<int> assign, int k, const CaseSet& trimmed) {
    for (auto i : trimmed) {
        assign[i] = kTrimmed;
    }
    return Partition(std::move(assign), k);
}

// Index of the smallest Lloyd objective; ties go to the earlier start.
inline std::size_t best_lloyd(const std::vector<LloydResult>& results) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < results.size(); ++s) {
        if (results[s].objective < results[best].objective) {
            best = s;
        }
    }
    return best;
}

inline ClusterFit fit_plain(const DataMatrix& x, int k, std::size_t trim_count, const FitOptions& opts,
                            Algorithm algorithm) {
    auto starts = draw_starts(x, k, opts);
    const std::vector<double> unit(x.p(), 1.0);

    std::vector<LloydResult> results(starts.size());
    parallel_for(starts.size(), opts.threads, [&](std::size_t s) {
        results[s] = lloyd_refine(x, unit, starts[s], trim_count, opts.max_iter);
    });

    const auto best = best_lloyd(results);
    auto& r = results[best];

    ClusterFit fit;
    fit.algorithm = algorithm;
    fit.full_partition = Partition(r.assign, k);
    fit.partition = with_trimmed(r.assign, k, r.trimmed);
    fit.centers = std::move(r.centers);
    fit.trimmed_weighted = r.trimmed;
    fit.trimmed = r.trimmed;
    fit.objective = r.objective;
    fit.n_iter = r.iterations;
    fit.seed = opts.seed;
    fit.trim_count = trim_count;
    fit.best_start = static_cast<int>(best);
    fit.trace = std::move(r.trace);
    return fit;
}


inline ClusterFit fit_sparse(const DataMatrix& x, int k, double l1_bound, std::size_t trim_count,
                             const FitOptions& opts, Algorithm algorithm) {
    const double root_p = std::sqrt(static_cast<double>(x.p()));
    if (!(l1_bound >= 1) || l1_bound > root_p * (1 + 1e-12)) {
        throw ParameterError("L1 bound must lie in [1, sqrt(p)] = [1, " + std::to_string(root_p) + "]");
    }
    if (2 * trim_count + static_cast<std::size_t>(k) > x.n()) {
        throw ParameterError("trimming " + std::to_string(trim_count) +
                             " cases twice leaves fewer than K cases; reduce alpha");
    }

    auto weights = WeightVector::uniform(x.p(), l1_bound);
    Rng rng(opts.seed);

    ClusterFit fit;
    const ActiveFeatures all_features = active_features({}, x.p());
    std::vector<double> bcss;
    LloydResult lloyd;

    for (int outer = 1; outer <= std::max(opts.max_outer, 1); ++outer) {
        fit.n_iter = outer;

        // Step (a) is itself a multi-start weighted trimmed K-means: fresh random
        // starts plus, after the first pass, the current centers (candidate 0).
        // The smallest trimmed weighted within-cluster SS wins.
        std::vector<Centers> starts;
        if (outer > 1) {
            starts.push_back(std::move(lloyd.centers));
        }
        for (int s = 0; s < opts.n_starts; ++s) {
            starts.push_back(
                centers_from_cases(x, rng.sample_without_replacement(x.n(), static_cast<std::size_t>(k))));
        }
        std::vector<LloydResult> candidates(starts.size());
        parallel_for(starts.size(), opts.threads, [&](std::size_t s) {
            candidates[s] = lloyd_refine(x, weights.w, starts[s], trim_count, opts.max_iter);
        });
        const auto best = best_lloyd(candidates);
        fit.best_start = static_cast<int>(best);
        lloyd = std::move(candidates[best]);

        // O_E: largest unweighted distances to centers computed without O_W, ranked over all cases.
        CaseSet euclidean;
        if (trim_count > 0) {
            auto plain = center_means(x, lloyd.assign, k, lloyd.trimmed, false);
            std::vector<double> dist(x.n());
            for (std::size_t i = 0; i < x.n(); ++i) {
                dist[i] = distance(x, i, plain.row(static_cast<std::size_t>(lloyd.assign[i])), all_features);
            }
            euclidean = largest(dist, trim_count);
        }
        fit.trimmed_euclidean = std::move(euclidean);
        fit.trimmed = case_set_union(lloyd.trimmed, fit.trimmed_euclidean);

        bcss = bcss_terms(x, Partition(lloyd.assign, k), fit.trimmed, true);

        WeightVector next;
        try {
            next = solve_weights(bcss, l1_bound);
        } catch (const DegenerateObjective&) {
            fit.degenerate_weights = true;
            break;
        }

        double change = 0;
        double scale = 0;
        for (std::size_t j = 0; j < x.p(); ++j) {
            change += std::abs(next.w[j] - weights.w[j]);
            scale += std::abs(weights.w[j]);
        }
        weights = std::move(next);
        fit.weight_history.push_back(weights);
        fit.trace.push_back(change / scale);
        if (change / scale < opts.tol) {
            break;
        }
    }

    fit.objective = 0;
    for (std::size_t j = 0; j < x.p(); ++j) {
        fit.objective += weights.w[j] * bcss[j];
    }
    fit.algorithm = algorithm;
    fit.full_partition = Partition(lloyd.assign, k);
    fit.partition = with_trimmed(lloyd.assign, k, fit.trimmed);
    fit.centers = std::move(lloyd.centers);
    fit.weights = std::move(weights);
    fit.trimmed_weighted = std::move(lloyd.trimmed);
    fit.seed = opts.seed;
    fit.trim_count = trim_count;
    return fit;
}

}

/**
 * Lloyd's K-means, best of `opts.n_starts` random starts by within-cluster SS.
 * Each start seeds the centers at K distinct cases drawn uniformly.
 */
inline ClusterFit kmeans(const DataMatrix& x, int k, const FitOptions& opts = {}) {
    detail::check_k(x, k);
    return detail::fit_plain(x, k, 0, opts, Algorithm::kmeans);
}

/**
 * Trimmed K-means: at every iteration the floor(alpha * n) cases farthest from
 * their centers are left out of the center update. The final trimmed set is
 * reported as `trimmed_weighted` (and `trimmed`).
 */
inline ClusterFit trimmed_kmeans(const DataMatrix& x, int k, double alpha, const FitOptions& opts = {}) {
    detail::check_k(x, k);
    const auto m = trim_count_for(alpha, x.n());
    if (m + static_cast<std::size_t>(k) > x.n()) {
        throw ParameterError("floor(alpha * n) must not exceed n - K");
    }
    return detail::fit_plain(x, k, m, opts, Algorithm::trimmed_kmeans);
}

/**
 * Sparse K-means. From uniform weights, alternates weighted Lloyd refinement
 * with the closed-form weight update on the per-feature between-cluster
 * dispersion, until the relative L1 change of the weights drops below
 * `opts.tol` or `opts.max_outer` updates. Every refinement is multi-start: `opts.n_starts`
 * fresh random starts plus the current centers, keeping the smallest weighted
 * within-cluster SS.
 */
inline ClusterFit sparse_kmeans(const DataMatrix& x, int k, double l1_bound, const FitOptions& opts = {}) {
    detail::check_k(x, k);
    return detail::fit_sparse(x, k, l1_bound, 0, opts, Algorithm::sparse_kmeans);
}

/**
 * Robust sparse K-means.
 *
 * Each outer iteration runs weighted trimmed K-means (trimmed set O_W), then
 * ranks all cases by unweighted squared distance to centers computed from the
 * resulting partition without O_W and trims the floor(alpha * n) largest (O_E).
 * Weights are updated from the between-cluster dispersion computed without
 * O = O_W u O_E. Cases in O are reported as trimmed. With alpha = 0 the result
 * is identical to `sparse_kmeans`.
 */
inline ClusterFit rsk_means(const DataMatrix& x, int k, double l1_bound, double alpha, const FitOptions& opts = {}) {
    detail::check_k(x, k);
    const auto m = trim_count_for(alpha, x.n());
    return detail::fit_sparse(x, k, l1_bound, m, opts, Algorithm::rsk_means);
}

}

#endif
