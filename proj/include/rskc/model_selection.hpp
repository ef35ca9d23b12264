#ifndef RSKC_MODEL_SELECTION_HPP
#define RSKC_MODEL_SELECTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cluster.hpp"
#include "data_matrix.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "random.hpp"
#include "stats.hpp"

/**
 * @file model_selection.hpp
 * @brief Choosing the L1 bound and the number of clusters.
 */

namespace rskc {

struct L1Calibration {
    /// Average of the per-data-set selections.
    double bound = 0;
    /// Bound selected on each data set.
    std::vector<double> selected;
    /// Non-zero weight count, indexed [data set][candidate].
    std::vector<std::vector<std::size_t>> nonzero;
};

/**
 * For each data set, fit at every candidate bound and keep the bound whose
 * number of non-zero weights is closest to `target_nonzero` (ties go to the
 * smaller bound); return the average of the kept bounds. `alpha = 0` gives
 * sparse K-means, otherwise RSK-means. The fit on data set d is seeded with
 * `derive_seed(opts.seed, d)` for every candidate.
 */
inline L1Calibration calibrate_l1_bound(const std::vector<DataMatrix>& datasets, int k, double alpha,
                                        std::size_t target_nonzero, std::vector<double> candidates,
                                        const FitOptions& opts = {}) {
    if (datasets.empty()) {
        throw ParameterError("calibration needs at least one data set");
    }
    if (candidates.empty()) {
        throw ParameterError("calibration needs at least one candidate bound");
    }
    std::sort(candidates.begin(), candidates.end());

    L1Calibration out;
    out.selected.resize(datasets.size());
    out.nonzero.assign(datasets.size(), std::vector<std::size_t>(candidates.size()));

    parallel_for(datasets.size(), opts.threads, [&](std::size_t d) {
        FitOptions sub = opts;
        sub.seed = derive_seed(opts.seed, d);
        sub.threads = 1;
        std::size_t best = 0;
        std::size_t best_gap = std::numeric_limits<std::size_t>::max();
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            ClusterFit fit;
            try {
                fit = alpha > 0 ? rsk_means(datasets[d], k, candidates[c], alpha, sub)
                                : sparse_kmeans(datasets[d], k, candidates[c], sub);
            } catch (const std::exception& e) {
                throw NumericalError("calibration fit failed on data set " + std::to_string(d) + ": " + e.what());
            }
            const auto nz = fit.weights->nonzero();
            out.nonzero[d][c] = nz;
            const auto gap = nz > target_nonzero ? nz - target_nonzero : target_nonzero - nz;
            if (gap < best_gap) {
                best_gap = gap;
                best = c;
            }
        }
        out.selected[d] = candidates[best];
    });

    out.bound = mean(out.selected);
    return out;
}

/// The candidate grid lo, lo + step, ..., hi (inclusive, rounded to the step).
inline std::vector<double> bound_grid(double lo, double hi, double step) {
    std::vector<double> out;
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= count; ++i) {
        out.push_back(std::round((lo + i * step) / step) * step);
    }
    return out;
}

/// Cases `rows` of `x`, in the given order.
inline DataMatrix subset_cases(const DataMatrix& x, const std::vector<std::size_t>& rows) {
    std::vector<double> values;
    std::vector<std::uint8_t> observed;
    std::vector<std::string> ids;
    values.reserve(rows.size() * x.p());
    observed.reserve(rows.size() * x.p());
    for (auto i : rows) {
        auto r = x.row(i);
        auto o = x.observed_row(i);
        values.insert(values.end(), r.begin(), r.end());
        observed.insert(observed.end(), o.begin(), o.end());
        ids.push_back(x.case_ids()[i]);
    }
    return DataMatrix(rows.size(), x.p(), std::move(values), std::move(observed), std::move(ids), x.feature_ids());
}

struct ClestParams {
    int n_splits = 10;
    int n_ref = 20;
    double d_min = 0.05;
    /// Retries of a split whose fits fail (e.g. an empty training cluster).
    int max_retries = 10;
    std::uint64_t seed = 0;
    /// Options for every sub-fit; `n_starts` defaults lower than for a full fit.
    FitOptions fit = [] {
        FitOptions f;
        f.n_starts = 5;
        return f;
    }();
};

struct ClestResult {
    int k = 0;
    std::vector<int> candidates;
    /// Median test-set CER on the data, per candidate.
    std::vector<double> observed;
    /// Mean of the same statistic over the uniform reference data sets, per candidate.
    std::vector<double> reference;
};

namespace detail {

// Median CER between predicted and directly fitted test-set partitions over random 2:1 splits.
inline double clest_statistic(const DataMatrix& x, int k, double alpha, double l1_bound, const ClestParams& params,
                              Rng& rng) {
    const auto n = x.n();
    const auto n_train = static_cast<std::size_t>(std::round(2.0 * static_cast<double>(n) / 3.0));
    std::vector<double> cers;
    for (int s = 0; s < params.n_splits; ++s) {
        for (int attempt = 0;; ++attempt) {
            auto order = rng.sample_without_replacement(n, n);
            std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
            std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
            FitOptions sub = params.fit;
            sub.seed = rng.next_seed();
            try {
                auto xtrain = subset_cases(x, train);
                auto xtest = subset_cases(x, test);
                auto train_fit = rsk_means(xtrain, k, l1_bound, alpha, sub);
                auto predicted = assign_cases(xtest, train_fit.centers, train_fit.weights->w);
                auto test_fit = rsk_means(xtest, k, l1_bound, alpha, sub);
                cers.push_back(cer(predicted, test_fit.full_partition, test_fit.trimmed));
                break;
            } catch (const std::exception& e) {
                if (attempt + 1 >= params.max_retries) {
                    throw NumericalError("Clest split failed for K = " + std::to_string(k) + ": " + e.what());
                }
            }
        }
    }
    return median(cers);
}

// Uniform noise over each feature's observed range, keeping the missingness pattern.
inline DataMatrix uniform_reference(const DataMatrix& x, Rng& rng) {
    std::vector<double> lo(x.p(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(x.p(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < x.n(); ++i) {
        for (std::size_t j = 0; j < x.p(); ++j) {
            if (x.observed(i, j)) {
                lo[j] = std::min(lo[j], x(i, j));
                hi[j] = std::max(hi[j], x(i, j));
            }
        }
    }
    std::vector<double> values(x.n() * x.p());
    std::vector<std::uint8_t> observed(x.n() * x.p());
    for (std::size_t i = 0; i < x.n(); ++i) {
        for (std::size_t j = 0; j < x.p(); ++j) {
            values[i * x.p() + j] = lo[j] + (hi[j] - lo[j]) * rng.uniform();
            observed[i * x.p() + j] = x.observed(i, j);
        }
    }
    return DataMatrix(x.n(), x.p(), std::move(values), std::move(observed), x.case_ids(), x.feature_ids());
}

}

/**
 * Clest-style choice of K with RSK-means sub-fits.
 *
 * For each candidate K the statistic t_K is the median, over `n_splits` random
 * 2:1 train/test splits, of the CER between the test partition predicted by the
 * training fit (nearest weighted center) and a fit on the test cases themselves.
 * The reference t0_K averages the same statistic over `n_ref` data sets drawn
 * uniformly within each feature's observed range. The K maximizing t0_K - t_K
 * among those exceeding `d_min` is returned, else the smallest candidate.
 */
inline ClestResult clest_select_k(const DataMatrix& x, int k_min, int k_max, double alpha, double l1_bound,
                                  const ClestParams& params = {}) {
    if (k_min < 2 || k_max < k_min) {
        throw ParameterError("invalid K range " + std::to_string(k_min) + ":" + std::to_string(k_max));
    }
    if (static_cast<std::size_t>(k_max) > x.n() / 3) {
        throw ParameterError("largest K must not exceed n / 3 = " + std::to_string(x.n() / 3));
    }
    if (params.n_splits < 1 || params.n_ref < 1) {
        throw ParameterError("Clest needs at least one split and one reference data set");
    }

    ClestResult out;
    for (int k = k_min; k <= k_max; ++k) {
        out.candidates.push_back(k);
    }
    if (out.candidates.size() == 1) {
        out.k = k_min;
        return out;
    }

    // Reference data sets are shared across K so the comparison is paired.
    Rng ref_rng(derive_seed(params.seed, 0));
    std::vector<DataMatrix> refs;
    for (int r = 0; r < params.n_ref; ++r) {
        refs.push_back(detail::uniform_reference(x, ref_rng));
    }

    double best_gain = -std::numeric_limits<double>::infinity();
    out.k = k_min;
    for (std::size_t c = 0; c < out.candidates.size(); ++c) {
        const int k = out.candidates[c];
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(k) * 1000 + 1));
        const double t = detail::clest_statistic(x, k, alpha, l1_bound, params, rng);
        double t0 = 0;
        for (const auto& ref : refs) {
            t0 += detail::clest_statistic(ref, k, alpha, l1_bound, params, rng);
        }
        t0 /= static_cast<double>(refs.size());
        out.observed.push_back(t);
        out.reference.push_back(t0);

        const double gain = t0 - t;
        if (gain > params.d_min && gain > best_gain) {
            best_gain = gain;
            out.k = k;
        }
    }
    return out;
}

}

#endif
