#ifndef RSKC_METRICS_HPP
#define RSKC_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "cluster.hpp"
#include "data_matrix.hpp"
#include "errors.hpp"
#include "partition.hpp"
#include "stats.hpp"

namespace rskc {

/**
 * Classification error rate: the fraction of unordered pairs of non-excluded
 * cases that are together in one partition and apart in the other.
 *
 * Invariant to relabeling clusters in either partition. Every non-excluded case
 * must carry a cluster label in both partitions.
 */
inline double cer(const Partition& a, const Partition& b, const CaseSet& excluded = {}) {
    if (a.size() != b.size()) {
        throw ParameterError("partitions cover different numbers of cases");
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (case_set_contains(excluded, i)) {
            continue;
        }
        if (a.assign[i] == kTrimmed || b.assign[i] == kTrimmed) {
            throw ParameterError("case " + std::to_string(i + 1) + " is trimmed but not excluded from the CER");
        }
        keep.push_back(i);
    }
    if (keep.size() < 2) {
        throw ParameterError("CER needs at least 2 non-excluded cases");
    }

    std::size_t disagree = 0;
    for (std::size_t x = 0; x < keep.size(); ++x) {
        const int ax = a.assign[keep[x]];
        const int bx = b.assign[keep[x]];
        for (std::size_t y = x + 1; y < keep.size(); ++y) {
            const bool together_a = ax == a.assign[keep[y]];
            const bool together_b = bx == b.assign[keep[y]];
            disagree += together_a != together_b;
        }
    }
    const double pairs = static_cast<double>(keep.size()) * static_cast<double>(keep.size() - 1) / 2;
    return static_cast<double>(disagree) / pairs;
}

/**
 * @brief Center-based silhouettes.
 */
struct Silhouettes {
    /// `s_i = (b_i - a_i) / b_i` for every case, with a_i and b_i the squared
    /// distances to the nearest and second-nearest centers.
    std::vector<double> per_case;
    /// Average over each cluster's members (by `full_partition`), excluding
    /// the cases passed as outliers. NaN for a cluster with no remaining members.
    std::vector<double> cluster_average;
};

/**
 * Silhouette-like index from distances to the fitted centers. Unweighted
 * squared Euclidean distance is used unless `weighted` is set, in which case
 * the fit's feature weights apply. `s_i` is 0 when `b_i` is 0.
 */
inline Silhouettes silhouette(const DataMatrix& x, const ClusterFit& fit, const CaseSet& outliers = {},
                              bool weighted = false) {
    if (fit.centers.k < 2) {
        throw ParameterError("silhouette needs at least 2 clusters");
    }
    if (fit.centers.p != x.p() || fit.full_partition.size() != x.n()) {
        throw ParameterError("fit does not match the data");
    }
    std::span<const double> w;
    if (weighted && fit.weights) {
        w = fit.weights->w;
    }
    auto af = detail::active_features(w, x.p());

    Silhouettes out;
    out.per_case.resize(x.n());
    for (std::size_t i = 0; i < x.n(); ++i) {
        double first = std::numeric_limits<double>::infinity();
        double second = first;
        for (std::size_t c = 0; c < fit.centers.k; ++c) {
            const double d = detail::distance(x, i, fit.centers.row(c), af);
            if (d < first) {
                second = first;
                first = d;
            } else if (d < second) {
                second = d;
            }
        }
        out.per_case[i] = second > 0 ? (second - first) / second : 0.0;
    }

    std::vector<double> total(fit.centers.k, 0);
    std::vector<std::size_t> count(fit.centers.k, 0);
    for (std::size_t i = 0; i < x.n(); ++i) {
        if (case_set_contains(outliers, i)) {
            continue;
        }
        const auto c = static_cast<std::size_t>(fit.full_partition.assign[i]);
        total[c] += out.per_case[i];
        ++count[c];
    }
    out.cluster_average.resize(fit.centers.k);
    for (std::size_t c = 0; c < fit.centers.k; ++c) {
        out.cluster_average[c] =
            count[c] ? total[c] / static_cast<double>(count[c]) : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

/**
 * Cases whose distance exceeds `median + c * MAD` of all distances (MAD
 * consistency-scaled). A zero MAD leaves the threshold at the median.
 */
inline CaseSet flag_outliers_from_distances(const std::vector<double>& dist, double c = 3.5) {
    if (!(c > 0)) {
        throw ParameterError("outlier cutoff multiplier must be positive");
    }
    if (dist.empty()) {
        return {};
    }
    const double med = median(dist);
    const double threshold = med + c * mad(dist, med);
    CaseSet out;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] > threshold) {
            out.push_back(i);
        }
    }
    return out;
}

/// Weighted squared distance of every case to the center of its (nearest) cluster.
inline std::vector<double> distances_to_own_center(const DataMatrix& x, const ClusterFit& fit) {
    std::span<const double> w;
    if (fit.weights) {
        w = fit.weights->w;
    }
    auto af = detail::active_features(w, x.p());
    std::vector<double> dist(x.n());
    for (std::size_t i = 0; i < x.n(); ++i) {
        dist[i] = detail::distance(x, i, fit.centers.row(static_cast<std::size_t>(fit.full_partition.assign[i])), af);
    }
    return dist;
}

/**
 * Outlier flagging for a fit: weighted distances to own centers (unit weights
 * for non-sparse fits), thresholded at median + c * MAD.
 */
inline CaseSet flag_outliers(const DataMatrix& x, const ClusterFit& fit, double c = 3.5) {
    return flag_outliers_from_distances(distances_to_own_center(x, fit), c);
}

/**
 * Number of `true_features` among the `m` largest weights. Equal weights are
 * ranked by feature index, lowest first.
 */
inline std::size_t average_precision(std::span<const double> w, const std::vector<std::size_t>& true_features,
                                     std::size_t m) {
    if (m > w.size()) {
        throw ParameterError("m exceeds the number of features");
    }
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    std::vector<std::uint8_t> is_true(w.size(), 0);
    for (auto j : true_features) {
        if (j >= w.size()) {
            throw ParameterError("true feature index out of range");
        }
        is_true[j] = 1;
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < m; ++r) {
        hits += is_true[order[r]];
    }
    return hits;
}

/// Share of total weight carried by `features`.
inline double weight_mass(std::span<const double> w, const std::vector<std::size_t>& features) {
    double total = 0;
    double part = 0;
    for (auto v : w) {
        total += v;
    }
    for (auto j : features) {
        part += w[j];
    }
    return total > 0 ? part / total : 0.0;
}

}

#endif
