#ifndef RSKC_WEIGHTS_HPP
#define RSKC_WEIGHTS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace rskc {

/**
 * @brief Non-negative feature weights with `||w||_2 <= 1` and `||w||_1 <= l1_bound`.
 */
struct WeightVector {
    std::vector<double> w;
    double l1_bound = 0;

    std::size_t size() const { return w.size(); }

    double l1() const {
        double s = 0;
        for (auto v : w) {
            s += v;
        }
        return s;
    }

    double l2() const {
        double s = 0;
        for (auto v : w) {
            s += v * v;
        }
        return std::sqrt(s);
    }

    std::size_t nonzero() const {
        return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double v) { return v > 0; }));
    }

    /// The starting point of the sparse algorithms: every feature weighted 1/sqrt(p).
    static WeightVector uniform(std::size_t p, double l1_bound) {
        return WeightVector{std::vector<double>(p, 1 / std::sqrt(static_cast<double>(p))), l1_bound};
    }

    bool operator==(const WeightVector&) const = default;
};

/// Componentwise `max(b_j - delta, 0)`.
inline std::vector<double> soft_threshold(std::span<const double> b, double delta) {
    if (delta < 0) {
        throw ParameterError("soft_threshold requires delta >= 0");
    }
    std::vector<double> out(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        out[j] = std::max(b[j] - delta, 0.0);
    }
    return out;
}

namespace detail {

inline constexpr int kMaxBisection = 200;

// s / ||s||_2, also reporting the resulting L1 norm. `s` must have a positive entry.
inline std::vector<double> normalize_l2(std::vector<double> s, double& l1) {
    double ss = 0;
    for (auto v : s) {
        ss += v * v;
    }
    const double norm = std::sqrt(ss);
    l1 = 0;
    for (auto& v : s) {
        v /= norm;
        l1 += v;
    }
    return s;
}

}

/**
 * Maximize `sum_j w_j B_j` subject to `w_j >= 0`, `||w||_2 <= 1` and `||w||_1 <= l1_bound`.
 *
 * The maximizer is the normalized soft-thresholded vector `S(B, delta) / ||S(B, delta)||_2`,
 * with `delta = 0` when that already satisfies the L1 bound and otherwise found by
 * bisection on `[0, max_j B_j]` run to machine precision, returning the feasible end.
 * Negative entries of `B` always receive zero weight.
 *
 * Throws `DegenerateObjective` when no entry of `B` is positive.
 */
inline WeightVector solve_weights(std::span<const double> bcss, double l1_bound) {
    const auto p = bcss.size();
    if (p == 0) {
        throw ParameterError("solve_weights needs at least one feature");
    }
    if (!(l1_bound >= 1) || l1_bound > std::sqrt(static_cast<double>(p)) * (1 + 1e-12)) {
        throw ParameterError("L1 bound " + std::to_string(l1_bound) + " outside [1, sqrt(p)] for p = " +
                             std::to_string(p));
    }

    const double max_b = *std::max_element(bcss.begin(), bcss.end());
    if (!(max_b > 0)) {
        throw DegenerateObjective("no feature has positive between-cluster dispersion");
    }

    double l1 = 0;
    auto w = detail::normalize_l2(soft_threshold(bcss, 0), l1);
    if (l1 <= l1_bound) {
        return WeightVector{std::move(w), l1_bound};
    }

    // When m entries tie at the maximum, the L1 norm cannot drop below sqrt(m)
    // while the L2 norm is 1. Below that, spreading l1_bound evenly over the tied
    // entries is optimal and leaves the L2 constraint slack.
    const auto n_max = static_cast<std::size_t>(std::count(bcss.begin(), bcss.end(), max_b));
    if (std::sqrt(static_cast<double>(n_max)) > l1_bound) {
        std::vector<double> even(p, 0);
        for (std::size_t j = 0; j < p; ++j) {
            if (bcss[j] == max_b) {
                even[j] = l1_bound / static_cast<double>(n_max);
            }
        }
        return WeightVector{std::move(even), l1_bound};
    }

    // L1 norm of the normalized vector is continuous and non-increasing in delta.
    // Bisect until the interval stops shrinking, keeping the last feasible point.
    double lo = 0;
    double hi = max_b;
    std::vector<double> best;
    for (int it = 0; it < detail::kMaxBisection; ++it) {
        const double mid = (lo + hi) / 2;
        if (mid <= lo || mid >= hi) {
            break;
        }
        auto s = soft_threshold(bcss, mid);
        if (std::all_of(s.begin(), s.end(), [](double v) { return v == 0; })) {
            hi = mid;
            continue;
        }
        auto candidate = detail::normalize_l2(std::move(s), l1);
        if (l1 > l1_bound) {
            lo = mid;
        } else {
            hi = mid;
            best = std::move(candidate);
            if (l1 == l1_bound) {
                break;
            }
        }
    }
    if (best.empty()) {
        throw NumericalError("weight bisection failed to find a feasible threshold");
    }
    return WeightVector{std::move(best), l1_bound};
}

}

#endif
