#ifndef RSKC_STATS_HPP
#define RSKC_STATS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"

namespace rskc {

/// Scale factor making the MAD consistent for the standard deviation at the normal.
inline constexpr double kMadConsistency = 1.4826;

/// Median of a non-empty sample; the average of the two middle values for even sizes.
inline double median(std::vector<double> values) {
    if (values.empty()) {
        throw ParameterError("median of an empty sample");
    }
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    double upper = *mid;
    if (n % 2 == 1) {
        return upper;
    }
    double lower = *std::max_element(values.begin(), mid);
    return (lower + upper) / 2;
}

/// Consistency-scaled median absolute deviation about `center`.
inline double mad(const std::vector<double>& values, double center) {
    std::vector<double> dev;
    dev.reserve(values.size());
    for (auto v : values) {
        dev.push_back(std::abs(v - center));
    }
    return kMadConsistency * median(std::move(dev));
}

inline double mean(const std::vector<double>& values) {
    if (values.empty()) {
        throw ParameterError("mean of an empty sample");
    }
    double total = 0;
    for (auto v : values) {
        total += v;
    }
    return total / static_cast<double>(values.size());
}

/// Sample standard deviation (divisor n - 1); zero for fewer than two values.
inline double sample_sd(const std::vector<double>& values) {
    if (values.size() < 2) {
        return 0;
    }
    const double m = mean(values);
    double ss = 0;
    for (auto v : values) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}

#endif
