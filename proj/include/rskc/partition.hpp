#ifndef RSKC_PARTITION_HPP
#define RSKC_PARTITION_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace rskc {

/// Assignment label for a case excluded as a potential outlier.
inline constexpr int kTrimmed = -1;

/// Sorted, duplicate-free list of case indices.
using CaseSet = std::vector<std::size_t>;

inline CaseSet make_case_set(std::vector<std::size_t> cases) {
    std::sort(cases.begin(), cases.end());
    cases.erase(std::unique(cases.begin(), cases.end()), cases.end());
    return cases;
}

inline CaseSet case_set_union(const CaseSet& a, const CaseSet& b) {
    CaseSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool case_set_contains(const CaseSet& set, std::size_t i) {
    return std::binary_search(set.begin(), set.end(), i);
}

/**
 * Assignment of each case to a cluster in [0, k) or to `kTrimmed`.
 * Cluster labels are 0-based in memory; files written by the CLI use 1-based labels.
 */
struct Partition {
    std::vector<int> assign;
    int k = 0;

    Partition() = default;
    Partition(std::vector<int> labels, int clusters) : assign(std::move(labels)), k(clusters) {
        for (auto a : assign) {
            if (a != kTrimmed && (a < 0 || a >= k)) {
                throw ParameterError("partition label " + std::to_string(a) + " outside [0, " +
                                     std::to_string(k) + ")");
            }
        }
    }

    std::size_t size() const {
        return assign.size();
    }

    std::size_t n_trimmed() const {
        return static_cast<std::size_t>(std::count(assign.begin(), assign.end(), kTrimmed));
    }

    /// Member count per cluster, trimmed cases excluded.
    std::vector<std::size_t> cluster_sizes() const {
        std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
        for (auto a : assign) {
            if (a != kTrimmed) {
                ++sizes[static_cast<std::size_t>(a)];
            }
        }
        return sizes;
    }

    bool operator==(const Partition&) const = default;
};

}

#endif
