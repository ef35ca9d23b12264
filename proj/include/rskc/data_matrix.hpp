#ifndef RSKC_DATA_MATRIX_HPP
#define RSKC_DATA_MATRIX_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "partition.hpp"
#include "stats.hpp"

/**
 * @file data_matrix.hpp
 * @brief Case-by-feature data container, CSV ingestion, row standardization
 * and the per-feature between-cluster decomposition.
 */

namespace rskc {

/**
 * @brief Dense n-by-p matrix of cases (rows) by features (columns) with a missingness mask.
 *
 * Values are stored row-major. Entries whose mask is false are never read by
 * any computation in this library, so they may hold arbitrary values (NaN included).
 * The matrix is immutable after construction.
 */
class DataMatrix {
public:
    DataMatrix() = default;

    /**
     * @param n Number of cases.
     * @param p Number of features.
     * @param values Row-major array of length `n * p`.
     * @param observed Row-major mask of length `n * p` (non-zero = present), or empty if fully observed.
     * @param case_ids Labels for the cases; generated as "1", "2", ... when empty.
     * @param feature_ids Labels for the features; generated as "V1", "V2", ... when empty.
     */
    DataMatrix(std::size_t n, std::size_t p, std::vector<double> values, std::vector<std::uint8_t> observed = {},
               std::vector<std::string> case_ids = {}, std::vector<std::string> feature_ids = {})
        : n_(n), p_(p), values_(std::move(values)), observed_(std::move(observed)), case_ids_(std::move(case_ids)),
          feature_ids_(std::move(feature_ids)) {
        if (n_ < 2) {
            throw DataError("data must contain at least 2 cases");
        }
        if (p_ < 1) {
            throw DataError("data must contain at least 1 feature");
        }
        if (values_.size() != n_ * p_) {
            throw DataError("value array has " + std::to_string(values_.size()) + " entries, expected " +
                            std::to_string(n_ * p_));
        }
        if (observed_.empty()) {
            observed_.assign(n_ * p_, 1);
        } else if (observed_.size() != n_ * p_) {
            throw DataError("observed mask has the wrong size");
        }
        if (case_ids_.empty()) {
            for (std::size_t i = 0; i < n_; ++i) {
                case_ids_.push_back(std::to_string(i + 1));
            }
        }
        if (feature_ids_.empty()) {
            for (std::size_t j = 0; j < p_; ++j) {
                feature_ids_.push_back("V" + std::to_string(j + 1));
            }
        }
        if (case_ids_.size() != n_ || feature_ids_.size() != p_) {
            throw DataError("identifier count does not match matrix dimensions");
        }
        validate();
    }

    /// Convenience constructor for fully observed data given as rows.
    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) {
            throw DataError("data must contain at least 2 cases");
        }
        const auto p = rows.front().size();
        std::vector<double> values;
        values.reserve(rows.size() * p);
        for (const auto& r : rows) {
            if (r.size() != p) {
                throw DataError("ragged rows");
            }
            values.insert(values.end(), r.begin(), r.end());
        }
        return DataMatrix(rows.size(), p, std::move(values));
    }

    std::size_t n() const { return n_; }
    std::size_t p() const { return p_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * p_ + j]; }

    bool observed(std::size_t i, std::size_t j) const { return observed_[i * p_ + j] != 0; }

    bool has_missing() const { return missing_count_ > 0; }

    std::size_t missing_count() const { return missing_count_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * p_, p_}; }

    std::span<const std::uint8_t> observed_row(std::size_t i) const { return {observed_.data() + i * p_, p_}; }

    const std::vector<std::string>& case_ids() const { return case_ids_; }
    const std::vector<std::string>& feature_ids() const { return feature_ids_; }

    /// Observed values of case `i`, in feature order.
    std::vector<double> observed_values_of_case(std::size_t i) const {
        std::vector<double> out;
        for (std::size_t j = 0; j < p_; ++j) {
            if (observed(i, j)) {
                out.push_back((*this)(i, j));
            }
        }
        return out;
    }

    /// Mean of feature `j` over the cases that observe it.
    double feature_mean(std::size_t j) const {
        double total = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (observed(i, j)) {
                total += (*this)(i, j);
                ++count;
            }
        }
        return total / static_cast<double>(count);
    }

private:
    void validate() {
        std::vector<std::size_t> col_counts(p_, 0);
        missing_count_ = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t row_count = 0;
            for (std::size_t j = 0; j < p_; ++j) {
                if (!observed(i, j)) {
                    ++missing_count_;
                    continue;
                }
                if (!std::isfinite((*this)(i, j))) {
                    throw DataError("non-finite value at case " + case_ids_[i] + ", feature " + feature_ids_[j]);
                }
                ++row_count;
                ++col_counts[j];
            }
            if (row_count == 0) {
                throw DataError("case " + case_ids_[i] + " has no observed entries");
            }
        }
        for (std::size_t j = 0; j < p_; ++j) {
            if (col_counts[j] == 0) {
                throw DataError("feature " + feature_ids_[j] + " has no observed entries");
            }
        }
    }

    std::size_t n_ = 0;
    std::size_t p_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> observed_;
    std::vector<std::string> case_ids_;
    std::vector<std::string> feature_ids_;
    std::size_t missing_count_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s.remove_prefix(1);
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(std::string_view field, double& out) {
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    if (field.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

}

/**
 * Read a comma-separated file, one case per row and one feature per column.
 *
 * Fields equal to `na_token` are recorded as unobserved. Blank lines are skipped.
 * Row numbers in error messages count physical lines in the file, starting from 1.
 */
inline DataMatrix load_csv(const std::string& path, bool has_header = true, const std::string& na_token = "NA") {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open input file: " + path);
    }

    std::vector<std::string> feature_ids;
    std::vector<double> values;
    std::vector<std::uint8_t> observed;
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t line_no = 0;
    bool header_pending = has_header;

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        auto fields = detail::split_fields(line);

        if (header_pending) {
            for (auto f : fields) {
                feature_ids.emplace_back(detail::unquote(f));
            }
            p = fields.size();
            header_pending = false;
            continue;
        }

        if (p == 0) {
            p = fields.size();
        } else if (fields.size() != p) {
            throw ParseError(path + ": row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(p));
        }

        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (fields[j] == na_token) {
                values.push_back(0);
                observed.push_back(0);
                continue;
            }
            double x;
            if (!detail::parse_double(fields[j], x)) {
                throw ParseError(path + ": row " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                                 ": cannot parse '" + std::string(fields[j]) + "' as a number");
            }
            values.push_back(x);
            observed.push_back(1);
        }
        ++n;
    }

    if (n < 2) {
        throw ParseError(path + ": need at least 2 data rows, found " + std::to_string(n));
    }
    return DataMatrix(n, p, std::move(values), std::move(observed), {}, std::move(feature_ids));
}

/// Write `x` as CSV with a header of feature ids; unobserved entries are written as `na_token`.
inline void write_csv(const DataMatrix& x, const std::string& path, const std::string& na_token = "NA") {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open output file: " + path);
    }
    for (std::size_t j = 0; j < x.p(); ++j) {
        out << (j ? "," : "") << x.feature_ids()[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < x.n(); ++i) {
        for (std::size_t j = 0; j < x.p(); ++j) {
            out << (j ? "," : "") << (x.observed(i, j) ? detail::format_double(x(i, j)) : na_token);
        }
        out << '\n';
    }
}

/**
 * Center and scale each case across its observed features.
 *
 * With `robust = false` the location is the mean and the scale the sample
 * standard deviation (divisor p - 1). With `robust = true` the location is the
 * median and the scale the MAD times 1.4826. On rows standardized this way,
 * squared Euclidean distance is a monotone function of the between-case
 * correlation, which is how correlation-based clustering is obtained.
 */
inline DataMatrix standardize_rows(const DataMatrix& x, bool robust) {
    std::vector<double> values(x.n() * x.p(), 0);
    std::vector<std::uint8_t> observed(x.n() * x.p(), 0);

    for (std::size_t i = 0; i < x.n(); ++i) {
        auto obs = x.observed_values_of_case(i);
        double location;
        double scale;
        if (robust) {
            location = median(obs);
            scale = mad(obs, location);
        } else {
            location = mean(obs);
            scale = sample_sd(obs);
        }
        if (!(scale > 0)) {
            throw DataError("case " + x.case_ids()[i] + " has zero scale and cannot be standardized");
        }
        for (std::size_t j = 0; j < x.p(); ++j) {
            if (x.observed(i, j)) {
                values[i * x.p() + j] = (x(i, j) - location) / scale;
                observed[i * x.p() + j] = 1;
            }
        }
    }

    return DataMatrix(x.n(), x.p(), std::move(values), std::move(observed), x.case_ids(), x.feature_ids());
}

namespace detail {

/**
 * Per-feature between-cluster dispersion over the cases that are assigned and
 * not excluded. Empty clusters contribute nothing when `allow_empty` is set;
 * otherwise they raise.
 */
inline std::vector<double> bcss_terms(const DataMatrix& x, const Partition& part, const CaseSet& excluded,
                                      bool allow_empty) {
    if (part.size() != x.n()) {
        throw ParameterError("partition size does not match the number of cases");
    }
    const auto n = x.n();
    const auto p = x.p();
    const auto k = static_cast<std::size_t>(part.k);

    std::vector<std::uint8_t> included(n, 0);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (case_set_contains(excluded, i)) {
            continue;
        }
        if (part.assign[i] == kTrimmed) {
            if (allow_empty) {
                continue;
            }
            throw ParameterError("case " + std::to_string(i + 1) + " is neither assigned nor excluded");
        }
        included[i] = 1;
        ++sizes[static_cast<std::size_t>(part.assign[i])];
    }
    if (!allow_empty) {
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                throw ParameterError("cluster " + std::to_string(c + 1) + " is empty after exclusion");
            }
        }
    }

    // Two passes per feature (means, then squared deviations) over included cases.
    std::vector<double> total_sum(p, 0), total_count(p, 0);
    std::vector<double> cluster_sum(k * p, 0), cluster_count(k * p, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!included[i]) {
            continue;
        }
        const auto c = static_cast<std::size_t>(part.assign[i]);
        auto row = x.row(i);
        auto obs = x.observed_row(i);
        for (std::size_t j = 0; j < p; ++j) {
            if (obs[j]) {
                total_sum[j] += row[j];
                total_count[j] += 1;
                cluster_sum[c * p + j] += row[j];
                cluster_count[c * p + j] += 1;
            }
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (total_count[j] > 0) {
            total_sum[j] /= total_count[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (cluster_count[c * p + j] > 0) {
                cluster_sum[c * p + j] /= cluster_count[c * p + j];
            }
        }
    }

    std::vector<double> tss(p, 0), wss(p, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!included[i]) {
            continue;
        }
        const auto c = static_cast<std::size_t>(part.assign[i]);
        auto row = x.row(i);
        auto obs = x.observed_row(i);
        for (std::size_t j = 0; j < p; ++j) {
            if (obs[j]) {
                double dt = row[j] - total_sum[j];
                double dw = row[j] - cluster_sum[c * p + j];
                tss[j] += dt * dt;
                wss[j] += dw * dw;
            }
        }
    }

    std::vector<double> out(p);
    for (std::size_t j = 0; j < p; ++j) {
        out[j] = 2 * (tss[j] - wss[j]);
    }
    return out;
}

}

/**
 * Between-cluster dissimilarity for each feature,
 * `(1/n) sum_i sum_i' d(i,i',j) - sum_k (1/n_k) sum_{i,i' in C_k} d(i,i',j)`,
 * computed over the cases not in `excluded` through the equivalent
 * `2 * (TSS_j - WSS_j)` form. Values are not clamped at zero.
 *
 * Every case outside `excluded` must be assigned, and every cluster must keep
 * at least one member after exclusion.
 */
inline std::vector<double> per_feature_bcss(const DataMatrix& x, const Partition& part, const CaseSet& excluded = {}) {
    return detail::bcss_terms(x, part, excluded, false);
}

}

#endif
