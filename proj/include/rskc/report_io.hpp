#ifndef RSKC_REPORT_IO_HPP
#define RSKC_REPORT_IO_HPP

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cluster.hpp"
#include "data_matrix.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "simulation.hpp"

/**
 * @file report_io.hpp
 * @brief CSV and JSON files written by the command-line tool, with readers.
 *
 * Schema version 1. Every file is plain comma-separated text with a header row;
 * real numbers are written in shortest round-trip form and absent values as `NA`.
 *
 * - Experiment replicates: `model,algorithm,replicate,seed,cer,nonzero_weights,avg_precision,median_clustering_weight`
 * - Fit assignments: `case_id,cluster,trimmed,outlier,silhouette` (cluster labels 1-based; flags 0/1)
 * - Fit weights: `feature_id,weight`
 */

namespace rskc {

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open output file: " + path);
    }
    return out;
}

inline std::vector<std::vector<std::string>> read_table(const std::string& path, const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open input file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || trim(line) != expected_header) {
        throw ParseError(path + ": unexpected header, expected '" + expected_header + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t width = split_fields(expected_header).size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != width) {
            throw ParseError(path + ": row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(width));
        }
        rows.emplace_back(fields.begin(), fields.end());
    }
    return rows;
}

inline double to_double(const std::string& s, const std::string& path) {
    double v;
    if (!parse_double(s, v)) {
        throw ParseError(path + ": cannot parse '" + s + "' as a number");
    }
    return v;
}

inline unsigned long long to_unsigned(const std::string& s, const std::string& path) {
    unsigned long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(path + ": cannot parse '" + s + "' as an integer");
    }
    return v;
}

inline nlohmann::json summary_json(const Summary& s) {
    return {{"count", s.count}, {"mean", s.mean}, {"sd", s.sd}, {"median", s.median}};
}

}

inline constexpr const char* kReplicateHeader =
    "model,algorithm,replicate,seed,cer,nonzero_weights,avg_precision,median_clustering_weight";

inline void write_replicates_csv(const ExperimentReport& report, const std::string& path) {
    auto out = detail::open_out(path);
    out << kReplicateHeader << '\n';
    for (const auto& r : report.rows) {
        out << r.model << ',' << algorithm_short_name(r.algorithm) << ',' << r.replicate << ',' << r.seed << ','
            << detail::format_double(r.cer) << ',' << r.nonzero_weights << ','
            << (r.avg_precision ? std::to_string(*r.avg_precision) : "NA") << ','
            << (r.median_clustering_weight ? detail::format_double(*r.median_clustering_weight) : "NA") << '\n';
    }
}

inline std::vector<ReplicateRow> read_replicates_csv(const std::string& path) {
    std::vector<ReplicateRow> rows;
    for (const auto& f : detail::read_table(path, kReplicateHeader)) {
        ReplicateRow r;
        r.model = f[0];
        r.algorithm = parse_algorithm(f[1]);
        r.replicate = static_cast<int>(detail::to_unsigned(f[2], path));
        r.seed = detail::to_unsigned(f[3], path);
        r.cer = detail::to_double(f[4], path);
        r.nonzero_weights = detail::to_unsigned(f[5], path);
        if (f[6] != "NA") {
            r.avg_precision = detail::to_unsigned(f[6], path);
        }
        if (f[7] != "NA") {
            r.median_clustering_weight = detail::to_double(f[7], path);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline nlohmann::json experiment_summary_json(const ExperimentReport& report, const ExperimentConfig& config) {
    nlohmann::json algos = nlohmann::json::array();
    for (auto a : config.algorithms) {
        algos.push_back(algorithm_short_name(a));
    }
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = {{"models", config.models},
                   {"algorithms", algos},
                   {"replicates", config.replicates},
                   {"master_seed", config.master_seed},
                   {"l1_bound", config.l1_bound},
                   {"alpha", config.alpha},
                   {"top_m", config.top_m},
                   {"n_starts", config.fit.n_starts},
                   {"max_iter", config.fit.max_iter},
                   {"tol", config.fit.tol},
                   {"cer_exclude_trimmed", config.cer_exclude_trimmed}};
    j["aggregates"] = nlohmann::json::array();
    for (const auto& a : report.aggregate()) {
        nlohmann::json row{{"model", a.model},
                           {"algorithm", algorithm_short_name(a.algorithm)},
                           {"replicates", a.cer.count},
                           {"cer", detail::summary_json(a.cer)},
                           {"nonzero_weights", detail::summary_json(a.nonzero_weights)}};
        row["avg_precision"] = a.avg_precision.count ? detail::summary_json(a.avg_precision) : nlohmann::json();
        row["median_clustering_weight"] =
            a.median_clustering_weight.count ? detail::summary_json(a.median_clustering_weight) : nlohmann::json();
        j["aggregates"].push_back(std::move(row));
    }
    j["failures"] = nlohmann::json::array();
    for (const auto& f : report.failures) {
        j["failures"].push_back({{"model", f.model},
                                 {"algorithm", algorithm_short_name(f.algorithm)},
                                 {"replicate", f.replicate},
                                 {"message", f.message}});
    }
    return j;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
    auto out = detail::open_out(path);
    out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open input file: " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/**
 * @brief One row of a fit's assignments file.
 */
struct AssignmentRow {
    std::string case_id;
    int cluster = 0;  // 1-based
    bool trimmed = false;
    bool outlier = false;
    double silhouette = 0;

    bool operator==(const AssignmentRow&) const = default;
};

inline constexpr const char* kAssignmentHeader = "case_id,cluster,trimmed,outlier,silhouette";
inline constexpr const char* kWeightHeader = "feature_id,weight";

/// Rows of the assignments file for `fit`; the cluster column is the nearest-center label for trimmed cases too.
inline std::vector<AssignmentRow> assignment_rows(const DataMatrix& x, const ClusterFit& fit, const CaseSet& outliers,
                                                  const Silhouettes& sil) {
    std::vector<AssignmentRow> rows;
    for (std::size_t i = 0; i < x.n(); ++i) {
        rows.push_back(AssignmentRow{x.case_ids()[i], fit.full_partition.assign[i] + 1,
                                     case_set_contains(fit.trimmed, i), case_set_contains(outliers, i),
                                     sil.per_case[i]});
    }
    return rows;
}

inline void write_assignments_csv(const std::vector<AssignmentRow>& rows, const std::string& path) {
    auto out = detail::open_out(path);
    out << kAssignmentHeader << '\n';
    for (const auto& r : rows) {
        out << r.case_id << ',' << r.cluster << ',' << (r.trimmed ? 1 : 0) << ',' << (r.outlier ? 1 : 0) << ','
            << detail::format_double(r.silhouette) << '\n';
    }
}

inline std::vector<AssignmentRow> read_assignments_csv(const std::string& path) {
    std::vector<AssignmentRow> rows;
    for (const auto& f : detail::read_table(path, kAssignmentHeader)) {
        rows.push_back(AssignmentRow{f[0], static_cast<int>(detail::to_unsigned(f[1], path)), f[2] == "1", f[3] == "1",
                                     detail::to_double(f[4], path)});
    }
    return rows;
}

inline void write_weights_csv(const DataMatrix& x, const WeightVector& w, const std::string& path) {
    auto out = detail::open_out(path);
    out << kWeightHeader << '\n';
    for (std::size_t j = 0; j < w.size(); ++j) {
        out << x.feature_ids()[j] << ',' << detail::format_double(w.w[j]) << '\n';
    }
}

inline std::vector<std::pair<std::string, double>> read_weights_csv(const std::string& path) {
    std::vector<std::pair<std::string, double>> rows;
    for (const auto& f : detail::read_table(path, kWeightHeader)) {
        rows.emplace_back(f[0], detail::to_double(f[1], path));
    }
    return rows;
}

/// Labels of the given cases.
inline std::vector<std::string> case_labels(const DataMatrix& x, const CaseSet& cases) {
    std::vector<std::string> out;
    for (auto i : cases) {
        out.push_back(x.case_ids()[i]);
    }
    return out;
}

}

#endif
