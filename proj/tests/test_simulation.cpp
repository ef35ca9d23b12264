#include <cmath>

#include <gtest/gtest.h>

#include "rskc/report_io.hpp"
#include "rskc/rskc.hpp"
#include "test_util.hpp"

using namespace rskc;

TEST(SimModels, Dimensions) {
    for (const auto& name : sim_model_names()) {
        auto m = sim_model(name);
        auto sim = generate_dataset(m, 1);
        EXPECT_EQ(sim.data.n(), m.n);
        EXPECT_EQ(sim.data.p(), m.p);
        std::vector<std::size_t> expected(static_cast<std::size_t>(m.k), m.n / static_cast<std::size_t>(m.k));
        EXPECT_EQ(sim.truth.cluster_sizes(), expected) << name;
        for (std::size_t i = 1; i < m.n; ++i) {
            EXPECT_LE(sim.truth.assign[i - 1], sim.truth.assign[i]);
        }
    }
    EXPECT_EQ(sim_model("clean").n, 60u);
    EXPECT_EQ(sim_model("clean").p, 500u);
    EXPECT_EQ(sim_model("intro").p, 1000u);
    EXPECT_EQ(sim_model("naive_demo").p, 5u);
}

TEST(SimModels, UnknownNameListsValid) {
    try {
        sim_model("model3");
        FAIL();
    } catch (const ParameterError& e) {
        const std::string msg = e.what();
        for (const auto& name : sim_model_names()) {
            EXPECT_NE(msg.find(name), std::string::npos) << msg;
        }
    }
}

TEST(SimModels, CleanClusterMeans) {
    auto sim = generate_dataset(sim_model("clean"), 17);
    const double tol = 4 / std::sqrt(20.0);
    for (std::size_t j = 0; j < 50; ++j) {
        for (int c = 0; c < 3; ++c) {
            double s = 0;
            for (std::size_t i = 0; i < 20; ++i) {
                s += sim.data(static_cast<std::size_t>(c) * 20 + i, j);
            }
            EXPECT_NEAR(s / 20, c - 1.0, tol);
        }
    }
}

TEST(SimModels, PlantedOutliers) {
    EXPECT_EQ(generate_dataset(sim_model("model1"), 4).data(0, 499), 25);
    EXPECT_EQ(generate_dataset(sim_model("model2"), 4).data(0, 0), 25);
    auto demo = generate_dataset(sim_model("naive_demo"), 4);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(demo.data(i, 3), 25);
        EXPECT_EQ(demo.data(i, 4), 25);
    }
    EXPECT_NE(demo.data(3, 3), 25);
}

TEST(SimModels, DeterministicPerSeed) {
    auto m = sim_model("clean");
    auto a = generate_dataset(m, 9);
    auto b = generate_dataset(m, 9);
    auto c = generate_dataset(m, 10);
    bool same = true, differ = false;
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.p; ++j) {
            same = same && a.data(i, j) == b.data(i, j);
            differ = differ || a.data(i, j) != c.data(i, j);
        }
    }
    EXPECT_TRUE(same);
    EXPECT_TRUE(differ);
}

TEST(Algorithms, ParseNames) {
    EXPECT_EQ(parse_algorithm("km"), Algorithm::kmeans);
    EXPECT_EQ(parse_algorithm("tkmeans"), Algorithm::trimmed_kmeans);
    EXPECT_EQ(parse_algorithm("skm"), Algorithm::sparse_kmeans);
    EXPECT_EQ(parse_algorithm("rskc"), Algorithm::rsk_means);
    EXPECT_THROW(parse_algorithm("pam"), ParameterError);
}

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.models = {"clean", "model1"};
    c.replicates = 3;
    c.fit.n_starts = 3;
    return c;
}

}

TEST(Experiment, ZeroReplicatesIsEmpty) {
    auto c = small_config();
    c.replicates = 0;
    auto r = run_experiment(c);
    EXPECT_TRUE(r.rows.empty());
    EXPECT_TRUE(r.failures.empty());
    EXPECT_TRUE(r.aggregate().empty());
}

TEST(Experiment, RowsAggregatesAndThreads) {
    auto c = small_config();
    auto r = run_experiment(c);
    EXPECT_EQ(r.rows.size(), 2u * 3u * 4u);
    EXPECT_TRUE(r.failures.empty());

    auto c4 = c;
    c4.threads = 4;
    auto r4 = run_experiment(c4);
    ASSERT_EQ(r4.rows.size(), r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        EXPECT_EQ(r.rows[i], r4.rows[i]);
    }

    // Aggregates recomputed from rows.
    for (const auto& agg : r.aggregate()) {
        std::vector<double> cers, nz;
        for (const auto& row : r.rows) {
            if (row.model == agg.model && row.algorithm == agg.algorithm) {
                cers.push_back(row.cer);
                nz.push_back(static_cast<double>(row.nonzero_weights));
            }
        }
        EXPECT_EQ(agg.cer.count, 3u);
        EXPECT_EQ(agg.cer.mean, mean(cers));
        EXPECT_EQ(agg.cer.median, median(cers));
        EXPECT_EQ(agg.nonzero_weights.mean, mean(nz));
        EXPECT_EQ(agg.nonzero_weights.sd, sample_sd(nz));
        EXPECT_EQ(agg.avg_precision.count, is_sparse(agg.algorithm) ? 3u : 0u);
    }
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.avg_precision.has_value(), is_sparse(row.algorithm));
        if (!is_sparse(row.algorithm)) {
            EXPECT_EQ(row.nonzero_weights, 500u);
        }
    }
}

TEST(ReportIo, ReplicatesRoundTrip) {
    auto c = small_config();
    auto r = run_experiment(c);
    auto path = testutil::tmp_path("replicates.csv");
    write_replicates_csv(r, path);
    auto back = read_replicates_csv(path);
    ASSERT_EQ(back.size(), r.rows.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i], r.rows[i]);
    }
    auto json_path = testutil::tmp_path("summary.json");
    write_json(experiment_summary_json(r, c), json_path);
    auto j = read_json(json_path);
    EXPECT_EQ(j["schema_version"], kSchemaVersion);
    EXPECT_EQ(j["aggregates"].size(), 8u);
    EXPECT_EQ(j["config"]["replicates"], 3);
}

TEST(ReportIo, AssignmentsAndWeightsRoundTrip) {
    auto sim = generate_dataset(sim_model("model1"), 2);
    FitOptions opts;
    opts.n_starts = 3;
    auto fit = rsk_means(sim.data, 3, 6.2, 1.0 / 60, opts);
    auto outliers = flag_outliers(sim.data, fit);
    auto rows = assignment_rows(sim.data, fit, outliers, silhouette(sim.data, fit, outliers));
    auto path = testutil::tmp_path("assignments.csv");
    write_assignments_csv(rows, path);
    EXPECT_EQ(read_assignments_csv(path), rows);

    auto wpath = testutil::tmp_path("weights.csv");
    write_weights_csv(sim.data, *fit.weights, wpath);
    auto w = read_weights_csv(wpath);
    ASSERT_EQ(w.size(), 500u);
    for (std::size_t j = 0; j < 500; ++j) {
        EXPECT_EQ(w[j].first, sim.data.feature_ids()[j]);
        EXPECT_EQ(w[j].second, fit.weights->w[j]);
    }
}

TEST(ReportIo, ReaderRejectsWrongHeader) {
    auto path = testutil::write_file("wrong_header.csv", "a,b\n1,2\n");
    EXPECT_THROW(read_assignments_csv(path), ParseError);
    EXPECT_THROW(read_weights_csv(path), ParseError);
}
