#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rskc/rskc.hpp"

using namespace rskc;

namespace {

DataMatrix random_blobs(std::uint64_t seed, std::size_t n, std::size_t p, int k, double sep) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(n * p);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % static_cast<std::size_t>(k));
        for (std::size_t j = 0; j < p; ++j) {
            v[i * p + j] = nd(gen) + (j < 2 ? sep * c : 0.0);
        }
    }
    return DataMatrix(n, p, v);
}

void expect_same_fit(const ClusterFit& a, const ClusterFit& b) {
    EXPECT_EQ(a.partition, b.partition);
    EXPECT_EQ(a.full_partition, b.full_partition);
    EXPECT_EQ(a.centers.values, b.centers.values);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.trimmed_weighted, b.trimmed_weighted);
    EXPECT_EQ(a.trimmed_euclidean, b.trimmed_euclidean);
    EXPECT_EQ(a.trimmed, b.trimmed);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.n_iter, b.n_iter);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.weight_history, b.weight_history);
}

oracle::Matrix to_rows(const DataMatrix& x) {
    oracle::Matrix rows(x.n());
    for (std::size_t i = 0; i < x.n(); ++i) {
        rows[i].assign(x.row(i).begin(), x.row(i).end());
    }
    return rows;
}

}

TEST(AssignCases, NearestCenter) {
    auto x = DataMatrix::from_rows({{0}, {10}});
    auto part = assign_cases(x, Centers::from_rows({{0}, {10}}));
    EXPECT_EQ(part.assign, (std::vector<int>{0, 1}));
}

TEST(AssignCases, TiesGoToLowestCluster) {
    auto x = DataMatrix::from_rows({{0, 0}, {10, 0}});
    std::vector<double> w{1, 0};
    auto part = assign_cases(x, Centers::from_rows({{0, 0}, {0, 9}}), w);
    EXPECT_EQ(part.assign, (std::vector<int>{0, 0}));
}

TEST(AssignCases, MatchesPerCaseArgmin) {
    auto x = random_blobs(4, 40, 5, 2, 3);
    auto centers = Centers::from_rows({{0, 0, 0, 0, 0}, {3, 3, 0, 0, 0}, {1, -1, 2, 0, 0}});
    std::vector<double> w{0.5, 0.2, 0.7, 0.1, 0.0};
    auto part = assign_cases(x, centers, w);
    for (std::size_t i = 0; i < x.n(); ++i) {
        int best = -1;
        double best_d = 1e300;
        for (std::size_t c = 0; c < 3; ++c) {
            double d = 0;
            for (std::size_t j = 0; j < 5; ++j) {
                d += w[j] * (x(i, j) - centers.row(c)[j]) * (x(i, j) - centers.row(c)[j]);
            }
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        EXPECT_EQ(part.assign[i], best);
    }
}

// With a missing entry, the distance sums observed active features and scales
// by total active weight over observed active weight.
TEST(AssignCases, MissingFeatureRescaling) {
    DataMatrix x(2, 2, {1, 0, 5, 5}, {1, 0, 1, 1});
    auto centers = Centers::from_rows({{0, 100}, {4, 0}});
    // case 1: only feature 1 observed, distances 1 * 2 vs 9 * 2
    EXPECT_EQ(assign_cases(x, centers).assign[0], 0);
}

TEST(UpdateCenters, MeansTrimmingAndMissing) {
    auto x = DataMatrix::from_rows({{0, 0}, {2, 2}, {100, 100}});
    auto c = update_centers(x, Partition({0, 0, 0}, 1), {2});
    EXPECT_EQ(c.row(0)[0], 1);
    EXPECT_EQ(c.row(0)[1], 1);
    auto c2 = update_centers(x, Partition({0, 0, kTrimmed}, 1));
    EXPECT_EQ(c2.row(0)[0], 1);

    DataMatrix m(3, 2, {0, 0, 2, 7, 4, 4}, {1, 1, 1, 0, 1, 1});
    auto c3 = update_centers(m, Partition({0, 0, 0}, 1));
    EXPECT_DOUBLE_EQ(c3.row(0)[0], 2);
    EXPECT_DOUBLE_EQ(c3.row(0)[1], 2);
}

TEST(UpdateCenters, EmptyClusterRaises) {
    auto x = DataMatrix::from_rows({{0}, {1}});
    EXPECT_THROW(update_centers(x, Partition({0, 0}, 2)), ParameterError);
}

TEST(KMeans, TwoBlobsMatchEnumeration) {
    auto x = DataMatrix::from_rows({{0}, {0.1}, {10}, {10.1}});
    auto fit = kmeans(x, 2);
    EXPECT_NEAR(fit.objective, 0.01, 1e-12);
    EXPECT_NEAR(fit.objective, oracle::min_trimmed_wss(to_rows(x), 2, 0), 1e-12);
    EXPECT_EQ(fit.partition.assign[0], fit.partition.assign[1]);
    EXPECT_EQ(fit.partition.assign[2], fit.partition.assign[3]);
    EXPECT_NE(fit.partition.assign[0], fit.partition.assign[2]);
    EXPECT_FALSE(fit.weights);
    EXPECT_TRUE(fit.trimmed.empty());
}

TEST(KMeans, OneClusterAndNClusters) {
    auto x = DataMatrix::from_rows({{0, 1}, {2, 5}, {4, 0}});
    auto one = kmeans(x, 1);
    // TSS: feature 1 mean 2 -> 8, feature 2 mean 2 -> 1 + 9 + 4 = 14
    EXPECT_NEAR(one.objective, 22, 1e-12);
    auto all = kmeans(x, 3);
    EXPECT_EQ(all.objective, 0);
    auto sizes = all.partition.cluster_sizes();
    EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 1, 1}));
    EXPECT_THROW(kmeans(x, 4), ParameterError);
    EXPECT_THROW(kmeans(x, 0), ParameterError);
}

TEST(KMeans, NeverBeatsEnumeratedOptimum) {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
        oracle::Matrix rows(7, std::vector<double>(2));
        for (auto& r : rows) {
            r = {nd(gen), nd(gen)};
        }
        auto x = DataMatrix::from_rows(rows);
        FitOptions opts;
        opts.n_starts = 30;
        opts.seed = static_cast<std::uint64_t>(trial);
        for (int k : {2, 3}) {
            const double best = oracle::min_trimmed_wss(rows, k, 0);
            EXPECT_GE(kmeans(x, k, opts).objective, best - 1e-9);
        }
    }
}

TEST(TrimmedKMeans, TrimsFarOutlier) {
    auto x = DataMatrix::from_rows({{0}, {0.1}, {10}, {10.1}, {1000}});
    auto fit = trimmed_kmeans(x, 2, 0.2);
    EXPECT_EQ(fit.trimmed, (CaseSet{4}));
    EXPECT_EQ(fit.trimmed_weighted, (CaseSet{4}));
    EXPECT_TRUE(fit.trimmed_euclidean.empty());
    EXPECT_EQ(fit.partition.assign[4], kTrimmed);
    EXPECT_EQ(fit.partition.assign[0], fit.partition.assign[1]);
    EXPECT_NE(fit.partition.assign[0], fit.partition.assign[2]);
    EXPECT_NEAR(fit.objective, oracle::min_trimmed_wss(to_rows(x), 2, 1), 1e-12);
}

TEST(TrimmedKMeans, BoundaryTieTrimsLowerIndex) {
    auto x = DataMatrix::from_rows({{-3}, {3}, {0}, {0}, {0}});
    auto res = lloyd_refine(x, {}, Centers::from_rows({{0}}), 1, 100);
    EXPECT_EQ(res.trimmed, (CaseSet{0}));
    EXPECT_EQ(detail::largest({1, 5, 5, 2}, 1), (CaseSet{1}));
    EXPECT_EQ(detail::largest({5, 5, 5, 2}, 2), (CaseSet{0, 1}));
}

TEST(TrimmedKMeans, AlphaZeroEqualsKMeans) {
    auto x = random_blobs(21, 45, 6, 3, 4);
    FitOptions opts;
    opts.seed = 99;
    auto a = trimmed_kmeans(x, 3, 0, opts);
    auto b = kmeans(x, 3, opts);
    a.algorithm = b.algorithm;
    expect_same_fit(a, b);
}

TEST(TrimmedKMeans, TooMuchTrimmingRaises) {
    auto x = DataMatrix::from_rows({{0}, {1}, {2}, {3}});
    EXPECT_THROW(trimmed_kmeans(x, 2, 0.75), ParameterError);
    EXPECT_THROW(trimmed_kmeans(x, 2, 1.0), ParameterError);
}

TEST(Lloyd, ObjectiveNonIncreasing) {
    auto x = random_blobs(8, 90, 10, 3, 1.5);
    std::vector<double> w(10);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        for (auto& v : w) {
            v = u(gen);
        }
        Rng rng(static_cast<std::uint64_t>(trial));
        auto idx = rng.sample_without_replacement(x.n(), 3);
        auto init = detail::centers_from_cases(x, idx);
        auto res = lloyd_refine(x, w, init, 0, 100);
        for (std::size_t t = 1; t < res.trace.size(); ++t) {
            EXPECT_LE(res.trace[t], res.trace[t - 1] * (1 + 1e-12));
        }
        EXPECT_TRUE(res.converged);
    }
}

TEST(Lloyd, PermutationEquivariant) {
    auto x = random_blobs(10, 30, 4, 3, 2);
    std::vector<std::size_t> perm(x.n());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 gen(1);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<std::vector<double>> rows;
    for (auto i : perm) {
        rows.emplace_back(x.row(i).begin(), x.row(i).end());
    }
    auto y = DataMatrix::from_rows(rows);
    auto init = Centers::from_rows({{0, 0, 0, 0}, {2, 2, 0, 0}, {4, 4, 0, 0}});
    std::vector<double> w{1, 1, 0.5, 0.5};
    auto a = lloyd_refine(x, w, init, 2, 100);
    auto b = lloyd_refine(y, w, init, 2, 100);
    for (std::size_t r = 0; r < perm.size(); ++r) {
        EXPECT_EQ(b.assign[r], a.assign[perm[r]]);
    }
    CaseSet mapped;
    for (auto t : b.trimmed) {
        mapped.push_back(perm[t]);
    }
    EXPECT_EQ(make_case_set(mapped), a.trimmed);
    EXPECT_NEAR(a.objective, b.objective, 1e-9);
}

TEST(Lloyd, EmptyClusterIsRefilled) {
    auto x = DataMatrix::from_rows({{0}, {1}, {2}, {10}});
    // Center 2 attracts nobody; the case farthest from its own center moves there.
    auto res = lloyd_refine(x, {}, Centers::from_rows({{3}, {100}}), 0, 100);
    Partition part(res.assign, 2);
    for (auto s : part.cluster_sizes()) {
        EXPECT_GE(s, 1u);
    }
    EXPECT_EQ(res.assign[3], 1);
}

TEST(SparseKMeans, IdenticalFeaturesShareWeightEvenly) {
    auto base = random_blobs(2, 40, 1, 2, 4);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < base.n(); ++i) {
        rows.push_back({base(i, 0), base(i, 0)});
    }
    auto x = DataMatrix::from_rows(rows);
    auto fit = sparse_kmeans(x, 2, std::sqrt(2.0));
    ASSERT_TRUE(fit.weights);
    EXPECT_NEAR(fit.weights->w[0], 0.7071, 1e-4);
    EXPECT_NEAR(fit.weights->w[1], 0.7071, 1e-4);
    EXPECT_EQ(fit.weights->w[0], fit.weights->w[1]);
    // Below sqrt(2) the tied pair splits the L1 budget.
    auto tight = sparse_kmeans(x, 2, 1.2);
    EXPECT_NEAR(tight.weights->w[0], 0.6, 1e-12);
    EXPECT_EQ(tight.weights->w[0], tight.weights->w[1]);
}

TEST(SparseKMeans, InactiveBoundWeightsEveryInformativeFeature) {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> nd;
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 60; ++i) {
        const double c = i < 30 ? -2 : 2;
        rows.push_back({c + nd(gen), c + nd(gen), c + nd(gen), c + nd(gen)});
    }
    auto x = DataMatrix::from_rows(rows);
    auto fit = sparse_kmeans(x, 2, 2.0);
    ASSERT_TRUE(fit.weights);
    EXPECT_EQ(fit.weights->nonzero(), 4u);
}

TEST(SparseKMeans, WeightInvariantsEveryOuterIteration) {
    auto x = random_blobs(12, 60, 30, 3, 2);
    auto fit = sparse_kmeans(x, 3, 2.5);
    ASSERT_FALSE(fit.weight_history.empty());
    for (const auto& w : fit.weight_history) {
        EXPECT_LE(w.l2(), 1 + 1e-9);
        EXPECT_NEAR(w.l2(), 1, 1e-6);
        EXPECT_LE(w.l1(), 2.5 + 1e-6);
        for (double v : w.w) {
            EXPECT_GE(v, 0);
        }
    }
    EXPECT_EQ(*fit.weights, fit.weight_history.back());
}

TEST(SparseKMeans, BoundOutOfRangeRaises) {
    auto x = random_blobs(1, 20, 4, 2, 3);
    EXPECT_THROW(sparse_kmeans(x, 2, 0.9), ParameterError);
    EXPECT_THROW(sparse_kmeans(x, 2, 2.1), ParameterError);
}

TEST(RskMeans, AlphaZeroEqualsSparseKMeans) {
    auto x = random_blobs(5, 60, 20, 3, 2.5);
    FitOptions opts;
    opts.seed = 314;
    auto a = rsk_means(x, 3, 2.0, 0, opts);
    auto b = sparse_kmeans(x, 3, 2.0, opts);
    a.algorithm = b.algorithm;
    expect_same_fit(a, b);
    EXPECT_TRUE(a.trimmed_weighted.empty());
    EXPECT_TRUE(a.trimmed_euclidean.empty());
}

TEST(RskMeans, TrimSetInvariants) {
    auto x = random_blobs(7, 60, 15, 3, 2.5);
    FitOptions opts;
    opts.seed = 2;
    auto fit = rsk_means(x, 3, 2.0, 0.1, opts);
    const std::size_t t = 6;
    EXPECT_EQ(fit.trim_count, t);
    EXPECT_EQ(fit.trimmed_weighted.size(), t);
    EXPECT_EQ(fit.trimmed_euclidean.size(), t);
    EXPECT_EQ(fit.trimmed, case_set_union(fit.trimmed_weighted, fit.trimmed_euclidean));
    EXPECT_LE(fit.trimmed.size(), 2 * t);
    EXPECT_EQ(fit.partition.n_trimmed(), fit.trimmed.size());
    for (auto i : fit.trimmed) {
        EXPECT_EQ(fit.partition.assign[i], kTrimmed);
        EXPECT_NE(fit.full_partition.assign[i], kTrimmed);
    }
    for (auto s : fit.partition.cluster_sizes()) {
        EXPECT_GE(s, 1u);
    }
    ASSERT_TRUE(fit.weights);
    EXPECT_THROW(rsk_means(x, 3, 2.0, 0.49, opts), ParameterError);
}

TEST(RskMeans, ContaminatedCasesAreTrimmed) {
    auto sim = generate_dataset(sim_model("naive_demo"), 11);
    FitOptions opts;
    opts.seed = 11;
    auto fit = rsk_means(sim.data, 3, 1.5, 0.01, opts);
    for (std::size_t i : {0u, 1u, 2u}) {
        EXPECT_TRUE(case_set_contains(fit.trimmed, i)) << "case " << i + 1;
    }
}

TEST(Fits, DeterministicAcrossThreadCounts) {
    auto x = random_blobs(3, 60, 25, 3, 2);
    for (auto algo : {Algorithm::kmeans, Algorithm::trimmed_kmeans, Algorithm::sparse_kmeans, Algorithm::rsk_means}) {
        FitOptions one;
        one.seed = 77;
        FitOptions many = one;
        many.threads = 4;
        auto a = fit_algorithm(algo, x, 3, 2.5, 0.05, one);
        auto b = fit_algorithm(algo, x, 3, 2.5, 0.05, many);
        auto c = fit_algorithm(algo, x, 3, 2.5, 0.05, one);
        expect_same_fit(a, b);
        expect_same_fit(a, c);
        EXPECT_EQ(a.weights.has_value(), is_sparse(algo));
    }
}
