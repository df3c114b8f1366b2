#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "ssmr/stats/kruskal.hpp"

using namespace ssmr;
using namespace ssmr::stats;

TEST(Kruskal, HandValues) {
    const auto r = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
    EXPECT_NEAR(r.statistic, 3.857142857142857, 1e-9);
    EXPECT_NEAR(r.p_value, 0.049534613435626915, 1e-12);
    EXPECT_TRUE(r.reject);
    EXPECT_EQ(r.sizes, (std::vector<std::size_t>{3, 3}));
}

TEST(Kruskal, IdenticalGroups) {
    const auto r = kruskal_wallis({{1, 2, 3}, {1, 2, 3}});
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);
    const auto flat = kruskal_wallis({{4, 4}, {4, 4, 4}});
    EXPECT_EQ(flat.statistic, 0.0);
    EXPECT_EQ(flat.p_value, 1.0);
}

TEST(Kruskal, Errors) {
    EXPECT_THROW(kruskal_wallis({{1, 2, 3}}), InvalidGroups);
    EXPECT_THROW(kruskal_wallis({{1, 2, 3}, {}}), InvalidGroups);
    EXPECT_THROW(kruskal_wallis({{1}, {2}}), InvalidGroups);
    EXPECT_THROW(dunn_posthoc({{1, 2}, {}}), InvalidGroups);
}

TEST(Kruskal, MatchesTextbookSumWithTies) {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> k(2, 6), len(1, 15), val(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
        Groups g(static_cast<std::size_t>(k(rng)));
        for (auto& grp : g) {
            grp.resize(static_cast<std::size_t>(len(rng)));
            for (auto& x : grp) x = val(rng);
        }
        std::size_t total = 0;
        for (const auto& grp : g) total += grp.size();
        if (total < 3) continue;
        const double ref = ref::kruskal_h(g);
        if (!std::isfinite(ref)) continue;
        EXPECT_NEAR(kruskal_wallis(g).statistic, ref, 1e-9 * std::max(1.0, ref));
    }
}

TEST(Kruskal, TwoGroupsReduceToSquaredZ) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n1 = 3 + trial % 9, n2 = 2 + trial % 7;
        auto a = ref::uniform_sample(rng, n1, 0.0, 1.0);
        auto b = ref::uniform_sample(rng, n2, 0.2, 1.2);
        const auto kw = kruskal_wallis({a, b});
        // Rank-sum z built directly from pooled ranks.
        std::vector<double> pooled(a);
        pooled.insert(pooled.end(), b.begin(), b.end());
        const auto ranks = ref::mid_ranks(pooled);
        double r1 = 0;
        for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
        const double n = static_cast<double>(n1 + n2);
        const double mean = static_cast<double>(n1) * (n + 1) / 2;
        const double var = static_cast<double>(n1 * n2) * (n + 1) / 12;
        const double z = (r1 - mean) / std::sqrt(var);
        EXPECT_NEAR(kw.p_value, 2.0 * normal_sf(std::fabs(z)), 1e-9);

        const auto dunn = dunn_posthoc({a, b}, PAdjust::none);
        EXPECT_NEAR(dunn.at(0, 1).raw_p, kw.p_value, 1e-9);
    }
}

TEST(Kruskal, OrderInvariance) {
    std::mt19937_64 rng(43);
    Groups g{ref::uniform_sample(rng, 7, 0, 1), ref::uniform_sample(rng, 5, 0, 2),
             ref::uniform_sample(rng, 9, 0.5, 1.5)};
    const auto base = kruskal_wallis(g);
    Groups shuffled = g;
    for (auto& grp : shuffled) std::shuffle(grp.begin(), grp.end(), rng);
    std::swap(shuffled[0], shuffled[2]);
    const auto other = kruskal_wallis(shuffled);
    EXPECT_NEAR(other.statistic, base.statistic, 1e-12);
    EXPECT_NEAR(other.p_value, base.p_value, 1e-12);

    const auto d1 = dunn_posthoc(g);
    const auto d2 = dunn_posthoc(shuffled);
    // Group 0 in g is group 2 in shuffled and vice versa.
    const std::size_t relabel[3] = {2, 1, 0};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            EXPECT_NEAR(d1.at(i, j).report.p_value, d2.at(relabel[i], relabel[j]).report.p_value, 1e-12);
            EXPECT_NEAR(std::fabs(d1.at(i, j).report.statistic), std::fabs(d2.at(relabel[i], relabel[j]).report.statistic),
                        1e-12);
        }
    }
}

TEST(Dunn, HandValues) {
    const auto d = dunn_posthoc({{1, 2, 3}, {4, 5, 6}}, PAdjust::none);
    ASSERT_EQ(d.comparisons.size(), 1u);
    EXPECT_NEAR(d.at(0, 1).report.statistic, -1.9639610121239317, 1e-12);
    EXPECT_NEAR(d.at(0, 1).raw_p, 0.04953461343562668, 1e-12);
    EXPECT_NEAR(d.at(1, 0).raw_p, kruskal_wallis({{1, 2, 3}, {4, 5, 6}}).p_value, 1e-9);

    const auto same = dunn_posthoc({{1, 2, 3}, {1, 2, 3}});
    EXPECT_EQ(same.at(0, 1).report.statistic, 0.0);
    EXPECT_EQ(same.at(0, 1).report.p_value, 1.0);
    EXPECT_THROW(same.at(0, 0), InvalidGroups);
}

TEST(Dunn, OnlyTheSeparatedPairRejects) {
    // Disjoint ranges fix the pooled ranks: mean ranks 4.5, 12.5, 20.5 with N = 24.
    // Neighbors give |z| = 8 / sqrt(12.5) (Bonferroni p ~ 0.07), the outer pair twice that.
    std::mt19937_64 rng(44);
    const auto lo = ref::uniform_sample(rng, 8, 0.0, 1.0);
    const auto mid = ref::uniform_sample(rng, 8, 1.0, 2.0);
    const auto hi = ref::uniform_sample(rng, 8, 2.0, 3.0);
    const auto d = dunn_posthoc({lo, mid, hi});
    EXPECT_NEAR(d.at(0, 1).report.statistic, -8.0 / std::sqrt(12.5), 1e-12);
    EXPECT_NEAR(d.at(0, 2).report.statistic, -16.0 / std::sqrt(12.5), 1e-12);
    EXPECT_TRUE(d.at(0, 2).report.reject);
    EXPECT_FALSE(d.at(0, 1).report.reject);
    EXPECT_FALSE(d.at(1, 2).report.reject);
    EXPECT_TRUE(dunn_posthoc({lo, mid, hi}, PAdjust::none).at(0, 1).report.reject);
}

TEST(Dunn, Adjustments) {
    const std::vector<double> p{0.01, 0.04, 0.03, 0.5};
    EXPECT_EQ(adjust_p_values(p, PAdjust::none), p);
    const auto bonf = adjust_p_values(p, PAdjust::bonferroni);
    EXPECT_DOUBLE_EQ(bonf[0], 0.04);
    EXPECT_DOUBLE_EQ(bonf[1], 0.16);
    EXPECT_DOUBLE_EQ(bonf[3], 1.0);
    const auto holm = adjust_p_values(p, PAdjust::holm);
    EXPECT_DOUBLE_EQ(holm[0], 0.04);
    EXPECT_DOUBLE_EQ(holm[2], 0.09);
    EXPECT_DOUBLE_EQ(holm[1], 0.09);
    EXPECT_DOUBLE_EQ(holm[3], 0.5);
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_LE(holm[i], bonf[i]);
        EXPECT_GE(holm[i], p[i]);
    }
    EXPECT_THROW(parse_p_adjust("sidak"), ConfigError);
}
