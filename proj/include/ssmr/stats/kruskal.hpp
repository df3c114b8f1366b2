#ifndef SSMR_STATS_KRUSKAL_HPP
#define SSMR_STATS_KRUSKAL_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "rank.hpp"
#include "report.hpp"
#include "special_functions.hpp"

namespace ssmr::stats {

using Groups = std::vector<std::vector<double>>;

namespace detail {

struct PooledRanks {
    std::vector<double> rank_sums;
    std::vector<std::size_t> sizes;
    std::size_t total = 0;
    double tie_term = 0.0;

    double mean_rank(std::size_t g) const { return rank_sums[g] / static_cast<double>(sizes[g]); }
};

inline PooledRanks pool_and_rank(const Groups& groups) {
    if (groups.size() < 2) throw InvalidGroups("at least two groups are required");
    PooledRanks out;
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) throw InvalidGroups("every group must be non-empty");
        out.sizes.push_back(g.size());
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    if (pooled.size() < 3) throw InvalidGroups("at least three observations are required");
    const auto ranked = rank_with_ties(pooled);
    out.total = pooled.size();
    out.tie_term = ranked.tie_term();
    std::size_t at = 0;
    for (const auto& g : groups) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) s += ranked.ranks[at + i];
        out.rank_sums.push_back(s);
        at += g.size();
    }
    return out;
}

}

/// Kruskal-Wallis H with tie correction; p from the chi-square tail with k - 1 df.
inline TestReport kruskal_wallis(const Groups& groups, double alpha = 0.05) {
    validate_alpha(alpha);
    const auto pr = detail::pool_and_rank(groups);
    const double n = static_cast<double>(pr.total);
    const double correction = 1.0 - pr.tie_term / (n * n * n - n);
    const int df = static_cast<int>(groups.size()) - 1;
    if (correction <= 0.0) {
        return make_report("kruskal_wallis", 0.0, 1.0, pr.sizes, Alternative::two_sided, alpha, "chi2");
    }
    double h = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        h += pr.rank_sums[g] * pr.rank_sums[g] / static_cast<double>(pr.sizes[g]);
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    h = std::max(0.0, h / correction);
    return make_report("kruskal_wallis", h, chi2_sf(h, df), pr.sizes, Alternative::two_sided, alpha, "chi2");
}

enum class PAdjust { none, bonferroni, holm };

inline const char* to_string(PAdjust a) {
    switch (a) {
        case PAdjust::none: return "none";
        case PAdjust::bonferroni: return "bonferroni";
        case PAdjust::holm: return "holm";
    }
    return "?";
}

inline PAdjust parse_p_adjust(const std::string& s) {
    if (s == "none") return PAdjust::none;
    if (s == "bonferroni") return PAdjust::bonferroni;
    if (s == "holm") return PAdjust::holm;
    throw ConfigError("unknown p-value adjustment '" + s + "'");
}

/// Family-wise adjustment of a set of p-values, clamped to [0, 1].
inline std::vector<double> adjust_p_values(const std::vector<double>& p, PAdjust method) {
    const std::size_t m = p.size();
    std::vector<double> out(p);
    if (method == PAdjust::bonferroni) {
        for (auto& v : out) v = std::min(1.0, v * static_cast<double>(m));
    } else if (method == PAdjust::holm) {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
        double running = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            running = std::max(running, std::min(1.0, static_cast<double>(m - i) * p[order[i]]));
            out[order[i]] = running;
        }
    }
    return out;
}

struct DunnComparison {
    std::size_t first = 0;
    std::size_t second = 0;
    /// Two-sided p before adjustment.
    double raw_p = 1.0;
    TestReport report;
};

/// All-pairs Dunn comparisons in (i, j), i < j order.
struct DunnResult {
    std::size_t groups = 0;
    PAdjust adjustment = PAdjust::bonferroni;
    std::vector<DunnComparison> comparisons;

    const DunnComparison& at(std::size_t i, std::size_t j) const {
        if (i == j || i >= groups || j >= groups) throw InvalidGroups("no Dunn comparison for that pair");
        if (i > j) std::swap(i, j);
        // Row-major index into the strict upper triangle.
        const std::size_t idx = i * groups - i * (i + 1) / 2 + (j - i - 1);
        return comparisons[idx];
    }
};

/// Dunn's post hoc test on pooled mid-ranks. The z of pair (i, j) is
/// positive when group i ranks higher.
inline DunnResult dunn_posthoc(const Groups& groups, PAdjust adjustment = PAdjust::bonferroni, double alpha = 0.05) {
    validate_alpha(alpha);
    const auto pr = detail::pool_and_rank(groups);
    const double n = static_cast<double>(pr.total);
    const double spread = n * (n + 1.0) / 12.0 - pr.tie_term / (12.0 * (n - 1.0));

    DunnResult out;
    out.groups = groups.size();
    out.adjustment = adjustment;
    std::vector<double> raw;
    std::vector<double> zs;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const double se = std::sqrt(spread * (1.0 / static_cast<double>(pr.sizes[i]) +
                                                  1.0 / static_cast<double>(pr.sizes[j])));
            const double diff = pr.mean_rank(i) - pr.mean_rank(j);
            const double z = se > 0.0 ? diff / se : 0.0;
            zs.push_back(z);
            raw.push_back(std::min(1.0, 2.0 * normal_sf(std::fabs(z))));
            out.comparisons.push_back({i, j, raw.back(), {}});
        }
    }
    const auto adjusted = adjust_p_values(raw, adjustment);
    for (std::size_t c = 0; c < out.comparisons.size(); ++c) {
        auto& cmp = out.comparisons[c];
        cmp.report = make_report("dunn", zs[c], adjusted[c], {pr.sizes[cmp.first], pr.sizes[cmp.second]},
                                 Alternative::two_sided, alpha, std::string("normal/") + to_string(adjustment));
    }
    return out;
}

}

#endif
