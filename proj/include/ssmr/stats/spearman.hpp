#ifndef SSMR_STATS_SPEARMAN_HPP
#define SSMR_STATS_SPEARMAN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "rank.hpp"
#include "report.hpp"
#include "special_functions.hpp"

namespace ssmr::stats {

enum class SpearmanMethod { exact, t_approx, automatic };

struct SpearmanOptions {
    SpearmanMethod method = SpearmanMethod::automatic;
    double alpha = 0.05;
    /// Largest n that `automatic` evaluates by full permutation.
    std::size_t exact_cutoff = 10;
};

/// Spearman rank correlation with a two-sided p-value.
///
/// rho is the Pearson correlation of mid-ranks. The exact p-value counts
/// the permutations of y whose |rho| reaches the observed one; the
/// t-approximation uses n - 2 degrees of freedom.
inline TestReport spearman(std::span<const double> xs, std::span<const double> ys, const SpearmanOptions& opt = {}) {
    validate_alpha(opt.alpha);
    if (xs.size() != ys.size()) throw InvalidInput("Spearman inputs differ in length");
    const std::size_t n = xs.size();
    if (n < 3) throw InvalidInput("Spearman needs at least three pairs");
    const auto rx = rank_with_ties(xs);
    const auto ry = rank_with_ties(ys);

    // Doubled, centered ranks are integers: 2r - (n + 1).
    std::vector<std::int64_t> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = std::llround(2.0 * rx.ranks[i]) - static_cast<std::int64_t>(n + 1);
        b[i] = std::llround(2.0 * ry.ranks[i]) - static_cast<std::int64_t>(n + 1);
    }
    std::int64_t saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < n; ++i) {
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
        sab += a[i] * b[i];
    }
    if (saa == 0 || sbb == 0) throw UndefinedCorrelation("Spearman correlation is undefined for a constant input");
    const double rho = std::clamp(static_cast<double>(sab) / std::sqrt(static_cast<double>(saa) * static_cast<double>(sbb)),
                                  -1.0, 1.0);

    const bool exact = opt.method == SpearmanMethod::exact ||
                       (opt.method == SpearmanMethod::automatic && n <= opt.exact_cutoff);
    if (exact) {
        if (n > 12) throw InvalidInput("exact Spearman p-value limited to 12 pairs");
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        const std::int64_t observed = sab < 0 ? -sab : sab;
        std::uint64_t hits = 0;
        std::uint64_t total = 0;
        do {
            std::int64_t s = 0;
            for (std::size_t i = 0; i < n; ++i) s += a[i] * b[perm[i]];
            if ((s < 0 ? -s : s) >= observed) ++hits;
            ++total;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return make_report("spearman", rho, static_cast<double>(hits) / static_cast<double>(total), {n},
                           Alternative::two_sided, opt.alpha, "exact");
    }

    double p = 0.0;
    if (std::fabs(rho) < 1.0) {
        const double t = rho * std::sqrt(static_cast<double>(n - 2) / (1.0 - rho * rho));
        p = 2.0 * t_sf(std::fabs(t), static_cast<int>(n - 2));
    }
    return make_report("spearman", rho, p, {n}, Alternative::two_sided, opt.alpha, "t");
}

}

#endif
