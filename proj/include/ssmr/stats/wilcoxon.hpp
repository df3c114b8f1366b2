#ifndef SSMR_STATS_WILCOXON_HPP
#define SSMR_STATS_WILCOXON_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "rank.hpp"
#include "report.hpp"
#include "special_functions.hpp"

namespace ssmr::stats {

enum class WilcoxonMode { exact, normal_approx, automatic };

/// `discard` drops zeros before ranking; `pratt` ranks them and then drops them.
enum class ZeroPolicy { discard, pratt };

inline WilcoxonMode parse_wilcoxon_mode(const std::string& s) {
    if (s == "exact") return WilcoxonMode::exact;
    if (s == "normal" || s == "normal_approx" || s == "approx") return WilcoxonMode::normal_approx;
    if (s == "auto") return WilcoxonMode::automatic;
    throw ConfigError("unknown Wilcoxon mode '" + s + "'");
}

inline ZeroPolicy parse_zero_policy(const std::string& s) {
    if (s == "discard" || s == "wilcox") return ZeroPolicy::discard;
    if (s == "pratt") return ZeroPolicy::pratt;
    throw ConfigError("unknown zero policy '" + s + "'");
}

struct WilcoxonOptions {
    Alternative alternative = Alternative::greater;
    WilcoxonMode mode = WilcoxonMode::automatic;
    ZeroPolicy zero_policy = ZeroPolicy::discard;
    double alpha = 0.05;
    /// Largest non-zero count that `automatic` still evaluates exactly.
    std::size_t exact_cutoff = 25;
};

/// Largest sample for which the exact null counts fit in 64 bits.
inline constexpr std::size_t wilcoxon_exact_limit = 62;

/// Signed ranks of the non-zero observations, ready for W and its null distribution.
struct SignedRanks {
    /// Mid-ranks of |x| for the non-zero observations, each doubled so ties stay integral.
    std::vector<std::int64_t> doubled_ranks;
    std::vector<bool> positive;
    std::size_t zeros = 0;
    double tie_term = 0.0;

    std::size_t n() const { return doubled_ranks.size(); }

    double w_plus() const {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < doubled_ranks.size(); ++i) {
            if (positive[i]) s += doubled_ranks[i];
        }
        return 0.5 * static_cast<double>(s);
    }
};

inline SignedRanks signed_ranks(std::span<const double> sample, ZeroPolicy policy) {
    SignedRanks out;
    std::vector<double> magnitudes;
    std::vector<bool> positive;
    for (double v : sample) {
        if (std::isnan(v)) throw InvalidInput("Wilcoxon sample contains NaN");
        if (v == 0.0) {
            ++out.zeros;
            if (policy == ZeroPolicy::discard) continue;
        }
        magnitudes.push_back(std::fabs(v));
        positive.push_back(v > 0.0);
    }
    if (out.zeros == sample.size()) {
        throw DegenerateSample("Wilcoxon sample has no non-zero observations");
    }
    const auto ranked = rank_with_ties(magnitudes);
    std::vector<double> nonzero_ranks;
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
        if (magnitudes[i] == 0.0) continue;
        out.doubled_ranks.push_back(static_cast<std::int64_t>(std::llround(2.0 * ranked.ranks[i])));
        out.positive.push_back(positive[i]);
        nonzero_ranks.push_back(ranked.ranks[i]);
    }
    // Tie groups among the non-zero ranks only.
    out.tie_term = nonzero_ranks.empty() ? 0.0 : rank_with_ties(nonzero_ranks).tie_term();
    return out;
}

/// Number of sign assignments for each doubled rank sum, index = doubled sum.
inline std::vector<std::uint64_t> signed_rank_null_counts(std::span<const std::int64_t> doubled_ranks) {
    if (doubled_ranks.size() > wilcoxon_exact_limit) {
        throw InvalidInput("exact Wilcoxon distribution limited to " + std::to_string(wilcoxon_exact_limit) +
                           " observations");
    }
    std::int64_t total = 0;
    for (auto r : doubled_ranks) total += r;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
    counts[0] = 1;
    std::int64_t reach = 0;
    for (auto r : doubled_ranks) {
        reach += r;
        for (std::int64_t s = reach; s >= r; --s) {
            counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
        }
    }
    return counts;
}

/// Wilcoxon signed-rank test of symmetry about zero.
///
/// The statistic is W = sum of ranks of |x| over the positive observations.
/// "greater" tests for a location above zero.
inline TestReport wilcoxon_signed_rank(std::span<const double> sample, const WilcoxonOptions& opt = {}) {
    validate_alpha(opt.alpha);
    const auto sr = signed_ranks(sample, opt.zero_policy);
    const std::size_t n = sr.n();
    const double w = sr.w_plus();

    const bool exact = opt.mode == WilcoxonMode::exact ||
                       (opt.mode == WilcoxonMode::automatic && n <= opt.exact_cutoff);
    std::vector<std::size_t> sizes{n};
    if (exact) {
        const auto counts = signed_rank_null_counts(sr.doubled_ranks);
        const auto w2 = static_cast<std::size_t>(std::llround(2.0 * w));
        std::uint64_t at_least = 0;
        std::uint64_t at_most = 0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (s >= w2) at_least += counts[s];
            if (s <= w2) at_most += counts[s];
        }
        const double total = std::ldexp(1.0, static_cast<int>(n));
        const double p_ge = static_cast<double>(at_least) / total;
        const double p_le = static_cast<double>(at_most) / total;
        double p = 0.0;
        switch (opt.alternative) {
            case Alternative::greater: p = p_ge; break;
            case Alternative::less: p = p_le; break;
            case Alternative::two_sided: p = std::min(1.0, 2.0 * std::min(p_ge, p_le)); break;
        }
        return make_report("wilcoxon_signed_rank", w, p, std::move(sizes), opt.alternative, opt.alpha, "exact");
    }

    // Normal approximation with tie-corrected variance and a 0.5 continuity correction.
    const double nt = static_cast<double>(n + (opt.zero_policy == ZeroPolicy::pratt ? sr.zeros : 0));
    const double n0 = opt.zero_policy == ZeroPolicy::pratt ? static_cast<double>(sr.zeros) : 0.0;
    const double mean = (nt * (nt + 1.0) - n0 * (n0 + 1.0)) / 4.0;
    const double var =
        (nt * (nt + 1.0) * (2.0 * nt + 1.0) - n0 * (n0 + 1.0) * (2.0 * n0 + 1.0)) / 24.0 - sr.tie_term / 48.0;
    const double sd = std::sqrt(var);
    double p = 1.0;
    switch (opt.alternative) {
        case Alternative::greater: p = normal_sf((w - mean - 0.5) / sd); break;
        case Alternative::less: p = normal_sf((mean - w - 0.5) / sd); break;
        case Alternative::two_sided:
            p = std::min(1.0, 2.0 * normal_sf(std::max(0.0, std::fabs(w - mean) - 0.5) / sd));
            break;
    }
    return make_report("wilcoxon_signed_rank", w, p, std::move(sizes), opt.alternative, opt.alpha, "normal");
}

}

#endif
