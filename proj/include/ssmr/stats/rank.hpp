#ifndef SSMR_STATS_RANK_HPP
#define SSMR_STATS_RANK_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "../errors.hpp"

namespace ssmr::stats {

/// Mid-ranks (1-based) in input order plus the size of every tie group of two or more.
struct RankedSample {
    std::vector<double> ranks;
    std::vector<std::size_t> tie_sizes;

    /// Sum of t^3 - t over tie groups, the usual tie-correction term.
    double tie_term() const {
        double s = 0.0;
        for (auto t : tie_sizes) {
            const double td = static_cast<double>(t);
            s += td * td * td - td;
        }
        return s;
    }
};

inline RankedSample rank_with_ties(std::span<const double> values) {
    if (values.empty()) throw InvalidInput("cannot rank an empty sample");
    for (double v : values) {
        if (std::isnan(v)) throw InvalidInput("cannot rank NaN");
    }
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    RankedSample out;
    out.ranks.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // Positions i..j-1 share the average of ranks i+1..j.
        const double mid = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) out.ranks[order[k]] = mid;
        if (j - i > 1) out.tie_sizes.push_back(j - i);
        i = j;
    }
    return out;
}

}

#endif
