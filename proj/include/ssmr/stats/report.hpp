#ifndef SSMR_STATS_REPORT_HPP
#define SSMR_STATS_REPORT_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "../errors.hpp"

namespace ssmr::stats {

enum class Alternative { greater, less, two_sided };

inline const char* to_string(Alternative a) {
    switch (a) {
        case Alternative::greater: return "greater";
        case Alternative::less: return "less";
        case Alternative::two_sided: return "two_sided";
    }
    return "?";
}

inline Alternative parse_alternative(const std::string& s) {
    if (s == "greater") return Alternative::greater;
    if (s == "less") return Alternative::less;
    if (s == "two_sided" || s == "two-sided") return Alternative::two_sided;
    throw ConfigError("unknown alternative '" + s + "'");
}

inline void validate_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

/// Outcome of one hypothesis test. `sizes` holds n for one-sample tests and
/// the group sizes for multi-sample tests.
struct TestReport {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    std::vector<std::size_t> sizes;
    Alternative alternative = Alternative::two_sided;
    double alpha = 0.05;
    bool reject = false;
    /// How the p-value was obtained, e.g. "exact" or "normal".
    std::string method;
};

inline TestReport make_report(std::string test, double statistic, double p_value, std::vector<std::size_t> sizes,
                              Alternative alternative, double alpha, std::string method) {
    validate_alpha(alpha);
    TestReport r;
    r.test = std::move(test);
    r.statistic = statistic;
    r.p_value = std::clamp(p_value, 0.0, 1.0);
    r.sizes = std::move(sizes);
    r.alternative = alternative;
    r.alpha = alpha;
    r.reject = r.p_value < alpha;
    r.method = std::move(method);
    return r;
}

}

#endif
