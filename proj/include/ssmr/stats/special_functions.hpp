#ifndef SSMR_STATS_SPECIAL_FUNCTIONS_HPP
#define SSMR_STATS_SPECIAL_FUNCTIONS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "../errors.hpp"

namespace ssmr::stats {

namespace detail {

inline constexpr double series_eps = 1e-16;
inline constexpr int max_iterations = 10000;
inline constexpr double tiny = 1e-300;

/// P(a, x) by its power series; converges quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < max_iterations; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * series_eps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Q(a, x) by the modified Lentz continued fraction; used for x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < series_eps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

/// Continued fraction for the incomplete beta, Lentz form.
inline double beta_fraction(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < series_eps) break;
    }
    return h;
}

}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw DomainError("regularized_gamma_q requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) {
        return std::clamp(1.0 - detail::gamma_p_series(a, x), 0.0, 1.0);
    }
    return std::clamp(detail::gamma_q_fraction(a, x), 0.0, 1.0);
}

inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw DomainError("regularized_gamma_p requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) {
        return std::clamp(detail::gamma_p_series(a, x), 0.0, 1.0);
    }
    return std::clamp(1.0 - detail::gamma_q_fraction(a, x), 0.0, 1.0);
}

/// Regularized incomplete beta I_x(a, b).
inline double regularized_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw DomainError("regularized_beta requires a, b > 0 and 0 <= x <= 1");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::clamp(front * detail::beta_fraction(x, a, b) / a, 0.0, 1.0);
    }
    return std::clamp(1.0 - front * detail::beta_fraction(1.0 - x, b, a) / b, 0.0, 1.0);
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
inline double chi2_sf(double x, int df) {
    if (df < 1) throw DomainError("chi2_sf requires df >= 1");
    if (!(x >= 0.0)) throw DomainError("chi2_sf requires x >= 0");
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

/// Upper tail of the standard normal distribution.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// Upper tail of Student's t distribution with `df` degrees of freedom.
inline double t_sf(double t, int df) {
    if (df < 1) throw DomainError("t_sf requires df >= 1");
    if (t == 0.0) return 0.5;
    if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_beta(x, 0.5 * df, 0.5);
    return t > 0.0 ? tail : 1.0 - tail;
}

}

#endif
