#ifndef SSMR_RATIO_HPP
#define SSMR_RATIO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "errors.hpp"
#include "ssm.hpp"

namespace ssmr {

// Argument order throughout: x is the follower-side value, y the
// leader-side value. Positive ratios mean the larger margin is kept toward
// the leader, -1 means all of it toward the follower.

/// Quadrant-aware angle of (x, y) in (-pi, pi].
inline double plane_angle(double x, double y) {
    if (x == 0.0 && y == 0.0) {
        throw UndefinedRatio("angle is undefined at the origin");
    }
    const double a = std::atan2(y, x);
    return a == -std::numbers::pi ? std::numbers::pi : a;
}

enum class PositiveRatioForm {
    /// -1 + 2 sin^2(angle): meets f(x,x) = 0, f(0,y) = 1, f(x,0) = -1.
    corrected,
    /// -1 + 2 sin(angle) as typeset in the original derivation; f(x,x) = sqrt(2) - 1.
    literal,
};

/// Ratio for measures whose values are non-negative.
inline double ratio_positive(double x, double y, PositiveRatioForm form = PositiveRatioForm::corrected) {
    if (!(x >= 0.0) || !(y >= 0.0)) {
        throw DomainError("ratio_positive expects non-negative values");
    }
    if (x == 0.0 && y == 0.0) {
        throw UndefinedRatio("ratio is undefined when both values are zero");
    }
    if (form == PositiveRatioForm::literal) {
        return -1.0 + 2.0 * std::sin(plane_angle(x, y));
    }
    // Scale to the larger value so the squares neither overflow nor underflow.
    const double m = std::max(x, y);
    const double a = x / m;
    const double b = y / m;
    return std::clamp((b * b - a * a) / (a * a + b * b), -1.0, 1.0);
}

/// Ratio for measures taking any real value: sin(angle - pi/4), evaluated
/// as (y - x) / (sqrt(2) * |(x, y)|).
inline double ratio_real(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw DomainError("ratio_real expects finite values");
    }
    if (x == 0.0 && y == 0.0) {
        throw UndefinedRatio("ratio is undefined when both values are zero");
    }
    const double r = std::hypot(x, y);
    return std::clamp((y - x) / (std::numbers::sqrt2 * r), -1.0, 1.0);
}

enum class RatioTransform { positive, real };

inline const char* to_string(RatioTransform t) { return t == RatioTransform::positive ? "f_P" : "f_R"; }

struct RatioRecord {
    SsmKind kind = SsmKind::th;
    double value = 0.0;
    RatioTransform transform = RatioTransform::positive;
    bool sign_flipped = false;
    std::int64_t ego_id = -1;
    std::int64_t frame = -1;
};

/// Maps an SSM pair onto [-1, 1]. The transform follows the measure's image
/// domain; lower-is-safer measures are negated so +1 always means "safer
/// toward the leader". Throws UndefinedRatio when both values are zero.
inline RatioRecord oriented_ratio(const SsmPair& pair, PositiveRatioForm form = PositiveRatioForm::corrected) {
    RatioRecord rec;
    rec.kind = pair.kind;
    rec.sign_flipped = orientation(pair.kind) == Orientation::lower_is_safer;
    if (image_domain(pair.kind) == ImageDomain::nonneg_reals) {
        rec.transform = RatioTransform::positive;
        rec.value = ratio_positive(pair.follow_value, pair.lead_value, form);
    } else {
        rec.transform = RatioTransform::real;
        rec.value = ratio_real(pair.follow_value, pair.lead_value);
    }
    if (rec.sign_flipped) {
        rec.value = 0.0 - rec.value;
    }
    return rec;
}

}

#endif
