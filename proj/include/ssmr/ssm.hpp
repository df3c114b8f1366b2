#ifndef SSMR_SSM_HPP
#define SSMR_SSM_HPP

#include <array>
#include <string>

#include "errors.hpp"

namespace ssmr {

/// PICUD braking parameters.
struct SsmParams {
    /// Deceleration of both vehicles, m/s^2.
    double deceleration = 3.3;
    /// Follower reaction time, s.
    double reaction_time = 1.0;

    void validate() const {
        if (!(deceleration > 0.0)) throw ConfigError("deceleration must be positive");
        if (!(reaction_time >= 0.0)) throw ConfigError("reaction time must be non-negative");
    }
};

enum class SsmKind { th, picud, drac, ittc };

inline constexpr std::array<SsmKind, 4> all_ssm_kinds{SsmKind::th, SsmKind::picud, SsmKind::drac, SsmKind::ittc};

enum class Orientation { higher_is_safer, lower_is_safer };
enum class ImageDomain { nonneg_reals, all_reals };

inline constexpr Orientation orientation(SsmKind k) {
    return (k == SsmKind::th || k == SsmKind::picud) ? Orientation::higher_is_safer : Orientation::lower_is_safer;
}

inline constexpr ImageDomain image_domain(SsmKind k) {
    return (k == SsmKind::th || k == SsmKind::drac) ? ImageDomain::nonneg_reals : ImageDomain::all_reals;
}

inline const char* to_string(SsmKind k) {
    switch (k) {
        case SsmKind::th: return "TH";
        case SsmKind::picud: return "PICUD";
        case SsmKind::drac: return "DRAC";
        case SsmKind::ittc: return "ITTC";
    }
    return "?";
}

inline std::size_t index_of(SsmKind k) { return static_cast<std::size_t>(k); }

// Every kernel takes the gap `d` from the follower's front bumper to the
// leader's rear bumper, the follower speed and (where used) the leader speed.

/// Seconds for the follower to cover the gap. Throws UndefinedHeadway for a stopped follower.
inline double time_headway(double d, double v_follower) {
    if (!(v_follower > 0.0)) {
        throw UndefinedHeadway("time headway is undefined for a stopped follower");
    }
    return d / v_follower;
}

/// Remaining gap after both vehicles brake to a stop, the follower after its reaction time. May be negative.
inline double picud(double d, double v_follower, double v_leader, const SsmParams& p) {
    return (v_leader * v_leader - v_follower * v_follower) / (2.0 * p.deceleration) + d -
           v_follower * p.reaction_time;
}

/// Deceleration needed to avoid the leader; zero off a collision course.
inline double drac(double d, double v_follower, double v_leader) {
    if (v_follower > v_leader) {
        const double closing = v_follower - v_leader;
        return closing * closing / d;
    }
    return 0.0;
}

/// Closing speed over gap; negative for diverging vehicles.
inline double ittc(double d, double v_follower, double v_leader) { return (v_follower - v_leader) / d; }

inline double evaluate_ssm(SsmKind kind, double d, double v_follower, double v_leader, const SsmParams& p) {
    switch (kind) {
        case SsmKind::th: return time_headway(d, v_follower);
        case SsmKind::picud: return picud(d, v_follower, v_leader, p);
        case SsmKind::drac: return drac(d, v_follower, v_leader);
        case SsmKind::ittc: return ittc(d, v_follower, v_leader);
    }
    return 0.0;
}

/// One SSM evaluated for both pairs of a lane change.
struct SsmPair {
    SsmKind kind = SsmKind::th;
    /// Ego following the leader.
    double lead_value = 0.0;
    /// Follower following the ego.
    double follow_value = 0.0;
};

/// Gaps and speeds at the evaluation instant.
struct KinematicSnapshot {
    double d_lead = 0.0;
    double d_follow = 0.0;
    double v_ego = 0.0;
    double v_lead = 0.0;
    double v_follow = 0.0;
    double length_ego = 0.0;
    double length_lead = 0.0;
    double length_follow = 0.0;

    bool operator==(const KinematicSnapshot&) const = default;
};

inline SsmPair compute_ssm_pair(SsmKind kind, const KinematicSnapshot& s, const SsmParams& p) {
    return SsmPair{kind, evaluate_ssm(kind, s.d_lead, s.v_ego, s.v_lead, p),
                   evaluate_ssm(kind, s.d_follow, s.v_follow, s.v_ego, p)};
}

/// All four measures, indexed by `index_of(kind)`.
inline std::array<SsmPair, 4> compute_ssm_pairs(const KinematicSnapshot& s, const SsmParams& p) {
    std::array<SsmPair, 4> out;
    for (auto kind : all_ssm_kinds) {
        out[index_of(kind)] = compute_ssm_pair(kind, s, p);
    }
    return out;
}

}

#endif
