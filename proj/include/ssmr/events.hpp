#ifndef SSMR_EVENTS_HPP
#define SSMR_EVENTS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "ssm.hpp"
#include "trajectory.hpp"

namespace ssmr {

enum class Direction { left, right };

inline const char* to_string(Direction d) { return d == Direction::left ? "left" : "right"; }

/// A lane-id transition; `frame` is the first frame in the target lane.
struct LaneChangeCandidate {
    std::int64_t vehicle_id = 0;
    std::int64_t frame = 0;
    int origin_lane = 0;
    int target_lane = 0;

    bool operator==(const LaneChangeCandidate&) const = default;
};

/// A transition skipped by detection (more than one lane in a single step).
struct DetectionDiagnostic {
    std::int64_t vehicle_id = 0;
    std::int64_t frame = 0;
    int from_lane = 0;
    int to_lane = 0;
};

struct DetectionResult {
    std::vector<LaneChangeCandidate> candidates;
    std::vector<DetectionDiagnostic> multi_lane_jumps;
};

/// One candidate per lane-id change between consecutive samples of a vehicle,
/// ordered by (vehicle_id, frame).
inline DetectionResult detect_lane_changes(const TrajectoryTable& table) {
    DetectionResult out;
    for (auto id : table.vehicle_ids()) {
        auto traj = table.trajectory(id);
        for (std::size_t i = 1; i < traj.size(); ++i) {
            const int from = traj[i - 1].lane;
            const int to = traj[i].lane;
            if (from == to) continue;
            if (std::abs(from - to) == 1) {
                out.candidates.push_back({id, traj[i].frame, from, to});
            } else {
                out.multi_lane_jumps.push_back({id, traj[i].frame, from, to});
            }
        }
    }
    return out;
}

/// Which lanes of a change are checked against the excluded set.
enum class LaneExclusion { origin_or_target, target_only };

struct EventFilterConfig {
    /// Both headways must be strictly below this, seconds.
    double th_max = 2.0;
    std::set<VehicleClass> allowed_vehicle_classes{VehicleClass::car};
    std::set<int> excluded_lanes;
    LaneExclusion lane_exclusion = LaneExclusion::origin_or_target;
    bool require_both_neighbors = true;
    /// NGSIM numbering: lane 1 is leftmost, so a decreasing id is a left change.
    bool left_is_decreasing = true;

    void validate() const {
        if (!(th_max > 0.0)) throw ConfigError("th_max must be positive");
    }

    Direction direction_of(int origin_lane, int target_lane) const {
        return ((target_lane < origin_lane) == left_is_decreasing) ? Direction::left : Direction::right;
    }
};

/// A lane change between a leader and a follower in the target lane.
///
/// With `require_both_neighbors` off a side may be missing; its id is empty
/// and its gap and speed are NaN.
struct LaneChangeEvent {
    std::int64_t ego_id = 0;
    std::optional<std::int64_t> leader_id;
    std::optional<std::int64_t> follower_id;
    std::int64_t frame = 0;
    int origin_lane = 0;
    int target_lane = 0;
    Direction direction = Direction::left;
    VehicleClass ego_class = VehicleClass::car;
    KinematicSnapshot snapshot;

    bool has_both_neighbors() const { return leader_id.has_value() && follower_id.has_value(); }
};

inline std::array<SsmPair, 4> compute_ssm_pairs(const LaneChangeEvent& event, const SsmParams& p) {
    if (!event.has_both_neighbors()) {
        throw InvalidInput("SSM pairs need both a leader and a follower");
    }
    return compute_ssm_pairs(event.snapshot, p);
}

/// Filters in the order they are applied; each rejected candidate is
/// counted under the first one it fails.
enum class RejectReason { vehicle_class, excluded_lane, missing_leader, missing_follower, non_positive_gap, time_headway };

inline constexpr std::array<RejectReason, 6> all_reject_reasons{
    RejectReason::vehicle_class,    RejectReason::excluded_lane,    RejectReason::missing_leader,
    RejectReason::missing_follower, RejectReason::non_positive_gap, RejectReason::time_headway,
};

inline const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::vehicle_class: return "vehicle_class";
        case RejectReason::excluded_lane: return "excluded_lane";
        case RejectReason::missing_leader: return "missing_leader";
        case RejectReason::missing_follower: return "missing_follower";
        case RejectReason::non_positive_gap: return "non_positive_gap";
        case RejectReason::time_headway: return "time_headway";
    }
    return "?";
}

/// Resolves leader and follower in the target lane at the candidate frame.
inline std::variant<LaneChangeEvent, RejectReason> resolve_event(const LaneChangeCandidate& c,
                                                                 const TrajectoryTable& table,
                                                                 const EventFilterConfig& cfg = {}) {
    const auto lane = table.vehicles_in_lane_at_frame(c.target_lane, c.frame);
    std::size_t ego_at = lane.size();
    for (std::size_t i = 0; i < lane.size(); ++i) {
        if (lane[i].vehicle_id == c.vehicle_id) ego_at = i;
    }
    if (ego_at == lane.size()) {
        throw InvalidInput("candidate ego " + std::to_string(c.vehicle_id) + " is not in lane " +
                           std::to_string(c.target_lane) + " at frame " + std::to_string(c.frame));
    }
    const auto& ego = lane[ego_at];
    const TrajectorySample* leader = ego_at + 1 < lane.size() ? &lane[ego_at + 1] : nullptr;
    const TrajectorySample* follower = ego_at > 0 ? &lane[ego_at - 1] : nullptr;

    if (cfg.require_both_neighbors) {
        if (!leader) return RejectReason::missing_leader;
        if (!follower) return RejectReason::missing_follower;
    }

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    LaneChangeEvent ev;
    ev.ego_id = c.vehicle_id;
    ev.frame = c.frame;
    ev.origin_lane = c.origin_lane;
    ev.target_lane = c.target_lane;
    ev.direction = cfg.direction_of(c.origin_lane, c.target_lane);
    ev.ego_class = ego.vehicle_class;
    auto& s = ev.snapshot;
    s.v_ego = ego.velocity;
    s.length_ego = ego.length;
    s.d_lead = s.d_follow = s.v_lead = s.v_follow = s.length_lead = s.length_follow = nan;
    if (leader) {
        ev.leader_id = leader->vehicle_id;
        s.d_lead = leader->rear() - ego.position;
        s.v_lead = leader->velocity;
        s.length_lead = leader->length;
        if (!(s.d_lead > 0.0)) return RejectReason::non_positive_gap;
    }
    if (follower) {
        ev.follower_id = follower->vehicle_id;
        s.d_follow = ego.rear() - follower->position;
        s.v_follow = follower->velocity;
        s.length_follow = follower->length;
        if (!(s.d_follow > 0.0)) return RejectReason::non_positive_gap;
    }
    return ev;
}

inline bool touches_excluded_lane(int origin_lane, int target_lane, const EventFilterConfig& cfg) {
    if (cfg.excluded_lanes.count(target_lane)) return true;
    return cfg.lane_exclusion == LaneExclusion::origin_or_target && cfg.excluded_lanes.count(origin_lane);
}

/// Both headways defined and strictly below th_max.
inline bool passes_headway(const KinematicSnapshot& s, double th_max) {
    if (!(s.v_ego > 0.0) || !(s.v_follow > 0.0)) return false;
    return time_headway(s.d_lead, s.v_ego) < th_max && time_headway(s.d_follow, s.v_follow) < th_max;
}

struct DirectionCounts {
    std::size_t left = 0;
    std::size_t right = 0;

    std::size_t total() const { return left + right; }
    bool operator==(const DirectionCounts&) const = default;
};

/// Filter bookkeeping; `grid` counts kept events by target lane and direction.
struct EventAccounting {
    std::size_t total_candidates = 0;
    std::map<RejectReason, std::size_t> rejected;
    std::size_t kept = 0;
    /// Candidates that pass every filter except the lane exclusion.
    std::size_t kept_without_lane_exclusion = 0;
    std::size_t multi_lane_jumps = 0;
    std::map<int, DirectionCounts> grid;

    std::size_t rejected_total() const {
        std::size_t n = 0;
        for (const auto& [reason, count] : rejected) n += count;
        return n;
    }

    DirectionCounts direction_totals() const {
        DirectionCounts t;
        for (const auto& [lane, c] : grid) {
            t.left += c.left;
            t.right += c.right;
        }
        return t;
    }
};

struct FilterResult {
    std::vector<LaneChangeEvent> kept;
    EventAccounting accounting;
};

namespace detail {

inline void count_kept(EventAccounting& acc, const LaneChangeEvent& ev) {
    ++acc.kept;
    auto& cell = acc.grid[ev.target_lane];
    (ev.direction == Direction::left ? cell.left : cell.right) += 1;
}

inline std::optional<RejectReason> failing_filter_after_resolve(const LaneChangeEvent& ev,
                                                                const EventFilterConfig& cfg, bool check_lanes) {
    if (!cfg.allowed_vehicle_classes.count(ev.ego_class)) return RejectReason::vehicle_class;
    if (check_lanes && touches_excluded_lane(ev.origin_lane, ev.target_lane, cfg)) return RejectReason::excluded_lane;
    if (cfg.require_both_neighbors) {
        if (!ev.leader_id) return RejectReason::missing_leader;
        if (!ev.follower_id) return RejectReason::missing_follower;
    }
    if (!passes_headway(ev.snapshot, cfg.th_max)) return RejectReason::time_headway;
    return std::nullopt;
}

}

/// Applies the class, lane and headway filters to resolved events.
inline FilterResult apply_filters(const std::vector<LaneChangeEvent>& events, const EventFilterConfig& cfg) {
    cfg.validate();
    FilterResult out;
    out.accounting.total_candidates = events.size();
    for (const auto& ev : events) {
        if (!detail::failing_filter_after_resolve(ev, cfg, false)) {
            ++out.accounting.kept_without_lane_exclusion;
        }
        if (auto reason = detail::failing_filter_after_resolve(ev, cfg, true)) {
            ++out.accounting.rejected[*reason];
        } else {
            detail::count_kept(out.accounting, ev);
            out.kept.push_back(ev);
        }
    }
    return out;
}

/// Detection, resolution and filtering in one pass with full accounting.
/// Kept events are ordered by (ego_id, frame).
inline FilterResult extract_events(const TrajectoryTable& table, const EventFilterConfig& cfg) {
    cfg.validate();
    const auto detection = detect_lane_changes(table);
    FilterResult out;
    auto& acc = out.accounting;
    acc.total_candidates = detection.candidates.size();
    acc.multi_lane_jumps = detection.multi_lane_jumps.size();

    for (const auto& c : detection.candidates) {
        const auto* ego = table.sample_at(c.vehicle_id, c.frame);
        const bool class_ok = ego && cfg.allowed_vehicle_classes.count(ego->vehicle_class);
        const bool lanes_ok = !touches_excluded_lane(c.origin_lane, c.target_lane, cfg);

        std::optional<RejectReason> reason;
        std::optional<LaneChangeEvent> event;
        if (class_ok) {
            auto resolved = resolve_event(c, table, cfg);
            if (auto* r = std::get_if<RejectReason>(&resolved)) {
                reason = *r;
            } else {
                event = std::get<LaneChangeEvent>(std::move(resolved));
                reason = detail::failing_filter_after_resolve(*event, cfg, false);
            }
        } else {
            reason = RejectReason::vehicle_class;
        }

        if (!reason) ++acc.kept_without_lane_exclusion;
        if (!lanes_ok && (!reason || *reason != RejectReason::vehicle_class)) {
            reason = RejectReason::excluded_lane;
        }
        if (reason) {
            ++acc.rejected[*reason];
        } else {
            detail::count_kept(acc, *event);
            out.kept.push_back(std::move(*event));
        }
    }
    return out;
}

}

#endif
