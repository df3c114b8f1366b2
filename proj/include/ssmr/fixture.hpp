#ifndef SSMR_FIXTURE_HPP
#define SSMR_FIXTURE_HPP

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "events.hpp"
#include "text.hpp"
#include "trajectory.hpp"

namespace ssmr {

/// Scene of one lane change at its evaluation frame.
struct FixtureEvent {
    int origin_lane = 4;
    int target_lane = 3;
    double v_ego = 20.0;
    double v_lead = 20.0;
    double v_follow = 20.0;
    double d_lead = 30.0;
    double d_follow = 30.0;
    double length_ego = 4.5;
    double length_lead = 4.5;
    double length_follow = 4.5;
    VehicleClass ego_class = VehicleClass::car;
};

enum class FixtureMode {
    /// Only the listed events.
    explicit_events,
    /// Independent random scenes.
    random,
    /// Random scenes in pairs whose second member swaps the leader and follower sides.
    mirrored,
};

/// How to build a synthetic trajectory table. Ranges are closed; speeds in m/s, headways in s.
struct FixtureRecipe {
    FixtureMode mode = FixtureMode::explicit_events;
    std::vector<FixtureEvent> events;

    std::size_t count = 0;
    double speed_min = 12.0, speed_max = 20.0;
    double lead_delta_min = 0.0, lead_delta_max = 0.0;
    double follow_delta_min = 0.0, follow_delta_max = 0.0;
    double headway_lead_min = 0.6, headway_lead_max = 1.8;
    double headway_follow_min = 0.6, headway_follow_max = 1.8;
    /// When positive, d_lead = gap_ratio * d_follow instead of drawing a lead headway.
    double gap_ratio = 0.0;
    std::vector<int> target_lanes{2, 3, 4, 5};
    /// "left", "right" or "mixed".
    std::string direction = "left";
    double vehicle_length = 4.5;

    int frames_per_vehicle = 100;
    int change_offset = 50;
    double frame_period = 0.1;
    double base_position = 250.0;
};

/// Independent straight-line evaluation of one scene, used as the expected-values sidecar.
struct ExpectedEvent {
    std::int64_t ego_id = 0;
    std::int64_t leader_id = 0;
    std::int64_t follower_id = 0;
    std::int64_t frame = 0;
    int origin_lane = 0;
    int target_lane = 0;
    Direction direction = Direction::left;
    double d_lead = 0.0, d_follow = 0.0;
    double v_ego = 0.0, v_lead = 0.0, v_follow = 0.0;
    double th_lead = 0.0, th_follow = 0.0;
    double picud_lead = 0.0, picud_follow = 0.0;
    double drac_lead = 0.0, drac_follow = 0.0;
    double ittc_lead = 0.0, ittc_follow = 0.0;
};

struct Fixture {
    TrajectoryTable table;
    std::vector<ExpectedEvent> expected;
};

namespace oracle {

// Written from the definitions without going through the ssm kernels.

inline double headway(double gap, double follower_speed) {
    return follower_speed > 0.0 ? gap / follower_speed : std::numeric_limits<double>::infinity();
}

/// Gap left once both have braked to rest: leader travels v_l^2/2a, follower v_f*t_r + v_f^2/2a.
inline double stopped_gap(double gap, double follower_speed, double leader_speed, double decel, double reaction) {
    const double leader_travel = leader_speed * leader_speed / (2.0 * decel);
    const double follower_travel = follower_speed * reaction + follower_speed * follower_speed / (2.0 * decel);
    return gap + leader_travel - follower_travel;
}

inline double required_deceleration(double gap, double follower_speed, double leader_speed) {
    const double closing = follower_speed - leader_speed;
    if (closing <= 0.0) return 0.0;
    return closing * closing / gap;
}

inline double inverse_ttc(double gap, double follower_speed, double leader_speed) {
    return -(leader_speed - follower_speed) / gap;
}

inline ExpectedEvent evaluate(const FixtureEvent& e, double decel = 3.3, double reaction = 1.0) {
    ExpectedEvent x;
    x.origin_lane = e.origin_lane;
    x.target_lane = e.target_lane;
    x.direction = e.target_lane < e.origin_lane ? Direction::left : Direction::right;
    x.d_lead = e.d_lead;
    x.d_follow = e.d_follow;
    x.v_ego = e.v_ego;
    x.v_lead = e.v_lead;
    x.v_follow = e.v_follow;
    x.th_lead = headway(e.d_lead, e.v_ego);
    x.th_follow = headway(e.d_follow, e.v_follow);
    x.picud_lead = stopped_gap(e.d_lead, e.v_ego, e.v_lead, decel, reaction);
    x.picud_follow = stopped_gap(e.d_follow, e.v_follow, e.v_ego, decel, reaction);
    x.drac_lead = required_deceleration(e.d_lead, e.v_ego, e.v_lead);
    x.drac_follow = required_deceleration(e.d_follow, e.v_follow, e.v_ego);
    x.ittc_lead = inverse_ttc(e.d_lead, e.v_ego, e.v_lead);
    x.ittc_follow = inverse_ttc(e.d_follow, e.v_follow, e.v_ego);
    return x;
}

}

namespace detail {

/// Uniform doubles from raw 64-bit engine output, so fixtures are identical across standard libraries.
class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

inline void check_feasible(const FixtureEvent& e, std::size_t i) {
    const std::string where = "fixture event " + std::to_string(i) + ": ";
    if (std::abs(e.origin_lane - e.target_lane) != 1) throw RecipeError(where + "lanes must be adjacent");
    if (!(e.d_lead > 0.0) || !(e.d_follow > 0.0)) throw RecipeError(where + "gaps must be positive");
    if (!(e.v_ego >= 0.0) || !(e.v_lead >= 0.0) || !(e.v_follow >= 0.0)) {
        throw RecipeError(where + "speeds must be non-negative");
    }
    if (!(e.length_ego > 0.0) || !(e.length_lead > 0.0) || !(e.length_follow > 0.0)) {
        throw RecipeError(where + "lengths must be positive");
    }
}

inline std::vector<FixtureEvent> draw_events(const FixtureRecipe& r, std::uint64_t seed) {
    if (r.mode == FixtureMode::explicit_events) return r.events;
    if (r.target_lanes.empty()) throw RecipeError("recipe lists no target lanes");
    if (r.direction != "left" && r.direction != "right" && r.direction != "mixed") {
        throw RecipeError("direction must be left, right or mixed");
    }
    FixtureRng rng(seed);
    std::vector<FixtureEvent> out;
    auto place_lanes = [&](FixtureEvent& e) {
        e.target_lane = r.target_lanes[rng.index(r.target_lanes.size())];
        const bool left = r.direction == "left" || (r.direction == "mixed" && rng.coin());
        e.origin_lane = left ? e.target_lane + 1 : e.target_lane - 1;
        e.length_ego = e.length_lead = e.length_follow = r.vehicle_length;
    };
    while (out.size() < r.count) {
        FixtureEvent e;
        place_lanes(e);
        e.v_ego = rng.uniform(r.speed_min, r.speed_max);
        if (r.mode == FixtureMode::mirrored) {
            // Both neighbors share one speed so the swapped scene is realisable.
            double delta = rng.uniform(r.follow_delta_min, r.follow_delta_max);
            if (rng.coin()) delta = -delta;
            e.v_lead = e.v_follow = std::max(0.5, e.v_ego + delta);
        } else {
            e.v_lead = std::max(0.0, e.v_ego + rng.uniform(r.lead_delta_min, r.lead_delta_max));
            e.v_follow = std::max(0.0, e.v_ego + rng.uniform(r.follow_delta_min, r.follow_delta_max));
        }
        e.d_follow = rng.uniform(r.headway_follow_min, r.headway_follow_max) * e.v_follow;
        if (r.gap_ratio > 0.0) {
            e.d_lead = r.gap_ratio * e.d_follow;
        } else {
            e.d_lead = rng.uniform(r.headway_lead_min, r.headway_lead_max) * e.v_ego;
        }
        out.push_back(e);
        if (r.mode == FixtureMode::mirrored && out.size() < r.count) {
            FixtureEvent m = e;
            m.v_ego = e.v_lead;
            m.v_lead = m.v_follow = e.v_ego;
            m.d_lead = e.d_follow;
            m.d_follow = e.d_lead;
            out.push_back(m);
        }
    }
    return out;
}

}

/// Builds a table with one isolated three-vehicle scene per event. Scene k
/// uses vehicles 3k+1 (ego), 3k+2 (leader), 3k+3 (follower) over its own
/// frame window; every vehicle moves at constant speed and the ego enters
/// the target lane at the window's change frame.
inline Fixture generate_fixture(std::uint64_t seed, const FixtureRecipe& recipe, double decel = 3.3,
                                double reaction = 1.0) {
    if (recipe.frames_per_vehicle < 2 || recipe.change_offset < 1 ||
        recipe.change_offset >= recipe.frames_per_vehicle || !(recipe.frame_period > 0.0)) {
        throw RecipeError("frame layout must leave frames on both sides of the change");
    }
    const auto events = detail::draw_events(recipe, seed);
    if (events.empty()) throw RecipeError("recipe produces no events");

    Fixture out;
    std::vector<TrajectorySample> samples;
    const std::int64_t frames = recipe.frames_per_vehicle;
    for (std::size_t k = 0; k < events.size(); ++k) {
        const auto& e = events[k];
        detail::check_feasible(e, k);
        const auto ego_id = static_cast<std::int64_t>(3 * k + 1);
        const std::int64_t first = static_cast<std::int64_t>(k) * frames + 1;
        const std::int64_t change = first + recipe.change_offset;

        const double ego_front = recipe.base_position;
        const double lead_front = ego_front + e.d_lead + e.length_lead;
        const double follow_front = ego_front - e.length_ego - e.d_follow;

        auto emit = [&](std::int64_t id, double front_at_change, double speed, double length, VehicleClass cls,
                        bool is_ego) {
            for (std::int64_t f = first; f < first + frames; ++f) {
                TrajectorySample s;
                s.vehicle_id = id;
                s.frame = f;
                s.time = static_cast<double>(f) * recipe.frame_period;
                s.lane = (is_ego && f < change) ? e.origin_lane : e.target_lane;
                s.position = front_at_change + speed * static_cast<double>(f - change) * recipe.frame_period;
                s.velocity = speed;
                s.length = length;
                s.vehicle_class = cls;
                samples.push_back(s);
            }
        };
        emit(ego_id, ego_front, e.v_ego, e.length_ego, e.ego_class, true);
        emit(ego_id + 1, lead_front, e.v_lead, e.length_lead, VehicleClass::car, false);
        emit(ego_id + 2, follow_front, e.v_follow, e.length_follow, VehicleClass::car, false);

        auto x = oracle::evaluate(e, decel, reaction);
        x.ego_id = ego_id;
        x.leader_id = ego_id + 1;
        x.follower_id = ego_id + 2;
        x.frame = change;
        out.expected.push_back(x);
    }
    out.table = TrajectoryTable(std::move(samples), "fixture:" + std::to_string(seed));
    return out;
}

/// Parses a recipe file. Keys mirror `FixtureRecipe`; each
/// `event = origin,target,v_ego,v_lead,v_follow,d_lead,d_follow[,class]`
/// line adds an explicit scene.
inline FixtureRecipe parse_recipe(std::istream& in) {
    FixtureRecipe r;
    bool saw_mode = false;
    auto num = [](const std::string& k, const std::string& v) { return detail::require_double(k, v); };
    auto range = [&](const std::string& k, const std::string& v, double& lo, double& hi) {
        std::vector<std::string_view> parts;
        detail::split_row(v, ',', parts);
        if (parts.size() == 1) {
            lo = hi = num(k, std::string(parts[0]));
        } else if (parts.size() == 2) {
            lo = num(k, std::string(parts[0]));
            hi = num(k, std::string(parts[1]));
        } else {
            throw RecipeError("'" + k + "' expects 'value' or 'min,max'");
        }
        if (lo > hi) throw RecipeError("'" + k + "' has min above max");
    };
    for (const auto& [key, value] : detail::read_key_values(in)) {
        if (key == "mode") {
            saw_mode = true;
            if (value == "explicit") r.mode = FixtureMode::explicit_events;
            else if (value == "random") r.mode = FixtureMode::random;
            else if (value == "mirrored") r.mode = FixtureMode::mirrored;
            else throw RecipeError("unknown fixture mode '" + value + "'");
        } else if (key == "event") {
            std::vector<std::string_view> parts;
            detail::split_row(value, ',', parts);
            if (parts.size() != 7 && parts.size() != 8) {
                throw RecipeError("event expects origin,target,v_ego,v_lead,v_follow,d_lead,d_follow[,class]");
            }
            FixtureEvent e;
            e.origin_lane = static_cast<int>(num(key, std::string(parts[0])));
            e.target_lane = static_cast<int>(num(key, std::string(parts[1])));
            e.v_ego = num(key, std::string(parts[2]));
            e.v_lead = num(key, std::string(parts[3]));
            e.v_follow = num(key, std::string(parts[4]));
            e.d_lead = num(key, std::string(parts[5]));
            e.d_follow = num(key, std::string(parts[6]));
            if (parts.size() == 8) {
                auto cls = parse_vehicle_class(parts[7]);
                if (!cls) throw RecipeError("unknown vehicle class in event line");
                e.ego_class = *cls;
            }
            r.events.push_back(e);
        } else if (key == "count") {
            const double c = num(key, value);
            if (c < 0 || c != std::floor(c)) throw RecipeError("count must be a non-negative integer");
            r.count = static_cast<std::size_t>(c);
        } else if (key == "speed") range(key, value, r.speed_min, r.speed_max);
        else if (key == "lead_delta") range(key, value, r.lead_delta_min, r.lead_delta_max);
        else if (key == "follow_delta") range(key, value, r.follow_delta_min, r.follow_delta_max);
        else if (key == "headway_lead") range(key, value, r.headway_lead_min, r.headway_lead_max);
        else if (key == "headway_follow") range(key, value, r.headway_follow_min, r.headway_follow_max);
        else if (key == "gap_ratio") r.gap_ratio = num(key, value);
        else if (key == "target_lanes") {
            auto lanes = detail::parse_int_set(key, value);
            r.target_lanes.assign(lanes.begin(), lanes.end());
        } else if (key == "direction") r.direction = value;
        else if (key == "vehicle_length") r.vehicle_length = num(key, value);
        else if (key == "frames_per_vehicle") r.frames_per_vehicle = static_cast<int>(num(key, value));
        else if (key == "change_offset") r.change_offset = static_cast<int>(num(key, value));
        else if (key == "frame_period") r.frame_period = num(key, value);
        else throw RecipeError("unknown recipe key '" + key + "'");
    }
    if (!saw_mode && r.events.empty()) r.mode = FixtureMode::random;
    if (r.mode == FixtureMode::explicit_events) {
        if (r.events.empty()) throw RecipeError("explicit recipe lists no events");
    } else if (r.count == 0) {
        throw RecipeError("generated recipe needs count > 0");
    }
    return r;
}

/// Null-symmetric scenes: mirrored pairs, so every ratio has its negation in the sample.
inline FixtureRecipe symmetric_recipe(std::size_t count = 60) {
    FixtureRecipe r;
    r.mode = FixtureMode::mirrored;
    r.count = count;
    r.speed_min = 12.0;
    r.speed_max = 20.0;
    r.follow_delta_min = 0.5;
    r.follow_delta_max = 3.0;
    r.headway_lead_min = r.headway_follow_min = 0.6;
    r.headway_lead_max = r.headway_follow_max = 1.6;
    r.direction = "mixed";
    return r;
}

/// Scenes biased toward the leader: d_lead = 1.5 d_follow, ego and leader
/// at equal speed, follower closing in on the ego.
inline FixtureRecipe leader_biased_recipe(std::size_t count = 60) {
    FixtureRecipe r;
    r.mode = FixtureMode::random;
    r.count = count;
    r.speed_min = 12.0;
    r.speed_max = 20.0;
    r.lead_delta_min = r.lead_delta_max = 0.0;
    r.follow_delta_min = 0.5;
    r.follow_delta_max = 2.5;
    r.headway_follow_min = 0.6;
    r.headway_follow_max = 1.0;
    r.gap_ratio = 1.5;
    r.direction = "mixed";
    return r;
}

inline void write_expected_csv(const std::vector<ExpectedEvent>& rows, std::ostream& out) {
    out << "ego_id,leader_id,follower_id,frame,origin_lane,target_lane,direction,d_lead,d_follow,v_ego,v_lead,"
           "v_follow,th_lead,th_follow,picud_lead,picud_follow,drac_lead,drac_follow,ittc_lead,ittc_follow\n";
    auto f = [](double v) { return detail::format_exact(v); };
    for (const auto& x : rows) {
        out << x.ego_id << ',' << x.leader_id << ',' << x.follower_id << ',' << x.frame << ',' << x.origin_lane << ','
            << x.target_lane << ',' << to_string(x.direction) << ',' << f(x.d_lead) << ',' << f(x.d_follow) << ','
            << f(x.v_ego) << ',' << f(x.v_lead) << ',' << f(x.v_follow) << ',' << f(x.th_lead) << ','
            << f(x.th_follow) << ',' << f(x.picud_lead) << ',' << f(x.picud_follow) << ',' << f(x.drac_lead) << ','
            << f(x.drac_follow) << ',' << f(x.ittc_lead) << ',' << f(x.ittc_follow) << '\n';
    }
}

}

#endif
