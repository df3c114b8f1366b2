#ifndef SSMR_TRAJECTORY_HPP
#define SSMR_TRAJECTORY_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "text.hpp"

namespace ssmr {

inline constexpr double feet_to_meters = 0.3048;

enum class VehicleClass { motorcycle = 1, car = 2, truck = 3 };

inline const char* to_string(VehicleClass c) {
    switch (c) {
        case VehicleClass::motorcycle: return "motorcycle";
        case VehicleClass::car: return "car";
        case VehicleClass::truck: return "truck";
    }
    return "unknown";
}

/// Accepts the NGSIM numeric codes (1, 2, 3) and the names used by `to_string`.
/// "auto" is the NGSIM spelling for passenger cars.
inline std::optional<VehicleClass> parse_vehicle_class(std::string_view text) {
    text = detail::trim(text);
    if (text == "1" || text == "motorcycle") return VehicleClass::motorcycle;
    if (text == "2" || text == "car" || text == "auto") return VehicleClass::car;
    if (text == "3" || text == "truck") return VehicleClass::truck;
    double code = 0.0;
    if (detail::parse_double(text, code)) {
        if (code == 1.0) return VehicleClass::motorcycle;
        if (code == 2.0) return VehicleClass::car;
        if (code == 3.0) return VehicleClass::truck;
    }
    return std::nullopt;
}

enum class UnitSystem { si, feet };

inline const char* to_string(UnitSystem u) { return u == UnitSystem::si ? "si" : "feet"; }

/// One vehicle state at one frame, in SI units.
///
/// `position` is the front bumper along the road axis; the rear of the
/// vehicle sits at `position - length`.
struct TrajectorySample {
    std::int64_t vehicle_id = 0;
    std::int64_t frame = 0;
    double time = 0.0;
    int lane = 0;
    double position = 0.0;
    double velocity = 0.0;
    double length = 0.0;
    VehicleClass vehicle_class = VehicleClass::car;

    double rear() const { return position - length; }

    bool operator==(const TrajectorySample&) const = default;
};

/// Column bindings and unit conventions of a source table.
struct SchemaMap {
    std::string vehicle_id;
    std::string frame;
    /// Optional; when empty, time = frame * frame_period.
    std::string time;
    std::string lane;
    std::string position;
    std::string velocity;
    std::string length;
    std::string vehicle_class;

    UnitSystem units = UnitSystem::si;
    /// Multiplier applied to the raw time column (e.g. 0.001 for milliseconds).
    double time_scale = 1.0;
    double frame_period = 0.1;
    /// A space means "any run of whitespace".
    char delimiter = ',';

    std::set<int> hov_lanes;
    std::set<int> on_ramp_lanes;

    /// NGSIM I-80: feet, lane 1 HOV, lane 7 on-ramp, 10 Hz frames.
    static SchemaMap ngsim_i80() {
        SchemaMap s;
        s.vehicle_id = "Vehicle_ID";
        s.frame = "Frame_ID";
        s.lane = "Lane_ID";
        s.position = "Local_Y";
        s.velocity = "v_Vel";
        s.length = "v_length";
        s.vehicle_class = "v_Class";
        s.units = UnitSystem::feet;
        s.frame_period = 0.1;
        s.hov_lanes = {1};
        s.on_ramp_lanes = {7};
        return s;
    }

    /// The layout written by `write_trajectory_csv`.
    static SchemaMap si() {
        SchemaMap s;
        s.vehicle_id = "vehicle_id";
        s.frame = "frame";
        s.time = "time";
        s.lane = "lane";
        s.position = "position";
        s.velocity = "velocity";
        s.length = "length";
        s.vehicle_class = "class";
        return s;
    }

    /// (field name, bound column) for every field, time included only when bound.
    std::vector<std::pair<std::string, std::string>> bindings() const {
        std::vector<std::pair<std::string, std::string>> out{
            {"vehicle_id", vehicle_id}, {"frame", frame},       {"lane", lane},
            {"position", position},     {"velocity", velocity}, {"length", length},
            {"class", vehicle_class},
        };
        if (!time.empty()) {
            out.emplace_back("time", time);
        }
        return out;
    }

    void validate() const {
        std::set<std::string> seen;
        for (const auto& [field, column] : bindings()) {
            if (column.empty()) {
                throw SchemaError("schema does not bind field '" + field + "'");
            }
            if (!seen.insert(column).second) {
                throw SchemaError("column '" + column + "' is bound to more than one field");
            }
        }
        for (int lane : hov_lanes) {
            if (on_ramp_lanes.count(lane)) {
                throw SchemaError("lane " + std::to_string(lane) + " is declared both HOV and on-ramp");
            }
        }
        if (!(frame_period > 0.0) || !(time_scale > 0.0)) {
            throw SchemaError("frame_period and time_scale must be positive");
        }
    }

    std::set<int> excluded_lanes() const {
        std::set<int> out = hov_lanes;
        out.insert(on_ramp_lanes.begin(), on_ramp_lanes.end());
        return out;
    }
};

/// Reads a `key = value` schema file. Unknown keys are errors.
inline SchemaMap parse_schema_config(std::istream& in, SchemaMap base = SchemaMap{}) {
    for (const auto& [key, value] : detail::read_key_values(in)) {
        if (key == "vehicle_id") base.vehicle_id = value;
        else if (key == "frame") base.frame = value;
        else if (key == "time") base.time = value;
        else if (key == "lane") base.lane = value;
        else if (key == "position") base.position = value;
        else if (key == "velocity") base.velocity = value;
        else if (key == "length") base.length = value;
        else if (key == "class") base.vehicle_class = value;
        else if (key == "units") {
            if (value == "feet" || value == "ft") base.units = UnitSystem::feet;
            else if (value == "si" || value == "m") base.units = UnitSystem::si;
            else throw SchemaError("unknown unit system '" + value + "'");
        } else if (key == "time_scale") base.time_scale = detail::require_double(key, value);
        else if (key == "frame_period") base.frame_period = detail::require_double(key, value);
        else if (key == "delimiter") base.delimiter = detail::parse_delimiter(value);
        else if (key == "hov_lanes") base.hov_lanes = detail::parse_int_set(key, value);
        else if (key == "on_ramp_lanes") base.on_ramp_lanes = detail::parse_int_set(key, value);
        else throw SchemaError("unknown schema key '" + key + "'");
    }
    base.validate();
    return base;
}

/// `preset:ngsim-i80`, `preset:si`, or a path to a schema file.
inline SchemaMap load_schema(const std::string& spec) {
    if (spec == "preset:ngsim-i80") return SchemaMap::ngsim_i80();
    if (spec == "preset:si") return SchemaMap::si();
    if (spec.rfind("preset:", 0) == 0) {
        throw SchemaError("unknown schema preset '" + spec + "'");
    }
    std::ifstream in(spec);
    if (!in) {
        throw SchemaError("cannot open schema file '" + spec + "'");
    }
    return parse_schema_config(in);
}

struct IngestDiagnostics {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::size_t duplicate_count = 0;
    /// Rows that parsed but broke a sample invariant (velocity < 0, length <= 0, time not increasing).
    std::size_t invariant_failures = 0;
    std::map<std::string, std::size_t> per_column_parse_failures;

    bool operator==(const IngestDiagnostics&) const = default;
};

/// Immutable, indexed set of trajectory samples.
class TrajectoryTable {
public:
    TrajectoryTable() = default;

    /// Throws InvalidInput on duplicate (vehicle_id, frame) pairs or on sample invariant violations.
    explicit TrajectoryTable(std::vector<TrajectorySample> samples, std::string source = {},
                             UnitSystem source_units = UnitSystem::si, IngestDiagnostics diagnostics = {})
        : samples_(std::move(samples)),
          source_(std::move(source)),
          source_units_(source_units),
          diagnostics_(std::move(diagnostics)) {
        std::sort(samples_.begin(), samples_.end(), [](const auto& a, const auto& b) {
            return std::tie(a.vehicle_id, a.frame) < std::tie(b.vehicle_id, b.frame);
        });
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            const auto& s = samples_[i];
            if (!(s.velocity >= 0.0) || !(s.length > 0.0) || !std::isfinite(s.position) || !std::isfinite(s.time)) {
                throw InvalidInput("sample of vehicle " + std::to_string(s.vehicle_id) + " at frame " +
                                   std::to_string(s.frame) + " violates velocity/length invariants");
            }
            if (i > 0 && samples_[i - 1].vehicle_id == s.vehicle_id) {
                if (samples_[i - 1].frame == s.frame) {
                    throw InvalidInput("duplicate sample for vehicle " + std::to_string(s.vehicle_id) +
                                       " at frame " + std::to_string(s.frame));
                }
                if (!(samples_[i - 1].time < s.time)) {
                    throw InvalidInput("time does not increase for vehicle " + std::to_string(s.vehicle_id));
                }
            }
        }
        build_index();
    }

    std::span<const TrajectorySample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }

    const std::string& source() const { return source_; }
    UnitSystem source_units() const { return source_units_; }
    const IngestDiagnostics& diagnostics() const { return diagnostics_; }

    std::vector<std::int64_t> vehicle_ids() const {
        std::vector<std::int64_t> ids;
        ids.reserve(vehicles_.size());
        for (const auto& [id, range] : vehicles_) ids.push_back(id);
        return ids;
    }

    /// Samples of one vehicle ordered by frame; empty if the id is unknown.
    std::span<const TrajectorySample> trajectory(std::int64_t vehicle_id) const {
        auto it = vehicles_.find(vehicle_id);
        if (it == vehicles_.end()) return {};
        return std::span<const TrajectorySample>(samples_).subspan(it->second.first, it->second.second);
    }

    const TrajectorySample* sample_at(std::int64_t vehicle_id, std::int64_t frame) const {
        auto traj = trajectory(vehicle_id);
        auto it = std::lower_bound(traj.begin(), traj.end(), frame,
                                   [](const TrajectorySample& s, std::int64_t f) { return s.frame < f; });
        if (it == traj.end() || it->frame != frame) return nullptr;
        return &*it;
    }

    /// Samples in `lane` at `frame`, by ascending position, ties by ascending vehicle id.
    std::vector<TrajectorySample> vehicles_in_lane_at_frame(int lane, std::int64_t frame) const {
        std::vector<TrajectorySample> out;
        auto it = lane_index_.find({frame, lane});
        if (it == lane_index_.end()) return out;
        out.reserve(it->second.size());
        for (std::size_t idx : it->second) out.push_back(samples_[idx]);
        return out;
    }

    bool operator==(const TrajectoryTable& other) const { return samples_ == other.samples_; }

private:
    void build_index() {
        std::size_t begin = 0;
        for (std::size_t i = 1; i <= samples_.size(); ++i) {
            if (i == samples_.size() || samples_[i].vehicle_id != samples_[begin].vehicle_id) {
                vehicles_.emplace(samples_[begin].vehicle_id, std::make_pair(begin, i - begin));
                begin = i;
            }
        }
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            lane_index_[{samples_[i].frame, samples_[i].lane}].push_back(i);
        }
        for (auto& [key, indices] : lane_index_) {
            std::sort(indices.begin(), indices.end(), [this](std::size_t a, std::size_t b) {
                const auto& sa = samples_[a];
                const auto& sb = samples_[b];
                return std::tie(sa.position, sa.vehicle_id) < std::tie(sb.position, sb.vehicle_id);
            });
        }
    }

    std::vector<TrajectorySample> samples_;
    std::map<std::int64_t, std::pair<std::size_t, std::size_t>> vehicles_;
    std::map<std::pair<std::int64_t, int>, std::vector<std::size_t>> lane_index_;
    std::string source_;
    UnitSystem source_units_ = UnitSystem::si;
    IngestDiagnostics diagnostics_;
};

/// Parses a header-bearing delimited table into SI samples.
///
/// Malformed rows are skipped and counted; the first of two rows sharing
/// (vehicle_id, frame) wins. Throws SchemaError if a bound column is absent
/// from the header and EmptyTableError if no row survives.
inline TrajectoryTable parse_trajectory_csv(std::istream& in, const SchemaMap& schema, std::string source = {}) {
    schema.validate();

    std::string line;
    std::vector<std::string_view> cells;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!detail::trim(line).empty()) {
            detail::split_row(line, schema.delimiter, cells);
            for (auto c : cells) header.emplace_back(detail::unquote(c));
            break;
        }
    }
    if (header.empty()) {
        throw EmptyTableError("input has no header row");
    }

    auto column_of = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw SchemaError("bound column '" + name + "' is missing from the header");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_id = column_of(schema.vehicle_id);
    const std::size_t c_frame = column_of(schema.frame);
    const std::size_t c_lane = column_of(schema.lane);
    const std::size_t c_pos = column_of(schema.position);
    const std::size_t c_vel = column_of(schema.velocity);
    const std::size_t c_len = column_of(schema.length);
    const std::size_t c_class = column_of(schema.vehicle_class);
    const bool has_time = !schema.time.empty();
    const std::size_t c_time = has_time ? column_of(schema.time) : 0;

    const double scale = schema.units == UnitSystem::feet ? feet_to_meters : 1.0;

    IngestDiagnostics diag;
    std::map<std::pair<std::int64_t, std::int64_t>, TrajectorySample> kept;

    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++diag.rows_read;
        detail::split_row(line, schema.delimiter, cells);

        bool ok = true;
        auto fail = [&](const std::string& column) {
            ++diag.per_column_parse_failures[column];
            ok = false;
        };
        auto number = [&](std::size_t col, const std::string& name) -> double {
            double v = 0.0;
            if (col >= cells.size() || !detail::parse_double(detail::unquote(cells[col]), v) || !std::isfinite(v)) {
                fail(name);
            }
            return v;
        };
        auto integer = [&](std::size_t col, const std::string& name) -> std::int64_t {
            double v = number(col, name);
            if (ok && (v != std::floor(v) || std::fabs(v) > 9.0e15)) {
                fail(name);
                return 0;
            }
            return static_cast<std::int64_t>(v);
        };

        TrajectorySample s;
        s.vehicle_id = integer(c_id, schema.vehicle_id);
        s.frame = integer(c_frame, schema.frame);
        s.lane = static_cast<int>(integer(c_lane, schema.lane));
        s.position = number(c_pos, schema.position) * scale;
        s.velocity = number(c_vel, schema.velocity) * scale;
        s.length = number(c_len, schema.length) * scale;
        if (has_time) {
            s.time = number(c_time, schema.time) * schema.time_scale;
        } else {
            s.time = static_cast<double>(s.frame) * schema.frame_period;
        }
        if (c_class < cells.size()) {
            if (auto cls = parse_vehicle_class(detail::unquote(cells[c_class]))) {
                s.vehicle_class = *cls;
            } else {
                fail(schema.vehicle_class);
            }
        } else {
            fail(schema.vehicle_class);
        }

        if (!ok) {
            ++diag.rows_dropped;
            continue;
        }
        if (!(s.velocity >= 0.0) || !(s.length > 0.0)) {
            ++diag.invariant_failures;
            ++diag.rows_dropped;
            continue;
        }
        if (!kept.emplace(std::make_pair(s.vehicle_id, s.frame), s).second) {
            ++diag.duplicate_count;
            ++diag.rows_dropped;
        }
    }

    std::vector<TrajectorySample> samples;
    samples.reserve(kept.size());
    for (auto& [key, s] : kept) {
        if (!samples.empty() && samples.back().vehicle_id == s.vehicle_id && !(samples.back().time < s.time)) {
            ++diag.invariant_failures;
            ++diag.rows_dropped;
            continue;
        }
        samples.push_back(s);
    }
    if (samples.empty()) {
        throw EmptyTableError("no valid trajectory rows in '" + source + "'");
    }
    return TrajectoryTable(std::move(samples), std::move(source), schema.units, std::move(diag));
}

inline TrajectoryTable read_trajectory_file(const std::string& path, const SchemaMap& schema) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open trajectory file '" + path + "'");
    }
    return parse_trajectory_csv(in, schema, path);
}

/// Writes the table in the `SchemaMap::si()` layout with round-trip exact numbers.
inline void write_trajectory_csv(const TrajectoryTable& table, std::ostream& out) {
    out << "vehicle_id,frame,time,lane,position,velocity,length,class\n";
    for (const auto& s : table.samples()) {
        out << s.vehicle_id << ',' << s.frame << ',' << detail::format_exact(s.time) << ',' << s.lane << ','
            << detail::format_exact(s.position) << ',' << detail::format_exact(s.velocity) << ','
            << detail::format_exact(s.length) << ',' << static_cast<int>(s.vehicle_class) << '\n';
    }
}

/// Centered moving average of position and velocity per vehicle; the window
/// shrinks symmetrically near trajectory ends. `window` must be odd.
inline TrajectoryTable smooth_moving_average(const TrajectoryTable& table, int window) {
    if (window < 1 || window % 2 == 0) {
        throw ConfigError("smoothing window must be a positive odd integer");
    }
    std::vector<TrajectorySample> out;
    out.reserve(table.size());
    const int half = window / 2;
    for (auto id : table.vehicle_ids()) {
        auto traj = table.trajectory(id);
        const auto n = static_cast<std::ptrdiff_t>(traj.size());
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const std::ptrdiff_t h = std::min<std::ptrdiff_t>({half, i, n - 1 - i});
            double pos = 0.0;
            double vel = 0.0;
            for (std::ptrdiff_t j = i - h; j <= i + h; ++j) {
                pos += traj[j].position;
                vel += traj[j].velocity;
            }
            TrajectorySample s = traj[i];
            s.position = pos / static_cast<double>(2 * h + 1);
            s.velocity = vel / static_cast<double>(2 * h + 1);
            out.push_back(s);
        }
    }
    return TrajectoryTable(std::move(out), table.source(), table.source_units(), table.diagnostics());
}

}

#endif
