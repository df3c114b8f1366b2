#ifndef SSMR_PIPELINE_HPP
#define SSMR_PIPELINE_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "events.hpp"
#include "histogram.hpp"
#include "ratio.hpp"
#include "ssm.hpp"
#include "stats.hpp"
#include "trajectory.hpp"

namespace ssmr {

struct StatsOptions {
    double alpha = 0.05;
    stats::WilcoxonMode wilcoxon_mode = stats::WilcoxonMode::automatic;
    stats::ZeroPolicy zero_policy = stats::ZeroPolicy::discard;
    stats::PAdjust dunn_adjustment = stats::PAdjust::bonferroni;
    stats::SpearmanMethod spearman_method = stats::SpearmanMethod::automatic;
};

struct AnalysisConfig {
    std::string input_path;
    std::string schema_spec = "preset:ngsim-i80";
    SchemaMap schema = SchemaMap::ngsim_i80();
    EventFilterConfig filters;
    SsmParams ssm;
    StatsOptions stats;
    int bins = 20;
    PositiveRatioForm positive_form = PositiveRatioForm::corrected;
    /// Lane-within-direction tests need at least this many events in every lane.
    std::size_t min_group_size = 5;
    /// Moving-average window for positions and speeds; 0 disables smoothing.
    int smoothing_window = 0;
    std::string output_dir;

    void validate() const {
        if (bins < 2) throw ConfigError("bin count must be at least 2");
        stats::validate_alpha(stats.alpha);
        filters.validate();
        ssm.validate();
        if (smoothing_window != 0 && (smoothing_window < 1 || smoothing_window % 2 == 0)) {
            throw ConfigError("smoothing window must be a positive odd integer");
        }
    }

    /// Filter settings with the schema's HOV and on-ramp lanes excluded.
    EventFilterConfig effective_filters() const {
        EventFilterConfig f = filters;
        for (int lane : schema.excluded_lanes()) f.excluded_lanes.insert(lane);
        return f;
    }
};

/// A kept event with its SSM pairs and ratios; a ratio is empty when both sides are zero.
struct EventRecord {
    LaneChangeEvent event;
    std::array<SsmPair, 4> pairs;
    std::array<std::optional<double>, 4> ratios;
};

struct SsmSummary {
    SsmKind kind = SsmKind::th;
    std::size_t defined = 0;
    std::size_t dropped = 0;
    std::optional<stats::TestReport> wilcoxon;
    std::string skipped;
    /// Ratios at exactly +1 and -1.
    std::size_t at_plus_one = 0;
    std::size_t at_minus_one = 0;
};

struct CorrelationCell {
    SsmKind kind = SsmKind::th;
    std::string variable;
    std::optional<stats::TestReport> report;
    std::string skipped;
};

struct GroupedTest {
    /// "lane", "direction", "lane_left" or "lane_right".
    std::string grouping;
    SsmKind kind = SsmKind::th;
    std::vector<std::string> labels;
    std::optional<stats::TestReport> kruskal_wallis;
    std::optional<stats::DunnResult> dunn;
    std::string skipped;
};

struct LaneWilcoxonCell {
    SsmKind kind = SsmKind::th;
    Direction direction = Direction::left;
    int lane = 0;
    std::optional<stats::TestReport> report;
    std::string skipped;
};

struct HistogramSet {
    SsmKind kind = SsmKind::th;
    /// "all", "left" or "right".
    std::string subset;
    std::vector<HistogramBin> bins;
};

struct AnalysisReport {
    IngestDiagnostics ingest;
    EventAccounting accounting;
    std::vector<EventRecord> events;
    std::array<SsmSummary, 4> summaries;
    std::vector<CorrelationCell> correlations;
    std::vector<GroupedTest> grouped;
    std::vector<LaneWilcoxonCell> lane_wilcoxon;
    std::vector<HistogramSet> histograms;
};

namespace detail {

inline std::string first_emptying_filter(const EventAccounting& acc) {
    if (acc.total_candidates == 0) return "detection";
    std::size_t left = acc.total_candidates;
    for (auto reason : all_reject_reasons) {
        auto it = acc.rejected.find(reason);
        if (it == acc.rejected.end()) continue;
        left -= it->second;
        if (left == 0) return to_string(reason);
    }
    return "unknown";
}

struct KindSample {
    std::vector<double> ratios;
    std::vector<const EventRecord*> events;
};

inline KindSample defined_ratios(const std::vector<EventRecord>& events, SsmKind kind) {
    KindSample s;
    for (const auto& e : events) {
        if (const auto& r = e.ratios[index_of(kind)]) {
            s.ratios.push_back(*r);
            s.events.push_back(&e);
        }
    }
    return s;
}

inline std::optional<stats::TestReport> try_wilcoxon(const std::vector<double>& sample, const StatsOptions& o,
                                                     std::string& skipped) {
    if (sample.empty()) {
        skipped = "no defined ratios";
        return std::nullopt;
    }
    try {
        stats::WilcoxonOptions w;
        w.alternative = stats::Alternative::greater;
        w.mode = o.wilcoxon_mode;
        w.zero_policy = o.zero_policy;
        w.alpha = o.alpha;
        return stats::wilcoxon_signed_rank(sample, w);
    } catch (const InvalidInput& e) {
        skipped = e.what();
        return std::nullopt;
    }
}

inline GroupedTest grouped_test(std::string grouping, SsmKind kind, const std::map<std::string, std::vector<double>>& groups,
                                std::size_t min_group_size, const StatsOptions& o) {
    GroupedTest g;
    g.grouping = std::move(grouping);
    g.kind = kind;
    stats::Groups data;
    for (const auto& [label, values] : groups) {
        if (values.empty()) continue;
        g.labels.push_back(label);
        data.push_back(values);
    }
    if (data.size() < 2) {
        g.skipped = "fewer than two non-empty groups";
        return g;
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].size() < min_group_size) {
            g.skipped = "group '" + g.labels[i] + "' has fewer than " + std::to_string(min_group_size) + " events";
            return g;
        }
    }
    try {
        g.kruskal_wallis = stats::kruskal_wallis(data, o.alpha);
        if (g.kruskal_wallis->reject) {
            g.dunn = stats::dunn_posthoc(data, o.dunn_adjustment, o.alpha);
        }
    } catch (const InvalidInput& e) {
        g.skipped = e.what();
    }
    return g;
}

inline std::string lane_label(int lane) { return "lane " + std::to_string(lane); }

}

/// Builds every event record, summary and test for an already-loaded table.
/// Throws NoEventsError when the filters leave nothing.
inline AnalysisReport run_analysis(const TrajectoryTable& input, const AnalysisConfig& cfg) {
    cfg.validate();
    const TrajectoryTable smoothed =
        cfg.smoothing_window > 1 ? smooth_moving_average(input, cfg.smoothing_window) : TrajectoryTable{};
    const TrajectoryTable& table = cfg.smoothing_window > 1 ? smoothed : input;

    AnalysisReport rep;
    rep.ingest = input.diagnostics();
    auto extracted = extract_events(table, cfg.effective_filters());
    rep.accounting = extracted.accounting;
    if (extracted.kept.empty()) {
        throw NoEventsError(detail::first_emptying_filter(rep.accounting));
    }

    for (auto& ev : extracted.kept) {
        EventRecord rec;
        rec.pairs = compute_ssm_pairs(ev, cfg.ssm);
        for (auto kind : all_ssm_kinds) {
            try {
                rec.ratios[index_of(kind)] = oriented_ratio(rec.pairs[index_of(kind)], cfg.positive_form).value;
            } catch (const UndefinedRatio&) {
                rec.ratios[index_of(kind)].reset();
            }
        }
        rec.event = std::move(ev);
        rep.events.push_back(std::move(rec));
    }

    const auto& so = cfg.stats;
    for (auto kind : all_ssm_kinds) {
        const auto sample = detail::defined_ratios(rep.events, kind);
        auto& sum = rep.summaries[index_of(kind)];
        sum.kind = kind;
        sum.defined = sample.ratios.size();
        sum.dropped = rep.events.size() - sample.ratios.size();
        for (double r : sample.ratios) {
            if (r == 1.0) ++sum.at_plus_one;
            if (r == -1.0) ++sum.at_minus_one;
        }
        sum.wilcoxon = detail::try_wilcoxon(sample.ratios, so, sum.skipped);

        // Correlation of the ratio with each vehicle's speed.
        const std::array<std::pair<const char*, double KinematicSnapshot::*>, 3> speeds{{
            {"v_ego", &KinematicSnapshot::v_ego},
            {"v_lead", &KinematicSnapshot::v_lead},
            {"v_follow", &KinematicSnapshot::v_follow},
        }};
        for (const auto& [name, member] : speeds) {
            CorrelationCell cell;
            cell.kind = kind;
            cell.variable = name;
            std::vector<double> v;
            for (const auto* e : sample.events) v.push_back(e->event.snapshot.*member);
            try {
                stats::SpearmanOptions sp;
                sp.alpha = so.alpha;
                sp.method = so.spearman_method;
                cell.report = stats::spearman(v, sample.ratios, sp);
            } catch (const InvalidInput& e) {
                cell.skipped = e.what();
            }
            rep.correlations.push_back(std::move(cell));
        }

        std::map<std::string, std::vector<double>> by_lane, by_direction, left_lanes, right_lanes;
        std::map<int, std::vector<double>> left_by_lane_id;
        std::vector<double> left, right;
        for (std::size_t i = 0; i < sample.ratios.size(); ++i) {
            const auto& ev = sample.events[i]->event;
            const double r = sample.ratios[i];
            by_lane[detail::lane_label(ev.target_lane)].push_back(r);
            by_direction[to_string(ev.direction)].push_back(r);
            if (ev.direction == Direction::left) {
                left_lanes[detail::lane_label(ev.target_lane)].push_back(r);
                left_by_lane_id[ev.target_lane].push_back(r);
                left.push_back(r);
            } else {
                right_lanes[detail::lane_label(ev.target_lane)].push_back(r);
                right.push_back(r);
            }
        }
        rep.grouped.push_back(detail::grouped_test("lane", kind, by_lane, 1, so));
        rep.grouped.push_back(detail::grouped_test("direction", kind, by_direction, 1, so));
        rep.grouped.push_back(detail::grouped_test("lane_left", kind, left_lanes, cfg.min_group_size, so));
        rep.grouped.push_back(detail::grouped_test("lane_right", kind, right_lanes, cfg.min_group_size, so));

        for (const auto& [lane, values] : left_by_lane_id) {
            LaneWilcoxonCell cell;
            cell.kind = kind;
            cell.direction = Direction::left;
            cell.lane = lane;
            cell.report = detail::try_wilcoxon(values, so, cell.skipped);
            rep.lane_wilcoxon.push_back(std::move(cell));
        }

        rep.histograms.push_back({kind, "all", histogram(sample.ratios, cfg.bins)});
        rep.histograms.push_back({kind, "left", histogram(left, cfg.bins)});
        rep.histograms.push_back({kind, "right", histogram(right, cfg.bins)});
    }
    return rep;
}

inline AnalysisReport run_analysis(const AnalysisConfig& cfg) {
    cfg.validate();
    const auto table = read_trajectory_file(cfg.input_path, cfg.schema);
    return run_analysis(table, cfg);
}

}

#endif
