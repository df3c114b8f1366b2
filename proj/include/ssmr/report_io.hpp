#ifndef SSMR_REPORT_IO_HPP
#define SSMR_REPORT_IO_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pipeline.hpp"
#include "reference_values.hpp"
#include "text.hpp"

namespace ssmr {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round_sig12(v);
}

inline std::string csv_number(double v) { return std::isfinite(v) ? format_sig12(v) : std::string(); }

inline std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

}

/// {test, statistic, p_value, n, alternative, alpha, reject, method}; n is a
/// number for one-sample tests and an array of group sizes otherwise.
inline ordered_json to_json(const stats::TestReport& r) {
    ordered_json j;
    j["test"] = r.test;
    j["statistic"] = detail::number(r.statistic);
    j["p_value"] = detail::number(r.p_value);
    if (r.sizes.size() == 1) {
        j["n"] = r.sizes.front();
    } else {
        j["n"] = r.sizes;
    }
    j["alternative"] = to_string(r.alternative);
    j["alpha"] = detail::number(r.alpha);
    j["reject"] = r.reject;
    j["method"] = r.method;
    return j;
}

inline ordered_json to_json(const IngestDiagnostics& d) {
    ordered_json j;
    j["rows_read"] = d.rows_read;
    j["rows_dropped"] = d.rows_dropped;
    j["duplicate_count"] = d.duplicate_count;
    j["invariant_failures"] = d.invariant_failures;
    ordered_json per = ordered_json::object();
    for (const auto& [column, count] : d.per_column_parse_failures) per[column] = count;
    j["per_column_parse_failures"] = per;
    return j;
}

/// Lane x direction grid of kept events plus the filter bookkeeping.
inline ordered_json to_json(const EventAccounting& a) {
    ordered_json j;
    j["total_candidates"] = a.total_candidates;
    j["multi_lane_jumps"] = a.multi_lane_jumps;
    ordered_json rejected = ordered_json::object();
    for (auto reason : all_reject_reasons) {
        auto it = a.rejected.find(reason);
        rejected[to_string(reason)] = it == a.rejected.end() ? 0 : it->second;
    }
    j["rejected"] = rejected;
    j["kept_without_lane_exclusion"] = a.kept_without_lane_exclusion;
    j["kept"] = a.kept;
    ordered_json lanes = ordered_json::array();
    for (const auto& [lane, c] : a.grid) {
        lanes.push_back({{"lane", lane}, {"right", c.right}, {"left", c.left}, {"total", c.total()}});
    }
    j["lanes"] = lanes;
    const auto t = a.direction_totals();
    j["totals"] = {{"right", t.right}, {"left", t.left}, {"total", t.total()}};
    return j;
}

inline ordered_json to_json(const stats::DunnResult& d, const std::vector<std::string>& labels) {
    ordered_json j;
    j["adjustment"] = to_string(d.adjustment);
    ordered_json rows = ordered_json::array();
    for (const auto& c : d.comparisons) {
        ordered_json row;
        row["first"] = labels.at(c.first);
        row["second"] = labels.at(c.second);
        row["raw_p_value"] = detail::number(c.raw_p);
        row["report"] = to_json(c.report);
        rows.push_back(row);
    }
    j["comparisons"] = rows;
    return j;
}

inline ordered_json event_to_json(const EventRecord& e) {
    const auto& ev = e.event;
    const auto& s = ev.snapshot;
    ordered_json j;
    j["ego_id"] = ev.ego_id;
    j["leader_id"] = ev.leader_id ? ordered_json(*ev.leader_id) : ordered_json(nullptr);
    j["follower_id"] = ev.follower_id ? ordered_json(*ev.follower_id) : ordered_json(nullptr);
    j["frame"] = ev.frame;
    j["origin_lane"] = ev.origin_lane;
    j["target_lane"] = ev.target_lane;
    j["direction"] = to_string(ev.direction);
    j["d_lead"] = detail::number(s.d_lead);
    j["d_follow"] = detail::number(s.d_follow);
    j["v_ego"] = detail::number(s.v_ego);
    j["v_lead"] = detail::number(s.v_lead);
    j["v_follow"] = detail::number(s.v_follow);
    j["length_ego"] = detail::number(s.length_ego);
    j["length_lead"] = detail::number(s.length_lead);
    j["length_follow"] = detail::number(s.length_follow);
    ordered_json ssm = ordered_json::object();
    for (auto kind : all_ssm_kinds) {
        const auto& p = e.pairs[index_of(kind)];
        const auto& r = e.ratios[index_of(kind)];
        ssm[to_string(kind)] = {{"lead", detail::number(p.lead_value)},
                                {"follow", detail::number(p.follow_value)},
                                {"ratio", r ? detail::number(*r) : ordered_json(nullptr)}};
    }
    j["ssm"] = ssm;
    return j;
}

inline ordered_json events_to_json(const std::vector<EventRecord>& events) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : events) arr.push_back(event_to_json(e));
    return arr;
}

inline void write_events_csv(const std::vector<EventRecord>& events, std::ostream& out) {
    out << "ego_id,leader_id,follower_id,frame,origin_lane,target_lane,direction,d_lead,d_follow,v_ego,v_lead,"
           "v_follow,length_ego,length_lead,length_follow";
    for (auto kind : all_ssm_kinds) {
        const std::string k = to_string(kind);
        out << ',' << k << "_lead," << k << "_follow," << k << "_ratio";
    }
    out << '\n';
    for (const auto& e : events) {
        const auto& ev = e.event;
        const auto& s = ev.snapshot;
        out << ev.ego_id << ',' << (ev.leader_id ? std::to_string(*ev.leader_id) : "") << ','
            << (ev.follower_id ? std::to_string(*ev.follower_id) : "") << ',' << ev.frame << ',' << ev.origin_lane
            << ',' << ev.target_lane << ',' << to_string(ev.direction) << ',' << detail::csv_number(s.d_lead) << ','
            << detail::csv_number(s.d_follow) << ',' << detail::csv_number(s.v_ego) << ','
            << detail::csv_number(s.v_lead) << ',' << detail::csv_number(s.v_follow) << ','
            << detail::csv_number(s.length_ego) << ',' << detail::csv_number(s.length_lead) << ','
            << detail::csv_number(s.length_follow);
        for (auto kind : all_ssm_kinds) {
            const auto& p = e.pairs[index_of(kind)];
            out << ',' << detail::csv_number(p.lead_value) << ',' << detail::csv_number(p.follow_value) << ','
                << detail::csv_optional(e.ratios[index_of(kind)]);
        }
        out << '\n';
    }
}

inline ordered_json config_to_json(const AnalysisConfig& cfg) {
    ordered_json j;
    j["input"] = cfg.input_path;
    j["schema"] = cfg.schema_spec;
    j["th_max"] = detail::number(cfg.filters.th_max);
    ordered_json excluded = ordered_json::array();
    for (int lane : cfg.effective_filters().excluded_lanes) excluded.push_back(lane);
    j["excluded_lanes"] = excluded;
    j["lane_exclusion"] =
        cfg.filters.lane_exclusion == LaneExclusion::origin_or_target ? "origin_or_target" : "target_only";
    j["deceleration"] = detail::number(cfg.ssm.deceleration);
    j["reaction_time"] = detail::number(cfg.ssm.reaction_time);
    j["alpha"] = detail::number(cfg.stats.alpha);
    j["zero_policy"] = cfg.stats.zero_policy == stats::ZeroPolicy::discard ? "discard" : "pratt";
    j["dunn_adjustment"] = to_string(cfg.stats.dunn_adjustment);
    j["bins"] = cfg.bins;
    j["positive_ratio_form"] = cfg.positive_form == PositiveRatioForm::corrected ? "corrected" : "literal";
    j["min_group_size"] = cfg.min_group_size;
    j["smoothing_window"] = cfg.smoothing_window;
    return j;
}

/// Whole-run summary. Key order is fixed and numbers carry at most 12 significant digits.
inline ordered_json report_to_json(const AnalysisReport& rep, const AnalysisConfig& cfg) {
    ordered_json j;
    j["config"] = config_to_json(cfg);
    j["ingest"] = to_json(rep.ingest);
    j["accounting"] = to_json(rep.accounting);

    ordered_json overall = ordered_json::array();
    for (const auto& s : rep.summaries) {
        ordered_json row;
        row["ssm"] = to_string(s.kind);
        row["defined"] = s.defined;
        row["dropped"] = s.dropped;
        row["ratio_plus_one"] = s.at_plus_one;
        row["ratio_minus_one"] = s.at_minus_one;
        row["wilcoxon"] = s.wilcoxon ? to_json(*s.wilcoxon) : ordered_json(nullptr);
        if (!s.skipped.empty()) row["skipped"] = s.skipped;
        overall.push_back(row);
    }
    j["wilcoxon_overall"] = overall;

    ordered_json corr = ordered_json::array();
    for (const auto& c : rep.correlations) {
        ordered_json row;
        row["ssm"] = to_string(c.kind);
        row["variable"] = c.variable;
        row["spearman"] = c.report ? to_json(*c.report) : ordered_json(nullptr);
        if (!c.skipped.empty()) row["skipped"] = c.skipped;
        corr.push_back(row);
    }
    j["spearman"] = corr;

    ordered_json grouped = ordered_json::array();
    for (const auto& g : rep.grouped) {
        ordered_json row;
        row["grouping"] = g.grouping;
        row["ssm"] = to_string(g.kind);
        row["groups"] = g.labels;
        row["kruskal_wallis"] = g.kruskal_wallis ? to_json(*g.kruskal_wallis) : ordered_json(nullptr);
        row["dunn"] = g.dunn ? to_json(*g.dunn, g.labels) : ordered_json(nullptr);
        if (!g.skipped.empty()) row["skipped"] = g.skipped;
        grouped.push_back(row);
    }
    j["kruskal_wallis"] = grouped;

    ordered_json lanes = ordered_json::array();
    for (const auto& c : rep.lane_wilcoxon) {
        ordered_json row;
        row["ssm"] = to_string(c.kind);
        row["direction"] = to_string(c.direction);
        row["lane"] = c.lane;
        row["wilcoxon"] = c.report ? to_json(*c.report) : ordered_json(nullptr);
        if (!c.skipped.empty()) row["skipped"] = c.skipped;
        lanes.push_back(row);
    }
    j["wilcoxon_by_lane"] = lanes;

    ordered_json hists = ordered_json::array();
    for (const auto& h : rep.histograms) {
        ordered_json row;
        row["ssm"] = to_string(h.kind);
        row["subset"] = h.subset;
        ordered_json counts = ordered_json::array();
        for (const auto& b : h.bins) counts.push_back(b.count);
        row["low"] = -1;
        row["high"] = 1;
        row["counts"] = counts;
        hists.push_back(row);
    }
    j["histograms"] = hists;
    return j;
}

/// Rows of (table, item, quantity, reference, observed) against the reference I-80 results.
inline void write_reference_comparison(const AnalysisReport& rep, std::ostream& out) {
    out << "table,item,quantity,reference,observed\n";
    auto row = [&](const std::string& table, const std::string& item, const std::string& quantity, double ref,
                   std::optional<double> obs) {
        out << table << ',' << item << ',' << quantity << ',' << detail::csv_number(ref) << ','
            << detail::csv_optional(obs) << '\n';
    };
    const auto& acc = rep.accounting;
    row("events", "all", "kept_without_lane_exclusion", static_cast<double>(reference::kept_before_lane_exclusion),
        static_cast<double>(acc.kept_without_lane_exclusion));
    row("events", "all", "kept", static_cast<double>(reference::kept_events), static_cast<double>(acc.kept));
    const auto totals = acc.direction_totals();
    row("events", "all", "left", static_cast<double>(reference::left_events), static_cast<double>(totals.left));
    row("events", "all", "right", static_cast<double>(reference::right_events), static_cast<double>(totals.right));
    for (const auto& lc : reference::lane_counts) {
        auto it = acc.grid.find(lc.lane);
        const DirectionCounts c = it == acc.grid.end() ? DirectionCounts{} : it->second;
        const std::string item = "lane " + std::to_string(lc.lane);
        row("events", item, "right", static_cast<double>(lc.right), static_cast<double>(c.right));
        row("events", item, "left", static_cast<double>(lc.left), static_cast<double>(c.left));
        row("events", item, "total", static_cast<double>(lc.total), static_cast<double>(c.total()));
    }
    const auto& drac = rep.summaries[index_of(SsmKind::drac)];
    row("ratios", "DRAC", "follower_only_collision_course", static_cast<double>(reference::drac_follower_only),
        static_cast<double>(drac.at_plus_one));
    row("ratios", "DRAC", "leader_only_collision_course", static_cast<double>(reference::drac_leader_only),
        static_cast<double>(drac.at_minus_one));

    for (const auto& r : reference::wilcoxon_overall) {
        const auto& w = rep.summaries[index_of(r.kind)].wilcoxon;
        row("wilcoxon_overall", to_string(r.kind), "W", r.statistic, w ? std::optional(w->statistic) : std::nullopt);
        row("wilcoxon_overall", to_string(r.kind), "p_value", r.p_value,
            w ? std::optional(w->p_value) : std::nullopt);
    }
    static const char* variables[] = {"v_ego", "v_lead", "v_follow"};
    for (const auto& r : reference::spearman) {
        for (std::size_t v = 0; v < 3; ++v) {
            std::optional<stats::TestReport> found;
            for (const auto& c : rep.correlations) {
                if (c.kind == r.kind && c.variable == variables[v]) found = c.report;
            }
            const std::string item = std::string(to_string(r.kind)) + " vs " + variables[v];
            row("spearman", item, "rho", r.rho[v], found ? std::optional(found->statistic) : std::nullopt);
            row("spearman", item, "p_value", r.p_value[v], found ? std::optional(found->p_value) : std::nullopt);
        }
    }
    auto kw_rows = [&](const char* table, const char* grouping, const auto& refs) {
        for (const auto& r : refs) {
            std::optional<stats::TestReport> found;
            for (const auto& g : rep.grouped) {
                if (g.kind == r.kind && g.grouping == grouping) found = g.kruskal_wallis;
            }
            row(table, to_string(r.kind), "H", r.statistic, found ? std::optional(found->statistic) : std::nullopt);
            row(table, to_string(r.kind), "p_value", r.p_value, found ? std::optional(found->p_value) : std::nullopt);
        }
    };
    kw_rows("kruskal_by_lane", "lane", reference::kruskal_by_lane);
    kw_rows("kruskal_by_direction", "direction", reference::kruskal_by_direction);
    kw_rows("kruskal_left_by_lane", "lane_left", reference::kruskal_left_by_lane);
    for (const auto& r : reference::wilcoxon_left_by_lane) {
        std::optional<stats::TestReport> found;
        for (const auto& c : rep.lane_wilcoxon) {
            if (c.kind == r.kind && c.lane == r.lane && c.direction == Direction::left) found = c.report;
        }
        const std::string item = std::string(to_string(r.kind)) + " lane " + std::to_string(r.lane);
        row("wilcoxon_left_by_lane", item, "W", r.statistic, found ? std::optional(found->statistic) : std::nullopt);
        row("wilcoxon_left_by_lane", item, "p_value", r.p_value, found ? std::optional(found->p_value) : std::nullopt);
    }
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
}

inline std::string report_csv(const std::optional<stats::TestReport>& r) {
    if (!r) return ",,,";
    return csv_number(r->statistic) + ',' + csv_number(r->p_value) + ',' + (r->reject ? "true" : "false") + ',' +
           r->method;
}

}

/// Writes report.json, events.{csv,json}, accounting.json, per-table CSVs,
/// reference_comparison.csv and one SVG histogram per SSM.
inline void write_report_files(const AnalysisReport& rep, const AnalysisConfig& cfg,
                               const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "report.json", report_to_json(rep, cfg).dump(2) + "\n");
    detail::write_file(dir / "events.json", events_to_json(rep.events).dump(2) + "\n");
    detail::write_file(dir / "accounting.json", to_json(rep.accounting).dump(2) + "\n");
    detail::write_file(dir / "ingest_diagnostics.json", to_json(rep.ingest).dump(2) + "\n");
    {
        std::ostringstream s;
        write_events_csv(rep.events, s);
        detail::write_file(dir / "events.csv", s.str());
    }
    {
        std::ostringstream s;
        s << "ssm,n,W,p_value,reject,method\n";
        for (const auto& sum : rep.summaries) {
            s << to_string(sum.kind) << ',' << sum.defined << ',' << detail::report_csv(sum.wilcoxon) << '\n';
        }
        detail::write_file(dir / "wilcoxon_overall.csv", s.str());
    }
    {
        std::ostringstream s;
        s << "ssm,variable,rho,p_value,reject,method\n";
        for (const auto& c : rep.correlations) {
            s << to_string(c.kind) << ',' << c.variable << ',' << detail::report_csv(c.report) << '\n';
        }
        detail::write_file(dir / "spearman.csv", s.str());
    }
    {
        std::ostringstream s;
        std::ostringstream d;
        s << "grouping,ssm,groups,H,p_value,reject,method\n";
        d << "grouping,ssm,first,second,z,p_value,reject,method,raw_p_value\n";
        for (const auto& g : rep.grouped) {
            std::string labels;
            for (const auto& l : g.labels) labels += (labels.empty() ? "" : "|") + l;
            s << g.grouping << ',' << to_string(g.kind) << ',' << labels << ','
              << detail::report_csv(g.kruskal_wallis) << '\n';
            if (g.dunn) {
                for (const auto& c : g.dunn->comparisons) {
                    d << g.grouping << ',' << to_string(g.kind) << ',' << g.labels[c.first] << ','
                      << g.labels[c.second] << ',' << detail::report_csv(c.report) << ','
                      << detail::csv_number(c.raw_p) << '\n';
                }
            }
        }
        detail::write_file(dir / "kruskal_wallis.csv", s.str());
        detail::write_file(dir / "dunn.csv", d.str());
    }
    {
        std::ostringstream s;
        s << "ssm,direction,lane,W,p_value,reject,method\n";
        for (const auto& c : rep.lane_wilcoxon) {
            s << to_string(c.kind) << ',' << to_string(c.direction) << ',' << c.lane << ','
              << detail::report_csv(c.report) << '\n';
        }
        detail::write_file(dir / "wilcoxon_by_lane.csv", s.str());
    }
    {
        std::ostringstream s;
        s << "ssm,subset,bin_low,bin_high,count\n";
        for (const auto& h : rep.histograms) {
            for (const auto& b : h.bins) {
                s << to_string(h.kind) << ',' << h.subset << ',' << detail::csv_number(b.low) << ','
                  << detail::csv_number(b.high) << ',' << b.count << '\n';
            }
        }
        detail::write_file(dir / "histograms.csv", s.str());
    }
    {
        std::ostringstream s;
        write_reference_comparison(rep, s);
        detail::write_file(dir / "reference_comparison.csv", s.str());
    }
    for (auto kind : all_ssm_kinds) {
        std::vector<std::pair<std::string, std::vector<HistogramBin>>> series;
        for (const auto& h : rep.histograms) {
            if (h.kind == kind && h.subset != "all") series.emplace_back(h.subset, h.bins);
        }
        const std::string name = to_string(kind);
        detail::write_file(dir / ("histogram_" + name + ".svg"),
                           render_histogram_svg(series, name + " ratio by lane-change direction"));
    }
}

}

#endif
