#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ssmr/ssmr.hpp"

using namespace ssmr;

namespace {

AnalysisConfig si_config() {
    AnalysisConfig cfg;
    cfg.schema_spec = "preset:si";
    cfg.schema = SchemaMap::si();
    return cfg;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}

TEST(Histogram, Examples) {
    const auto h = histogram(std::vector<double>{-1.0, 0.0, 1.0}, 2);
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0].count, 1u);
    EXPECT_EQ(h[1].count, 2u);
    EXPECT_EQ(h[0].low, -1.0);
    EXPECT_EQ(h[0].high, 0.0);
    EXPECT_EQ(h[1].high, 1.0);

    for (const auto& b : histogram(std::vector<double>{}, 20)) EXPECT_EQ(b.count, 0u);
    EXPECT_THROW(histogram(std::vector<double>{1.5}, 4), InvariantViolation);
    EXPECT_THROW(histogram(std::vector<double>{0.2}, 1), ConfigError);
}

TEST(Histogram, UniformCountsStayWithinFiveSigma) {
    std::mt19937_64 rng(61);
    const auto v = ref::uniform_sample(rng, 1000, -1.0, 1.0);
    const auto h = histogram(v, 20);
    const double sigma = std::sqrt(1000 * 0.05 * 0.95);
    std::size_t total = 0;
    for (const auto& b : h) {
        EXPECT_LE(std::fabs(static_cast<double>(b.count) - 50.0), 5 * sigma);
        total += b.count;
    }
    EXPECT_EQ(total, 1000u);
}

TEST(Histogram, SvgHasOneOutlinePerSeries) {
    const auto a = histogram(std::vector<double>{-0.5, 0.5}, 4);
    const auto svg = render_histogram_svg({{"left", a}, {"right", a}}, "TH");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    std::size_t lines = 0;
    for (auto at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) ++lines;
    EXPECT_EQ(lines, 2u);
}

TEST(Fixture, ExplicitEventMatchesSidecar) {
    FixtureRecipe r;
    FixtureEvent e;
    e.v_ego = e.v_lead = e.v_follow = 20.0;
    e.d_lead = 45.0;
    e.d_follow = 36.0;
    r.events.push_back(e);
    const auto fx = generate_fixture(7, r);
    ASSERT_EQ(fx.expected.size(), 1u);
    EventFilterConfig wide;
    wide.th_max = 3.0;
    const auto out = extract_events(fx.table, wide);
    ASSERT_EQ(out.kept.size(), 1u);
    const auto pairs = compute_ssm_pairs(out.kept[0], SsmParams{});
    const auto& x = fx.expected[0];
    EXPECT_DOUBLE_EQ(pairs[0].lead_value, x.th_lead);
    EXPECT_DOUBLE_EQ(pairs[0].follow_value, x.th_follow);
    EXPECT_DOUBLE_EQ(pairs[1].lead_value, x.picud_lead);
    EXPECT_DOUBLE_EQ(pairs[1].follow_value, x.picud_follow);
    EXPECT_EQ(pairs[2].lead_value, x.drac_lead);
    EXPECT_EQ(pairs[3].follow_value, x.ittc_follow);
    EXPECT_DOUBLE_EQ(x.th_lead, 2.25);
    EXPECT_DOUBLE_EQ(x.th_follow, 1.8);
    EXPECT_DOUBLE_EQ(x.picud_lead, 25.0);
    EXPECT_DOUBLE_EQ(x.picud_follow, 16.0);
    EXPECT_EQ(out.kept[0].ego_id, x.ego_id);
    EXPECT_EQ(out.kept[0].frame, x.frame);
}

TEST(Fixture, RandomScenesMatchSidecar) {
    const auto fx = generate_fixture(3, leader_biased_recipe(60));
    const auto out = extract_events(fx.table, EventFilterConfig{});
    ASSERT_EQ(out.kept.size(), 60u);
    for (std::size_t i = 0; i < out.kept.size(); ++i) {
        const auto& x = fx.expected[i];
        const auto pairs = compute_ssm_pairs(out.kept[i], SsmParams{});
        auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); };
        EXPECT_TRUE(close(pairs[0].lead_value, x.th_lead));
        EXPECT_TRUE(close(pairs[0].follow_value, x.th_follow));
        EXPECT_TRUE(close(pairs[1].lead_value, x.picud_lead));
        EXPECT_TRUE(close(pairs[1].follow_value, x.picud_follow));
        EXPECT_TRUE(close(pairs[2].lead_value, x.drac_lead));
        EXPECT_TRUE(close(pairs[2].follow_value, x.drac_follow));
        EXPECT_TRUE(close(pairs[3].lead_value, x.ittc_lead));
        EXPECT_TRUE(close(pairs[3].follow_value, x.ittc_follow));
    }
}

TEST(Fixture, SameSeedSameBytes) {
    auto render = [](std::uint64_t seed) {
        const auto fx = generate_fixture(seed, symmetric_recipe(20));
        std::ostringstream s;
        write_trajectory_csv(fx.table, s);
        write_expected_csv(fx.expected, s);
        return s.str();
    };
    EXPECT_EQ(render(9), render(9));
    EXPECT_NE(render(9), render(10));
}

TEST(Fixture, RecipeErrors) {
    std::istringstream zero_gap("event = 4,3,20,20,20,0,30\n");
    const auto r = parse_recipe(zero_gap);
    EXPECT_THROW(generate_fixture(1, r), RecipeError);

    std::istringstream jump("event = 5,3,20,20,20,30,30\n");
    EXPECT_THROW(generate_fixture(1, parse_recipe(jump)), RecipeError);

    std::istringstream unknown("speed = 10,20\nwibble = 3\n");
    EXPECT_THROW(parse_recipe(unknown), RecipeError);

    std::istringstream empty_count("mode = random\n");
    EXPECT_THROW(parse_recipe(empty_count), RecipeError);

    std::istringstream bad_event("event = 4,3,20\n");
    EXPECT_THROW(parse_recipe(bad_event), RecipeError);
}

TEST(Fixture, RecipeFileRoundTrip) {
    std::istringstream in(
        "# leader-biased scenes\n"
        "mode = random\ncount = 12\nspeed = 12, 20\nlead_delta = 0\nfollow_delta = 0.5, 2.5\n"
        "headway_follow = 0.6, 1.0\ngap_ratio = 1.5\ndirection = mixed\n");
    const auto parsed = parse_recipe(in);
    const auto a = generate_fixture(5, parsed);
    const auto b = generate_fixture(5, leader_biased_recipe(12));
    EXPECT_EQ(a.table, b.table);
}

TEST(Pipeline, FixtureAFailsToRejectForEverySsm) {
    const auto fx = generate_fixture(1, symmetric_recipe(60));
    const auto rep = run_analysis(fx.table, si_config());
    EXPECT_EQ(rep.events.size(), 60u);
    for (const auto& s : rep.summaries) {
        ASSERT_TRUE(s.wilcoxon.has_value()) << to_string(s.kind);
        EXPECT_FALSE(s.wilcoxon->reject) << to_string(s.kind);
    }
}

TEST(Pipeline, FixtureBRejectsForEverySsm) {
    const auto fx = generate_fixture(2, leader_biased_recipe(60));
    const auto rep = run_analysis(fx.table, si_config());
    EXPECT_EQ(rep.events.size(), 60u);
    for (const auto& s : rep.summaries) {
        ASSERT_TRUE(s.wilcoxon.has_value()) << to_string(s.kind);
        EXPECT_TRUE(s.wilcoxon->reject) << to_string(s.kind);
        std::vector<double> r;
        for (const auto& e : rep.events) r.push_back(*e.ratios[index_of(s.kind)]);
        std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
        EXPECT_GT(r[r.size() / 2], 0.0) << to_string(s.kind);
    }
    // Only the follower closes in: every DRAC ratio sits at +1.
    EXPECT_EQ(rep.summaries[index_of(SsmKind::drac)].at_plus_one, 60u);
}

TEST(Pipeline, ReportBytesAreDeterministic) {
    const auto fx = generate_fixture(2, leader_biased_recipe(60));
    const auto cfg = si_config();
    const auto a = report_to_json(run_analysis(fx.table, cfg), cfg).dump(2);
    const auto b = report_to_json(run_analysis(fx.table, cfg), cfg).dump(2);
    EXPECT_EQ(a, b);

    const auto dir = std::filesystem::temp_directory_path() / "ssmr_pipeline_test";
    std::filesystem::remove_all(dir);
    write_report_files(run_analysis(fx.table, cfg), cfg, dir / "one");
    write_report_files(run_analysis(fx.table, cfg), cfg, dir / "two");
    for (const char* f : {"report.json", "events.json", "events.csv", "reference_comparison.csv", "histogram_TH.svg"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / "one" / f)) << f;
        EXPECT_EQ(slurp(dir / "one" / f), slurp(dir / "two" / f)) << f;
    }
    EXPECT_EQ(slurp(dir / "one" / "report.json"), a + "\n");
    std::filesystem::remove_all(dir);
}

TEST(Pipeline, NumbersCarryTwelveSignificantDigits) {
    EXPECT_EQ(ordered_json(detail::round_sig12(2.0 / 3.0)).dump(), "0.666666666667");
    EXPECT_EQ(ordered_json(detail::round_sig12(0.1 + 0.2)).dump(), "0.3");
}

TEST(Pipeline, AccountingCloses) {
    auto r = leader_biased_recipe(40);
    r.headway_follow_max = 2.5;
    r.target_lanes = {1, 2, 3, 4, 5, 6};
    const auto fx = generate_fixture(4, r);
    auto cfg = si_config();
    cfg.schema.hov_lanes = {1};
    cfg.schema.on_ramp_lanes = {7};
    const auto rep = run_analysis(fx.table, cfg);
    const auto& a = rep.accounting;
    EXPECT_EQ(a.total_candidates, 40u);
    EXPECT_EQ(a.kept + a.rejected_total(), a.total_candidates);
    EXPECT_GT(a.rejected.at(RejectReason::excluded_lane), 0u);
    EXPECT_GT(a.rejected.at(RejectReason::time_headway), 0u);
    EXPECT_EQ(a.kept, rep.events.size());
    std::size_t grid = 0;
    for (const auto& [lane, c] : a.grid) grid += c.total();
    EXPECT_EQ(grid, a.kept);
    for (const auto& s : rep.summaries) EXPECT_EQ(s.defined + s.dropped, rep.events.size());
}

TEST(Pipeline, GroupedTestsUseEveryDefinedRatio) {
    auto r = leader_biased_recipe(80);
    r.follow_delta_min = -2.0;
    const auto fx = generate_fixture(6, r);
    const auto rep = run_analysis(fx.table, si_config());
    for (const auto& g : rep.grouped) {
        if (g.grouping != "lane" && g.grouping != "direction") continue;
        ASSERT_TRUE(g.kruskal_wallis.has_value()) << g.grouping << " " << to_string(g.kind) << " " << g.skipped;
        std::size_t n = 0;
        for (auto s : g.kruskal_wallis->sizes) n += s;
        EXPECT_EQ(n, rep.summaries[index_of(g.kind)].defined);
        EXPECT_EQ(g.dunn.has_value(), g.kruskal_wallis->reject);
    }
    for (const auto& h : rep.histograms) {
        if (h.subset != "all") continue;
        std::size_t n = 0;
        for (const auto& b : h.bins) n += b.count;
        EXPECT_EQ(n, rep.summaries[index_of(h.kind)].defined);
    }
}

TEST(Pipeline, BothZeroRatiosAreDroppedPerSsm) {
    FixtureRecipe r;
    for (int i = 0; i < 6; ++i) {
        FixtureEvent e;
        e.d_lead = 20.0 + i;
        e.d_follow = 18.0;
        r.events.push_back(e);
    }
    const auto rep = run_analysis(generate_fixture(1, r).table, si_config());
    EXPECT_EQ(rep.summaries[index_of(SsmKind::drac)].defined, 0u);
    EXPECT_EQ(rep.summaries[index_of(SsmKind::drac)].dropped, 6u);
    EXPECT_FALSE(rep.summaries[index_of(SsmKind::drac)].wilcoxon.has_value());
    EXPECT_EQ(rep.summaries[index_of(SsmKind::th)].defined, 6u);
}

TEST(Pipeline, NoEventsNamesTheFilter) {
    FixtureRecipe r;
    FixtureEvent e;
    e.d_lead = e.d_follow = 60.0;
    r.events.push_back(e);
    const auto fx = generate_fixture(1, r);
    try {
        run_analysis(fx.table, si_config());
        FAIL() << "expected NoEventsError";
    } catch (const NoEventsError& err) {
        EXPECT_EQ(err.stage(), "time_headway");
    }

    std::vector<TrajectorySample> still;
    for (int f = 1; f <= 5; ++f) still.push_back({1, f, 0.1 * f, 2, 10.0, 5.0, 4.0, VehicleClass::car});
    try {
        run_analysis(TrajectoryTable(still), si_config());
        FAIL() << "expected NoEventsError";
    } catch (const NoEventsError& err) {
        EXPECT_EQ(err.stage(), "detection");
    }
}

TEST(Pipeline, ConfigValidation) {
    auto cfg = si_config();
    cfg.bins = 1;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = si_config();
    cfg.smoothing_window = 4;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = si_config();
    cfg.stats.alpha = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = si_config();
    cfg.ssm.deceleration = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Pipeline, ReadsFromDisk) {
    const auto fx = generate_fixture(2, leader_biased_recipe(30));
    const auto dir = std::filesystem::temp_directory_path() / "ssmr_pipeline_disk";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "t.csv", std::ios::binary);
        write_trajectory_csv(fx.table, out);
    }
    auto cfg = si_config();
    cfg.input_path = (dir / "t.csv").string();
    const auto from_disk = run_analysis(cfg);
    const auto in_memory = run_analysis(fx.table, cfg);
    EXPECT_EQ(events_to_json(from_disk.events).dump(), events_to_json(in_memory.events).dump());
    EXPECT_EQ(from_disk.ingest.rows_read, fx.table.size());
    std::filesystem::remove_all(dir);
}

TEST(Pipeline, NgsimPresetEndToEnd) {
    // Fixture B written out in feet with NGSIM column names, scenes placed in lanes 1..6.
    auto r = leader_biased_recipe(40);
    r.target_lanes = {1, 2, 3, 4, 5, 6};
    const auto fx = generate_fixture(8, r);
    std::ostringstream csv;
    csv << "Vehicle_ID,Frame_ID,Lane_ID,Local_Y,v_Vel,v_length,v_Class\n";
    for (const auto& s : fx.table.samples()) {
        csv << s.vehicle_id << ',' << s.frame << ',' << s.lane << ',' << detail::format_exact(s.position / 0.3048)
            << ',' << detail::format_exact(s.velocity / 0.3048) << ',' << detail::format_exact(s.length / 0.3048)
            << ',' << static_cast<int>(s.vehicle_class) << '\n';
    }
    std::istringstream in(csv.str());
    const auto table = parse_trajectory_csv(in, SchemaMap::ngsim_i80(), "ngsim-like");
    const auto rep = run_analysis(table, AnalysisConfig{});
    const auto& a = rep.accounting;
    EXPECT_EQ(a.total_candidates, 40u);
    EXPECT_GT(a.rejected.at(RejectReason::excluded_lane), 0u);
    EXPECT_EQ(a.grid.count(1), 0u);
    EXPECT_EQ(a.kept + a.rejected_total(), 40u);
    for (const auto& s : rep.summaries) {
        ASSERT_TRUE(s.wilcoxon.has_value());
        EXPECT_TRUE(s.wilcoxon->reject) << to_string(s.kind);
    }
    std::ostringstream cmp;
    write_reference_comparison(rep, cmp);
    EXPECT_NE(cmp.str().find("events,all,kept,199,"), std::string::npos);
}
