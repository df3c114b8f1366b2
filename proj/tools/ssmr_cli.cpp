// Command-line front end: analyze trajectories, generate synthetic fixtures,
// bin ratio files into histograms.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ssmr/ssmr.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_config = 2;
constexpr int exit_no_events = 3;

struct AnalyzeArgs {
    std::string input;
    std::string schema = "preset:ngsim-i80";
    std::string out;
    double th_max = 2.0;
    double decel = 3.3;
    double reaction = 1.0;
    int bins = 20;
    double alpha = 0.05;
    std::string wilcoxon_mode = "auto";
    std::string zero_policy = "discard";
    std::string dunn = "bonferroni";
    std::string lane_exclusion = "origin_or_target";
    std::size_t min_group_size = 5;
    int smooth = 0;
    bool fp_literal = false;
};

int run_analyze(const AnalyzeArgs& a) {
    ssmr::AnalysisConfig cfg;
    cfg.input_path = a.input;
    cfg.schema_spec = a.schema;
    cfg.schema = ssmr::load_schema(a.schema);
    cfg.filters.th_max = a.th_max;
    if (a.lane_exclusion == "target_only") {
        cfg.filters.lane_exclusion = ssmr::LaneExclusion::target_only;
    } else if (a.lane_exclusion != "origin_or_target") {
        throw ssmr::ConfigError("--lane-exclusion must be origin_or_target or target_only");
    }
    cfg.ssm.deceleration = a.decel;
    cfg.ssm.reaction_time = a.reaction;
    cfg.bins = a.bins;
    cfg.stats.alpha = a.alpha;
    cfg.stats.wilcoxon_mode = ssmr::stats::parse_wilcoxon_mode(a.wilcoxon_mode);
    cfg.stats.zero_policy = ssmr::stats::parse_zero_policy(a.zero_policy);
    cfg.stats.dunn_adjustment = ssmr::stats::parse_p_adjust(a.dunn);
    cfg.positive_form = a.fp_literal ? ssmr::PositiveRatioForm::literal : ssmr::PositiveRatioForm::corrected;
    cfg.min_group_size = a.min_group_size;
    cfg.smoothing_window = a.smooth;
    cfg.output_dir = a.out;
    cfg.validate();

    const auto report = ssmr::run_analysis(cfg);
    ssmr::write_report_files(report, cfg, a.out);

    const auto totals = report.accounting.direction_totals();
    std::printf("candidates %zu, kept %zu (left %zu, right %zu)\n", report.accounting.total_candidates,
                report.accounting.kept, totals.left, totals.right);
    for (const auto& s : report.summaries) {
        if (s.wilcoxon) {
            std::printf("%-6s n=%-4zu W=%-10s p=%-12s %s\n", ssmr::to_string(s.kind), s.defined,
                        ssmr::detail::format_sig12(s.wilcoxon->statistic).c_str(),
                        ssmr::detail::format_sig12(s.wilcoxon->p_value).c_str(),
                        s.wilcoxon->reject ? "reject" : "keep");
        } else {
            std::printf("%-6s skipped: %s\n", ssmr::to_string(s.kind), s.skipped.c_str());
        }
    }
    std::printf("report written to %s\n", a.out.c_str());
    return exit_ok;
}

int run_fixture(std::uint64_t seed, const std::string& recipe_path, const std::string& out, double decel,
                double reaction) {
    std::ifstream in(recipe_path);
    if (!in) throw ssmr::ConfigError("cannot open recipe '" + recipe_path + "'");
    const auto recipe = ssmr::parse_recipe(in);
    const auto fixture = ssmr::generate_fixture(seed, recipe, decel, reaction);

    std::filesystem::create_directories(out);
    const std::filesystem::path dir(out);
    {
        std::ofstream t(dir / "trajectories.csv", std::ios::binary);
        ssmr::write_trajectory_csv(fixture.table, t);
    }
    {
        std::ofstream e(dir / "expected.csv", std::ios::binary);
        ssmr::write_expected_csv(fixture.expected, e);
    }
    {
        std::ofstream s(dir / "schema.cfg", std::ios::binary);
        s << "# layout of trajectories.csv\n"
             "vehicle_id = vehicle_id\nframe = frame\ntime = time\nlane = lane\nposition = position\n"
             "velocity = velocity\nlength = length\nclass = class\nunits = si\n";
    }
    std::printf("%zu events, %zu samples written to %s\n", fixture.expected.size(), fixture.table.size(),
                out.c_str());
    return exit_ok;
}

std::vector<double> read_ratio_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ssmr::ConfigError("cannot open ratio file '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::vector<std::string_view> cells;
    std::size_t column = 0;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (ssmr::detail::trim(line).empty()) continue;
        ssmr::detail::split_row(line, ',', cells);
        if (first) {
            first = false;
            double probe = 0.0;
            if (!ssmr::detail::parse_double(cells[0], probe)) {
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    if (ssmr::detail::unquote(cells[i]) == "ratio") column = i;
                }
                continue;
            }
        }
        if (column >= cells.size() || ssmr::detail::trim(cells[column]).empty()) continue;
        double v = 0.0;
        if (!ssmr::detail::parse_double(ssmr::detail::unquote(cells[column]), v)) {
            throw ssmr::ConfigError("line " + std::to_string(lineno) + ": not a number");
        }
        if (!(v >= -1.0 && v <= 1.0)) {
            throw ssmr::ConfigError("line " + std::to_string(lineno) + ": ratio outside [-1, 1]");
        }
        values.push_back(v);
    }
    return values;
}

int run_histogram(const std::string& ratios_path, int bins, const std::string& svg) {
    const auto values = read_ratio_column(ratios_path);
    const auto hist = ssmr::histogram(values, bins);
    std::printf("bin_low,bin_high,count\n");
    for (const auto& b : hist) {
        std::printf("%s,%s,%zu\n", ssmr::detail::format_sig12(b.low).c_str(),
                    ssmr::detail::format_sig12(b.high).c_str(), b.count);
    }
    if (!svg.empty()) {
        std::ofstream out(svg, std::ios::binary);
        if (!out) throw ssmr::ConfigError("cannot write '" + svg + "'");
        out << ssmr::render_histogram_svg({{"ratios", hist}}, "Ratio histogram");
    }
    return exit_ok;
}

}

int main(int argc, char** argv) {
    CLI::App app{"Compare surrogate safety measures across the two vehicle pairs of a lane change"};
    app.require_subcommand(1);

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Run the full analysis on a trajectory table");
    analyze->add_option("--input", aa.input, "Trajectory CSV")->required();
    analyze->add_option("--schema", aa.schema, "Schema file or preset:ngsim-i80 / preset:si");
    analyze->add_option("--out", aa.out, "Output directory")->required();
    analyze->add_option("--th-max", aa.th_max, "Headway threshold in seconds");
    analyze->add_option("--a", aa.decel, "PICUD deceleration, m/s^2");
    analyze->add_option("--tr", aa.reaction, "PICUD reaction time, s");
    analyze->add_option("--bins", aa.bins, "Histogram bins over [-1, 1]");
    analyze->add_option("--alpha", aa.alpha, "Significance level");
    analyze->add_option("--wilcoxon-mode", aa.wilcoxon_mode, "auto, exact or normal");
    analyze->add_option("--zero-policy", aa.zero_policy, "discard or pratt");
    analyze->add_option("--dunn", aa.dunn, "none, bonferroni or holm");
    analyze->add_option("--lane-exclusion", aa.lane_exclusion, "origin_or_target or target_only");
    analyze->add_option("--min-group-size", aa.min_group_size, "Smallest lane group for per-direction lane tests");
    analyze->add_option("--smooth", aa.smooth, "Odd moving-average window; 0 disables");
    analyze->add_flag("--fp-literal", aa.fp_literal, "Use -1 + 2 sin(angle) for non-negative measures");

    std::uint64_t seed = 0;
    std::string recipe, fixture_out;
    double fx_decel = 3.3, fx_reaction = 1.0;
    auto* fixture = app.add_subcommand("fixture", "Generate a synthetic trajectory table with expected values");
    fixture->add_option("--seed", seed, "Random seed")->required();
    fixture->add_option("--recipe", recipe, "Recipe file")->required();
    fixture->add_option("--out", fixture_out, "Output directory")->required();
    fixture->add_option("--a", fx_decel, "PICUD deceleration for the expected values");
    fixture->add_option("--tr", fx_reaction, "PICUD reaction time for the expected values");

    std::string ratios, svg;
    int bins = 20;
    auto* hist = app.add_subcommand("histogram", "Bin a column of ratios over [-1, 1]");
    hist->add_option("--ratios", ratios, "CSV with a 'ratio' column or a single numeric column")->required();
    hist->add_option("--bins", bins, "Number of bins")->required();
    hist->add_option("--svg", svg, "Also write an SVG chart here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*analyze) return run_analyze(aa);
        if (*fixture) return run_fixture(seed, recipe, fixture_out, fx_decel, fx_reaction);
        if (*hist) return run_histogram(ratios, bins, svg);
    } catch (const ssmr::NoEventsError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_no_events;
    } catch (const ssmr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const ssmr::SchemaError& e) {
        std::fprintf(stderr, "schema error: %s\n", e.what());
        return exit_config;
    } catch (const ssmr::EmptyTableError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_internal;
    }
    return exit_internal;
}
