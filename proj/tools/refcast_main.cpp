// refcast — reference-class distributional forecasts for firm sales growth.
//
// Subcommands: ingest, predictors, synth, backtest, rank, class, forecast,
// baserates. Every file output gets a sibling .manifest.json recording the
// configuration and input digests that produced it.

#include "refcast/common.hpp"
#include "refcast/csv.hpp"
#include "refcast/evaluation.hpp"
#include "refcast/forecast.hpp"
#include "refcast/panel.hpp"
#include "refcast/predictors.hpp"
#include "refcast/refclass.hpp"
#include "refcast/synth.hpp"

#include "manifest.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace refcast;
using nlohmann::json;

int threads_from_env() {
    const char* env = std::getenv("REFCAST_THREADS");
    if (!env || !*env) return 0;
    try {
        return std::max(0, std::stoi(env));
    } catch (...) {
        return 0;
    }
}

int effective_threads(int flag_value) {
    return flag_value > 0 ? flag_value : threads_from_env();
}

std::vector<int> parse_horizons(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (...) {
            throw DataError("bad horizon list: " + text);
        }
    }
    if (out.empty()) throw DataError("no horizons given");
    return out;
}

// Tabular output that can mirror to JSON (--format json).
struct TableOut {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void emit(std::ostream& os, bool as_json) const {
        if (as_json) {
            json arr = json::array();
            for (const auto& row : rows) {
                json obj = json::object();
                for (std::size_t i = 0; i < header.size() && i < row.size(); ++i)
                    obj[header[i]] = row[i];
                arr.push_back(std::move(obj));
            }
            os << arr.dump(2) << '\n';
        } else {
            csv::write_row(os, header);
            for (const auto& row : rows) csv::write_row(os, row);
        }
    }
};

void emit_to(const std::string& path, const TableOut& table, bool as_json,
             const std::string& subcommand, const json& config,
             const std::vector<std::string>& inputs) {
    if (path.empty() || path == "-") {
        table.emit(std::cout, as_json);
        return;
    }
    std::ofstream os(path);
    if (!os) throw DataError("cannot write: " + path);
    table.emit(os, as_json);
    if (!os) throw DataError("write failed: " + path);
    cli::write_manifest(path, subcommand, config, inputs);
}

Panel load_any(const std::string& path) {
    return load_panel_any(path);
}

// Options shared by the single-case subcommands.
struct CaseArgs {
    std::string panel_path;
    std::string firm;
    int year = 0;
    std::string predictor = "operating_margin";
    int horizon = 1;
    int window = 5;
    double size_c = 0.05;
    std::string method = "similarity";
    int min_class = 20;
    bool exclude_self = false;
};

void add_case_options(CLI::App* cmd, CaseArgs& a, bool with_horizon = true) {
    cmd->add_option("--panel", a.panel_path, "panel CSV or cache file")->required();
    cmd->add_option("--firm", a.firm, "initial case firm id")->required();
    cmd->add_option("--year", a.year, "initial case fiscal year")->required();
    cmd->add_option("--predictor", a.predictor, "predictor token (default operating_margin)");
    if (with_horizon) cmd->add_option("--horizon", a.horizon, "forecast horizon in years");
    cmd->add_option("--window", a.window, "candidate window length in years");
    cmd->add_option("--size", a.size_c, "relative class size (similarity method)");
    cmd->add_option("--method", a.method,
                    "similarity | mauboussin | major_group | industry_group");
    cmd->add_option("--min-class", a.min_class, "minimum reference-class size");
    cmd->add_flag("--exclude-self", a.exclude_self,
                  "exclude the case firm's own past observations");
}

ClassParams case_params(const CaseArgs& a, int horizon) {
    ClassParams p;
    p.predictor = PredictorId::parse(a.predictor);
    p.horizon = horizon;
    p.window = a.window;
    p.size_c = a.size_c;
    p.method = parse_method(a.method);
    p.min_class = a.min_class;
    p.exclude_self = a.exclude_self;
    if (p.method == Method::mauboussin) p.predictor = {PredictorKind::sales, 0};
    if (p.method == Method::major_group) p.predictor = {PredictorKind::major_group, 0};
    if (p.method == Method::industry_group) p.predictor = {PredictorKind::industry_group, 0};
    p.validate();
    return p;
}

struct CaseSelection {
    ClassParams params;
    CandidatePool pool;
    Selection sel;
    std::vector<double> outcomes;
};

CaseSelection select_case(const Panel& panel, const PredictorTable& ptable,
                          const OutcomeTable& otable, const CaseArgs& a, int horizon) {
    CaseSelection cs;
    cs.params = case_params(a, horizon);
    int fidx = panel.firm_index(a.firm);
    if (fidx < 0) throw DataError("unknown firm: " + a.firm);
    std::size_t rec = panel.find_record(fidx, a.year);
    if (rec == Panel::npos)
        throw DataError("firm " + a.firm + " has no observation in " + std::to_string(a.year));
    double x = ptable.value(cs.params.predictor, rec);
    if (is_missing(x))
        throw DataError("predictor " + cs.params.predictor.token() + " is missing for " +
                        a.firm + " in " + std::to_string(a.year));
    if (!window_ok(panel, a.year, cs.params))
        throw DataError("year " + std::to_string(a.year) +
                        " does not admit a full window of length " +
                        std::to_string(cs.params.window) + " at horizon " +
                        std::to_string(horizon));
    auto pool_res = collect_candidates(panel, ptable, otable, a.year, cs.params,
                                       a.exclude_self ? fidx : -1);
    cs.pool = std::move(pool_res.pool);
    cs.sel = select_reference_class(cs.pool, x, cs.params);
    if (!cs.sel.ok())
        throw DataError("case skipped: " + skip_reason_token(cs.sel.skip) + " (pool " +
                        std::to_string(cs.pool.size()) + " candidates)");
    cs.outcomes = class_outcomes(cs.pool, cs.sel);
    return cs;
}

json case_config(const CaseArgs& a, int horizon) {
    return json{{"panel", a.panel_path},   {"firm", a.firm},
                {"year", a.year},          {"predictor", a.predictor},
                {"horizon", horizon},      {"window", a.window},
                {"size", a.size_c},        {"method", a.method},
                {"min_class", a.min_class}, {"exclude_self", a.exclude_self}};
}

int cmd_ingest(const std::string& panel_csv, const std::string& cpi_csv, bool exclude_sic,
               const std::string& out) {
    LoadOptions opts;
    opts.exclude_financial_sic = exclude_sic;
    LoadStats stats;
    std::optional<std::string> cpi;
    if (!cpi_csv.empty()) cpi = cpi_csv;
    Panel panel = load_panel(panel_csv, cpi, opts, &stats);
    save_panel_cache(panel, out);

    json config{{"panel", panel_csv},
                {"cpi", cpi_csv},
                {"exclude_sic", exclude_sic},
                {"out", out}};
    std::vector<std::string> inputs{panel_csv};
    if (!cpi_csv.empty()) inputs.push_back(cpi_csv);
    cli::write_manifest(out, "ingest", config, inputs);

    std::cout << "rows read:               " << stats.rows_read << "\n"
              << "rows kept:               " << stats.rows_kept << "\n"
              << "rows excluded (SIC):     " << stats.rows_excluded_sic << "\n"
              << "firms dropped, no sales: " << stats.firms_dropped_no_sales << " ("
              << stats.rows_dropped_no_sales << " rows)\n"
              << "firms dropped, single:   " << stats.firms_dropped_single << " ("
              << stats.rows_dropped_single << " rows)\n"
              << "firms:                   " << panel.n_firms() << "\n"
              << "years:                   " << panel.start_year() << "-" << panel.end_year()
              << "\n";
    return 0;
}

int cmd_predictors(const std::string& panel_path, const std::string& out, bool as_json) {
    Panel panel = load_any(panel_path);
    auto table = PredictorTable::build(panel);
    auto rows = summarize_predictors(table);

    TableOut t;
    t.header = {"predictor", "description", "q2_5", "q25", "median", "mean", "q75", "q97_5",
                "missings"};
    for (const auto& r : rows)
        t.rows.push_back({r.id.display_name(), r.description, csv::format_double(r.q025),
                          csv::format_double(r.q25), csv::format_double(r.median),
                          csv::format_double(r.mean), csv::format_double(r.q75),
                          csv::format_double(r.q975), std::to_string(r.missing)});
    emit_to(out, t, as_json, "predictors", json{{"panel", panel_path}, {"out", out}},
            {panel_path});
    return 0;
}

int cmd_synth(const synth::SynthSpec& spec, const std::string& out) {
    auto generated = synth::generate_panel(spec);
    write_panel_csv(generated.panel, out);
    json config{{"firms", spec.n_firms},
                {"years", spec.n_years},
                {"start_year", spec.start_year},
                {"seed", spec.seed},
                {"x_persistence", spec.x_persistence},
                {"x_noise_sd", spec.x_noise_sd},
                {"sigma_base", spec.sigma_base},
                {"sigma_vslope", spec.sigma_vslope},
                {"missing_rate", spec.missing_rate},
                {"out", out}};
    cli::write_manifest(out, "synth", config, {});
    std::cout << "wrote " << generated.panel.n_records() << " records for "
              << generated.panel.n_firms() << " firms to " << out << "\n";
    return 0;
}

int cmd_backtest(const std::string& panel_path, const std::string& grid_arg,
                 const std::string& horizons_arg, int min_class, int threads, bool audit,
                 const std::string& out) {
    Panel panel = load_any(panel_path);
    auto ptable = PredictorTable::build(panel);

    GridSpec grid;
    if (grid_arg == "default") {
        grid = GridSpec::default_grid(parse_horizons(horizons_arg.empty() ? "1,3,5,10"
                                                                          : horizons_arg));
    } else {
        grid = GridSpec::from_toml(grid_arg);
        if (!horizons_arg.empty()) grid.horizons = parse_horizons(horizons_arg);
        if (grid.horizons.empty())
            throw DataError("grid file has no horizons; pass --horizons");
    }
    grid.min_class = min_class;

    auto otable = OutcomeTable::build(panel, grid.horizons);
    BacktestOptions opts;
    opts.threads = effective_threads(threads);
    opts.audit_no_lookahead = audit;

    auto results = run_grid(panel, ptable, otable, grid, opts);

    std::ofstream os(out);
    if (!os) throw DataError("cannot write: " + out);
    write_results_csv(os, results);
    os.close();
    json config{{"panel", panel_path},    {"grid", grid_arg}, {"horizons", horizons_arg},
                {"min_class", min_class}, {"audit", audit},   {"out", out}};
    std::vector<std::string> inputs{panel_path};
    if (grid_arg != "default") inputs.push_back(grid_arg);
    cli::write_manifest(out, "backtest", config, inputs);

    std::cout << "combinations: " << results.size() << " -> " << out << "\n";
    return 0;
}

int cmd_rank(const std::string& results_path, const std::string& by, int top,
             const std::string& out, bool as_json) {
    auto results = read_results_csv(results_path);
    auto ranked = rank_results(std::move(results), parse_measure(by));
    if (top > 0) {
        std::vector<GridResult> kept;
        int current_h = INT32_MIN;
        int taken = 0;
        for (auto& r : ranked) {
            if (r.params.horizon != current_h) {
                current_h = r.params.horizon;
                taken = 0;
            }
            if (taken < top) {
                kept.push_back(std::move(r));
                ++taken;
            }
        }
        ranked = std::move(kept);
    }

    std::ostringstream buffer;
    write_rank_report_csv(buffer, ranked);
    if (as_json) {
        // Reuse the CSV cell layout for the JSON mirror.
        std::istringstream is(buffer.str());
        std::string line;
        std::getline(is, line);
        TableOut t;
        t.header = csv::split_line(line);
        while (std::getline(is, line)) t.rows.push_back(csv::split_line(line));
        emit_to(out, t, true, "rank",
                json{{"results", results_path}, {"by", by}, {"top", top}, {"out", out}},
                {results_path});
        return 0;
    }
    if (out.empty() || out == "-") {
        std::cout << buffer.str();
        return 0;
    }
    std::ofstream os(out);
    if (!os) throw DataError("cannot write: " + out);
    os << buffer.str();
    os.close();
    cli::write_manifest(out, "rank",
                        json{{"results", results_path}, {"by", by}, {"top", top}, {"out", out}},
                        {results_path});
    return 0;
}

int cmd_class(const CaseArgs& args, const std::string& out, bool as_json) {
    Panel panel = load_any(args.panel_path);
    auto ptable = PredictorTable::build(panel);
    std::vector<int> hs{args.horizon};
    auto otable = OutcomeTable::build(panel, hs);
    auto cs = select_case(panel, ptable, otable, args, args.horizon);

    TableOut t;
    t.header = {"firm_id", "year", "predictor_value", "outcome"};
    for (std::size_t i = cs.sel.begin; i < cs.sel.end; ++i) {
        const auto& e = cs.pool.entries[i];
        t.rows.push_back({panel.firm_id(e.firm_idx), std::to_string(e.year),
                          csv::format_double(e.x), csv::format_double(e.outcome)});
    }
    emit_to(out, t, as_json, "class", case_config(args, args.horizon), {args.panel_path});
    return 0;
}

int cmd_forecast(const CaseArgs& args, const std::string& estimates_csv,
                 const std::string& out_density, const std::string& out_placements,
                 std::size_t grid_points, bool as_json) {
    Panel panel = load_any(args.panel_path);
    auto ptable = PredictorTable::build(panel);
    std::vector<int> hs{args.horizon};
    auto otable = OutcomeTable::build(panel, hs);
    auto cs = select_case(panel, ptable, otable, args, args.horizon);

    EmpiricalDistribution dist(cs.outcomes);
    json config = case_config(args, args.horizon);
    config["estimates"] = estimates_csv;

    std::cout << "class size:    " << dist.n() << "\n"
              << "median:        " << csv::format_fixed(quantile(dist, 0.5), 2) << "\n"
              << "trimmed mean:  " << csv::format_fixed(trimmed_mean(dist.values(), 0.025), 2)
              << "\n"
              << "trimmed std:   " << csv::format_fixed(trimmed_std(dist.values(), 0.025), 2)
              << "\n"
              << "q2.5 / q97.5:  " << csv::format_fixed(quantile(dist, 0.025), 2) << " / "
              << csv::format_fixed(quantile(dist, 0.975), 2) << "\n";

    if (!out_density.empty()) {
        auto curve = kde_curve(dist, grid_points);
        TableOut t;
        t.header = {"growth_pct", "density"};
        for (std::size_t i = 0; i < curve.grid.size(); ++i)
            t.rows.push_back({csv::format_double(curve.grid[i]),
                              csv::format_double(curve.density[i])});
        emit_to(out_density, t, as_json, "forecast", config, {args.panel_path});
    }

    if (!estimates_csv.empty()) {
        auto table = csv::read_file(estimates_csv);
        int c_id = table.column("analyst_id");
        int c_est = table.column("estimate_pct");
        if (c_id < 0 || c_est < 0)
            throw DataError(estimates_csv + ": expected header analyst_id,estimate_pct");
        std::vector<std::string> ids;
        std::vector<double> estimates;
        std::size_t row_no = 1;
        for (const auto& row : table.rows) {
            ++row_no;
            auto v = csv::parse_double(row.at(c_est),
                                       estimates_csv + " row " + std::to_string(row_no));
            if (!v) continue;
            ids.push_back(row.at(c_id));
            estimates.push_back(*v);
        }
        auto placed = place_estimates(dist, estimates);
        TableOut t;
        t.header = {"analyst_id", "estimate_pct", "pit_quantile"};
        for (std::size_t i = 0; i < placed.size(); ++i)
            t.rows.push_back({ids[i], csv::format_double(placed[i].first),
                              csv::format_double(placed[i].second)});
        std::string dest = out_placements.empty() ? "-" : out_placements;
        emit_to(dest, t, as_json, "forecast", config, {args.panel_path, estimates_csv});
    }
    return 0;
}

int cmd_baserates(const CaseArgs& args, const std::string& horizons_arg, double alpha,
                  bool with_mauboussin, const std::string& out, bool as_json) {
    Panel panel = load_any(args.panel_path);
    auto ptable = PredictorTable::build(panel);
    auto horizons = parse_horizons(horizons_arg);
    auto otable = OutcomeTable::build(panel, horizons);

    std::vector<std::string> header{"cagr_bucket"};
    std::vector<BaseRateTable> tables;
    for (int h : horizons) {
        auto cs = select_case(panel, ptable, otable, args, h);
        tables.push_back(base_rate_table(EmpiricalDistribution(cs.outcomes), alpha));
        header.push_back("h" + std::to_string(h));
        if (with_mauboussin) {
            CaseArgs mc = args;
            mc.method = "mauboussin";
            mc.predictor = "sales";
            auto mcs = select_case(panel, ptable, otable, mc, h);
            tables.push_back(base_rate_table(EmpiricalDistribution(mcs.outcomes), alpha));
            header.push_back("h" + std::to_string(h) + "_mc");
        }
    }

    TableOut t;
    t.header = header;
    const auto& labels = BaseRateTable::bucket_labels();
    for (std::size_t b = 0; b < labels.size(); ++b) {
        std::vector<std::string> row{labels[b]};
        for (const auto& table : tables) row.push_back(csv::format_fixed(table.share_pct[b], 2));
        t.rows.push_back(std::move(row));
    }
    auto stat_row = [&](const std::string& name, auto getter) {
        std::vector<std::string> row{name};
        for (const auto& table : tables) row.push_back(csv::format_fixed(getter(table), 2));
        t.rows.push_back(std::move(row));
    };
    stat_row("mean", [](const BaseRateTable& x) { return x.trimmed_mean; });
    stat_row("median", [](const BaseRateTable& x) { return x.median; });
    stat_row("std", [](const BaseRateTable& x) { return x.trimmed_std; });
    stat_row("q2_5", [](const BaseRateTable& x) { return x.q025; });
    stat_row("q97_5", [](const BaseRateTable& x) { return x.q975; });

    json config = case_config(args, 0);
    config["horizons"] = horizons_arg;
    config["alpha"] = alpha;
    config["mauboussin"] = with_mauboussin;
    emit_to(out, t, as_json, "baserates", config, {args.panel_path});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reference-class forecasting of sales growth distributions"};
    app.require_subcommand(1);
    std::string format = "csv";
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate, deflate and cache a panel CSV");
    std::string in_panel, in_cpi, in_out;
    bool in_exclude_sic = false;
    ingest->add_option("--panel", in_panel, "panel CSV")->required();
    ingest->add_option("--cpi", in_cpi, "CPI CSV (year,month,cpi)");
    ingest->add_flag("--exclude-sic", in_exclude_sic, "drop SIC 6000-6799 rows");
    ingest->add_option("--out", in_out, "cache output path")->required();

    // predictors
    auto* predictors = app.add_subcommand("predictors", "predictor summary table");
    std::string pr_panel, pr_out = "-";
    predictors->add_option("--panel", pr_panel, "panel CSV or cache")->required();
    predictors->add_option("--out", pr_out, "output CSV ('-' for stdout)");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic panel");
    refcast::synth::SynthSpec spec;
    std::string sy_out;
    synth_cmd->add_option("--firms", spec.n_firms, "number of firms");
    synth_cmd->add_option("--years", spec.n_years, "number of years");
    synth_cmd->add_option("--start-year", spec.start_year, "first fiscal year");
    synth_cmd->add_option("--seed", spec.seed, "RNG seed");
    synth_cmd->add_option("--x-persistence", spec.x_persistence, "AR(1) persistence");
    synth_cmd->add_option("--x-noise-sd", spec.x_noise_sd, "AR(1) innovation sd");
    synth_cmd->add_option("--sigma-base", spec.sigma_base, "noise scale at the center");
    synth_cmd->add_option("--sigma-vslope", spec.sigma_vslope, "v-shaped scale slope");
    synth_cmd->add_option("--missing-rate", spec.missing_rate,
                          "fraction of rows with blanked fundamentals");
    synth_cmd->add_option("--out", sy_out, "panel CSV output")->required();

    // backtest
    auto* backtest = app.add_subcommand("backtest", "run the PIT calibration grid");
    std::string bt_panel, bt_grid = "default", bt_horizons, bt_out;
    int bt_min_class = 20, bt_threads = 0;
    bool bt_audit = false;
    backtest->add_option("--panel", bt_panel, "panel CSV or cache")->required();
    backtest->add_option("--grid", bt_grid, "'default' or a grid TOML file");
    backtest->add_option("--horizons", bt_horizons, "comma list, e.g. 1,3,5,10");
    backtest->add_option("--min-class", bt_min_class, "minimum reference-class size");
    backtest->add_option("--threads", bt_threads, "worker threads (0 = all cores)");
    backtest->add_flag("--audit", bt_audit, "verify the no-lookahead invariant");
    backtest->add_option("--out", bt_out, "results CSV")->required();

    // rank
    auto* rank = app.add_subcommand("rank", "rank backtest results");
    std::string rk_results, rk_by = "delta_q", rk_out = "-";
    int rk_top = 0;
    rank->add_option("--results", rk_results, "results CSV from backtest")->required();
    rank->add_option("--by", rk_by, "delta_q | ks | cvm");
    rank->add_option("--top", rk_top, "keep the best N per horizon (0 = all)");
    rank->add_option("--out", rk_out, "output CSV ('-' for stdout)");

    // class
    auto* cls = app.add_subcommand("class", "print one reference class");
    CaseArgs cl_args;
    std::string cl_out = "-";
    add_case_options(cls, cl_args);
    cls->add_option("--out", cl_out, "output CSV ('-' for stdout)");

    // forecast
    auto* forecast = app.add_subcommand("forecast", "distributional forecast for one case");
    CaseArgs fc_args;
    std::string fc_estimates, fc_density, fc_placements;
    std::size_t fc_points = 512;
    add_case_options(forecast, fc_args);
    forecast->add_option("--estimates", fc_estimates,
                         "analyst estimates CSV (analyst_id,estimate_pct)");
    forecast->add_option("--out-density", fc_density, "density grid CSV");
    forecast->add_option("--out-placements", fc_placements, "estimate placements CSV");
    forecast->add_option("--grid-points", fc_points, "density grid resolution");

    // baserates
    auto* baserates = app.add_subcommand("baserates", "base-rate tables for one case");
    CaseArgs br_args;
    std::string br_horizons = "1,3,5,10", br_out = "-";
    double br_alpha = 0.025;
    bool br_no_mc = false;
    add_case_options(baserates, br_args, /*with_horizon=*/false);
    baserates->add_option("--horizons", br_horizons, "comma list, e.g. 1,3,5,10");
    baserates->add_option("--alpha", br_alpha, "trim fraction for mean/std");
    baserates->add_flag("--no-mauboussin", br_no_mc, "omit the sales-decile benchmark columns");
    baserates->add_option("--out", br_out, "output CSV ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    bool as_json = format == "json";
    try {
        if (*ingest) return cmd_ingest(in_panel, in_cpi, in_exclude_sic, in_out);
        if (*predictors) return cmd_predictors(pr_panel, pr_out, as_json);
        if (*synth_cmd) return cmd_synth(spec, sy_out);
        if (*backtest)
            return cmd_backtest(bt_panel, bt_grid, bt_horizons, bt_min_class, bt_threads,
                                bt_audit, bt_out);
        if (*rank) return cmd_rank(rk_results, rk_by, rk_top, rk_out, as_json);
        if (*cls) return cmd_class(cl_args, cl_out, as_json);
        if (*forecast)
            return cmd_forecast(fc_args, fc_estimates, fc_density, fc_placements, fc_points,
                                as_json);
        if (*baserates)
            return cmd_baserates(br_args, br_horizons, br_alpha, !br_no_mc, br_out, as_json);
    } catch (const refcast::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
