// Python bindings for the refcast core: panel handling, reference-class
// selection, distributional forecasts and the calibration backtest.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "refcast/common.hpp"
#include "refcast/evaluation.hpp"
#include "refcast/forecast.hpp"
#include "refcast/panel.hpp"
#include "refcast/predictors.hpp"
#include "refcast/refclass.hpp"
#include "refcast/synth.hpp"

#include <optional>
#include <stdexcept>

namespace py = pybind11;
using namespace refcast;

namespace {

ClassParams make_params(const std::string& predictor, int horizon, int window, double size,
                        const std::string& method, int min_class, bool exclude_self) {
    ClassParams p;
    p.predictor = PredictorId::parse(predictor);
    p.horizon = horizon;
    p.window = window;
    p.size_c = size;
    p.method = parse_method(method);
    p.min_class = min_class;
    p.exclude_self = exclude_self;
    p.validate();
    return p;
}

py::dict skips_dict(const SkipCounters& s) {
    py::dict d;
    d["window"] = s.window;
    d["missing_predictor"] = s.missing_predictor;
    d["missing_outcome"] = s.missing_outcome;
    d["class_too_small"] = s.class_too_small;
    return d;
}

py::dict result_dict(const GridResult& r) {
    py::dict d;
    d["predictor"] = r.params.predictor.token();
    d["window"] = r.params.window;
    d["size"] = r.params.uses_size() ? py::object(py::float_(r.params.size_c))
                                     : py::object(py::none());
    d["method"] = method_token(r.params.method);
    d["horizon"] = r.params.horizon;
    d["m"] = r.scores.m;
    auto opt = [](double v) {
        return is_missing(v) ? py::object(py::none()) : py::object(py::float_(v));
    };
    d["delta_q"] = opt(r.scores.delta_q);
    d["ks"] = opt(r.scores.ks);
    d["cvm"] = opt(r.scores.cvm);
    d["delta_q_rank"] = r.scores.rank_delta_q;
    d["ks_rank"] = r.scores.rank_ks;
    d["cvm_rank"] = r.scores.rank_cvm;
    d["skips"] = skips_dict(r.scores.skips);
    return d;
}

}  // namespace

PYBIND11_MODULE(_refcast, m) {
    m.doc() = "reference-class forecasting of sales growth distributions";
    m.attr("__version__") = kVersion;

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    py::class_<Panel>(m, "Panel")
        .def_property_readonly("n_records", &Panel::n_records)
        .def_property_readonly("n_firms", &Panel::n_firms)
        .def_property_readonly("start_year", &Panel::start_year)
        .def_property_readonly("end_year", &Panel::end_year)
        .def("firm_ids",
             [](const Panel& p) {
                 std::vector<std::string> ids;
                 ids.reserve(p.n_firms());
                 for (std::size_t f = 0; f < p.n_firms(); ++f)
                     ids.push_back(p.firm_id(static_cast<int>(f)));
                 return ids;
             })
        .def("sales",
             [](const Panel& p, const std::string& firm, int year) -> std::optional<double> {
                 int f = p.firm_index(firm);
                 if (f < 0) throw DataError("unknown firm: " + firm);
                 return p.sales_at(f, year);
             },
             py::arg("firm"), py::arg("year"))
        .def("survivorship_rate",
             [](const Panel& p, int h) { return survivorship_rate(p, h); }, py::arg("horizon"))
        .def("__repr__", [](const Panel& p) {
            return "<refcast.Panel " + std::to_string(p.n_firms()) + " firms, " +
                   std::to_string(p.start_year()) + "-" + std::to_string(p.end_year()) + ">";
        });

    py::class_<PredictorTable>(m, "PredictorTable")
        .def("column", [](const PredictorTable& t, const std::string& id) {
            return t.column(PredictorId::parse(id));
        });

    py::class_<OutcomeTable>(m, "OutcomeTable")
        .def("outcomes", [](const OutcomeTable& t, int h) { return t.outcomes(h); },
             py::arg("horizon"));

    m.def(
        "load_panel",
        [](const std::string& path, std::optional<std::string> cpi, bool exclude_sic) {
            LoadOptions opts;
            opts.exclude_financial_sic = exclude_sic;
            return load_panel(path, cpi, opts);
        },
        py::arg("path"), py::arg("cpi") = py::none(), py::arg("exclude_sic") = false,
        "Load a panel CSV (optionally deflating by a CPI CSV).");
    m.def("load_panel_any", &load_panel_any, py::arg("path"),
          "Load a panel CSV or binary cache, dispatching on the file magic.");
    m.def("save_panel_cache", &save_panel_cache, py::arg("panel"), py::arg("path"));
    m.def("write_panel_csv", &write_panel_csv, py::arg("panel"), py::arg("path"));

    m.def("build_predictor_table", &PredictorTable::build, py::arg("panel"));
    m.def(
        "build_outcome_table",
        [](const Panel& panel, const std::vector<int>& horizons) {
            return OutcomeTable::build(panel, horizons);
        },
        py::arg("panel"), py::arg("horizons"));
    m.def("predictor_tokens", [] {
        std::vector<std::string> out;
        for (const auto& id : all_predictors()) out.push_back(id.token());
        return out;
    });
    m.def("similarity_predictor_tokens", [] {
        std::vector<std::string> out;
        for (const auto& id : similarity_predictors()) out.push_back(id.token());
        return out;
    });
    m.def("summarize_predictors", [](const PredictorTable& t) {
        py::list rows;
        for (const auto& r : summarize_predictors(t)) {
            py::dict d;
            d["predictor"] = r.id.token();
            d["description"] = r.description;
            auto opt = [](double v) {
                return is_missing(v) ? py::object(py::none()) : py::object(py::float_(v));
            };
            d["q2_5"] = opt(r.q025);
            d["q25"] = opt(r.q25);
            d["median"] = opt(r.median);
            d["mean"] = opt(r.mean);
            d["q75"] = opt(r.q75);
            d["q97_5"] = opt(r.q975);
            d["missings"] = r.missing;
            rows.append(std::move(d));
        }
        return rows;
    });

    // Distribution operations on plain sequences.
    m.def(
        "pit_evaluate",
        [](std::vector<double> outcomes, double realized) {
            return pit_evaluate(EmpiricalDistribution(std::move(outcomes)), realized);
        },
        py::arg("outcomes"), py::arg("realized"));
    m.def(
        "quantile",
        [](std::vector<double> values, double level) {
            return quantile(EmpiricalDistribution(std::move(values)), level);
        },
        py::arg("values"), py::arg("level"));
    m.def(
        "trimmed_mean",
        [](const std::vector<double>& values, double alpha) {
            return trimmed_mean(values, alpha);
        },
        py::arg("values"), py::arg("alpha") = 0.025);
    m.def(
        "trimmed_std",
        [](const std::vector<double>& values, double alpha) {
            return trimmed_std(values, alpha);
        },
        py::arg("values"), py::arg("alpha") = 0.025);
    m.def(
        "base_rate_table",
        [](std::vector<double> outcomes, double alpha) {
            auto t = base_rate_table(EmpiricalDistribution(std::move(outcomes)), alpha);
            py::dict d;
            py::list buckets;
            const auto& labels = BaseRateTable::bucket_labels();
            for (std::size_t b = 0; b < labels.size(); ++b) {
                py::dict row;
                row["bucket"] = labels[b];
                row["share_pct"] = t.share_pct[b];
                buckets.append(std::move(row));
            }
            d["buckets"] = buckets;
            d["mean"] = t.trimmed_mean;
            d["median"] = t.median;
            d["std"] = t.trimmed_std;
            d["q2_5"] = t.q025;
            d["q97_5"] = t.q975;
            d["n"] = t.n;
            d["trim_alpha"] = t.trim_alpha;
            return d;
        },
        py::arg("outcomes"), py::arg("alpha") = 0.025);
    m.def(
        "kde_density",
        [](std::vector<double> outcomes, const std::vector<double>& grid) {
            return kde_density(EmpiricalDistribution(std::move(outcomes)), grid);
        },
        py::arg("outcomes"), py::arg("grid"));
    m.def(
        "kde_curve",
        [](std::vector<double> outcomes, std::size_t points) {
            auto c = kde_curve(EmpiricalDistribution(std::move(outcomes)), points);
            return py::make_tuple(c.grid, c.density, c.bandwidth);
        },
        py::arg("outcomes"), py::arg("points") = 512);
    m.def(
        "place_estimates",
        [](std::vector<double> outcomes, const std::vector<double>& estimates) {
            return place_estimates(EmpiricalDistribution(std::move(outcomes)), estimates);
        },
        py::arg("outcomes"), py::arg("estimates"));

    // Goodness-of-fit statistics.
    m.def("ks_statistic",
          [](const std::vector<double>& p) { return ks_statistic(p); }, py::arg("pit_values"));
    m.def("cvm_statistic",
          [](const std::vector<double>& p) { return cvm_statistic(p); }, py::arg("pit_values"));
    m.def("quantile_deviation",
          [](const std::vector<double>& p) { return quantile_deviation(p); },
          py::arg("pit_values"));

    // Reference classes.
    m.def(
        "reference_class",
        [](const Panel& panel, const PredictorTable& ptable, const OutcomeTable& otable,
           const std::string& firm, int year, const std::string& predictor, int horizon,
           int window, double size, const std::string& method, int min_class,
           bool exclude_self) {
            auto params =
                make_params(predictor, horizon, window, size, method, min_class, exclude_self);
            int fidx = panel.firm_index(firm);
            if (fidx < 0) throw DataError("unknown firm: " + firm);
            std::size_t rec = panel.find_record(fidx, year);
            if (rec == Panel::npos)
                throw DataError("firm " + firm + " has no observation in " +
                                std::to_string(year));
            double x = ptable.value(params.predictor, rec);
            if (is_missing(x)) throw DataError("predictor missing for the case");
            if (!window_ok(panel, year, params))
                throw DataError("case year does not admit a full window");
            auto pool = collect_candidates(panel, ptable, otable, year, params,
                                           exclude_self ? fidx : -1);
            auto sel = select_reference_class(pool.pool, x, params);
            py::dict d;
            d["case_x"] = x;
            d["skip"] = sel.ok() ? py::object(py::none())
                                 : py::object(py::str(skip_reason_token(sel.skip)));
            py::list members;
            if (sel.ok()) {
                for (std::size_t i = sel.begin; i < sel.end; ++i) {
                    const auto& e = pool.pool.entries[i];
                    members.append(py::make_tuple(panel.firm_id(e.firm_idx), e.year, e.x,
                                                  e.outcome));
                }
            }
            d["members"] = members;
            d["outcomes"] = sel.ok() ? py::object(py::cast(class_outcomes(pool.pool, sel)))
                                     : py::object(py::none());
            return d;
        },
        py::arg("panel"), py::arg("predictors"), py::arg("outcomes"), py::arg("firm"),
        py::arg("year"), py::arg("predictor"), py::arg("horizon") = 1, py::arg("window") = 5,
        py::arg("size") = 0.05, py::arg("method") = "similarity", py::arg("min_class") = 20,
        py::arg("exclude_self") = false);

    // Backtests.
    m.def(
        "run_backtest",
        [](const Panel& panel, const PredictorTable& ptable, const OutcomeTable& otable,
           const std::string& predictor, int horizon, int window, double size,
           const std::string& method, int min_class, int threads, bool audit) {
            auto params = make_params(predictor, horizon, window, size, method, min_class,
                                      false);
            BacktestOptions opts;
            opts.threads = threads;
            opts.audit_no_lookahead = audit;
            auto sample = run_backtest(panel, ptable, otable, params, opts);
            py::dict d;
            d["values"] = sample.values;
            d["m"] = sample.m();
            d["cases_total"] = sample.cases_total;
            d["skips"] = skips_dict(sample.skips);
            d["lookahead_violations"] = sample.lookahead_violations;
            return d;
        },
        py::arg("panel"), py::arg("predictors"), py::arg("outcomes"), py::arg("predictor"),
        py::arg("horizon") = 1, py::arg("window") = 5, py::arg("size") = 0.05,
        py::arg("method") = "similarity", py::arg("min_class") = 20, py::arg("threads") = 0,
        py::arg("audit") = false);

    m.def(
        "run_grid",
        [](const Panel& panel, const PredictorTable& ptable, const OutcomeTable& otable,
           const std::vector<int>& horizons,
           std::optional<std::vector<std::string>> predictors, std::vector<int> windows,
           std::vector<double> sizes, bool mauboussin, bool groups, int min_class,
           int threads) {
            GridSpec grid;
            if (predictors) {
                for (const auto& tok : *predictors)
                    grid.predictors.push_back(PredictorId::parse(tok));
            } else {
                grid.predictors = similarity_predictors();
            }
            grid.windows = std::move(windows);
            grid.sizes = std::move(sizes);
            grid.horizons = horizons;
            grid.include_mauboussin = mauboussin;
            grid.include_groups = groups;
            grid.min_class = min_class;
            BacktestOptions opts;
            opts.threads = threads;
            py::list rows;
            for (const auto& r : run_grid(panel, ptable, otable, grid, opts))
                rows.append(result_dict(r));
            return rows;
        },
        py::arg("panel"), py::arg("predictors_table"), py::arg("outcomes"),
        py::arg("horizons"), py::arg("predictors") = py::none(),
        py::arg("windows") = std::vector<int>{5, 10, 20, 30},
        py::arg("sizes") = std::vector<double>{0.050, 0.025, 0.010},
        py::arg("mauboussin") = true, py::arg("groups") = true, py::arg("min_class") = 20,
        py::arg("threads") = 0);

    m.def(
        "predictor_influence",
        [](const Panel& panel, const PredictorTable& ptable, const OutcomeTable& otable,
           const std::string& predictor, int horizon, int window, double size,
           int anchor_year, double alpha) {
            auto params =
                make_params(predictor, horizon, window, size, "similarity", 20, false);
            py::list rows;
            for (const auto& r :
                 predictor_influence(panel, ptable, otable, params, anchor_year, {}, alpha)) {
                py::dict d;
                d["level"] = r.level;
                d["predictor_value"] = r.predictor_value;
                d["median"] = r.median;
                d["mean"] = r.trimmed_mean;
                d["std"] = r.trimmed_std;
                d["class_size"] = r.class_size;
                rows.append(std::move(d));
            }
            return rows;
        },
        py::arg("panel"), py::arg("predictors"), py::arg("outcomes"), py::arg("predictor"),
        py::arg("horizon"), py::arg("window"), py::arg("size"), py::arg("anchor_year"),
        py::arg("alpha") = 0.025);

    // Synthetic panels.
    m.def(
        "generate_panel",
        [](int firms, int years, std::uint64_t seed, int start_year, double x_persistence,
           double x_noise_sd, double sigma_base, double sigma_vslope, double missing_rate) {
            synth::SynthSpec spec;
            spec.n_firms = firms;
            spec.n_years = years;
            spec.seed = seed;
            spec.start_year = start_year;
            spec.x_persistence = x_persistence;
            spec.x_noise_sd = x_noise_sd;
            spec.sigma_base = sigma_base;
            spec.sigma_vslope = sigma_vslope;
            spec.missing_rate = missing_rate;
            return synth::generate_panel(spec).panel;
        },
        py::arg("firms") = 2000, py::arg("years") = 50, py::arg("seed") = 7,
        py::arg("start_year") = 1970, py::arg("x_persistence") = 0.6,
        py::arg("x_noise_sd") = 0.8, py::arg("sigma_base") = 9.0,
        py::arg("sigma_vslope") = 0.0, py::arg("missing_rate") = 0.0,
        "Generate a synthetic panel whose one-year growth follows a known "
        "mechanism of the `beta` column.");
}
