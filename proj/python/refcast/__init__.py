"""Reference-class forecasting of sales growth distributions.

Thin wrapper around the compiled `_refcast` core. The heavy lifting —
panel indexing, reference-class selection, PIT calibration backtests —
happens in C++; this package exposes the operations with plain python
types (lists, dicts, tuples).
"""

from ._refcast import (  # noqa: F401
    DataError,
    OutcomeTable,
    Panel,
    PredictorTable,
    __version__,
    base_rate_table,
    build_outcome_table,
    build_predictor_table,
    cvm_statistic,
    generate_panel,
    kde_curve,
    kde_density,
    ks_statistic,
    load_panel,
    load_panel_any,
    pit_evaluate,
    place_estimates,
    predictor_influence,
    predictor_tokens,
    quantile,
    quantile_deviation,
    reference_class,
    run_backtest,
    run_grid,
    save_panel_cache,
    similarity_predictor_tokens,
    summarize_predictors,
    trimmed_mean,
    trimmed_std,
    write_panel_csv,
)

__all__ = [
    "DataError",
    "OutcomeTable",
    "Panel",
    "PredictorTable",
    "__version__",
    "base_rate_table",
    "build_outcome_table",
    "build_predictor_table",
    "cvm_statistic",
    "generate_panel",
    "kde_curve",
    "kde_density",
    "ks_statistic",
    "load_panel",
    "load_panel_any",
    "pit_evaluate",
    "place_estimates",
    "predictor_influence",
    "predictor_tokens",
    "quantile",
    "quantile_deviation",
    "reference_class",
    "run_backtest",
    "run_grid",
    "save_panel_cache",
    "similarity_predictor_tokens",
    "summarize_predictors",
    "trimmed_mean",
    "trimmed_std",
    "write_panel_csv",
]
