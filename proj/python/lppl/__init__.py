"""Log-periodic power-law fitting, Hessian sloppiness analysis and the
AR(1) Monte Carlo for crash-time prediction."""

from ._core import (
    PARAM_NAMES,
    EigenTrack,
    FitConfig,
    FitResult,
    FitStatus,
    LpplError,
    LpplParams,
    McConfig,
    McRow,
    McSummary,
    ModelKind,
    PriceSeries,
    SloppinessReport,
    SynthSpec,
    __version__,
    ar1_generate,
    confidence_window,
    eval_lppl,
    eval_power_law,
    gaussianity_check,
    grad_lppl,
    hessian_of_s,
    linear_subfit,
    lm_fit,
    load_csv,
    make_series,
    multistart_fit,
    normalized_sse,
    parse_csv,
    reference_1987_spec,
    rolling_track,
    run_mc,
    series_to_csv,
    sloppiness_report,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
