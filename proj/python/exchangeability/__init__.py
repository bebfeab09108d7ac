"""Exchangeability-based causal inference toolkit (Python front end)."""

from ._core import (
    ExchError,
    __version__,
    backdoor_check,
    beta_binomial_contrast,
    d_separated,
    direct_standardization,
    figure_names,
    g_formula_point,
    naive_contrast,
    null_paradox_report,
    replicate_summaries,
    run_cli,
    simulate_long,
    simulate_point,
)

__all__ = [
    "ExchError",
    "__version__",
    "backdoor_check",
    "beta_binomial_contrast",
    "d_separated",
    "direct_standardization",
    "figure_names",
    "g_formula_point",
    "naive_contrast",
    "null_paradox_report",
    "replicate_summaries",
    "run_cli",
    "simulate_long",
    "simulate_point",
]
