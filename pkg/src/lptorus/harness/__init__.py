"""Reproducible experiment sweeps, CSV/JSON output and the command line."""

from .records import FitResult, SweepRecord, fit_loglog, fit_semilog2
from .sweeps import (
    cww_ratio_sweep,
    exp_integrability,
    exp_int_sweep,
    lambda_p_sweep,
    lemma_decay_sweep,
    oberlin_sweep,
    sharpness_sweep,
    variant_lp_ratio_sweep,
)

__all__ = [
    "FitResult",
    "SweepRecord",
    "fit_loglog",
    "fit_semilog2",
    "cww_ratio_sweep",
    "exp_integrability",
    "exp_int_sweep",
    "lambda_p_sweep",
    "lemma_decay_sweep",
    "oberlin_sweep",
    "sharpness_sweep",
    "variant_lp_ratio_sweep",
]
