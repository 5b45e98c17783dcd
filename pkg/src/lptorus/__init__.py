"""
Multi-parameter Littlewood-Paley and martingale tools on the d-torus.

Exact spectral representations of trigonometric polynomials, smooth and
rough dyadic projections, dyadic martingale differences, block statistics
of frequency sets and reproducible numerical experiments built on them.
"""

__version__ = "0.1.0"

from .errors import BudgetError, DegenerateInputError, LPTorusError, ResolutionError
from .spectral_core import (
    SampleGrid,
    TrigPoly,
    analyze,
    evaluate,
    linf_estimate,
    lp_norm,
    orlicz_functional,
    random_poly,
    tensor_product,
)

__all__ = [
    "__version__",
    "LPTorusError",
    "ResolutionError",
    "BudgetError",
    "DegenerateInputError",
    "TrigPoly",
    "SampleGrid",
    "analyze",
    "evaluate",
    "linf_estimate",
    "lp_norm",
    "orlicz_functional",
    "random_poly",
    "tensor_product",
]
