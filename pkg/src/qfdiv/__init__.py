"""Minimal quantum f-divergences: the best classical f-divergence reachable by measuring two states."""
from .convex_core import (
    DivergenceGenerator,
    Interval,
    canonicalize,
    chi2,
    classical_df,
    fb,
    fidelity_generator,
    from_dict,
    g_eval,
    hat,
    kl,
    renyi,
    tv,
)
from .dmin_solver import DivergenceResult, SolveOptions, solve
from .matrix_calc import DensityOperator

__version__ = "0.1.0"

__all__ = [
    "DensityOperator",
    "DivergenceGenerator",
    "DivergenceResult",
    "Interval",
    "SolveOptions",
    "canonicalize",
    "chi2",
    "classical_df",
    "fb",
    "fidelity_generator",
    "from_dict",
    "g_eval",
    "hat",
    "kl",
    "renyi",
    "solve",
    "tv",
]
