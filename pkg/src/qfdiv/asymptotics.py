"""Single-copy versus many-copy behaviour of the Renyi-type minimal divergence."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex_core import INF, renyi
from .dmin_solver import COMMUTING_TOL, SolveOptions, support_contained, solve
from .matrix_calc import as_density, commutator_norm, hermitize


def _sign(alpha: float) -> float:
    return 1.0 if (alpha > 1 or alpha < 0) else -1.0


def sandwiched_renyi(alpha: float, rho1, rho2) -> float:
    """sign((alpha - 1) alpha) tr (rho2^s rho1 rho2^s)^alpha with s = (1 - alpha) / (2 alpha).

    Powers are taken on supports.  For alpha > 1 the value is +inf unless
    supp rho1 lies in supp rho2.  Negative alpha is handled through the
    exchange alpha <-> 1 - alpha, rho1 <-> rho2.
    """
    a = float(alpha)
    if a in (0.0, 1.0) or not math.isfinite(a):
        raise ValueError(f"alpha must be finite and different from 0 and 1, got {alpha!r}")
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    if a < 0:
        return sandwiched_renyi(1.0 - a, r2, r1)
    if a > 1 and not support_contained(r1, r2):
        return INF
    s = (1.0 - a) / (2.0 * a)
    p = r2.power(s)
    mid = hermitize(p @ r1.matrix @ p)
    w = np.linalg.eigvalsh(mid)
    # Rounding noise on a zero eigenvalue is amplified by powers below one.
    w = np.where(w > 1e-13 * max(float(w[-1]), 0.0), w, 0.0)
    return _sign(a) * float(np.sum(w ** a))


def asymptotic_value(alpha: float, rho1, rho2) -> float:
    """Per-copy limit of the minimal divergence, in the signed Renyi form.

    For alpha >= 1/2 this is the sandwiched expression of (rho1, rho2); for
    alpha <= 1/2 the same expression with alpha -> 1 - alpha and the states
    exchanged.
    """
    if alpha >= 0.5:
        return sandwiched_renyi(alpha, rho1, rho2)
    return sandwiched_renyi(1.0 - alpha, rho2, rho1)


@dataclass
class GapReport:
    alpha: float
    single_copy_log: float
    asymptotic_log: float
    gap: float
    commuting: bool
    single_copy_path: str


def _log_abs(x: float) -> float:
    if x == 0:
        return -INF
    return math.log(abs(x))


def gap_report(alpha: float, rho1, rho2, opts: SolveOptions | None = None) -> GapReport:
    """Sign-adjusted difference between log|asymptotic| and log|single copy|.

    The gap is non-negative: a larger absolute value is better for
    alpha > 1 or alpha < 0 and a smaller one for 0 < alpha < 1.
    """
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    res = solve(renyi(alpha), r1, r2, opts or SolveOptions())
    single = _log_abs(res.value)
    asym = _log_abs(asymptotic_value(alpha, r1, r2))
    if asym == single:
        gap = 0.0
    else:
        gap = _sign(alpha) * (asym - single)
    return GapReport(
        alpha=float(alpha), single_copy_log=single, asymptotic_log=asym, gap=gap,
        commuting=commutator_norm(r1.matrix, r2.matrix) <= COMMUTING_TOL,
        single_copy_path=res.path,
    )


def _pure_overlap(phi1, phi2) -> float:
    a = np.asarray(phi1, dtype=complex).ravel()
    b = np.asarray(phi2, dtype=complex).ravel()
    if a.shape != b.shape:
        raise ValueError(f"state vectors have different lengths {a.size} and {b.size}")
    return abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))


def chernoff_pure(phi1, phi2) -> float:
    """Chernoff exponent -2 log |<phi1|phi2>| for two pure states."""
    ov = _pure_overlap(phi1, phi2)
    return INF if ov == 0 else -2.0 * math.log(ov)


def hoeffding_pure(r: float, phi1, phi2) -> float:
    """Hoeffding exponent for pure states: the Chernoff exponent when r <= it, +inf beyond."""
    if r < 0:
        raise ValueError(f"rate must be non-negative, got {r!r}")
    c = chernoff_pure(phi1, phi2)
    return c if r <= c else INF
