"""Independent lower bounds on the minimal divergence from explicit measurements.

A measurement's classical divergence never exceeds the minimal quantum
value, so a numerical search over projective measurements gives a check on
the solver that shares no code with its variational formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .convex_core import INF, DivergenceGenerator, classical_df
from .matrix_calc import as_density, as_hermitian, dagger, hermitize
from .sampling import random_unitary, rng_from

PROB_CLAMP = 1e-14


@dataclass
class Measurement:
    """POVM given by its effects; they must be PSD and sum to the identity."""

    effects: list

    def __post_init__(self):
        if not self.effects:
            raise ValueError("a measurement needs at least one effect")
        effs = [as_hermitian(e, tol=1e-10, name=f"effect[{k}]") for k, e in enumerate(self.effects)]
        d = effs[0].shape[0]
        for k, e in enumerate(effs):
            if e.shape != (d, d):
                raise ValueError(f"effect[{k}] has shape {e.shape}, expected {(d, d)}")
            lo = float(np.linalg.eigvalsh(e)[0])
            if lo < -1e-10:
                raise ValueError(f"effect[{k}] is not positive semidefinite (min eigenvalue {lo:.3e})")
        dev = float(np.max(np.abs(sum(effs) - np.eye(d))))
        if dev > 1e-10:
            raise ValueError(f"effects do not sum to the identity (deviation {dev:.3e})")
        self.effects = effs

    @classmethod
    def from_basis(cls, u) -> "Measurement":
        u = np.asarray(u, dtype=complex)
        return cls([np.outer(u[:, k], u[:, k].conj()) for k in range(u.shape[1])])

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


def _clamp(p: np.ndarray) -> np.ndarray:
    return np.where(p < PROB_CLAMP, 0.0, p)


def induced_distributions(m: Measurement, rho1, rho2):
    """Outcome distributions tr rho M_x; entries below 1e-14 are set to zero."""
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    p = np.array([np.trace(r1.matrix @ e).real for e in m.effects])
    q = np.array([np.trace(r2.matrix @ e).real for e in m.effects])
    return _clamp(p), _clamp(q)


def measured_value(f: DivergenceGenerator, m: Measurement, rho1, rho2) -> float:
    p, q = induced_distributions(m, rho1, rho2)
    return classical_df(f, p, q)


class _PVMObjective:
    """Classical divergence of the basis U0 exp(iH) as a function of H.

    Only off-diagonal entries of H are free: diagonal ones rephase basis
    vectors and leave the projective measurement unchanged.
    """

    def __init__(self, f, r1, r2):
        self.f = f
        self.a = np.ascontiguousarray(r1.matrix)
        self.b = np.ascontiguousarray(r2.matrix)
        self.d = r1.dim
        self.iu = np.triu_indices(self.d, 1)
        self.nparams = self.d * (self.d - 1)

    def value(self, u) -> float:
        p = _clamp(_kernels.pvm_probabilities(u, self.a))
        q = _clamp(_kernels.pvm_probabilities(u, self.b))
        if np.all(q > 0):
            return float(np.sum(q * np.asarray(self.f.f_at(p / q), dtype=float)))
        return classical_df(self.f, p, q)

    def unitary(self, base, x):
        h = np.zeros((self.d, self.d), dtype=complex)
        m = len(self.iu[0])
        h[self.iu] = x[:m] + 1j * x[m:]
        h = h + h.conj().T
        w, v = np.linalg.eigh(h)
        return base @ ((v * np.exp(1j * w)) @ v.conj().T)

    def search(self, base, scale, xatol, fatol, maxfev):
        n = self.nparams
        if n == 0:
            return self.value(base), base

        def neg(x):
            val = self.value(self.unitary(base, x))
            return -val if math.isfinite(val) else -1e300

        simplex = np.vstack([np.zeros(n), scale * np.eye(n)])
        res = minimize(neg, np.zeros(n), method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": xatol, "fatol": fatol, "maxfev": maxfev})
        u = self.unitary(base, res.x)
        return self.value(u), u


@dataclass
class OracleResult:
    value: float
    measurement: Measurement
    basis: np.ndarray
    restarts: int


def pvm_search(f: DivergenceGenerator, rho1, rho2, *, restarts: int = 32, seed=None, warm_bases=()) -> OracleResult:
    """Best rank-one projective measurement found by multistart Nelder-Mead.

    Bases are parametrised as U0 exp(iH) with H Hermitian.  Starting bases
    are the supplied warm starts, the eigenbases of rho1, rho2 and
    rho1 - rho2, and ``restarts`` random unitaries.  The best candidate is
    polished with a tight tolerance at the end.
    """
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    if r1.dim != r2.dim:
        raise ValueError(f"dimension mismatch: {r1.dim} vs {r2.dim}")
    rng = rng_from(seed)
    obj = _PVMObjective(f, r1, r2)
    d = r1.dim
    starts = [np.asarray(u, dtype=complex) for u in warm_bases if u is not None]
    starts += [r1.eigenvectors, r2.eigenvectors, np.linalg.eigh(hermitize(r1.matrix - r2.matrix))[1]]
    n_warm = len(starts)
    children = rng.spawn(restarts) if hasattr(rng, "spawn") else [np.random.default_rng(rng.integers(2**63)) for _ in range(restarts)]
    starts += [random_unitary(d, c) for c in children]
    best_val, best_u = -INF, starts[0]
    for k, base in enumerate(starts):
        val0 = obj.value(base)
        if val0 == INF:
            return OracleResult(INF, Measurement.from_basis(base), base, restarts)
        scale = 0.05 if k < n_warm else 0.5
        val, u = obj.search(base, scale, 1e-3, 1e-8, 100 * d * d)
        if val0 > val:
            val, u = val0, base
        if val > best_val:
            best_val, best_u = val, u
    val, u = obj.search(best_u, 1e-3, 1e-10, 1e-15, 1000 * d * d)
    if val > best_val:
        best_val, best_u = val, u
    return OracleResult(best_val, Measurement.from_basis(best_u), best_u, restarts)


def two_outcome_check(f: DivergenceGenerator, phi1, rho2) -> float:
    """Classical value of the measurement {|phi1><phi1|, 1 - |phi1><phi1|}."""
    r2 = as_density(rho2, "rho2")
    phi = np.asarray(phi1, dtype=complex).ravel()
    phi = phi / np.linalg.norm(phi)
    q = float(np.vdot(phi, r2.matrix @ phi).real)
    rest = r2.trace - q
    return classical_df(f, [1.0, 0.0], _clamp(np.array([q, rest])))


def random_povm_near(basis: np.ndarray, extra: int, rng, spread: float = 0.3) -> Measurement:
    """POVM with dim + extra outcomes obtained by perturbing and renormalising a PVM."""
    d = basis.shape[0]
    ops = [np.outer(basis[:, k], basis[:, k].conj()) for k in range(d)]
    ops = [a + spread * rng.random() * _rand_psd(d, rng) for a in ops]
    ops += [spread * _rand_psd(d, rng) for _ in range(extra)]
    s = sum(ops)
    w, v = np.linalg.eigh(hermitize(s))
    inv = (v * w ** -0.5) @ dagger(v)
    effs = [hermitize(inv @ a @ inv) for a in ops]
    corr = np.eye(d) - sum(effs)
    effs[0] = effs[0] + hermitize(corr)
    return Measurement(effs)


def _rand_psd(d, rng):
    g = rng.standard_normal((d, 1)) + 1j * rng.standard_normal((d, 1))
    return g @ g.conj().T / d


def povm_refinement_gain(f: DivergenceGenerator, rho1, rho2, basis, *, trials: int = 64, extra: int = 2, seed=None) -> float:
    """Largest improvement over the PVM ``basis`` among random nearby POVMs with more outcomes."""
    rng = rng_from(seed)
    base = measured_value(f, Measurement.from_basis(basis), rho1, rho2)
    best = -INF
    for k in range(trials):
        m = random_povm_near(basis, extra, rng, spread=10.0 ** rng.uniform(-4, 0))
        best = max(best, measured_value(f, m, rho1, rho2))
    return best - base


def verify(f: DivergenceGenerator, rho1, rho2, *, restarts: int = 32, seed=None, solve_opts=None) -> dict:
    """Compare the solver with the measurement search, warm-started from the solver's basis."""
    from .dmin_solver import SolveOptions, solve

    res = solve(f, rho1, rho2, solve_opts or SolveOptions())
    orc = pvm_search(f, rho1, rho2, restarts=restarts, seed=seed, warm_bases=[res.measurement_basis])
    if res.measurement_basis is not None:
        solver_measured = measured_value(f, Measurement.from_basis(res.measurement_basis), rho1, rho2)
    else:
        solver_measured = None
    gap = res.value - orc.value if math.isfinite(res.value) and math.isfinite(orc.value) else None
    return {
        "solver": res,
        "oracle": orc,
        "solver_basis_value": solver_measured,
        "gap": gap,
    }
