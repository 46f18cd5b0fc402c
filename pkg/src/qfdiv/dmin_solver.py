"""Minimal quantum f-divergence: the supremum of D_f over measurement outcomes.

For a generator whose conjugate is operator convex the value equals

    sup { tr rho1 T - tr rho2 f*(T) : spectrum of T inside dom f* },

a concave maximisation that is solved here by projected gradient ascent.
Closed forms, a commuting shortcut, a pure-state formula and a kernel
reduction are tried first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .convex_core import INF, DivergenceGenerator, classical_df, g_eval, hat
from .matrix_calc import (
    DensityOperator,
    MatrixError,
    as_density,
    commutator_norm,
    dagger,
    divided_differences,
    fidelity,
    hermitize,
    joint_eigenbasis,
    solve_sylvester_symmetric,
    trace_norm,
)

PURE_STATE = "pure_state"
CLOSED_FORM_F2 = "closed_form_f2"
CLOSED_FORM_FIDELITY = "closed_form_fidelity"
CLOSED_FORM_TV = "closed_form_tv"
GENERIC_GRADIENT = "generic_gradient"
SWAPPED_GENERIC = "swapped_generic"
COMMUTING_CLASSICAL = "commuting_classical"
INFINITE = "infinite"
PATHS = (PURE_STATE, CLOSED_FORM_F2, CLOSED_FORM_FIDELITY, CLOSED_FORM_TV,
         GENERIC_GRADIENT, SWAPPED_GENERIC, COMMUTING_CLASSICAL)

COMMUTING_TOL = 1e-10
SUPPORT_TOL = 1e-8
BOX_EPS = 1e-8


class SolverError(ValueError):
    """Invalid request to the solver, such as an inapplicable forced path."""


class UnsupportedFamilyError(SolverError):
    """The generator satisfies neither operator-convexity condition."""


class HypothesisError(SolverError):
    """A reduction was requested for a generator that does not admit it."""


@dataclass
class DivergenceResult:
    value: float
    finite: bool
    path: str
    optimizer_T: Optional[np.ndarray] = None
    iterations: int = 0
    gradient_residual: Optional[float] = None
    converged: bool = True
    warnings: list = field(default_factory=list)
    measurement_basis: Optional[np.ndarray] = None
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SpectralBounds:
    b_star: float
    b_star_prime: float
    t_star: float
    t_star_prime: float


@dataclass
class SolveOptions:
    tol: float = 1e-9
    max_iter: int = 10000
    force_path: Optional[str] = None


# ---------------------------------------------------------------------------
# Supports and finiteness


def support_contained(inner: DensityOperator, outer: DensityOperator) -> bool:
    """Whether supp inner is a subspace of supp outer."""
    ker = outer.kernel
    if ker.shape[1] == 0:
        return True
    return float(np.linalg.norm(dagger(ker) @ inner.support, 2)) <= SUPPORT_TOL


def support_relation(rho1, rho2) -> str:
    """One of 'equal', 'one_in_two', 'two_in_one', 'incomparable'.

    'one_in_two' means supp rho1 is a proper subspace of supp rho2.
    """
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    a = support_contained(r1, r2)
    b = support_contained(r2, r1)
    if a and b:
        return "equal"
    if a:
        return "one_in_two"
    if b:
        return "two_in_one"
    return "incomparable"


def finiteness_check(f: DivergenceGenerator, rho1, rho2) -> bool:
    rel = support_relation(rho1, rho2)
    below = f.conj_infimum > -INF
    above = f.conj_domain.bounded_above
    return {
        "equal": True,
        "one_in_two": below,
        "two_in_one": above,
        "incomparable": below and above,
    }[rel]


def _max_generalised_eig(num: DensityOperator, den: DensityOperator) -> float:
    """Largest eigenvalue of den^-1/2 num den^-1/2 on supp den."""
    v = den.support
    s = den.eigenvalues[den.support_mask] ** -0.5
    m = (s[:, None] * (dagger(v) @ num.matrix @ v)) * s[None, :]
    return float(np.linalg.eigvalsh(hermitize(m))[-1])


def spectral_bounds(f: DivergenceGenerator, rho1, rho2) -> SpectralBounds:
    """Box [t*', t*] that contains the spectrum of an optimal T.

    b* is the least b with rho1 <= b rho2 and b*' the largest b with
    rho1 >= b rho2; t* and t*' are the extreme subgradients of f there.
    """
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    dom = f.conj_domain
    b_star = _max_generalised_eig(r1, r2) if support_contained(r1, r2) else INF
    if support_contained(r2, r1):
        b_prime = 1.0 / _max_generalised_eig(r2, r1)
    else:
        b_prime = 0.0
    t_star = float(f.f_prime_right_at(b_star)) if math.isfinite(b_star) else dom.upper
    t_prime = float(f.f_prime_left_at(b_prime)) if b_prime > 0 else dom.lower
    return SpectralBounds(b_star, b_prime, min(t_star, dom.upper), max(t_prime, dom.lower))


# ---------------------------------------------------------------------------
# Reductions and closed forms


def admits_kernel_reduction(f: DivergenceGenerator) -> bool:
    return f.canonical and f.cond_I and not f.conj_domain.bounded_below


def _kernel_mass(r1: DensityOperator, r2: DensityOperator) -> float:
    if support_contained(r2, r1):
        return 0.0
    ker = r1.kernel
    return max(0.0, float(np.trace(dagger(ker) @ r2.matrix @ ker).real))


def _times(c: float, mass: float) -> float:
    return 0.0 if mass == 0.0 else c * mass


@dataclass
class KernelReduction:
    rho1: DensityOperator
    rho2: np.ndarray
    constant: float
    isometry: np.ndarray


def kernel_reduce(f: DivergenceGenerator, rho1, rho2, *, force: bool = False) -> KernelReduction:
    """Compress both operators onto supp rho1.

    D(rho1 || rho2) = D(rho1' || rho2') + f(0) tr rho2 (1 - pi), where the
    primes denote compressions by the support isometry.  The identity needs
    a canonical f with operator convex f* whose domain is unbounded below;
    ``force`` skips that check and only performs the arithmetic.
    """
    if not force and not admits_kernel_reduction(f):
        raise HypothesisError(
            f"{f!r}: kernel reduction needs a canonical generator with operator convex f* "
            "and dom f* unbounded below"
        )
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    v = r1.support
    const = _times(f.f_at_zero, _kernel_mass(r1, r2))
    return KernelReduction(r1.compress(v, "rho1"), hermitize(dagger(v) @ r2.matrix @ v), const, v)


def pure_state_value(f: DivergenceGenerator, phi, rho2, weight: float = 1.0) -> float:
    """D(weight |phi><phi| || rho2) = g(weight, q) + f(0) (tr rho2 - q), q = <phi|rho2|phi>."""
    r2 = as_density(rho2, "rho2")
    phi = np.asarray(phi, dtype=complex).ravel()
    phi = phi / np.linalg.norm(phi)
    q = float(np.vdot(phi, r2.matrix @ phi).real)
    q = q if q > r2.rank_tol else 0.0
    proj = np.eye(r2.dim) - np.outer(phi, phi.conj())
    mass = float(np.trace(proj @ r2.matrix @ proj).real)
    if mass <= SUPPORT_TOL * max(1.0, r2.trace):
        mass = 0.0
    head = float(g_eval(f, weight, q))
    return head + _times(f.f_at_zero, mass)


def chi2_closed_form(rho1, rho2):
    """Value and optimiser for f(l) = l^2: T0 solves rho2 T + T rho2 = 4 rho1, value tr rho1 T0 / 2."""
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    t0 = solve_sylvester_symmetric(r2, 4.0 * r1.matrix)
    return 0.5 * float(np.trace(r1.matrix @ t0).real), hermitize(t0)


def fidelity_closed_form(rho1, rho2):
    """Value -tr sqrt(rho2^1/2 rho1 rho2^1/2) and the operator whose eigenbasis is optimal."""
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    value = -fidelity(r1, r2)
    h = r2.power(0.5)
    hinv = r2.power(-0.5)
    mid = DensityOperator(hermitize(h @ r1.matrix @ h), "mid").power(0.5)
    basis_op = hermitize(hinv @ mid @ hinv)
    return value, basis_op


def tv_closed_form(rho1, rho2):
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    diff = r1.matrix - r2.matrix
    w, v = np.linalg.eigh(diff)
    return trace_norm(diff), (v * np.sign(w)) @ dagger(v)


# ---------------------------------------------------------------------------
# Generic projected gradient ascent


def _box(f: DivergenceGenerator, bounds: SpectralBounds, start: float):
    dom = f.conj_domain
    lo, hi = bounds.t_star_prime, bounds.t_star
    notes = []

    def needs_eps(end, closed):
        if not closed:
            return True
        d = float(f.conj_prime_at(end))
        return not math.isfinite(d)

    if lo <= dom.lower:
        if math.isfinite(dom.lower):
            if needs_eps(dom.lower, dom.lower_closed):
                lo = dom.lower + BOX_EPS * (1.0 + abs(dom.lower))
        else:
            lo = -1e6 * (1.0 + abs(start))
            notes.append("dom f* is unbounded below on an unreduced kernel; the box was truncated")
    if hi >= dom.upper:
        if math.isfinite(dom.upper):
            if needs_eps(dom.upper, dom.upper_closed):
                hi = dom.upper - BOX_EPS * (1.0 + abs(dom.upper))
        else:
            hi = 1e6 * (1.0 + abs(start))
            notes.append("dom f* is unbounded above on an unreduced kernel; the box was truncated")
    if lo > hi:
        lo = hi = 0.5 * (lo + hi)
    return lo, hi, notes


class _Objective:
    def __init__(self, f: DivergenceGenerator, r1: DensityOperator, r2: DensityOperator, lo: float, hi: float):
        self.f, self.a, self.b = f, r1.matrix, r2.matrix
        self.lo, self.hi = lo, hi
        self.basis = _hermitian_basis(r1.dim)

    def project(self, t):
        w, v = np.linalg.eigh(hermitize(t))
        w = np.clip(w, self.lo, self.hi)
        return (v * w) @ dagger(v)

    def evaluate(self, t):
        w, v = np.linalg.eigh(hermitize(t))
        w = np.clip(w, self.lo, self.hi)
        t = (v * w) @ dagger(v)
        be = dagger(v) @ self.b @ v
        fw = np.asarray(self.f.conj_at(w), dtype=float)
        value = float(np.trace(self.a @ t).real) - float(np.sum(fw * np.diag(be).real))
        dd = divided_differences(self.f.conj_at, self.f.conj_prime_at, w)
        grad = self.a - v @ (dd * be) @ dagger(v)
        return value, hermitize(grad), t, w, v

    def margin(self, w) -> float:
        return float(min(np.min(w) - self.lo, self.hi - np.max(w)))

    def newton_direction(self, t, grad, w):
        """Newton direction from a central-difference Hessian, or None."""
        margin = self.margin(w)
        if not margin > 0:
            return None
        eps = min(1e-6 * (1.0 + float(np.max(np.abs(w)))), 1e-2 * margin)
        n = len(self.basis)
        g = np.array([_inner(e, grad) for e in self.basis])
        hess = np.empty((n, n))
        for k, e in enumerate(self.basis):
            gp = self.evaluate(t + eps * e)[1]
            gm = self.evaluate(t - eps * e)[1]
            col = (gp - gm) / (2 * eps)
            hess[:, k] = [_inner(x, col) for x in self.basis]
        hess = 0.5 * (hess + hess.T)
        ev = np.linalg.eigvalsh(hess)
        if not np.all(np.isfinite(ev)) or ev[-1] >= 0:
            return None
        coef = -np.linalg.solve(hess, g)
        return sum(c * e for c, e in zip(coef, self.basis))


def _hermitian_basis(d: int):
    """Frobenius-orthonormal basis of d x d Hermitian matrices."""
    out = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    r = 1.0 / math.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = r
            out.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j], e[j, i] = -1j * r, 1j * r
            out.append(e)
    return out


def _inner(x, y) -> float:
    return float(np.sum(x.conj() * y).real)


def solve_generic(f: DivergenceGenerator, rho1, rho2, *, tol: float = 1e-9, max_iter: int = 10000) -> DivergenceResult:
    """Maximise tr rho1 T - tr rho2 f*(T) over a spectral box.

    Projected gradient ascent with Armijo backtracking: eigenvalues are
    clipped to [t*', t*] (shrunk by 1e-8 at open or singular ends of
    dom f*), trial steps use the Barzilai-Borwein length, and while the
    iterate stays strictly inside the box a safeguarded Newton step is
    tried first.  Convergence is declared once the projected-gradient
    residual ||P(T + grad) - T|| is at most ``tol`` times the mean trace.
    """
    if not f.cond_I:
        raise UnsupportedFamilyError(f"{f!r}: f* is not operator convex, the variational formula does not apply")
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    if r1.dim != r2.dim:
        raise MatrixError(f"dimension mismatch: {r1.dim} vs {r2.dim}")
    if not finiteness_check(f, r1, r2):
        return DivergenceResult(INF, False, INFINITE)
    bounds = spectral_bounds(f, r1, r2)
    start = f.f_prime_at_one()
    lo, hi, notes = _box(f, bounds, start)
    obj = _Objective(f, r1, r2, lo, hi)
    scale = 0.5 * (r1.trace + r2.trace)
    g, grad, t, w, _ = obj.evaluate(obj.project(start * np.eye(r1.dim, dtype=complex)))
    step = 1.0
    residual = INF
    converged = False
    newton_steps = 0
    it = 0
    for it in range(1, max_iter + 1):
        residual = float(np.linalg.norm(obj.project(t + grad) - t))
        if residual <= tol * scale:
            converged = True
            break
        accepted = None
        delta = obj.newton_direction(t, grad, w)
        if delta is not None:
            slope = _inner(grad, delta)
            s = 1.0
            while slope > 0 and s > 1e-6:
                trial = t + s * delta
                wt = np.linalg.eigvalsh(hermitize(trial))
                if wt[0] > lo and wt[-1] < hi:
                    cand = obj.evaluate(trial)
                    if cand[0] >= g + 1e-4 * s * slope - 1e-15 * max(1.0, abs(g)):
                        accepted = cand
                        newton_steps += 1
                        break
                s *= 0.5
        if accepted is None:
            d = obj.project(t + step * grad) - t
            slope = _inner(grad, d)
            if slope <= 0:
                d = obj.project(t + grad) - t
                slope = _inner(grad, d)
            s = 1.0
            while s >= 1e-14:
                cand = obj.evaluate(t + s * d)
                if cand[0] >= g + 1e-4 * s * slope - 1e-15 * max(1.0, abs(g)):
                    accepted = cand
                    break
                s *= 0.5
        if accepted is None:
            # No ascent is possible at working precision.
            converged = residual <= 1e-6 * scale
            break
        g_new, grad_new, t_new, w, _ = accepted
        sk = t_new - t
        sy = -_inner(sk, grad_new - grad)
        step = _inner(sk, sk) / sy if sy > 0 else 1e10
        step = min(max(step, 1e-10), 1e10)
        t, g, grad = t_new, g_new, grad_new
    warnings = list(notes)
    if not converged:
        warnings.append(f"projected gradient did not reach tolerance: residual {residual:.3e} after {it} iterations")
    if not r2.full_rank:
        warnings.append("rho2 has a kernel: the optimum lies on the boundary of dom f*, no optimality certificate applies")
    w, v = np.linalg.eigh(t)
    diag = {"box": (lo, hi), "spectral_bounds": bounds, "newton_steps": newton_steps}
    if obj.margin(w) > 1e-9 * (1.0 + max(abs(lo), abs(hi)) if math.isfinite(lo) and math.isfinite(hi) else 1.0):
        with np.errstate(all="ignore"):
            fw = np.asarray(f.f_at(np.asarray(f.conj_prime_at(w), dtype=float)), dtype=float)
        alt = float(np.sum(fw * np.diag(dagger(v) @ r2.matrix @ v).real))
        gap = abs(alt - g)
        diag["value_identity_gap"] = gap
        if not gap <= 1e-7 * max(1.0, abs(g)):
            warnings.append(f"value identity tr rho2 f(f*'(T0)) differs from the objective by {gap:.3e}")
    return DivergenceResult(
        value=g, finite=True, path=GENERIC_GRADIENT, optimizer_T=t, iterations=it,
        gradient_residual=residual, converged=converged, warnings=warnings,
        measurement_basis=v, diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# Routing


def _is_family(f: DivergenceGenerator, name: str, alpha: float | None = None) -> bool:
    if f.name != name:
        return False
    return alpha is None or f.params.get("alpha") == alpha


def _embed_basis(basis: np.ndarray, v: np.ndarray, dim: int) -> np.ndarray:
    """Extend an r x r basis on range(v) to a d x d unitary."""
    cols = v @ basis
    if cols.shape[1] == dim:
        return cols
    q, _ = np.linalg.qr(np.hstack([cols, np.eye(dim, dtype=complex)]))
    comp = q[:, cols.shape[1]:dim]
    return np.hstack([cols, comp])


def _commuting(r1, r2, f) -> DivergenceResult:
    u = joint_eigenbasis(r1.matrix, r2.matrix)
    p = np.einsum("ak,ab,bk->k", u.conj(), r1.matrix, u).real
    q = np.einsum("ak,ab,bk->k", u.conj(), r2.matrix, u).real
    p = np.where(p > r1.rank_tol, p, 0.0)
    q = np.where(q > r2.rank_tol, q, 0.0)
    val = classical_df(f, p, q)
    return DivergenceResult(val, math.isfinite(val), COMMUTING_CLASSICAL, measurement_basis=u,
                            diagnostics={"p": p, "q": q})


def _closed(f, r1, r2, path) -> DivergenceResult:
    if path == CLOSED_FORM_F2:
        if _is_family(f, "renyi", 2.0):
            val, t0 = chi2_closed_form(r1, r2)
        elif _is_family(f, "renyi", -1.0):
            val, t0 = chi2_closed_form(r2, r1)
        else:
            raise SolverError(f"{path} only applies to renyi alpha=2 or alpha=-1, not {f!r}")
        return DivergenceResult(val, True, path, optimizer_T=t0, measurement_basis=np.linalg.eigh(t0)[1])
    if path == CLOSED_FORM_FIDELITY:
        if not _is_family(f, "renyi", 0.5):
            raise SolverError(f"{path} only applies to renyi alpha=0.5, not {f!r}")
        val, op = fidelity_closed_form(r1, r2)
        return DivergenceResult(val, True, path, measurement_basis=np.linalg.eigh(op)[1])
    if path == CLOSED_FORM_TV:
        if f.name != "tv":
            raise SolverError(f"{path} only applies to tv, not {f!r}")
        val, t0 = tv_closed_form(r1, r2)
        return DivergenceResult(val, True, path, optimizer_T=t0, measurement_basis=np.linalg.eigh(t0)[1])
    raise SolverError(f"unknown closed-form path {path!r}")


def _closed_form_path(f) -> Optional[str]:
    if _is_family(f, "renyi", 2.0) or _is_family(f, "renyi", -1.0):
        return CLOSED_FORM_F2
    if _is_family(f, "renyi", 0.5):
        return CLOSED_FORM_FIDELITY
    if f.name == "tv":
        return CLOSED_FORM_TV
    return None


def _pure(f, r1, r2, path=PURE_STATE) -> DivergenceResult:
    phi = r1.eigenvectors[:, -1]
    val = pure_state_value(f, phi, r2, weight=float(r1.eigenvalues[-1]))
    return DivergenceResult(val, math.isfinite(val), path, measurement_basis=r1.eigenvectors)


def _reduced_generic(f, r1, r2, opts: SolveOptions, path: str) -> DivergenceResult:
    """Generic solve of D_f(r1 || r2), compressing onto supp r1 when allowed."""
    if r1.full_rank or not admits_kernel_reduction(f):
        res = solve_generic(f, r1, r2, tol=opts.tol, max_iter=opts.max_iter)
        if res.path != INFINITE:
            res.path = path
        return res
    red = kernel_reduce(f, r1, r2)
    a = red.rho1
    if float(np.linalg.eigvalsh(red.rho2)[-1]) <= r2.rank_tol:
        # rho2 vanishes on supp rho1, so the reduced term is tr rho1 times the recession slope.
        val = float(g_eval(f, a.trace, 0.0)) + red.constant
        return DivergenceResult(val, math.isfinite(val), path, measurement_basis=r1.eigenvectors)
    b = DensityOperator(red.rho2, "rho2")
    if a.dim == 1:
        val = float(g_eval(f, a.trace, b.trace)) + red.constant
        return DivergenceResult(val, math.isfinite(val), path, measurement_basis=r1.eigenvectors)
    res = solve_generic(f, a, b, tol=opts.tol, max_iter=opts.max_iter)
    res.value = res.value + red.constant
    res.finite = math.isfinite(res.value)
    res.diagnostics["kernel_constant"] = red.constant
    res.diagnostics["reduced_optimizer_T"] = res.optimizer_T
    res.optimizer_T = None
    if res.measurement_basis is not None:
        res.measurement_basis = _embed_basis(res.measurement_basis, red.isometry, r1.dim)
    res.path = path
    return res


def solve(f: DivergenceGenerator, rho1, rho2, opts: SolveOptions | None = None, **kwargs) -> DivergenceResult:
    """Compute D^min_f(rho1 || rho2).

    Routing: finiteness, commuting pair, closed forms (alpha = 2, -1, 1/2 and
    total variation), rank-one rho1 (or rank-one rho2 through the reversed
    generator), then the generic solver on (f, rho1, rho2) when f* is
    operator convex, otherwise on (reversed f, rho2, rho1).  ``force_path``
    selects one route explicitly.
    """
    opts = opts or SolveOptions(**kwargs)
    r1, r2 = as_density(rho1, "rho1"), as_density(rho2, "rho2")
    if r1.dim != r2.dim:
        raise MatrixError(f"dimension mismatch: rho1 is {r1.dim}x{r1.dim}, rho2 is {r2.dim}x{r2.dim}")
    if not finiteness_check(f, r1, r2):
        return DivergenceResult(INF, False, INFINITE)
    forced = opts.force_path
    if forced is not None:
        return _forced(f, r1, r2, opts)
    if commutator_norm(r1.matrix, r2.matrix) <= COMMUTING_TOL:
        return _commuting(r1, r2, f)
    cf = _closed_form_path(f)
    if cf is not None:
        return _closed(f, r1, r2, cf)
    if r1.rank == 1 and admits_kernel_reduction(f):
        return _pure(f, r1, r2)
    fh = hat(f) if f.cond_II else None
    if r2.rank == 1 and fh is not None and admits_kernel_reduction(fh):
        return _pure(fh, r2, r1)
    if f.cond_I:
        return _reduced_generic(f, r1, r2, opts, GENERIC_GRADIENT)
    if fh is not None:
        return _reduced_generic(fh, r2, r1, opts, SWAPPED_GENERIC)
    raise UnsupportedFamilyError(f"{f!r} satisfies neither operator-convexity condition")


def _forced(f, r1, r2, opts: SolveOptions) -> DivergenceResult:
    path = opts.force_path
    if path == COMMUTING_CLASSICAL:
        if commutator_norm(r1.matrix, r2.matrix) > COMMUTING_TOL:
            raise SolverError("force_path commuting_classical: the operators do not commute")
        return _commuting(r1, r2, f)
    if path in (CLOSED_FORM_F2, CLOSED_FORM_FIDELITY, CLOSED_FORM_TV):
        return _closed(f, r1, r2, path)
    if path == PURE_STATE:
        if r1.rank != 1:
            raise SolverError("force_path pure_state: rho1 is not rank one")
        if not admits_kernel_reduction(f):
            raise SolverError(f"force_path pure_state: {f!r} does not satisfy the pure-state hypotheses")
        return _pure(f, r1, r2)
    if path == GENERIC_GRADIENT:
        if not f.cond_I:
            raise SolverError(f"force_path generic_gradient: f* is not operator convex for {f!r}")
        return _reduced_generic(f, r1, r2, opts, GENERIC_GRADIENT)
    if path == SWAPPED_GENERIC:
        if not f.cond_II:
            raise SolverError(f"force_path swapped_generic: the reversed conjugate is not operator convex for {f!r}")
        return _reduced_generic(hat(f), r2, r1, opts, SWAPPED_GENERIC)
    raise SolverError(f"unknown path {path!r}; expected one of {PATHS}")
