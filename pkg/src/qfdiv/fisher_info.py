"""Second-order behaviour of the minimal divergence along a one-parameter family.

For rho_eta with constant rank and SLD L (d rho = (L rho + rho L) / 2),

    D(rho_eta || rho_eta') - f(1) ~ (eta' - eta)^2 [ f''(1)/2 J1 + (f'(1) - f(1) + f(0))/4 J2 ]

where, with pi the support projector of rho_eta, L1 = pi L pi,
L2 = (1 - pi) L pi, J1 = tr rho L1^2 and J2 = tr rho L2^dagger L2.
For full-rank states J2 = 0 and the bracket is f''(1)/2 times the SLD
Fisher information.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .convex_core import DivergenceGenerator
from .dmin_solver import SolveOptions, admits_kernel_reduction, solve
from .matrix_calc import DensityOperator, MatrixError, as_density, as_hermitian, dagger, hermitize


class RankChangeError(MatrixError):
    """The family changes rank at the base point, so the expansion does not apply."""


class HypothesisError(ValueError):
    """The generator does not satisfy the assumptions of the expansion."""


@dataclass
class StatePair1Jet:
    """A state together with its first derivative along the family."""

    rho: DensityOperator
    drho: np.ndarray

    def __post_init__(self):
        self.rho = as_density(self.rho, "rho")
        self.drho = as_hermitian(self.drho, tol=1e-9 * max(1.0, float(np.max(np.abs(self.drho)))), name="drho")
        if self.drho.shape != self.rho.matrix.shape:
            raise MatrixError(f"drho has shape {self.drho.shape}, rho has {self.rho.matrix.shape}")
        tr = abs(np.trace(self.drho))
        if tr > 1e-9 * max(1.0, float(np.max(np.abs(self.drho)))):
            raise MatrixError(f"drho must be traceless, |tr drho| = {tr:.3e}")


def sld(jet: StatePair1Jet) -> np.ndarray:
    """Symmetric logarithmic derivative, zero on the kernel-kernel block."""
    r = jet.rho
    v = r.eigenvectors
    de = dagger(v) @ jet.drho @ v
    m = r.support_mask
    kk = np.abs(de[np.ix_(~m, ~m)]).max(initial=0.0)
    if kk > 1e-8 * max(1.0, float(np.max(np.abs(de)))):
        raise RankChangeError(f"drho has a kernel-kernel block of size {kk:.3e}: the rank is not constant")
    lam = np.where(m, r.eigenvalues, 0.0)
    denom = lam[:, None] + lam[None, :]
    active = m[:, None] | m[None, :]
    le = np.zeros_like(de)
    le[active] = 2.0 * de[active] / denom[active]
    return hermitize(v @ le @ dagger(v))


@dataclass
class SLDComponents:
    L: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    J_S: float
    J1: float
    J2: float
    J2_literal: float


def sld_components(jet: StatePair1Jet) -> SLDComponents:
    """Split the SLD into its support block and its kernel-to-support block.

    ``J2_literal`` is tr rho L2 L2, which vanishes identically; ``J2`` is
    tr rho L2^dagger L2, the quantity that enters the expansion.
    """
    lmat = sld(jet)
    pi = jet.rho.support_projector
    q = np.eye(jet.rho.dim) - pi
    l1 = pi @ lmat @ pi
    l2 = q @ lmat @ pi
    rho = jet.rho.matrix
    return SLDComponents(
        L=lmat, L1=l1, L2=l2,
        J_S=float(np.trace(rho @ lmat @ lmat).real),
        J1=float(np.trace(rho @ l1 @ l1).real),
        J2=float(np.trace(rho @ dagger(l2) @ l2).real),
        J2_literal=float(np.trace(rho @ l2 @ l2).real),
    )


@dataclass
class SecondOrderReport:
    lhs: float
    rhs: float
    gap: float
    naive: float
    J_S: float
    J1: float
    J2: float
    J2_literal: float
    rank: int


def predicted_coefficient(f: DivergenceGenerator, comps: SLDComponents) -> float:
    head = 0.5 * f.f_second_at_one * comps.J1
    if comps.J2 == 0.0:
        return head
    c2 = float(f.f_prime_right_at(1.0)) - float(f.f_at(1.0)) + f.f_at_zero
    return head + 0.25 * c2 * comps.J2


def _check_generator(f: DivergenceGenerator, full_rank: bool) -> None:
    c = f.f_second_at_one
    if not (math.isfinite(c) and c > 0):
        raise HypothesisError(f"{f!r}: f''(1) must be finite and positive, got {c!r}")
    if not full_rank and not admits_kernel_reduction(f):
        raise HypothesisError(
            f"{f!r}: rank-deficient families need a canonical generator with operator convex f* "
            "and dom f* unbounded below"
        )


def _drop_kernel_block(rho0: DensityOperator, drho: np.ndarray, h: float) -> np.ndarray:
    """Remove the O(h^2) kernel-kernel block a central difference leaves behind.

    A block larger than ``h`` times the size of ``drho`` is a genuine rank
    change and is left alone for ``sld`` to reject.
    """
    v = rho0.eigenvectors
    de = dagger(v) @ drho @ v
    m = rho0.support_mask
    block = np.ix_(~m, ~m)
    if np.abs(de[block]).max(initial=0.0) <= h * max(1.0, float(np.max(np.abs(de)))):
        de[block] = 0.0
        # keep drho traceless by spreading the removed trace over the support
        idx = np.flatnonzero(m)
        de[idx, idx] -= np.trace(de) / idx.size
    return hermitize(v @ de @ dagger(v))


def _quotient(f, rho0, rho_h, h, opts) -> float:
    res = solve(f, rho0, rho_h, opts)
    if not res.converged:
        raise RuntimeError(f"solver did not converge at step {h!r}: {res.warnings}")
    return (res.value - float(f.f_at(1.0)) * rho0.trace) / (h * h)


def second_order_check(
    f: DivergenceGenerator,
    family: Callable[[float], np.ndarray],
    eta0: float,
    h: float = 1e-3,
    *,
    h_d: float = 1e-5,
    opts: SolveOptions | None = None,
) -> SecondOrderReport:
    """Compare the finite-difference curvature with the SLD prediction.

    The quotient (D(rho_eta0 || rho_eta0+h) - f(1)) / h^2 has an O(h)
    remainder, so it is extrapolated as 2 Q(h/2) - Q(h).  d rho is the
    central difference with step ``h_d``.
    """
    opts = opts or SolveOptions()
    rho0 = DensityOperator(family(eta0), "rho")
    for eta in (eta0 - h, eta0 + h):
        other = DensityOperator(family(eta), "rho")
        if other.rank != rho0.rank:
            raise RankChangeError(f"rank changes from {rho0.rank} to {other.rank} between {eta0!r} and {eta!r}")
    _check_generator(f, rho0.full_rank)
    drho = hermitize((np.asarray(family(eta0 + h_d)) - np.asarray(family(eta0 - h_d))) / (2 * h_d))
    drho = drho - np.trace(drho) / rho0.dim * np.eye(rho0.dim)
    comps = sld_components(StatePair1Jet(rho0, _drop_kernel_block(rho0, drho, h_d)))
    q_h = _quotient(f, rho0, DensityOperator(family(eta0 + h), "rho"), h, opts)
    q_h2 = _quotient(f, rho0, DensityOperator(family(eta0 + h / 2), "rho"), h / 2, opts)
    lhs = 2.0 * q_h2 - q_h
    return _report(f, comps, lhs, rho0.rank)


def second_order_from_samples(f: DivergenceGenerator, rho_minus, rho0, rho_plus, h: float, *, opts=None) -> SecondOrderReport:
    """Same comparison from three samples at eta0 - h, eta0, eta0 + h.

    The forward and backward quotients have opposite O(h) terms, so their
    mean is used.
    """
    opts = opts or SolveOptions()
    r0 = as_density(rho0, "rho0")
    rm = as_density(rho_minus, "rho_minus")
    rp = as_density(rho_plus, "rho_plus")
    if not (rm.rank == r0.rank == rp.rank):
        raise RankChangeError(f"sample ranks differ: {rm.rank}, {r0.rank}, {rp.rank}")
    _check_generator(f, r0.full_rank)
    drho = hermitize((rp.matrix - rm.matrix) / (2 * h))
    drho = drho - np.trace(drho) / r0.dim * np.eye(r0.dim)
    comps = sld_components(StatePair1Jet(r0, _drop_kernel_block(r0, drho, h)))
    lhs = 0.5 * (_quotient(f, r0, rp, h, opts) + _quotient(f, r0, rm, h, opts))
    return _report(f, comps, lhs, r0.rank)


def _report(f, comps: SLDComponents, lhs: float, rank: int) -> SecondOrderReport:
    rhs = predicted_coefficient(f, comps)
    naive = 0.5 * f.f_second_at_one * comps.J_S
    return SecondOrderReport(
        lhs=lhs, rhs=rhs, gap=abs(lhs - rhs), naive=naive, J_S=comps.J_S, J1=comps.J1,
        J2=comps.J2, J2_literal=comps.J2_literal, rank=rank,
    )


# ---------------------------------------------------------------------------
# Built-in families


def rotating_qubit(radius: float = 1.0) -> Callable[[float], np.ndarray]:
    """Bloch vector of length ``radius`` along (sin 2 eta, 0, cos 2 eta).

    With radius 1 this is |phi_eta> = cos eta |0> + sin eta |1>.
    """
    if not 0 < radius <= 1:
        raise ValueError(f"radius must lie in (0, 1], got {radius!r}")

    def family(eta: float) -> np.ndarray:
        x, z = radius * math.sin(2 * eta), radius * math.cos(2 * eta)
        return 0.5 * np.array([[1 + z, x], [x, 1 - z]], dtype=complex)

    return family


def binary_mixture(eta: float) -> np.ndarray:
    """(1 - eta) |0><0| + eta |1><1|."""
    return np.diag([1.0 - eta, eta]).astype(complex)


_RANK2_H = np.array(
    [[0.3, 0.5 - 0.2j, 0.9 + 0.4j],
     [0.5 + 0.2j, -0.1, 0.7 - 0.6j],
     [0.9 - 0.4j, 0.7 + 0.6j, 0.2]],
    dtype=complex,
)


def rank2_in_3d(eta: float) -> np.ndarray:
    """exp(-i eta H) diag(p, 1 - p, 0) exp(i eta H) with p = 0.65 + 0.1 eta.

    The rotation mixes the support with the kernel, so both SLD blocks are
    non-zero.
    """
    w, v = np.linalg.eigh(_RANK2_H)
    u = (v * np.exp(-1j * eta * w)) @ dagger(v)
    p = 0.65 + 0.1 * eta
    return u @ np.diag([p, 1.0 - p, 0.0]).astype(complex) @ dagger(u)


BUILTIN_FAMILIES = {
    "rotating-qubit": rotating_qubit(1.0),
    "mixed-rotating-qubit": rotating_qubit(0.8),
    "binary-mixture": binary_mixture,
    "rank2-in-3d": rank2_in_3d,
}
