"""Spectral calculus on Hermitian matrices."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import _kernels

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
RANK_REL_TOL = 1e-10
DIVIDED_DIFF_RTOL = 1e-7


class MatrixError(ValueError):
    """Malformed or non-Hermitian input."""


class DomainError(MatrixError):
    """An eigenvalue lies outside the domain of the applied scalar function."""


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def as_hermitian(a, tol: float = HERMITIAN_TOL, name: str = "matrix") -> np.ndarray:
    """Validate a square Hermitian matrix and return its Hermitian part."""
    arr = np.array(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise MatrixError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MatrixError(f"{name} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(arr))))
    dev = float(np.max(np.abs(arr - dagger(arr))))
    if dev > tol * scale:
        raise MatrixError(f"{name} is not Hermitian: max |A - A^dagger| = {dev:.3e}")
    return hermitize(arr)


class DensityOperator:
    """Positive semidefinite matrix with a cached eigendecomposition.

    Normalisation is not required.  Eigenvalues above ``-PSD_TOL`` are
    accepted and negative ones are clamped to zero; the support consists of
    eigenvectors whose eigenvalue exceeds ``dim * 1e-10 * max eigenvalue``.
    """

    def __init__(self, matrix, name: str = "rho"):
        mat = as_hermitian(matrix, name=name)
        evals, evecs = np.linalg.eigh(mat)
        scale = max(1.0, float(np.max(np.abs(evals))))
        if evals[0] < -PSD_TOL * scale:
            raise MatrixError(f"{name} is not positive semidefinite: min eigenvalue {evals[0]:.3e}")
        evals = np.clip(evals, 0.0, None)
        self.name = name
        self.matrix = mat
        self.dim = mat.shape[0]
        self.eigenvalues = evals
        self.eigenvectors = evecs
        self.rank_tol = self.dim * RANK_REL_TOL * float(evals[-1])
        self.support_mask = evals > self.rank_tol
        self.rank = int(np.count_nonzero(self.support_mask))
        if self.rank == 0:
            raise MatrixError(f"{name} is the zero operator")
        for arr in (self.matrix, self.eigenvalues, self.eigenvectors, self.support_mask):
            arr.setflags(write=False)

    @classmethod
    def pure(cls, vec, name: str = "rho") -> "DensityOperator":
        v = np.asarray(vec, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), name=name)

    @property
    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))

    @property
    def support(self) -> np.ndarray:
        """Isometry whose columns span the support."""
        return self.eigenvectors[:, self.support_mask]

    @property
    def kernel(self) -> np.ndarray:
        return self.eigenvectors[:, ~self.support_mask]

    @property
    def support_projector(self) -> np.ndarray:
        v = self.support
        return v @ dagger(v)

    @property
    def full_rank(self) -> bool:
        return self.rank == self.dim

    def power(self, p: float) -> np.ndarray:
        """Pseudo-power: eigenvalues on the support raised to p, zero on the kernel."""
        w = np.zeros(self.dim)
        w[self.support_mask] = self.eigenvalues[self.support_mask] ** p
        return (self.eigenvectors * w) @ dagger(self.eigenvectors)

    def compress(self, v: np.ndarray, name: str | None = None) -> "DensityOperator":
        return DensityOperator(dagger(v) @ self.matrix @ v, name=name or self.name)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, rank={self.rank}, trace={self.trace:.6g})"


def as_density(x, name: str = "rho") -> DensityOperator:
    return x if isinstance(x, DensityOperator) else DensityOperator(x, name=name)


def _apply_scalar(h, w):
    return np.asarray(h(np.asarray(w, dtype=float)), dtype=float).reshape(np.shape(w))


def op_func(h: Callable, t, domain=None) -> np.ndarray:
    """h(T) through the eigendecomposition of a Hermitian T.

    ``domain`` may be any object with a vectorised ``contains`` method.  An
    eigenvalue outside it, or one where h is not finite, raises DomainError.
    """
    t = as_hermitian(t, name="T")
    w, v = np.linalg.eigh(t)
    if domain is not None:
        bad = ~np.asarray(domain.contains(w))
        if np.any(bad):
            raise DomainError(f"eigenvalue {w[bad][0]!r} of T lies outside the function domain")
    hw = _apply_scalar(h, w)
    if not np.all(np.isfinite(hw)):
        raise DomainError(f"function is not finite at eigenvalue {w[~np.isfinite(hw)][0]!r}")
    return (v * hw) @ dagger(v)


def divided_differences(h: Callable, dh: Callable, w) -> np.ndarray:
    """Matrix of first divided differences [h(w_i) - h(w_j)] / (w_i - w_j).

    Near-coincident points use h' at their midpoint.
    """
    w = np.asarray(w, dtype=float)
    hw = _apply_scalar(h, w)
    mid = 0.5 * (w[:, None] + w[None, :])
    dmid = _apply_scalar(dh, mid)
    return _kernels.divided_difference(w, hw, dmid, DIVIDED_DIFF_RTOL)


def frechet_derivative(h: Callable, dh: Callable, t, x, domain=None) -> np.ndarray:
    """Frechet derivative D h(T)(X) via divided differences in T's eigenbasis."""
    t = as_hermitian(t, name="T")
    x = np.asarray(x, dtype=complex)
    w, v = np.linalg.eigh(t)
    if domain is not None:
        bad = ~np.asarray(domain.contains(w))
        if np.any(bad):
            raise DomainError(f"eigenvalue {w[bad][0]!r} of T lies outside the function domain")
    dd = divided_differences(h, dh, w)
    if not np.all(np.isfinite(dd)):
        raise DomainError("divided differences are not finite on the spectrum of T")
    return v @ (dd * (dagger(v) @ x @ v)) @ dagger(v)


def solve_sylvester_symmetric(a, c) -> np.ndarray:
    """Solve A T + T A = C for T supported on supp A.

    A must be positive semidefinite and C Hermitian with pi C pi = C, where
    pi projects onto supp A.  In A's eigenbasis T_ij = C_ij / (a_i + a_j).
    """
    a = as_density(a, name="A")
    c = as_hermitian(c, tol=1e-10, name="C")
    v = a.eigenvectors
    ce = dagger(v) @ c @ v
    m = a.support_mask
    leak = np.abs(ce[~m, :]).max(initial=0.0)
    scale = max(1.0, float(np.max(np.abs(ce))))
    if leak > 1e-9 * scale:
        raise MatrixError(f"C is not supported on supp A (leakage {leak:.3e})")
    s = a.eigenvalues
    te = np.zeros_like(ce)
    te[np.ix_(m, m)] = ce[np.ix_(m, m)] / (s[m][:, None] + s[m][None, :])
    return v @ te @ dagger(v)


def sqrtm_psd(a) -> np.ndarray:
    return as_density(a, name="A").power(0.5)


def trace_norm(x) -> float:
    x = as_hermitian(x, tol=1e-10, name="X")
    return float(np.sum(np.abs(np.linalg.eigvalsh(x))))


def fidelity(rho1, rho2) -> float:
    """tr sqrt(rho2^1/2 rho1 rho2^1/2), computed as the nuclear norm of rho1^1/2 rho2^1/2."""
    r1 = as_density(rho1, "rho1")
    r2 = as_density(rho2, "rho2")
    return float(np.sum(np.linalg.svd(r1.power(0.5) @ r2.power(0.5), compute_uv=False)))


def commutator_norm(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a @ b - b @ a)))


def joint_eigenbasis(a, b) -> np.ndarray:
    """Unitary diagonalising two commuting Hermitian matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if np.allclose(a, np.diag(np.diag(a)), rtol=0, atol=0) and np.allclose(b, np.diag(np.diag(b)), rtol=0, atol=0):
        return np.eye(a.shape[0], dtype=complex)
    weight = (1.0 + math.sqrt(5.0)) / 2.0 * math.pi / 3.0
    sa = max(1.0, float(np.max(np.abs(a))))
    sb = max(1.0, float(np.max(np.abs(b))))
    _, v = np.linalg.eigh(hermitize(a / sa + weight * b / sb))
    return v
