"""Seeded random states, unitaries and channels."""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(dim: int, rng, cols: int | None = None) -> np.ndarray:
    cols = dim if cols is None else cols
    return rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))


def random_density(dim: int, rng, rank: int | None = None) -> np.ndarray:
    """Trace-one density matrix of the given rank (Hilbert-Schmidt measure when full rank)."""
    g = ginibre(dim, rng, dim if rank is None else rank)
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_pure(dim: int, rng) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, rng, scale: float = 1.0) -> np.ndarray:
    g = ginibre(dim, rng)
    return scale * 0.5 * (g + g.conj().T)


def random_unitary(dim: int, rng, scale: float = np.pi) -> np.ndarray:
    """exp(iH) for a Gaussian Hermitian H."""
    return expm(1j * random_hermitian(dim, rng, scale))


def random_diagonal_pair(dim: int, rng):
    p = rng.random(dim) + 0.05
    q = rng.random(dim) + 0.05
    return np.diag(p / p.sum()).astype(complex), np.diag(q / q.sum()).astype(complex)


def random_channel(d_in: int, d_out: int, rng, n_kraus: int = 3):
    """Kraus operators of a random CPTP map C^{d_in} -> C^{d_out}."""
    ks = [ginibre(d_out, rng, d_in) for _ in range(n_kraus)]
    s = sum(k.conj().T @ k for k in ks)
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v * w ** -0.5) @ v.conj().T
    return [k @ inv_sqrt for k in ks]


def apply_channel(kraus, rho) -> np.ndarray:
    out = sum(k @ rho @ k.conj().T for k in kraus)
    return 0.5 * (out + out.conj().T)
