"""Small numeric kernels with an optional numba backend.

Set ``QFDIV_DISABLE_NUMBA=1`` to force the pure-numpy implementations.
Both backends are always importable so they can be compared directly.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - depends on environment
    numba = None


def _env_disabled() -> bool:
    return os.environ.get("QFDIV_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def divided_difference_numpy(t, ht, dmid, rtol):
    """First divided differences of h on the points ``t``.

    ``ht`` holds h(t_i) and ``dmid[i, j]`` holds h'((t_i + t_j) / 2), which is
    used whenever two points are closer than ``rtol * (1 + |t_i| + |t_j|)``.
    """
    t = np.asarray(t, dtype=float)
    ht = np.asarray(ht, dtype=float)
    dt = t[:, None] - t[None, :]
    close = np.abs(dt) < rtol * (1.0 + np.abs(t)[:, None] + np.abs(t)[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        quot = (ht[:, None] - ht[None, :]) / np.where(close, 1.0, dt)
    return np.where(close, dmid, quot)


def _divided_difference_loop(t, ht, dmid, rtol):
    n = t.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            d = t[i] - t[j]
            if abs(d) < rtol * (1.0 + abs(t[i]) + abs(t[j])):
                out[i, j] = dmid[i, j]
            else:
                out[i, j] = (ht[i] - ht[j]) / d
    return out


def pvm_probabilities_numpy(u, rho):
    """Return Re <u_k| rho |u_k> for every column u_k of ``u``."""
    return np.einsum("ak,ab,bk->k", u.conj(), rho, u).real


def _pvm_probabilities_loop(u, rho):
    n, m = u.shape
    out = np.zeros(m)
    for k in range(m):
        acc = 0.0 + 0.0j
        for a in range(n):
            row = 0.0 + 0.0j
            for b in range(n):
                row += rho[a, b] * u[b, k]
            acc += np.conj(u[a, k]) * row
        out[k] = acc.real
    return out


if HAVE_NUMBA:
    divided_difference_numba = numba.njit(cache=True)(_divided_difference_loop)
    pvm_probabilities_numba = numba.njit(cache=True)(_pvm_probabilities_loop)
else:  # pragma: no cover
    divided_difference_numba = None
    pvm_probabilities_numba = None


def divided_difference(t, ht, dmid, rtol=1e-7):
    if USE_NUMBA:
        return divided_difference_numba(
            np.ascontiguousarray(t, dtype=np.float64),
            np.ascontiguousarray(ht, dtype=np.float64),
            np.ascontiguousarray(dmid, dtype=np.float64),
            float(rtol),
        )
    return divided_difference_numpy(t, ht, dmid, rtol)


def pvm_probabilities(u, rho):
    if USE_NUMBA:
        return pvm_probabilities_numba(
            np.ascontiguousarray(u, dtype=np.complex128),
            np.ascontiguousarray(rho, dtype=np.complex128),
        )
    return pvm_probabilities_numpy(u, rho)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
