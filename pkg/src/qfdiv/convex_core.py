"""Convex generators f, their Legendre conjugates and the classical f-divergence.

Every scalar map on a generator is vectorised: it accepts a float or an
array and returns values of the same shape.  Extended reals are IEEE
floats, so ``math.inf`` is a legitimate value and never a sentinel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

INF = math.inf
Scalar = Callable[..., "np.ndarray | float"]


class FamilyError(ValueError):
    """Raised for an unknown family or an invalid family parameter."""


@dataclass(frozen=True)
class Interval:
    """Interval of the real line with explicit endpoint closure flags."""

    lower: float
    upper: float
    lower_closed: bool = True
    upper_closed: bool = True

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        lo = (x >= self.lower) if self.lower_closed else (x > self.lower)
        hi = (x <= self.upper) if self.upper_closed else (x < self.upper)
        return lo & hi

    @property
    def bounded_below(self) -> bool:
        return math.isfinite(self.lower)

    @property
    def bounded_above(self) -> bool:
        return math.isfinite(self.upper)


def _out(x):
    return x[()] if isinstance(x, np.ndarray) and x.ndim == 0 else x


@dataclass(frozen=True)
class DivergenceGenerator:
    """A closed proper convex f on the reals with (0, inf) inside its domain.

    ``f_prime_right_at``/``f_prime_left_at`` are one-sided derivatives of f;
    ``conj_at``/``conj_prime_at`` evaluate f* and its derivative, and
    ``conj_domain`` is dom f*.  ``cond_I`` says f* is operator convex on its
    domain, ``cond_II`` says the same for the conjugate of the reversed
    generator.
    """

    name: str
    f_at: Scalar
    f_prime_right_at: Scalar
    f_prime_left_at: Scalar
    f_second_at: Scalar
    conj_at: Scalar
    conj_prime_at: Scalar
    conj_domain: Interval
    cond_I: bool
    cond_II: bool
    canonical: bool
    params: Mapping[str, float] = field(default_factory=dict)
    # Optional closed form of lam2 f(lam1 / lam2) for lam1, lam2 > 0 that
    # avoids forming the ratio.
    perspective_at: Callable | None = None

    @property
    def f_at_zero(self) -> float:
        return float(self.f_at(0.0))

    @property
    def f_second_at_one(self) -> float:
        return float(self.f_second_at(1.0))

    @property
    def recession(self) -> float:
        """lim_{s->0+} s f(1/s), which equals sup dom f*."""
        return self.conj_domain.upper

    @property
    def conj_infimum(self) -> float:
        """inf of f* over its domain; equals -f(0) for a canonical generator."""
        if self.canonical:
            return -self.f_at_zero
        lo = self.conj_domain.lower
        if math.isfinite(lo):
            return float(self.conj_at(lo if self.conj_domain.lower_closed else lo + 1e-12))
        return float(self.conj_at(-1e12))

    def f_prime_at_one(self) -> float:
        """Midpoint of the subdifferential of f at 1."""
        return 0.5 * (float(self.f_prime_left_at(1.0)) + float(self.f_prime_right_at(1.0)))

    def __repr__(self) -> str:
        extra = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"DivergenceGenerator({self.name}{', ' + extra if extra else ''})"


# ---------------------------------------------------------------------------
# Built-in families


def renyi(alpha: float) -> DivergenceGenerator:
    """sign((alpha-1) alpha) lambda^alpha, extended canonically to lambda < 0."""
    a = float(alpha)
    if not math.isfinite(a) or a in (0.0, 1.0):
        raise FamilyError(f"renyi: alpha must be finite and different from 0 and 1, got {alpha!r}")
    s = 1.0 if (a > 1.0 or a < 0.0) else -1.0
    f0 = INF if a < 0 else 0.0
    neg = 0.0 if a > 1 else INF
    dneg = 0.0 if a > 1 else -INF

    def f(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = s * np.power(np.where(lam > 0, lam, 1.0), a)
        return _out(np.where(lam > 0, val, np.where(lam == 0, f0, neg)))

    def df(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = s * a * np.power(np.where(lam > 0, lam, 1.0), a - 1.0)
        return _out(np.where(lam > 0, val, dneg))

    def d2f(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = s * a * (a - 1.0) * np.power(np.where(lam > 0, lam, 1.0), a - 2.0)
        return _out(np.where(lam > 0, val, np.nan))

    # f*'(t) = (|alpha| / |t|)^(1 / (1 - alpha)) on the interior of dom f*.
    if 0 < a < 1:
        c = (1 - a) * a ** (a / (1 - a))
        p = -a / (1 - a)
        dom = Interval(-INF, 0.0, False, False)

        def conj(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                val = c * np.power(np.where(t < 0, -t, 1.0), p)
            return _out(np.where(t < 0, val, INF))

        def dconj(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                val = np.power(a / np.where(t < 0, -t, 1.0), 1.0 / (1 - a))
            return _out(np.where(t < 0, val, INF))

    elif a > 1:
        c = (a - 1) * a ** (-a / (a - 1))
        p = a / (a - 1)
        dom = Interval(0.0, INF, True, False)

        def conj(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                val = c * np.power(np.where(t >= 0, t, 0.0), p)
            return _out(np.where(t >= 0, val, INF))

        def dconj(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                val = np.power(np.where(t >= 0, t, 0.0) / a, 1.0 / (a - 1))
            return _out(np.where(t >= 0, val, np.nan))

    else:
        c = (a - 1) * (-a) ** (a / (1 - a))
        p = -a / (1 - a)
        dom = Interval(-INF, 0.0, False, True)

        def conj(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                val = c * np.power(np.where(t <= 0, -t, 0.0), p)
            return _out(np.where(t <= 0, val, INF))

        def dconj(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(all="ignore"):
                val = np.power(-a / np.where(t < 0, -t, 0.0), 1.0 / (1 - a))
            return _out(np.where(t < 0, val, np.where(t == 0, INF, np.nan)))

    cond_i = a < 0 or 0 < a <= 0.5 or a >= 2
    cond_ii = a > 1 or 0.5 <= a < 1 or a <= -1
    return DivergenceGenerator(
        name="renyi", params={"alpha": a}, f_at=f, f_prime_right_at=df, f_prime_left_at=df,
        f_second_at=d2f, conj_at=conj, conj_prime_at=dconj, conj_domain=dom,
        cond_I=cond_i, cond_II=cond_ii, canonical=True,
        perspective_at=lambda l1, l2: s * np.exp(a * np.log(l1) + (1.0 - a) * np.log(l2)),
    )


def chi2() -> DivergenceGenerator:
    return renyi(2.0)


def fidelity_generator() -> DivergenceGenerator:
    return renyi(0.5)


def kl() -> DivergenceGenerator:
    """lambda log lambda."""

    def f(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = lam * np.log(np.where(lam > 0, lam, 1.0))
        return _out(np.where(lam > 0, val, np.where(lam == 0, 0.0, INF)))

    def df(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = np.log(np.where(lam > 0, lam, 1.0)) + 1.0
        return _out(np.where(lam > 0, val, -INF))

    def d2f(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            return _out(np.where(lam > 0, 1.0 / np.where(lam > 0, lam, 1.0), np.nan))

    def conj(t):
        return _out(np.exp(np.asarray(t, dtype=float) - 1.0))

    return DivergenceGenerator(
        name="kl", f_at=f, f_prime_right_at=df, f_prime_left_at=df, f_second_at=d2f,
        conj_at=conj, conj_prime_at=conj, conj_domain=Interval(-INF, INF, False, False),
        cond_I=False, cond_II=True, canonical=True,
    )


def kl_reverse() -> DivergenceGenerator:
    """-log lambda, the reversal of ``kl``."""

    def f(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = -np.log(np.where(lam > 0, lam, 1.0))
        return _out(np.where(lam > 0, val, INF))

    def df(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = -1.0 / np.where(lam > 0, lam, 1.0)
        return _out(np.where(lam > 0, val, -INF))

    def d2f(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            return _out(np.where(lam > 0, np.where(lam > 0, lam, 1.0) ** -2.0, np.nan))

    def conj(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            val = -1.0 - np.log(np.where(t < 0, -t, 1.0))
        return _out(np.where(t < 0, val, INF))

    def dconj(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            val = -1.0 / np.where(t < 0, t, -1.0)
        return _out(np.where(t < 0, val, INF))

    return DivergenceGenerator(
        name="kl_reverse", f_at=f, f_prime_right_at=df, f_prime_left_at=df, f_second_at=d2f,
        conj_at=conj, conj_prime_at=dconj, conj_domain=Interval(-INF, 0.0, False, False),
        cond_I=True, cond_II=False, canonical=True,
    )


def tv() -> DivergenceGenerator:
    """|1 - lambda| on the whole line."""

    def f(lam):
        return _out(np.abs(1.0 - np.asarray(lam, dtype=float)))

    def dfr(lam):
        return _out(np.where(np.asarray(lam, dtype=float) >= 1.0, 1.0, -1.0))

    def dfl(lam):
        return _out(np.where(np.asarray(lam, dtype=float) > 1.0, 1.0, -1.0))

    def d2f(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam == 1.0, INF, 0.0))

    dom = Interval(-1.0, 1.0, True, True)

    def conj(t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(dom.contains(t), t, INF))

    def dconj(t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(dom.contains(t), 1.0, np.nan))

    return DivergenceGenerator(
        name="tv", f_at=f, f_prime_right_at=dfr, f_prime_left_at=dfl, f_second_at=d2f,
        conj_at=conj, conj_prime_at=dconj, conj_domain=dom,
        cond_I=True, cond_II=True, canonical=True,
    )


def tv_noncanonical() -> DivergenceGenerator:
    """|1 - lambda| on lambda >= 0 and +inf on lambda < 0."""

    def f(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam >= 0, np.abs(1.0 - lam), INF))

    def dfr(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam >= 1.0, 1.0, np.where(lam >= 0, -1.0, -INF)))

    def dfl(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam > 1.0, 1.0, np.where(lam > 0, -1.0, -INF)))

    def d2f(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam == 1.0, INF, 0.0))

    def conj(t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(t > 1.0, INF, np.maximum(t, -1.0)))

    def dconj(t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(t > 1.0, np.nan, np.where(t < -1.0, 0.0, 1.0)))

    return DivergenceGenerator(
        name="tv_noncanonical", f_at=f, f_prime_right_at=dfr, f_prime_left_at=dfl,
        f_second_at=d2f, conj_at=conj, conj_prime_at=dconj,
        conj_domain=Interval(-INF, 1.0, False, True),
        cond_I=False, cond_II=True, canonical=False,
    )


def fb() -> DivergenceGenerator:
    """(lambda - 1)^2 on lambda >= 0, continued linearly as 1 - 2 lambda below 0."""

    def f(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam >= 0, (lam - 1.0) ** 2, 1.0 - 2.0 * lam))

    def df(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam >= 0, 2.0 * (lam - 1.0), -2.0))

    def dfl(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam > 0, 2.0 * (lam - 1.0), -2.0))

    def d2f(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam > 0, 2.0, np.where(lam < 0, 0.0, np.nan)))

    dom = Interval(-2.0, INF, True, False)

    def conj(t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(t >= -2.0, 0.25 * t * t + t, INF))

    def dconj(t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(t >= -2.0, 0.5 * t + 1.0, np.nan))

    return DivergenceGenerator(
        name="fb", f_at=f, f_prime_right_at=df, f_prime_left_at=dfl, f_second_at=d2f,
        conj_at=conj, conj_prime_at=dconj, conj_domain=dom,
        cond_I=True, cond_II=True, canonical=True,
        perspective_at=lambda l1, l2: (l1 - l2) ** 2 / l2,
    )


def fb_reverse() -> DivergenceGenerator:
    """(1 - lambda)^2 / lambda, the reversal of ``fb``."""

    def f(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            safe = np.where(lam > 0, lam, 1.0)
            val = (1.0 - safe) ** 2 / safe
        return _out(np.where(lam > 0, val, INF))

    def df(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = 1.0 - np.where(lam > 0, lam, 1.0) ** -2.0
        return _out(np.where(lam > 0, val, -INF))

    def d2f(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            val = 2.0 * np.where(lam > 0, lam, 1.0) ** -3.0
        return _out(np.where(lam > 0, val, np.nan))

    def conj(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            val = 2.0 - 2.0 * np.sqrt(np.where(t <= 1.0, 1.0 - t, 0.0))
        return _out(np.where(t <= 1.0, val, INF))

    def dconj(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            val = 1.0 / np.sqrt(np.where(t < 1.0, 1.0 - t, 1.0))
        return _out(np.where(t < 1.0, val, np.where(t == 1.0, INF, np.nan)))

    return DivergenceGenerator(
        name="fb_reverse", f_at=f, f_prime_right_at=df, f_prime_left_at=df, f_second_at=d2f,
        conj_at=conj, conj_prime_at=dconj, conj_domain=Interval(-INF, 1.0, False, True),
        cond_I=True, cond_II=True, canonical=True,
        perspective_at=lambda l1, l2: (l1 - l2) ** 2 / l1,
    )


# ---------------------------------------------------------------------------
# Generic generators built from callbacks


def numeric_conjugate(f: Scalar, t: float, *, negative_domain: bool = True, xtol: float = 1e-12) -> float:
    """sup_lambda (t lambda - f(lambda)) by bracketing and golden-section search.

    The objective is concave, so expanding geometrically until it stops
    increasing brackets the maximiser.  If it keeps increasing up to 1e15 the
    supremum is reported as +inf when the growth is still linear and as the
    last value otherwise (supremum approached at infinity).
    """
    t = float(t)

    def phi(x):
        v = float(f(x))
        return -INF if v == INF else t * x - v

    def expand(sign):
        x = 1.0
        while phi(sign * 2 * x) > phi(sign * x):
            x *= 2.0
            if x > 1e15:
                slope = (phi(sign * x) - phi(sign * x / 2)) / (x / 2)
                return None, (INF if slope > 1e-9 else phi(sign * x))
        return sign * 2 * x, None

    hi, sup_hi = expand(1.0)
    if sup_hi is not None:
        return sup_hi
    if negative_domain and math.isfinite(phi(-1.0)):
        lo, sup_lo = expand(-1.0)
        if sup_lo is not None:
            return sup_lo
    else:
        lo = 0.0
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = phi(c), phi(d)
    while b - a > xtol * (1.0 + abs(t)) * max(1.0, abs(a) + abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = phi(d)
    return max(fc, fd, phi(a), phi(b))


def _numeric_derivative(fn: Scalar, x: float, side: int, h: float = 1e-6) -> float:
    h = h * (1.0 + abs(x))
    if side > 0:
        return (-3 * float(fn(x)) + 4 * float(fn(x + h)) - float(fn(x + 2 * h))) / (2 * h)
    return (3 * float(fn(x)) - 4 * float(fn(x - h)) + float(fn(x - 2 * h))) / (2 * h)


def from_function(
    name: str,
    f: Scalar,
    *,
    f_prime_right: Scalar,
    conj_domain: Interval,
    f_prime_left: Scalar | None = None,
    f_second: Scalar | None = None,
    conj: Scalar | None = None,
    conj_prime: Scalar | None = None,
    cond_I: bool = False,
    cond_II: bool = False,
    canonical: bool = False,
    params: Mapping[str, float] | None = None,
) -> DivergenceGenerator:
    """Wrap user callbacks as a generator; f* falls back to numeric conjugation."""
    negative = math.isfinite(float(f(-1.0)))

    if conj is None:
        def conj(t):
            t = np.asarray(t, dtype=float)
            vals = [numeric_conjugate(f, x, negative_domain=negative) for x in t.ravel()]
            return _out(np.asarray(vals).reshape(t.shape))

    if conj_prime is None:
        def conj_prime(t):
            t = np.asarray(t, dtype=float)
            vals = [_numeric_derivative(conj, x, 1 if not conj_domain.contains(x - 1e-5) else -1)
                    for x in t.ravel()]
            return _out(np.asarray(vals).reshape(t.shape))

    if f_second is None:
        def f_second(lam):
            lam = np.asarray(lam, dtype=float)
            vals = [_numeric_derivative(f_prime_right, x, 1) for x in lam.ravel()]
            return _out(np.asarray(vals).reshape(lam.shape))

    return DivergenceGenerator(
        name=name, params=dict(params or {}), f_at=f, f_prime_right_at=f_prime_right,
        f_prime_left_at=f_prime_left or f_prime_right, f_second_at=f_second,
        conj_at=conj, conj_prime_at=conj_prime, conj_domain=conj_domain,
        cond_I=cond_I, cond_II=cond_II, canonical=canonical,
    )


def canonicalize(f: DivergenceGenerator) -> DivergenceGenerator:
    """Replace f on lambda < 0 by its tangent continuation at 0.

    The result agrees with f on lambda >= 0 and its conjugate is strictly
    increasing, with dom f* starting at t0 = f'_+(0).
    """
    if f.canonical:
        return f
    t0 = float(f.f_prime_right_at(0.0))
    f0 = f.f_at_zero
    base = f

    def f_new(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            tangent = t0 * lam + f0 if math.isfinite(t0) else np.full(lam.shape, INF)
        return _out(np.where(lam >= 0, base.f_at(np.maximum(lam, 0.0)), tangent))

    def dfr(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam >= 0, base.f_prime_right_at(np.maximum(lam, 0.0)), t0))

    def dfl(lam):
        lam = np.asarray(lam, dtype=float)
        return _out(np.where(lam > 0, base.f_prime_left_at(np.maximum(lam, 0.0)), t0))

    def conj(t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(t >= t0, base.conj_at(np.maximum(t, t0)), INF))

    def dconj(t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(t >= t0, base.conj_prime_at(np.maximum(t, t0)), np.nan))

    dom = base.conj_domain
    if math.isfinite(t0):
        dom = Interval(max(t0, dom.lower), dom.upper, True, dom.upper_closed)
    return DivergenceGenerator(
        name=base.name, params=dict(base.params), f_at=f_new, f_prime_right_at=dfr,
        f_prime_left_at=dfl, f_second_at=base.f_second_at, conj_at=conj, conj_prime_at=dconj,
        conj_domain=dom, cond_I=base.cond_I, cond_II=base.cond_II, canonical=True,
    )


_REVERSED = {
    "kl": kl_reverse,
    "kl_reverse": kl,
    "tv": tv,
    "fb": fb_reverse,
    "fb_reverse": fb,
}


def hat(f: DivergenceGenerator) -> DivergenceGenerator:
    """Reversed generator lambda f(1/lambda), canonically extended.

    Satisfies D_hat(P2 || P1) = D_f(P1 || P2) for every pair of measures.
    """
    if f.name == "renyi":
        return renyi(1.0 - f.params["alpha"])
    if f.name in _REVERSED:
        return _REVERSED[f.name]()
    return _numeric_hat(f)


def _numeric_hat(f: DivergenceGenerator) -> DivergenceGenerator:
    base = f
    f0_hat = base.recession
    upper = base.conj_domain.upper
    if math.isfinite(upper):
        slope0 = -float(base.conj_at(upper if base.conj_domain.upper_closed else upper - 1e-12))
    else:
        slope0 = -INF

    def fh(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            safe = np.where(lam > 0, lam, 1.0)
            pos = safe * base.f_at(1.0 / safe)
            neg = slope0 * lam + f0_hat if math.isfinite(slope0) else np.full(lam.shape, INF)
        return _out(np.where(lam > 0, pos, np.where(lam == 0, f0_hat, neg)))

    def dfh(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            safe = np.where(lam > 0, lam, 1.0)
            val = base.f_at(1.0 / safe) - base.f_prime_right_at(1.0 / safe) / safe
        return _out(np.where(lam > 0, val, slope0))

    def d2fh(lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(all="ignore"):
            safe = np.where(lam > 0, lam, 1.0)
            val = base.f_second_at(1.0 / safe) / safe ** 3
        return _out(np.where(lam > 0, val, np.nan))

    f_zero = base.f_at_zero
    f_right0 = float(base.f_prime_right_at(0.0))
    dom = Interval(slope0, f_zero, math.isfinite(slope0), math.isfinite(f_zero) and math.isfinite(f_right0))
    return from_function(
        f"{base.name}_reversed", fh, f_prime_right=dfh, f_second=d2fh, conj_domain=dom,
        cond_I=base.cond_II, cond_II=base.cond_I, canonical=True, params=dict(base.params),
    )


# ---------------------------------------------------------------------------
# Classical f-divergence


def g_eval(f: DivergenceGenerator, lam1, lam2):
    """Perspective g(lam1, lam2) = lam2 f(lam1 / lam2) with its limits on lam2 = 0."""
    l1 = np.asarray(lam1, dtype=float)
    l2 = np.asarray(lam2, dtype=float)
    l1, l2 = np.broadcast_arrays(l1, l2)
    out = np.full(l1.shape, INF)
    pos = l2 > 0
    if np.any(pos):
        with np.errstate(all="ignore"):
            vals = l2[pos] * np.asarray(f.f_at(l1[pos] / l2[pos]), dtype=float)
            if f.perspective_at is not None:
                ok = l1[pos] > 0
                direct = np.asarray(f.perspective_at(np.where(ok, l1[pos], 1.0), l2[pos]), dtype=float)
                vals = np.where(ok, direct, vals)
        # lam1 / lam2 can overflow f while lam2 f(lam1 / lam2) stays finite; the
        # recession slope is then exact up to O(lam2).
        blown = ~np.isfinite(vals) & (l1[pos] > 1e100 * l2[pos])
        if np.any(blown) and math.isfinite(f.recession):
            vals = np.where(blown, l1[pos] * f.recession, vals)
        out[pos] = vals
    zero = l2 == 0
    if np.any(zero):
        a = l1[zero]
        rec_up = f.recession
        rec_down = -f.conj_domain.lower
        with np.errstate(all="ignore"):
            vals = np.where(a > 0, a * rec_up, np.where(a < 0, -a * rec_down, 0.0))
        out[zero] = np.where(a == 0, 0.0, vals)
    return _out(out if out.ndim else out.reshape(()))


def as_measure(p) -> np.ndarray:
    """Validate a finite non-negative weight vector."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise ValueError("a discrete measure must be a 1-D array of weights")
    if not np.all(np.isfinite(arr)):
        raise ValueError("measure weights must be finite")
    if np.any(arr < 0):
        raise ValueError(f"measure weights must be non-negative, found {arr.min()!r}")
    return arr


def classical_df(f: DivergenceGenerator, p, q) -> float:
    """D_f(P || Q) = sum_x g(P(x), Q(x)) for finite measures on a common set."""
    p = as_measure(p)
    q = as_measure(q)
    if p.shape != q.shape:
        raise ValueError(f"measures have different sizes {p.shape[0]} and {q.shape[0]}")
    terms = np.asarray(g_eval(f, p, q), dtype=float)
    if np.any(terms == INF):
        return INF
    return float(np.sum(terms))


# ---------------------------------------------------------------------------
# Family descriptions as plain dicts


_FAMILY_KEYS = {
    "renyi": {"family", "alpha"},
    "kl": {"family"},
    "tv": {"family"},
    "fb": {"family"},
    "chi2": {"family"},
    "fidelity": {"family"},
}


def from_dict(desc: Mapping, path: str = "family") -> DivergenceGenerator:
    """Build a generator from a mapping such as ``{"family": "renyi", "alpha": 0.3}``."""
    if not isinstance(desc, Mapping):
        raise FamilyError(f"{path}: expected an object, got {type(desc).__name__}")
    name = desc.get("family")
    if name not in _FAMILY_KEYS:
        raise FamilyError(f"{path}.family: unknown family {name!r}; expected one of {sorted(_FAMILY_KEYS)}")
    extra = set(desc) - _FAMILY_KEYS[name]
    if extra:
        raise FamilyError(f"{path}.{sorted(extra)[0]}: unknown field for family {name!r}")
    if name == "renyi":
        if "alpha" not in desc:
            raise FamilyError(f"{path}.alpha: required for family 'renyi'")
        alpha = desc["alpha"]
        if isinstance(alpha, bool) or not isinstance(alpha, (int, float)):
            raise FamilyError(f"{path}.alpha: expected a number, got {alpha!r}")
        try:
            return renyi(float(alpha))
        except FamilyError as exc:
            raise FamilyError(f"{path}.alpha: {exc}") from None
    return {"kl": kl, "tv": tv, "fb": fb, "chi2": chi2, "fidelity": fidelity_generator}[name]()


def to_dict(f: DivergenceGenerator) -> dict:
    if f.name == "renyi":
        return {"family": "renyi", "alpha": f.params["alpha"]}
    if f.name in ("kl", "tv", "fb"):
        return {"family": f.name}
    raise FamilyError(f"generator {f.name!r} cannot be written as a family object")
