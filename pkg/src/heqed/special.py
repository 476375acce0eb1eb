"""Hyperbolic sine integral, Laguerre polynomials and the interaction-zone densities."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import mpmath as mp

from .numerics import DomainError, PrecisionContext, default_context, sum_series

__all__ = [
    "SHI_SWITCH",
    "ZoneDensity",
    "erlang_area",
    "erlang_density",
    "laguerre",
    "rescaled_zone_limit",
    "shi",
    "shi_asymptotic",
    "shi_quadrature",
    "shi_series",
    "xi_squared",
]

SHI_SWITCH = 6


def shi_series(z, ctx: PrecisionContext | None = None):
    """Taylor series sum z^(2k+1) / ((2k+1) (2k+1)!); valid for complex z too."""
    ctx = ctx or default_context()
    with ctx.activate():
        z = mp.mpmathify(z)
        z2 = z * z
        # carry the running power/factorial ratio instead of recomputing it
        state = {"t": z}

        def term(k):
            if k:
                state["t"] *= z2 / ((2 * k) * (2 * k + 1))
            return state["t"] / (2 * k + 1)

        return sum_series(term, ctx)


def shi_quadrature(x, ctx: PrecisionContext | None = None, *, scaled: bool = False):
    """Direct quadrature of sinh(t)/t on (0, x), optionally times exp(-|x|).

    The integrand carries an exp(-x) factor so that it stays
    of order one near the upper limit, where nearly all of the mass sits.
    """
    ctx = ctx or default_context()
    with ctx.activate():
        x = mp.mpf(x)
        sign, x = (-1 if x < 0 else 1), abs(x)
        if x == 0:
            return mp.mpf(0)

        def f(t):
            if t == 0:
                return mp.exp(-x)
            return (mp.exp(t - x) - mp.exp(-t - x)) / (2 * t)

        knots = [mp.mpf(0)] + [x - k for k in (64, 32, 16, 8, 4, 2, 1) if x - k > 0] + [x]
        value = mp.quad(f, knots)
        return sign * (value if scaled else value * mp.exp(x))


def shi_asymptotic(x, ctx: PrecisionContext | None = None, *, scaled: bool = False):
    """Large-|x| expansion e^x/(2x) sum k!/x^k (optimally truncated), plus the
    mirrored e^-x part so that the odd symmetry holds exactly."""
    ctx = ctx or default_context()
    with ctx.activate():
        x = mp.mpf(x)
        sign, x = (-1 if x < 0 else 1), abs(x)
        grow = _euler_tail(x)
        decay = _euler_tail(-x)
        value = grow / (2 * x) - mp.exp(-2 * x) * decay / (2 * x)
        return sign * (value if scaled else value * mp.exp(x))


def _euler_tail(x):
    # sum k!/x^k up to the smallest term
    total = term = mp.mpf(1)
    k = 0
    while True:
        k += 1
        nxt = term * k / x
        if abs(nxt) >= abs(term) or abs(nxt) < mp.eps * abs(total):
            return total
        term = nxt
        total += term


def _asymptotic_threshold(ctx: PrecisionContext) -> mp.mpf:
    # smallest asymptotic term is about e^-x, so x must exceed ln(10)*dps
    return mp.mpf(ctx.dps) * mp.log(10) + 10


def shi(x, ctx: PrecisionContext | None = None, *, scaled: bool = False, method: str = "auto"):
    """Hyperbolic sine integral Shi(x) = int_0^x sinh(t)/t dt.

    ``method='auto'`` uses the Taylor series for |x| <= 6, the scaled
    quadrature up to the point where the asymptotic expansion reaches full
    working precision, and the expansion beyond.  With ``scaled=True`` the
    value is multiplied by exp(-|x|).
    """
    ctx = ctx or default_context()
    with ctx.activate():
        x = mp.mpf(x)
        if method == "auto":
            if abs(x) <= SHI_SWITCH:
                method = "series"
            elif abs(x) < _asymptotic_threshold(ctx):
                method = "quadrature"
            else:
                method = "asymptotic"
        if method == "series":
            value = shi_series(x, ctx)
            return value * mp.exp(-abs(x)) if scaled else value
        if method == "quadrature":
            return shi_quadrature(x, ctx, scaled=scaled)
        if method == "asymptotic":
            return shi_asymptotic(x, ctx, scaled=scaled)
        raise ValueError(f"unknown method {method!r}")


def laguerre(n: int, x, derivative: int = 0):
    """Laguerre polynomial L_n(x) from its explicit sum, or its m-th derivative."""
    if n < 0 or derivative < 0:
        raise DomainError("n and derivative order must be non-negative")
    x = mp.mpmathify(x)
    total = mp.mpf(0)
    for k in range(derivative, n + 1):
        # d^m/dx^m x^k = k!/(k-m)! x^(k-m), which cancels the 1/k! of the sum
        coeff = mp.mpf((-1) ** k * comb(n, k)) / mp.factorial(k - derivative)
        total += coeff * x ** (k - derivative)
    return total


@dataclass(frozen=True)
class ZoneDensity:
    """Gaussian interaction zone of width ``lam`` on the half line."""

    lam: mp.mpf

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("lambda must be positive")

    @property
    def eta_sq(self) -> mp.mpf:
        return 2 / (mp.sqrt(mp.pi) * self.lam)

    def __call__(self, delta):
        return xi_squared(delta, self)


def xi_squared(delta, zone: ZoneDensity):
    return zone.eta_sq * mp.exp(-((delta / zone.lam) ** 2))


def erlang_density(n: int, x, lam):
    """|x|^(n-1) e^(-|x|/lam) / ((2 lam)^(n-1) (n-1)!), normalised as written."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if not lam > 0:
        raise DomainError("lambda must be positive")
    ax = abs(mp.mpmathify(x))
    return ax ** (n - 1) * mp.exp(-ax / lam) / ((2 * lam) ** (n - 1) * mp.factorial(n - 1))


def erlang_area(n: int, lam):
    """Integral of :func:`erlang_density` over the real line, lam * 2^(2-n)."""
    return lam * mp.mpf(2) ** (2 - n)


def rescaled_zone_limit(n: int, delta, lam):
    s = mp.sqrt(4 * n)
    return s * erlang_density(n, delta * s, lam)
