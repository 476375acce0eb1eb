"""Transcendental radial wavefunction of the congruent helium S states.

Everything is written in the scaled coordinate ``x = alpha0 * z``.  The
shape depends on the state only through ``n`` and the ratio
``k = A / alpha0``::

    R_n(x) = (n-1)! L_{n-1}(x) sinh(x) / (x (1 + k Shi(x))^2)

The pieces that do not depend on ``k`` (sinh(x)/x and its derivatives,
Shi(x), the Laguerre factor) are cached per quadrature node, because the
energy iterations re-evaluate the same nodes with a new ``k`` every step.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import mpmath as mp

from .constants import DerivedConstants
from .numerics import (
    GUARD_DIGITS,
    MIN_DIGITS,
    DomainError,
    PrecisionContext,
    default_context,
    find_root_bracketed,
    integrate_semi_infinite,
    sum_series,
)
from .special import _asymptotic_threshold, laguerre, shi_asymptotic, shi_series

__all__ = [
    "HeState",
    "alpha0_of",
    "asymptotic_ratio",
    "density_argmax",
    "electron_potential_energy",
    "normalize",
    "radial_R",
    "radial_R_complex",
    "radial_R_two_arg",
    "radial_density_h",
    "radial_density_he",
    "radial_derivatives",
    "radial_terms",
    "wirtinger_residual",
]


@dataclass(frozen=True)
class HeState:
    n: int
    E: mp.mpf
    alpha0: mp.mpf
    f_N: mp.mpf
    f_E: mp.mpf
    lam: mp.mpf

    def k(self, dc: DerivedConstants) -> mp.mpf:
        return dc.A / self.alpha0


def alpha0_of(n: int, E, f_E, dc: DerivedConstants) -> mp.mpf:
    radicand = f_E * dc.C_C - dc.B * E
    if radicand <= 0:
        raise DomainError("f_E*C_C - B*E must be positive for a bound state")
    return n * mp.sqrt(radicand)


def _spectral(n: int, x):
    """(n-1)! L_{n-1}(x) and its first two derivatives."""
    scale = factorial(n - 1)
    return tuple(scale * laguerre(n - 1, x, m) for m in range(3))


def _sinhc(x):
    """sinh(x)/x with its first two derivatives, cancellation-free near 0."""
    if abs(x) < 1:
        g = g1 = g2 = mp.mpf(0)
        t = mp.mpf(1)  # x^(2j) / (2j+1)!
        j = 0
        while True:
            g += t
            if j:
                g1 += 2 * j * t / x
                g2 += 2 * j * (2 * j - 1) * t / (x * x)
            j += 1
            t *= x * x / ((2 * j) * (2 * j + 1))
            if t < mp.eps * g:
                return g, g1, g2
    s, c = mp.sinh(x), mp.cosh(x)
    return s / x, (x * c - s) / x**2, (x * x * s - 2 * x * c + 2 * s) / x**3


def _shi_fast(x):
    # The Taylor series has only positive terms on the real axis, so it keeps
    # full precision at any x; it needs more terms than the quadrature branch
    # would, yet is still far cheaper per call.
    ctx = _ctx_at(mp.mp.dps)
    if x < _asymptotic_threshold(ctx):
        return shi_series(x, ctx)
    return shi_asymptotic(x, ctx)


@lru_cache(maxsize=None)
def _ctx_at(dps: int) -> PrecisionContext:
    return PrecisionContext(max(dps - GUARD_DIGITS, MIN_DIGITS))


@lru_cache(maxsize=200_000)
def _node(x, n, prec):
    g = _sinhc(x)
    return g, _shi_fast(x), _spectral(n, x)


def radial_terms(n: int, x, k):
    """R, R' and R'' at ``x`` for shape parameter ``k = A/alpha0``."""
    (g, g1, g2), S, (P, P1, P2) = _node(x, n, mp.mp.prec)
    D = 1 + k * S
    # d/dx Shi(x) = sinh(x)/x = g, which is why g appears in place of Shi'
    R0 = g / D**2
    R1 = g1 / D**2 - 2 * k * g * g / D**3
    R2 = g2 / D**2 - 6 * k * g * g1 / D**3 + 6 * k * k * g**3 / D**4
    return P * R0, P1 * R0 + P * R1, P2 * R0 + 2 * P1 * R1 + P * R2


def radial_R(n: int, x, A_over_alpha0, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.activate():
        x = mp.mpf(x)
        if x < 0:
            raise DomainError("x must be non-negative")
        return radial_terms(n, x, mp.mpf(A_over_alpha0))[0]


def radial_derivatives(n: int, x, state: HeState, dc: DerivedConstants, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.activate():
        _, R1, R2 = radial_terms(n, mp.mpf(x), state.k(dc))
        return R1, R2


def radial_R_two_arg(n: int, r1, r2, state: HeState, dc: DerivedConstants, ctx: PrecisionContext | None = None):
    if r1 < 0 or r2 < 0:
        raise DomainError("radii must be non-negative")
    ctx = ctx or default_context()
    with ctx.activate():
        return radial_R(n, state.alpha0 * (mp.mpf(r1) + mp.mpf(r2)), state.k(dc), ctx)


def normalize(n: int, k, ctx: PrecisionContext | None = None, *, scale=1):
    """f_N = 1 / int_0^inf x^2 R(x)^2 dx; ``scale`` multiplies R (for tests)."""
    ctx = ctx or default_context()
    with ctx.activate():
        k, c = mp.mpf(k), mp.mpf(scale)
        norm = integrate_semi_infinite(lambda x: (x * c * radial_terms(n, x, k)[0]) ** 2, ctx)
        return 1 / norm


def radial_density_he(n: int, r_sum, state: HeState, dc: DerivedConstants, ctx: PrecisionContext | None = None):
    """Probability density per metre of the summed radius ``r1 + r2``."""
    ctx = ctx or default_context()
    with ctx.activate():
        x = state.alpha0 * mp.mpf(r_sum)
        P = _spectral(n, x)[0]
        D = 1 + state.k(dc) * _shi_fast(x)
        return state.alpha0 * state.f_N * P**2 * mp.sinh(x) ** 2 / D**4


def radial_density_h(r, Z: int = 1, a0=None, *, normalized: bool = False):
    """Hydrogen-like 1s radial density r^2 exp(-2 Z r / a0).

    The prefactor is 2/(pi a0^3) unless ``normalized`` asks for the
    unit-area value 4 Z^3 / a0^3.  Z = 2 gives the exp(-4r/a0) variant.
    """
    if a0 is None:
        raise DomainError("a0 must be given")
    r = mp.mpmathify(r)
    pref = 4 * mp.mpf(Z) ** 3 / a0**3 if normalized else 2 / (mp.pi * a0**3)
    return pref * r**2 * mp.exp(-2 * Z * r / a0)


def density_argmax(density, lo, hi, ctx: PrecisionContext | None = None, *, step=None):
    """Maximum of a smooth unimodal density by bracketing the zero of its slope."""
    ctx = ctx or default_context()
    with ctx.activate():
        lo, hi = mp.mpf(lo), mp.mpf(hi)
        h = step if step is not None else (hi - lo) * mp.mpf(10) ** (-(ctx.dps // 3))
        slope = lambda r: (density(r + h) - density(r - h)) / (2 * h)
        return find_root_bracketed(slope, lo, hi, ctx).root


def asymptotic_ratio(n: int, x, k, ctx: PrecisionContext | None = None):
    """R(x) / (x e^-x) against its large-x limit (n-1)! L_{n-1}(x) * 2/k^2.

    Both Shi(x) and sinh(x) grow like e^x/2 (Shi with an extra 1/x), which
    leaves R ~ 2 x e^-x / k^2 times the spectral factor.  Returns the pair
    (ratio, limit)."""
    ctx = ctx or default_context()
    with ctx.activate():
        x, k = mp.mpf(x), mp.mpf(k)
        R = radial_terms(n, x, k)[0]
        P = _spectral(n, x)[0]
        return R / (x * mp.exp(-x)), P * 2 / k**2


def electron_potential_energy(x, state: HeState, dc: DerivedConstants, ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.activate():
        x = mp.mpf(x)
        R = radial_terms(state.n, x, state.k(dc))[0]
        return state.f_E * 2 * dc.k_e * x**2 * R**2 * state.f_N


def radial_R_complex(n: int, z, k, ctx: PrecisionContext | None = None):
    """Complex continuation R_c(z), with Shi and sinh(z)/z from their Taylor series."""
    ctx = ctx or default_context()
    with ctx.activate():
        z = mp.mpc(z)
        sinhc = sum_series(_sinhc_term(z), ctx) if z != 0 else mp.mpf(1)
        P = factorial(n - 1) * laguerre(n - 1, z)
        return P * sinhc / (1 + k * shi_series(z, ctx)) ** 2


def _sinhc_term(z):
    z2 = z * z
    state = {"t": mp.mpc(1)}

    def term(j):
        if j:
            state["t"] *= z2 / ((2 * j) * (2 * j + 1))
        return state["t"]

    return term


def wirtinger_residual(n: int, z, k, ctx: PrecisionContext | None = None, *, h=None):
    """|dR/dx + i dR/dy| by centred differences; zero for a holomorphic R."""
    ctx = ctx or default_context()
    with ctx.activate():
        z = mp.mpc(z)
        h = mp.mpf(10) ** (-(ctx.dps // 3)) if h is None else mp.mpf(h)
        f = lambda w: radial_R_complex(n, w, k, ctx)
        dx = (f(z + h) - f(z - h)) / (2 * h)
        dy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
        return abs(dx + 1j * dy), abs(f(z))
