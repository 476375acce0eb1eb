"""Precision handling and the handful of numerical kernels shared by every module.

All arithmetic runs on :mod:`mpmath` multiprecision floats.  A
:class:`PrecisionContext` fixes the working digit count; every public routine
takes one explicitly and evaluates inside ``ctx.activate()`` so results never
depend on whatever global precision happened to be set by the caller.
"""
from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator

import mpmath as mp

__all__ = [
    "BracketError",
    "DivergenceError",
    "DomainError",
    "HeqedError",
    "NonConvergenceError",
    "PrecisionContext",
    "PrecisionError",
    "RootResult",
    "default_context",
    "find_root_bracketed",
    "integrate_semi_infinite",
    "sum_series",
]

DIGITS_ENV = "HEQED_DIGITS"
GUARD_DIGITS = 8
MIN_DIGITS = 16


class HeqedError(Exception):
    """Base class for numerical failures raised by this package."""


class DomainError(HeqedError, ValueError):
    pass


class BracketError(HeqedError, ValueError):
    pass


class PrecisionError(HeqedError):
    pass


class DivergenceError(HeqedError):
    """Raised when a quadrature or series fails to settle.

    ``partial`` carries the best estimate reached before giving up.
    """

    def __init__(self, message: str, partial=None, error=None):
        super().__init__(message)
        self.partial = partial
        self.error = error


class NonConvergenceError(HeqedError):
    """An iteration hit its step limit; ``trace`` holds whatever was recorded."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class PrecisionContext:
    digits: int = 50
    quad_rel_tol: mp.mpf | None = field(default=None, compare=False)
    quad_abs_tol: mp.mpf | None = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < MIN_DIGITS:
            raise DomainError(f"digits must be an integer >= {MIN_DIGITS}, got {self.digits!r}")
        with mp.workdps(self.digits + GUARD_DIGITS):
            eps = mp.mpf(10) ** (2 - self.digits)
            for name in ("quad_rel_tol", "quad_abs_tol"):
                value = getattr(self, name)
                value = 10 * eps if value is None else mp.mpf(value)
                if value < eps:
                    raise DomainError(f"{name} must not be tighter than eps = 1e{2 - self.digits}")
                object.__setattr__(self, name, value)

    @property
    def eps(self) -> mp.mpf:
        with self.activate():
            return mp.mpf(10) ** (2 - self.digits)

    @property
    def dps(self) -> int:
        """Working precision including guard digits."""
        return self.digits + GUARD_DIGITS

    @contextmanager
    def activate(self) -> Iterator[None]:
        with mp.workdps(self.dps):
            yield

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.digits)

    @classmethod
    def from_env(cls, default: int = 50) -> "PrecisionContext":
        raw = os.environ.get(DIGITS_ENV)
        return cls(int(raw) if raw else default)


def default_context() -> PrecisionContext:
    return PrecisionContext.from_env()


@dataclass(frozen=True)
class RootResult:
    root: mp.mpf
    residual: mp.mpf
    iterations: int
    bracket: tuple[mp.mpf, mp.mpf]


def _resolve(ctx: PrecisionContext | None) -> PrecisionContext:
    return default_context() if ctx is None else ctx


# Default panel edges in the mapped variable u; most of the mass of an
# exponentially decaying integrand sits below u = 0.9 once the scale is right.
DEFAULT_BREAKS = ("0.5", "0.9", "0.99")


def integrate_semi_infinite(
    f: Callable[[mp.mpf], mp.mpf],
    ctx: PrecisionContext | None = None,
    *,
    scale=1,
    breaks=DEFAULT_BREAKS,
    max_panels: int = 64,
) -> mp.mpf:
    """Integrate ``f`` over (0, inf).

    The half line is mapped onto (0, 1) with ``x = -scale*log(1 - u)``, which
    turns ``x^k exp(-c x)`` into a bounded integrand whenever ``c*scale > 1``
    and into an integrable endpoint power otherwise.  Tanh-sinh quadrature is
    applied panel by panel and the worst panel is bisected until the summed
    error estimate meets the context tolerances.

    Integrands with only algebraic decay map to a non-integrable endpoint
    singularity; they fail with :class:`DivergenceError` after ``max_panels``.
    """
    ctx = _resolve(ctx)
    with ctx.activate():
        L = mp.mpf(scale)
        if L <= 0:
            raise DomainError("scale must be positive")

        def mapped(u):
            if u >= 1:
                return mp.mpf(0)
            return f(-L * mp.log1p(-u)) * L / (1 - u)

        edges = [mp.mpf(0)] + [mp.mpf(b) for b in breaks] + [mp.mpf(1)]
        panels = [_panel(mapped, a, b) for a, b in zip(edges, edges[1:])]
        while True:
            total = mp.fsum(p[2] for p in panels)
            err = mp.fsum(p[3] for p in panels)
            if err <= ctx.quad_rel_tol * abs(total) + ctx.quad_abs_tol:
                return +total
            if len(panels) >= max_panels:
                raise DivergenceError(
                    f"quadrature did not settle within {max_panels} panels "
                    f"(estimate {mp.nstr(total, 15)}, error {mp.nstr(err, 3)})",
                    partial=total,
                    error=err,
                )
            worst = max(range(len(panels)), key=lambda i: panels[i][3])
            a, b = panels[worst][:2]
            mid = (a + b) / 2
            panels[worst : worst + 1] = [_panel(mapped, a, mid), _panel(mapped, mid, b)]


def _panel(g, a, b):
    value, err = mp.quad(g, [a, b], error=True)
    return a, b, value, err


def find_root_bracketed(
    g: Callable[[mp.mpf], mp.mpf],
    lo,
    hi,
    ctx: PrecisionContext | None = None,
    *,
    tol=None,
    max_iterations: int = 500,
) -> RootResult:
    """Locate a sign change of ``g`` inside ``[lo, hi]`` with Brent's method.

    Inverse quadratic or secant steps are accepted only when they land well
    inside the current bracket and shrink it fast enough; otherwise the step
    is a bisection, so the root stays bracketed throughout.  ``tol`` bounds
    the residual and defaults to ``eps`` times the larger endpoint value.
    """
    ctx = _resolve(ctx)
    with ctx.activate():
        a, b = mp.mpf(lo), mp.mpf(hi)
        fa, fb = g(a), g(b)
        if fa == 0:
            return RootResult(a, fa, 0, (min(a, b), max(a, b)))
        if fb == 0:
            return RootResult(b, fb, 0, (min(a, b), max(a, b)))
        if mp.sign(fa) == mp.sign(fb):
            raise BracketError(f"no sign change on [{mp.nstr(a, 10)}, {mp.nstr(b, 10)}]")
        ftol = ctx.eps * max(abs(fa), abs(fb)) if tol is None else mp.mpf(tol)
        c, fc = a, fa
        d = e = b - a
        for iteration in range(1, max_iterations + 1):
            if mp.sign(fb) == mp.sign(fc):
                c, fc = a, fa
                d = e = b - a
            if abs(fc) < abs(fb):
                a, b, c = b, c, b
                fa, fb, fc = fb, fc, fb
            xtol = 2 * mp.eps * abs(b)
            m = (c - b) / 2
            if fb == 0 or abs(m) <= xtol:
                bracket = (min(b, c), max(b, c))
                root, froot = b, fb
                if fb != 0 and abs(fb) > ftol:
                    # rounding has hidden the sign; settle on the midpoint
                    root = (b + c) / 2
                    froot = g(root)
                    if abs(froot) > ftol:
                        raise PrecisionError(
                            f"bracket collapsed at {mp.nstr(root, 20)} with residual "
                            f"{mp.nstr(froot, 3)} above tolerance {mp.nstr(ftol, 3)}"
                        )
                return RootResult(root, froot, iteration, bracket)
            if abs(e) >= xtol and abs(fa) > abs(fb):
                s = fb / fa
                if a == c:
                    p, q = 2 * m * s, 1 - s
                else:
                    q, r = fa / fc, fb / fc
                    p = s * (2 * m * q * (q - r) - (b - a) * (r - 1))
                    q = (q - 1) * (r - 1) * (s - 1)
                if p > 0:
                    q = -q
                p = abs(p)
                if 2 * p < min(3 * m * q - abs(xtol * q), abs(e * q)):
                    e, d = d, p / q
                else:
                    d = e = m
            else:
                d = e = m
            a, fa = b, fb
            b = b + d if abs(d) > xtol else b + (xtol if m > 0 else -xtol)
            fb = g(b)
        raise NonConvergenceError(f"root finder exceeded {max_iterations} iterations")


def sum_series(
    term: Callable[[int], mp.mpf],
    ctx: PrecisionContext | None = None,
    *,
    start: int = 0,
    tol=None,
    max_terms: int = 100_000,
):
    """Sum ``term(k)`` for ``k = start, start+1, ...`` until the next term is negligible.

    Stopping requires two consecutive terms below ``tol`` relative to the
    running sum so that a single accidental zero (an odd term of an even
    series, say) does not end the loop early.  Complex terms are accepted.
    """
    ctx = _resolve(ctx)
    with ctx.activate():
        rtol = mp.eps if tol is None else mp.mpf(tol)
        total = mp.mpf(0)
        quiet = 0
        for k in range(start, start + max_terms):
            t = term(k)
            total += t
            if abs(t) <= rtol * abs(total):
                quiet += 1
                if quiet == 2:
                    return total
            else:
                quiet = 0
        raise DivergenceError(f"series not converged after {max_terms} terms", partial=total)
