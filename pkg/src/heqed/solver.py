"""Energy functional of the radial equation and the two damped fixed-point solvers.

The functional combines five quadratures of the radial shape in the scaled
coordinate x = alpha*z::

    f_N = 1 / int x^2 R^2        I1 = int x^2 R R''     I2 = int x R R'
    I3  = int x R^2              I4 = int x^4 R^4

``signs='listing'`` reproduces the reference energy table,
``f_N (a^2 I1 + 2 a^2 I2 - A a I3 + f_N f_E C_C a I4) / B``.
``signs='variational'`` is the Rayleigh-quotient arrangement
``-f_N (a^2 I1 + 2 a^2 I2 + A a I3 - f_N f_E C_C a I4) / B``, which is the
one that returns the exact hydrogen energy for R = exp(-x).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp

from .constants import REFERENCE, DerivedConstants
from .numerics import (
    DomainError,
    NonConvergenceError,
    PrecisionContext,
    default_context,
    integrate_semi_infinite,
)
from .qedzone import coupling_factor, solve_a_min
from .wavefunction import HeState, alpha0_of, normalize, radial_terms

__all__ = [
    "IterationConfig",
    "IterationRecord",
    "IterationTrace",
    "LAMBDA_SEED",
    "LAMBDA_THRESHOLD",
    "energy_functional",
    "energy_schedule",
    "functional_from_profile",
    "lambda_config",
    "solve_energy",
    "solve_lambda",
    "solved_state",
]

LAMBDA_SEED = "1e-15"
LAMBDA_THRESHOLD = "7e-18"
LAMBDA_DIVISOR = 50

# (damper, threshold) stages of the energy iteration for n = 1, 2, 3
REFERENCE_STAGES = {
    1: (("-0.1", "1e-20"),),
    2: (("-1e-2", "4e-17"), ("-3e-3", "1e-17")),
    3: (("-1e-2", "2e-17"), ("-4e-3", "8e-18")),
}

# u-space panel edges: the mapped integrands of the radial shape are concentrated below u = 0.9
PANEL_BREAKS = ("0.5", "0.9", "0.99")

Profile = Callable[[mp.mpf], tuple]


@dataclass(frozen=True)
class IterationConfig:
    stages: tuple[tuple[mp.mpf, mp.mpf], ...]
    seed: mp.mpf
    max_iterations: int = 1000

    def __post_init__(self):
        if not self.stages:
            raise DomainError("at least one stage is required")
        previous = None
        for damper, threshold in self.stages:
            if threshold <= 0:
                raise DomainError("thresholds must be positive")
            if abs(damper) >= 1:
                raise DomainError("damper magnitude must be below one")
            if previous is not None and threshold > previous:
                raise DomainError("thresholds must not increase across stages")
            previous = threshold


@dataclass(frozen=True)
class IterationRecord:
    step: int
    value: mp.mpf
    functional: mp.mpf
    rel_change: mp.mpf


@dataclass
class IterationTrace:
    records: list[IterationRecord] = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.records)

    @property
    def iterations(self) -> int:
        return len(self.records)

    def append(self, *args):
        self.records.append(IterationRecord(*args))

    def write_csv(self, path, value_unit: str = "", functional_unit: str = "J", digits: int = 50):
        with open(path, "w", newline="") as fh:
            fh.write(
                f"# columns: step,value,functional,rel_change ; units: 1,{value_unit or '1'},"
                f"{functional_unit},1 ; digits: {digits}\n"
            )
            w = csv.writer(fh, lineterminator="\n")
            for r in self.records:
                w.writerow([r.step, mp.nstr(r.value, digits), mp.nstr(r.functional, digits), mp.nstr(r.rel_change, 6)])


def _scaled_threshold(published: str, ctx: PrecisionContext) -> mp.mpf:
    # thresholds tuned for very long arithmetic cannot go below the working noise floor
    return max(mp.mpf(published), 100 * ctx.eps)


def energy_schedule(n: int, ctx: PrecisionContext | None = None, *, seed=None, dc: DerivedConstants | None = None) -> IterationConfig:
    ctx = ctx or default_context()
    if n not in REFERENCE_STAGES:
        raise DomainError(f"no iteration schedule for n = {n}")
    with ctx.activate():
        if seed is None:
            if dc is None:
                raise DomainError("dc is needed to build the default seed")
            seed = REFERENCE.seed(n, dc.phys)
        stages = tuple((mp.mpf(d), _scaled_threshold(t, ctx)) for d, t in REFERENCE_STAGES[n])
        return IterationConfig(stages=stages, seed=mp.mpf(seed))


def lambda_config(ctx: PrecisionContext | None = None, *, seed=LAMBDA_SEED) -> IterationConfig:
    ctx = ctx or default_context()
    with ctx.activate():
        # the damper slot carries the reciprocal divisor of the p-update
        stage = (mp.mpf(1) / LAMBDA_DIVISOR, _scaled_threshold(LAMBDA_THRESHOLD, ctx))
        return IterationConfig(stages=(stage,), seed=mp.mpf(seed))


def _integrate(f, ctx):
    return integrate_semi_infinite(f, ctx, breaks=PANEL_BREAKS)


def functional_from_profile(
    profile: Profile,
    alpha,
    dc: DerivedConstants,
    ctx: PrecisionContext | None = None,
    *,
    f_E=1,
    A=None,
    signs: str = "listing",
    include_coupling: bool = True,
):
    """Energy of an arbitrary radial profile ``x -> (R, R', R'')``."""
    ctx = ctx or default_context()
    with ctx.activate():
        A = dc.A if A is None else A
        a = mp.mpf(alpha)
        norm = _integrate(lambda x: x * x * profile(x)[0] ** 2, ctx)
        f_N = 1 / norm
        I1 = _integrate(lambda x: x * x * profile(x)[0] * profile(x)[2], ctx)
        I2 = _integrate(lambda x: x * profile(x)[0] * profile(x)[1], ctx)
        I3 = _integrate(lambda x: x * profile(x)[0] ** 2, ctx)
        I4 = _integrate(lambda x: x**4 * profile(x)[0] ** 4, ctx) if include_coupling else mp.mpf(0)
        kinetic = a * a * I1 + 2 * a * a * I2
        nuclear = A * a * I3
        repulsion = f_N * f_E * dc.C_C * a * I4
        if signs == "listing":
            return f_N * (kinetic - nuclear + repulsion) / dc.B
        if signs == "variational":
            return -f_N * (kinetic + nuclear - repulsion) / dc.B
        raise ValueError(f"unknown sign convention {signs!r}")


def _profile(n: int, k) -> Profile:
    cache = {}

    def profile(x):
        # the five quadratures share nodes, so remember the last few evaluations
        hit = cache.get(x)
        if hit is None:
            if len(cache) > 4096:
                cache.clear()
            hit = cache[x] = radial_terms(n, x, k)
        return hit

    return profile


def energy_functional(
    n: int,
    E_trial,
    lam,
    dc: DerivedConstants,
    ctx: PrecisionContext | None = None,
    *,
    f_E=None,
    signs: str = "listing",
):
    """F(E) for the n-th congruent S state at zone width ``lam``.

    ``f_E`` defaults to the listing coupling factor at a_min.  A trial energy
    with a non-positive alpha0 radicand raises :class:`DomainError`.
    """
    ctx = ctx or default_context()
    with ctx.activate():
        if f_E is None:
            f_E = coupling_factor(solve_a_min(ctx), mp.mpf(lam), dc, form="listing")
        alpha = alpha0_of(n, mp.mpf(E_trial), f_E, dc)
        return functional_from_profile(_profile(n, dc.A / alpha), alpha, dc, ctx, f_E=f_E, signs=signs)


def solve_energy(
    n: int,
    lam,
    cfg: IterationConfig | None = None,
    dc: DerivedConstants | None = None,
    ctx: PrecisionContext | None = None,
    *,
    signs: str = "listing",
    progress: Callable[[IterationRecord], None] | None = None,
):
    """Damped fixed point E <- E + damper (E - F(E)) with staged dampers.

    The stage advances as soon as the active threshold is met inside a
    multi-stage schedule; convergence is declared when the relative change
    drops below the final stage's threshold.  Returns (E, trace).
    """
    ctx = ctx or default_context()
    if dc is None:
        raise DomainError("derived constants are required")
    with ctx.activate():
        cfg = cfg or energy_schedule(n, ctx, dc=dc)
        lam = mp.mpf(lam)
        f_E = coupling_factor(solve_a_min(ctx), lam, dc, form="listing")
        stages = list(cfg.stages)
        damper, threshold = stages.pop(0)
        trace = IterationTrace()
        E = cfg.seed
        for step in range(1, cfg.max_iterations + 1):
            try:
                F = energy_functional(n, E, lam, dc, ctx, f_E=f_E, signs=signs)
            except DomainError as exc:
                raise NonConvergenceError(f"step {step}: {exc}", trace) from exc
            new = E + damper * (E - F)
            change = abs((new - E) / new)
            trace.append(step, new, F, change)
            if progress:
                progress(trace.records[-1])
            E = new
            if stages and change < threshold:
                damper, threshold = stages.pop(0)
            if change <= threshold:
                trace.converged = True
                return E, trace
        raise NonConvergenceError(f"energy iteration exceeded {cfg.max_iterations} steps", trace)


def solve_lambda(
    E_target,
    cfg: IterationConfig | None = None,
    dc: DerivedConstants | None = None,
    ctx: PrecisionContext | None = None,
    *,
    signs: str = "listing",
    progress: Callable[[IterationRecord], None] | None = None,
):
    """Fit the zone width so that the ground-state functional returns ``E_target``.

    The width is ``seed * p`` and the multiplier follows
    p <- p (1 - (F - E_target) / E_target / 50).  Returns (lambda, trace).
    """
    ctx = ctx or default_context()
    if dc is None:
        raise DomainError("derived constants are required")
    with ctx.activate():
        cfg = cfg or lambda_config(ctx)
        E_target = mp.mpf(E_target)
        if E_target >= 0:
            raise DomainError("target energy must be negative")
        (gain, threshold), = cfg.stages
        a_min = solve_a_min(ctx)
        trace = IterationTrace()
        p = mp.mpf(1)
        for step in range(1, cfg.max_iterations + 1):
            lam = cfg.seed * p
            f_E = coupling_factor(a_min, lam, dc, form="listing")
            try:
                alpha = alpha0_of(1, E_target, f_E, dc)
                F = functional_from_profile(_profile(1, dc.A / alpha), alpha, dc, ctx, f_E=f_E, signs=signs)
            except DomainError as exc:
                raise NonConvergenceError(f"step {step}: {exc}", trace) from exc
            new = p * (1 - (F - E_target) / E_target * gain)
            change = abs((new - p) / new)
            trace.append(step, cfg.seed * new, F, change)
            if progress:
                progress(trace.records[-1])
            p = new
            if change <= threshold:
                trace.converged = True
                return cfg.seed * p, trace
        raise NonConvergenceError(f"lambda iteration exceeded {cfg.max_iterations} steps", trace)


def solved_state(n: int, E, lam, dc: DerivedConstants, ctx: PrecisionContext | None = None) -> HeState:
    """Bundle a converged energy with its damping constant and normalisation."""
    ctx = ctx or default_context()
    with ctx.activate():
        lam = mp.mpf(lam)
        f_E = coupling_factor(solve_a_min(ctx), lam, dc, form="listing")
        alpha = alpha0_of(n, mp.mpf(E), f_E, dc)
        return HeState(n=n, E=mp.mpf(E), alpha0=alpha, f_N=normalize(n, dc.A / alpha, ctx), f_E=f_E, lam=lam)
