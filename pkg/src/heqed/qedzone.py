"""Vacuum-polarisation corrections inside a Gaussian interaction zone.

Lengths are in metres and energies in joules unless a name says otherwise.
``a`` always denotes a distance in units of the zone width ``lam``.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .constants import DerivedConstants, PhysicalConstants
from .numerics import (
    DivergenceError,
    DomainError,
    NonConvergenceError,
    PrecisionContext,
    default_context,
    find_root_bracketed,
    integrate_semi_infinite,
)
from .special import ZoneDensity

__all__ = [
    "A_MIN_BRACKET",
    "CutoffModel",
    "InteractionZone",
    "coupling_curve",
    "coupling_factor",
    "cutoff_chain",
    "interaction_zone",
    "lambda_ab_initio",
    "lambda_from_coupling",
    "lambda_from_cutoff",
    "mass_ratio_from_cutoff",
    "solve_a_min",
    "stationarity_residual",
    "total_potential",
    "uehling",
    "uehling_near",
    "wk_point",
    "wk_polynomial",
    "wk_smeared",
    "zone_energy",
    "zone_energy_curve",
]

A_MIN_BRACKET = ("1.0", "1.3")


@dataclass(frozen=True)
class InteractionZone:
    lam: mp.mpf
    a_min: mp.mpf
    f_E: mp.mpf

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("lambda must be positive")


def lambda_ab_initio(dc: DerivedConstants, pc: PhysicalConstants | None = None):
    """Zone width at which the field energy (3/5) k_e / lam reaches 3 m_e c^2."""
    pc = pc or dc.phys
    return mp.mpf(3) / 5 * dc.k_e / (3 * pc.m_e * pc.c**2)


def wk_point(delta, dc: DerivedConstants):
    if delta <= 0:
        raise DomainError("the point Wichmann-Kroll potential is singular at delta <= 0")
    return dc.Lambda_WK / mp.mpf(delta) ** 5


def wk_polynomial(a):
    """3 - 12 a^2 + 4 a^4, i.e. H_4(a)/4 with the physicists' Hermite polynomial."""
    a2 = a * a
    return 3 - 12 * a2 + 4 * a2 * a2


def wk_smeared(delta, lam, dc: DerivedConstants):
    """Wichmann-Kroll potential convolved with the zone Gaussian; finite at 0."""
    if lam <= 0:
        raise DomainError("lambda must be positive")
    a = mp.mpf(delta) / lam
    return dc.Lambda_WK / (3 * mp.sqrt(2)) * mp.exp(-a * a) * wk_polynomial(a) / lam**5


def total_potential(delta, lam, dc: DerivedConstants):
    if delta <= 0:
        raise DomainError("delta must be positive")
    return dc.k_e / delta - wk_smeared(delta, lam, dc)


def uehling(delta, Z: int, pc: PhysicalConstants, ctx: PrecisionContext | None = None):
    """Uehling potential energy with the spectral integral done by quadrature."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    ctx = ctx or default_context()
    with ctx.activate():
        delta = mp.mpf(delta)
        alpha = pc.fine_structure
        rate = 4 * mp.pi * delta / pc.compton_wavelength

        def f(t):
            x = 1 + t
            return mp.exp(-rate * x) * (2 * x * x + 1) * mp.sqrt(t * (x + 1)) / (2 * x**4)

        integral = integrate_semi_infinite(f, ctx, scale=max(1 / rate, mp.mpf(1)))
        return -Z * alpha * pc.hbar * pc.c / delta * (1 + 2 * alpha / (3 * mp.pi) * integral)


def uehling_near(delta, Z: int, pc: PhysicalConstants):
    """Short-distance closed form of :func:`uehling` (logarithmic regime)."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    alpha = pc.fine_structure
    log_term = mp.log(pc.compton_wavelength / (2 * mp.pi * delta)) - mp.euler - mp.mpf(5) / 6
    return -Z * alpha * pc.hbar * pc.c / delta * (1 + 2 * alpha / (3 * mp.pi) * log_term)


def stationarity_residual(x):
    x = mp.mpmathify(x)
    x2 = x * x
    return -mp.sqrt(2 * mp.pi) * (x2 * x2 * x - 10 * x2 * x + 15 * x) * mp.exp(x2 / 2) - 2 * x2 * x2 + 22 * x2 - 8


def solve_a_min(ctx: PrecisionContext | None = None):
    ctx = ctx or default_context()
    with ctx.activate():
        lo, hi = (mp.mpf(b) for b in A_MIN_BRACKET)
        return find_root_bracketed(stationarity_residual, lo, hi, ctx).root


def _coupling_strength(lam, dc: DerivedConstants):
    if lam <= 0:
        raise DomainError("lambda must be positive")
    return dc.Lambda_WK / (dc.k_e * 3 * mp.sqrt(2) * lam**4)


def coupling_factor(a, lam, dc: DerivedConstants, *, form: str = "closed"):
    """Coupling factor f_E at distance ``a*lam``.

    ``form='closed'`` is the exact ratio 1 - delta W(delta)/k_e.  The energy
    iterations use ``form='listing'``, which drops the leading factor ``a``
    (the variant the reference energies were produced with).
    """
    a = mp.mpmathify(a)
    shape = wk_polynomial(a) * mp.exp(-a * a)
    if form == "closed":
        shape *= a
    elif form != "listing":
        raise ValueError(f"unknown form {form!r}")
    return 1 - _coupling_strength(lam, dc) * shape


def coupling_curve(a_values, lam, dc: DerivedConstants, *, form: str = "closed"):
    return [(mp.mpmathify(a), coupling_factor(a, lam, dc, form=form)) for a in a_values]


def lambda_from_coupling(f_E, a_min, dc: DerivedConstants, *, form: str = "closed"):
    """Invert :func:`coupling_factor` for the zone width."""
    if f_E == 1:
        raise DomainError("f_E = 1 carries no information about lambda")
    a = mp.mpmathify(a_min)
    shape = wk_polynomial(a) * mp.exp(-a * a)
    if form == "closed":
        shape *= a
    radicand = dc.Lambda_WK / (dc.k_e * 3 * mp.sqrt(2)) * shape / (1 - f_E)
    if radicand <= 0:
        raise DomainError("fourth-root argument is not positive")
    return mp.root(radicand, 4)


def interaction_zone(lam, dc: DerivedConstants, ctx: PrecisionContext | None = None, *, form: str = "listing"):
    ctx = ctx or default_context()
    with ctx.activate():
        lam = mp.mpf(lam)
        a = solve_a_min(ctx)
        return InteractionZone(lam=lam, a_min=a, f_E=coupling_factor(a, lam, dc, form=form))


def zone_energy(
    delta_prime,
    lam,
    dc: DerivedConstants,
    ctx: PrecisionContext | None = None,
    *,
    form: str = "reduced",
    cutoff=None,
    f_E=None,
):
    """Energy of the zone Gaussian centred at ``delta_prime`` in the pair potential.

    ``form='direct'`` integrates xi^2(delta - delta') V(delta) over
    ``delta > cutoff``.  The Coulomb part of that integral grows like
    ``-log(cutoff)``, so a zero cutoff raises :class:`DivergenceError`.

    ``form='reduced'`` first eliminates the Coulomb term with the constant
    coupling condition k_e/delta = W(delta)/(1 - f_E), leaving the finite
    f_E/(1 - f_E) * int xi^2(delta - delta') W(delta) d delta.  ``f_E``
    defaults to the closed-form coupling factor at a_min.
    """
    ctx = ctx or default_context()
    with ctx.activate():
        lam = mp.mpf(lam)
        s = mp.mpf(delta_prime) / lam
        zone = ZoneDensity(lam)
        if form == "reduced":
            if f_E is None:
                f_E = coupling_factor(solve_a_min(ctx), lam, dc)
            weight = lambda a: mp.exp(-a * a) * wk_polynomial(a) * mp.exp(-((a - s) ** 2))
            integral = _gauss_half_line(weight, s, ctx)
            # delta = a*lam, so d delta = lam da and W carries lam^-5
            scale = zone.eta_sq * dc.Lambda_WK / (3 * mp.sqrt(2) * lam**4)
            return f_E / (1 - f_E) * scale * integral
        if form != "direct":
            raise ValueError(f"unknown form {form!r}")
        c = mp.mpf(0) if cutoff is None else mp.mpf(cutoff) / lam
        if c <= 0:
            raise DivergenceError("the Coulomb term diverges logarithmically at delta -> 0; pass a positive cutoff")
        coulomb = lambda a: mp.exp(-((a - s) ** 2)) / a
        wk = lambda a: mp.exp(-a * a) * wk_polynomial(a) * mp.exp(-((a - s) ** 2))
        coulomb_part = zone.eta_sq * dc.k_e * _gauss_half_line(coulomb, s, ctx, start=c)
        wk_part = zone.eta_sq * dc.Lambda_WK / (3 * mp.sqrt(2) * lam**4) * _gauss_half_line(wk, s, ctx, start=c)
        return coulomb_part - wk_part


def _gauss_half_line(f, centre, ctx, start=0):
    # Gaussian-weighted integrand: split at the centre and a few widths either side
    start = mp.mpf(start)
    knots = sorted({start, *[centre + d for d in (-4, -1, 0, 1, 4) if centre + d > start]})
    head = mp.quad(f, knots) if len(knots) > 1 else mp.mpf(0)
    tail = integrate_semi_infinite(lambda t: f(knots[-1] + t), ctx)
    return head + tail


def zone_energy_curve(a_values, lam, dc: DerivedConstants, ctx: PrecisionContext | None = None, **kwargs):
    ctx = ctx or default_context()
    with ctx.activate():
        lam = mp.mpf(lam)
        return [(mp.mpmathify(a), zone_energy(mp.mpmathify(a) * lam, lam, dc, ctx, **kwargs)) for a in a_values]


@dataclass(frozen=True)
class CutoffModel:
    delta_lambda_rel: mp.mpf
    m_b: mp.mpf
    l_cutoff: mp.mpf
    E_cutoff: mp.mpf


def _self_energy_scale(pc: PhysicalConstants):
    # (1/3) * 8 pi^2 eps0 hbar c / (3 e^2); the 1/3 shares the shift among three particles
    return 8 * mp.pi**2 * pc.eps0 * pc.hbar * pc.c / (9 * pc.e**2)


def cutoff_chain(
    delta_lambda_rel, pc: PhysicalConstants, ctx: PrecisionContext | None = None, *, mass_shift: str = "bare"
) -> CutoffModel:
    """Self-energy cutoff implied by a relative zone-width shift ``D``.

    The bare mass is m_b = m_e (1 + D).  With ``mass_shift='bare'`` the mass
    ratio in the exponent is the exact (m_b - m_e)/m_b = D/(1 + D); with
    ``'identity'`` it is D itself.
    """
    ctx = ctx or default_context()
    with ctx.activate():
        D = mp.mpf(delta_lambda_rel)
        if D < 0:
            raise DomainError("delta_lambda_rel must be non-negative")
        m_b = pc.m_e * (1 + D)
        if mass_shift == "bare":
            ratio = D / (1 + D)
        elif mass_shift == "identity":
            ratio = D
        else:
            raise ValueError(f"unknown mass_shift {mass_shift!r}")
        l_cut = 2 * mp.pi * pc.hbar / (m_b * pc.c) * mp.exp(-_self_energy_scale(pc) * ratio)
        E_cut = 2 * mp.pi * pc.hbar * pc.c / l_cut / pc.e
        return CutoffModel(delta_lambda_rel=D, m_b=m_b, l_cutoff=l_cut, E_cutoff=E_cut)


def mass_ratio_from_cutoff(l_cutoff, pc: PhysicalConstants, ctx: PrecisionContext | None = None, *, max_iterations=200):
    """Solve l = (2 pi hbar / (m_b c)) exp(-K q) for q = (m_b - m_e)/m_b.

    With m_b = m_e / (1 - q) the equation becomes the fixed point
    q = log(lambda_C (1 - q) / l) / K, a contraction because K is large.
    Returns (q, iterations)."""
    ctx = ctx or default_context()
    with ctx.activate():
        l_cutoff = mp.mpf(l_cutoff)
        if l_cutoff <= 0:
            raise DomainError("l_cutoff must be positive")
        K = _self_energy_scale(pc)
        q = mp.mpf(0)
        for step in range(1, max_iterations + 1):
            arg = pc.compton_wavelength * (1 - q) / l_cutoff
            if arg <= 0:
                raise NonConvergenceError("mass ratio left the physical range q < 1")
            new = mp.log(arg) / K
            if abs(new - q) <= ctx.eps * max(abs(new), mp.mpf(1)):
                return new, step
            q = new
        raise NonConvergenceError(f"cutoff inversion did not settle in {max_iterations} steps")


def lambda_from_cutoff(l_cutoff, lambda_ref, pc: PhysicalConstants, ctx: PrecisionContext | None = None):
    """Zone width lambda_ref (1 - D) with D recovered from the cutoff length."""
    ctx = ctx or default_context()
    with ctx.activate():
        q, _ = mass_ratio_from_cutoff(l_cutoff, pc, ctx)
        D = q / (1 - q)
        return mp.mpf(lambda_ref) * (1 - D)
