"""Input constants (CODATA 2018, exact SI where defined) and the composite
constants that appear in the helium energy functional."""
from __future__ import annotations

from dataclasses import dataclass, fields
from functools import lru_cache

import mpmath as mp

from .numerics import DomainError, PrecisionContext, default_context

__all__ = [
    "DerivedConstants",
    "PhysicalConstants",
    "ReferenceEnergies",
    "REFERENCE",
    "derive_constants",
    "helium_constants",
]

# Decimal inputs kept as strings so they are rounded once, at the working precision.
PLANCK_H = "6.62607015e-34"
SPEED_OF_LIGHT = "299792458"
ELEMENTARY_CHARGE = "1.602176634e-19"
ELECTRON_MASS = "9.1093837015e-31"
VACUUM_PERMITTIVITY = "8.8541878128e-12"
PROTON_MASS = "1.67262192369e-27"
NEUTRON_MASS = "1.67492749804e-27"
BOHR_RADIUS = "5.29177210903e-11"


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: mp.mpf
    c: mp.mpf
    e: mp.mpf
    m_e: mp.mpf
    eps0: mp.mpf
    Z: int = 2

    def __post_init__(self):
        if int(self.Z) != self.Z or self.Z < 1:
            raise DomainError("Z must be a positive integer")
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise DomainError(f"{f.name} must be positive")

    @classmethod
    def codata2018(cls, ctx: PrecisionContext | None = None, Z: int = 2) -> "PhysicalConstants":
        ctx = ctx or default_context()
        with ctx.activate():
            return cls(
                hbar=mp.mpf(PLANCK_H) / (2 * mp.pi),
                c=mp.mpf(SPEED_OF_LIGHT),
                e=mp.mpf(ELEMENTARY_CHARGE),
                m_e=mp.mpf(ELECTRON_MASS),
                eps0=mp.mpf(VACUUM_PERMITTIVITY),
                Z=Z,
            )

    @property
    def h(self) -> mp.mpf:
        return 2 * mp.pi * self.hbar

    @property
    def eV_per_J(self) -> mp.mpf:
        return 1 / self.e

    def to_eV(self, joules) -> mp.mpf:
        return joules / self.e

    def to_J(self, electronvolts) -> mp.mpf:
        return mp.mpf(electronvolts) * self.e

    @property
    def fine_structure(self) -> mp.mpf:
        return self.e**2 / (4 * mp.pi * self.eps0 * self.hbar * self.c)

    @property
    def compton_wavelength(self) -> mp.mpf:
        return 2 * mp.pi * self.hbar / (self.m_e * self.c)

    def bohr_radius(self, reduced: bool = False) -> mp.mpf:
        """Bohr radius from the inputs; ``reduced=True`` uses the electron-alpha
        reduced mass with the alpha mass approximated by 2 m_p + 2 m_n."""
        mass = self.m_e
        if reduced:
            nucleus = 2 * mp.mpf(PROTON_MASS) + 2 * mp.mpf(NEUTRON_MASS)
            mass = self.m_e * nucleus / (self.m_e + nucleus)
        return 4 * mp.pi * self.eps0 * self.hbar**2 / (self.e**2 * mass)


@dataclass(frozen=True)
class DerivedConstants:
    """Composite constants of the radial equation.

    ``B = 2 m_e / hbar^2`` multiplies energies, ``C_C = B k_e`` is the
    electron-electron coupling and ``A = Z C_C`` the nuclear one.
    """

    B: mp.mpf
    A: mp.mpf
    C_C: mp.mpf
    k_e: mp.mpf
    Lambda_WK: mp.mpf
    E_S: mp.mpf
    phys: PhysicalConstants


def derive_constants(pc: PhysicalConstants, ctx: PrecisionContext | None = None) -> DerivedConstants:
    ctx = ctx or default_context()
    with ctx.activate():
        four_pi_eps0 = 4 * mp.pi * pc.eps0
        k_e = pc.e**2 / four_pi_eps0
        B = 2 * pc.m_e / pc.hbar**2
        C_C = B * k_e
        Lambda_WK = 2 * pc.hbar * pc.e**8 / (225 * mp.pi * pc.m_e**4 * pc.c**7 * four_pi_eps0**4)
        E_S = pc.m_e**2 * pc.c**3 / (pc.e * pc.hbar)
        return DerivedConstants(B=B, A=pc.Z * C_C, C_C=C_C, k_e=k_e, Lambda_WK=Lambda_WK, E_S=E_S, phys=pc)


@lru_cache(maxsize=8)
def helium_constants(digits: int = 50) -> DerivedConstants:
    """Helium constants at ``digits`` precision, cached per digit count."""
    ctx = PrecisionContext(digits)
    return derive_constants(PhysicalConstants.codata2018(ctx), ctx)


@dataclass(frozen=True)
class ReferenceEnergies:
    """Literature energies (eV) and the iteration seeds used by the solvers."""

    literature_eV: tuple[str, str, str] = (
        "-24.587377708894326",
        "-3.679570726646890",
        "-1.810188776363249",
    )
    # ground state: transition frequency in Hz with a Lamb-shift adjustment
    ground_frequency_Hz: str = "-5945204290000000"
    lamb_shift_Hz: str = "2810881500"
    seeds_J: tuple[str | None, str, str] = (None, "-5.895322241384048e-19", "-2.900242160618248e-19")

    def literature(self, n: int, pc: PhysicalConstants) -> mp.mpf:
        """Literature energy of the n-th congruent S state in joules."""
        return pc.to_J(self.literature_eV[_index(n)])

    def literature_frequency_form(self, pc: PhysicalConstants) -> mp.mpf:
        """Ground energy as ``-h * nu`` without the Lamb-shift term."""
        return mp.mpf(self.ground_frequency_Hz) * pc.h

    def seed(self, n: int, pc: PhysicalConstants) -> mp.mpf:
        i = _index(n)
        if i == 0:
            return (mp.mpf(self.ground_frequency_Hz) + mp.mpf(self.lamb_shift_Hz)) * pc.h
        return mp.mpf(self.seeds_J[i])


def _index(n: int) -> int:
    if n not in (1, 2, 3):
        raise DomainError(f"only n = 1, 2, 3 are tabulated, got {n}")
    return n - 1


REFERENCE = ReferenceEnergies()
