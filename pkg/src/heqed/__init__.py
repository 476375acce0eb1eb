"""High-precision helium S-state energies with a Gaussian QED interaction zone.

The package is layered: :mod:`heqed.numerics` (precision, quadrature, roots),
:mod:`heqed.constants`, :mod:`heqed.special` (Shi, Laguerre),
:mod:`heqed.qedzone` (zone width, smeared Wichmann-Kroll potential, coupling),
:mod:`heqed.wavefunction` and :mod:`heqed.solver`, with :mod:`heqed.cli` on top.
"""
from .constants import REFERENCE, DerivedConstants, PhysicalConstants, derive_constants, helium_constants
from .numerics import (
    BracketError,
    DivergenceError,
    DomainError,
    HeqedError,
    NonConvergenceError,
    PrecisionContext,
    PrecisionError,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "DerivedConstants",
    "DivergenceError",
    "DomainError",
    "HeqedError",
    "NonConvergenceError",
    "PhysicalConstants",
    "PrecisionContext",
    "PrecisionError",
    "REFERENCE",
    "__version__",
    "derive_constants",
    "helium_constants",
]
