import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from heqed import REFERENCE, DomainError, PhysicalConstants, PrecisionContext, derive_constants, helium_constants

from conftest import rel


def test_codata_inputs(ctx):
    with ctx.activate():
        pc = PhysicalConstants.codata2018(ctx)
        assert pc.h == mp.mpf("6.62607015e-34")
        assert pc.c == 299792458
        assert pc.e == mp.mpf("1.602176634e-19")
        assert pc.Z == 2


def test_fine_structure_against_codata(dc):
    # CODATA 2018 recommended value, 7.2973525693(11)e-3
    assert rel(dc.phys.fine_structure, mp.mpf("7.2973525693e-3")) < 2e-10


def test_bohr_radius_against_codata(dc):
    assert rel(dc.phys.bohr_radius(), mp.mpf("5.29177210903e-11")) < 1e-10


def test_reduced_bohr_radius_is_longer(ctx, dc):
    pc = dc.phys
    with ctx.activate():
        ratio = pc.bohr_radius(reduced=True) / pc.bohr_radius()
        nucleus = 2 * mp.mpf("1.67262192369e-27") + 2 * mp.mpf("1.67492749804e-27")
        assert rel(ratio, 1 + pc.m_e / nucleus) < 1e-40


def test_compton_wavelength(dc):
    assert rel(dc.phys.compton_wavelength, mp.mpf("2.42631023867e-12")) < 1e-10


def test_derived_relations(ctx, dc):
    pc = dc.phys
    with ctx.activate():
        assert rel(dc.A, 2 * dc.C_C) < 1e-45
        assert rel(dc.C_C, dc.B * dc.k_e) < 1e-45
        assert rel(dc.k_e, pc.fine_structure * pc.hbar * pc.c) < 1e-45
        # Schwinger field m^2 c^3 / (e hbar) is about 1.32e18 V/m
        assert rel(dc.E_S, mp.mpf("1.32328547e18")) < 1e-8


def test_hydrogen_scale_from_derived_constants(ctx, dc):
    # Z = 1 ground state A^2 / (4 B) with A = C_C is the Rydberg energy
    with ctx.activate():
        E = dc.C_C**2 / (4 * dc.B) / dc.phys.e
        assert rel(E, mp.mpf("13.605693122994")) < 1e-10


def test_hydrogen_like_constants(ctx):
    with ctx.activate():
        dc1 = derive_constants(PhysicalConstants.codata2018(ctx, Z=1), ctx)
        assert dc1.A == dc1.C_C


@pytest.mark.parametrize("Z", [0, -1, 1.5])
def test_bad_charge(ctx, Z):
    with pytest.raises(DomainError):
        PhysicalConstants.codata2018(ctx, Z=Z)


def test_non_positive_constant():
    with pytest.raises(DomainError):
        PhysicalConstants(hbar=mp.mpf(1), c=mp.mpf(1), e=mp.mpf(0), m_e=mp.mpf(1), eps0=mp.mpf(1))


@given(st.decimals(min_value=-100, max_value=100, allow_nan=False, places=12))
def test_energy_unit_round_trip(x):
    ctx = PrecisionContext(30)
    dc = helium_constants(30)
    with ctx.activate():
        v = mp.mpf(str(x))
        assert abs(dc.phys.to_eV(dc.phys.to_J(v)) - v) <= 10 * ctx.eps * max(abs(v), 1)


def test_helium_constants_cached():
    assert helium_constants(50) is helium_constants(50)


def test_reference_energies(ctx, dc):
    pc = dc.phys
    with ctx.activate():
        assert rel(REFERENCE.literature(1, pc) / pc.e, mp.mpf("-24.587377708894326")) < 1e-40
        # -h nu with and without the Lamb-shift term differ by about 1e-7
        gap = rel(REFERENCE.literature_frequency_form(pc), REFERENCE.seed(1, pc))
        assert mp.mpf("4e-7") < gap < mp.mpf("5e-7")
        assert REFERENCE.seed(2, pc) == mp.mpf("-5.895322241384048e-19")
    with pytest.raises(DomainError):
        REFERENCE.literature(4, pc)
