import mpmath as mp
import pytest

from heqed import DomainError, NonConvergenceError, PrecisionContext
from heqed import solver as sv
from heqed.qedzone import coupling_factor, solve_a_min
from heqed.verify import PUBLISHED, fitted_lambda, hydrogen_oracle, solved_energy
from heqed.wavefunction import alpha0_of, normalize

from conftest import rel


class TestConfig:
    def test_validation(self):
        one = mp.mpf(1)
        with pytest.raises(DomainError):
            sv.IterationConfig(stages=(), seed=one)
        with pytest.raises(DomainError):
            sv.IterationConfig(stages=((mp.mpf("-0.1"), mp.mpf(0)),), seed=one)
        with pytest.raises(DomainError):
            sv.IterationConfig(stages=((mp.mpf(1), mp.mpf("1e-9")),), seed=one)
        with pytest.raises(DomainError):
            sv.IterationConfig(stages=((mp.mpf("0.1"), mp.mpf("1e-9")), (mp.mpf("0.1"), mp.mpf("1e-8"))), seed=one)

    def test_schedule_keeps_published_thresholds(self, ctx, dc):
        cfg = sv.energy_schedule(2, ctx, dc=dc)
        with ctx.activate():
            assert [t for _, t in cfg.stages] == [mp.mpf("4e-17"), mp.mpf("1e-17")]
            assert cfg.seed == mp.mpf("-5.895322241384048e-19")

    def test_schedule_clipped_at_low_precision(self, dc):
        low = PrecisionContext(16)
        cfg = sv.energy_schedule(1, low, dc=dc)
        with low.activate():
            assert cfg.stages[0][1] == 100 * low.eps

    def test_schedule_errors(self, ctx, dc):
        with pytest.raises(DomainError):
            sv.energy_schedule(4, ctx, dc=dc)
        with pytest.raises(DomainError):
            sv.energy_schedule(1, ctx)

    def test_lambda_config(self, ctx):
        cfg = sv.lambda_config(ctx)
        with ctx.activate():
            (gain, threshold), = cfg.stages
            assert gain == mp.mpf(1) / 50
            assert threshold == mp.mpf("7e-18")
            assert cfg.seed == mp.mpf("1e-15")


class TestFunctional:
    def test_variational_signs_recover_hydrogen(self, ctx):
        E, exact = hydrogen_oracle(ctx, "variational")
        with ctx.activate():
            assert rel(E, exact) < mp.mpf("1e-40")
            assert rel(exact, mp.mpf("-13.6056931229")) < 1e-10

    def test_listing_signs_triple_the_hydrogen_energy(self, ctx):
        # with R = exp(-x): I1 = 1/4, I2 = -1/4, I3 = 1/4 and the two sign sets
        # differ by the sign of the kinetic part, -A^2/4B against -3A^2/4B
        E, exact = hydrogen_oracle(ctx, "listing")
        with ctx.activate():
            assert rel(E, 3 * exact) < mp.mpf("1e-40")

    def test_unknown_sign_set(self, ctx, dc):
        profile = lambda x: (mp.exp(-x), -mp.exp(-x), mp.exp(-x))
        with pytest.raises(ValueError):
            sv.functional_from_profile(profile, 1, dc, ctx, signs="other")

    def test_trial_energy_outside_domain(self, ctx, dc, lam_lit):
        with pytest.raises(DomainError):
            sv.energy_functional(1, mp.mpf("1e-15"), lam_lit, dc, ctx)


class TestIterations:
    def test_short_run_reports_trace(self, ctx, dc, lam_lit, tmp_path):
        seen = []
        cfg = sv.IterationConfig(stages=((mp.mpf("-0.1"), mp.mpf("1e-20")),), seed=sv.energy_schedule(1, ctx, dc=dc).seed, max_iterations=3)
        with pytest.raises(NonConvergenceError) as info:
            sv.solve_energy(1, lam_lit, cfg, dc, ctx, progress=seen.append)
        trace = info.value.trace
        assert len(trace) == 3 and len(seen) == 3 and not trace.converged
        assert [r.step for r in trace.records] == [1, 2, 3]
        path = tmp_path / "trace.csv"
        trace.write_csv(path, value_unit="J", digits=30)
        lines = path.read_text().splitlines()
        assert lines[0] == "# columns: step,value,functional,rel_change ; units: 1,J,J,1 ; digits: 30"
        assert len(lines) == 4 and lines[1].startswith("1,")

    def test_energy_fixed_point(self, ctx, dc, lam_lit):
        E, trace = solved_energy(1, 50)
        assert trace.converged
        with ctx.activate():
            F = sv.energy_functional(1, E, lam_lit, dc, ctx)
            assert rel(F, E) < mp.mpf("1e-18")

    def test_excited_energies_are_ordered(self, ctx):
        with ctx.activate():
            E = [solved_energy(n, 50)[0] for n in (1, 2, 3)]
            assert E[0] < E[1] < E[2] < 0

    def test_fitted_lambda_reproduces_target(self, ctx, dc):
        lam, trace = fitted_lambda(50)
        assert trace.converged
        with ctx.activate():
            target = dc.phys.to_J(PUBLISHED["ground_target_eV"])
            f_E = coupling_factor(solve_a_min(ctx), lam, dc, form="listing")
            alpha = alpha0_of(1, target, f_E, dc)
            F = sv.functional_from_profile(sv._profile(1, dc.A / alpha), alpha, dc, ctx, f_E=f_E)
            assert rel(F, target) < mp.mpf("1e-15")

    def test_lambda_target_must_be_bound(self, ctx, dc):
        with pytest.raises(DomainError):
            sv.solve_lambda(mp.mpf("1e-18"), dc=dc, ctx=ctx)

    def test_lambda_short_run(self, ctx, dc):
        cfg = sv.IterationConfig(stages=sv.lambda_config(ctx).stages, seed=mp.mpf("1e-15"), max_iterations=2)
        with ctx.activate():
            target = dc.phys.to_J(PUBLISHED["ground_target_eV"])
        with pytest.raises(NonConvergenceError) as info:
            sv.solve_lambda(target, cfg, dc, ctx)
        assert info.value.trace.iterations == 2

    def test_solved_state(self, ctx, dc, lam_lit):
        E = solved_energy(2, 50)[0]
        state = sv.solved_state(2, E, lam_lit, dc, ctx)
        with ctx.activate():
            assert state.n == 2 and state.lam == lam_lit
            assert rel(state.f_N, normalize(2, dc.A / state.alpha0, ctx)) < 1e-45

    def test_requires_constants(self, ctx, lam_lit):
        with pytest.raises(DomainError):
            sv.solve_energy(1, lam_lit, ctx=ctx)
