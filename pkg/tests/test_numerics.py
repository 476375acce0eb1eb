import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from heqed.numerics import (
    BracketError,
    DivergenceError,
    DomainError,
    PrecisionContext,
    PrecisionError,
    default_context,
    find_root_bracketed,
    integrate_semi_infinite,
    sum_series,
)


class TestPrecisionContext:
    def test_eps_and_guard_digits(self):
        ctx = PrecisionContext(30)
        assert ctx.dps == 38
        with ctx.activate():
            assert ctx.eps == mp.mpf("1e-28")
            assert mp.mp.dps == 38

    def test_activation_is_scoped(self):
        before = mp.mp.dps
        with PrecisionContext(80).activate():
            pass
        assert mp.mp.dps == before

    @pytest.mark.parametrize("digits", [0, 15, 20.5, -3])
    def test_rejects_bad_digits(self, digits):
        with pytest.raises(DomainError):
            PrecisionContext(digits)

    def test_rejects_tolerance_below_eps(self):
        with pytest.raises(DomainError):
            PrecisionContext(30, quad_rel_tol="1e-40")

    def test_default_tolerances(self):
        ctx = PrecisionContext(40)
        with ctx.activate():
            assert ctx.quad_rel_tol == 10 * ctx.eps

    def test_doubled(self):
        assert PrecisionContext(25).doubled().digits == 50

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("HEQED_DIGITS", "33")
        assert default_context().digits == 33
        monkeypatch.delenv("HEQED_DIGITS")
        assert default_context().digits == 50


class TestQuadrature:
    def test_exponential(self, ctx):
        with ctx.activate():
            value = integrate_semi_infinite(lambda x: mp.exp(-x), ctx)
            assert abs(value - 1) < 100 * ctx.eps

    @settings(max_examples=15, deadline=None)
    @given(st.integers(min_value=0, max_value=12))
    def test_gamma_moments(self, n):
        ctx = PrecisionContext(30)
        with ctx.activate():
            value = integrate_semi_infinite(lambda x: x**n * mp.exp(-x), ctx)
            assert abs(value / mp.factorial(n) - 1) < 1000 * ctx.eps

    def test_gaussian_with_scale(self, ctx):
        with ctx.activate():
            s = mp.mpf("1e-15")
            value = integrate_semi_infinite(lambda x: mp.exp(-((x / s) ** 2)), ctx, scale=s)
            assert abs(value / (mp.sqrt(mp.pi) * s / 2) - 1) < 1000 * ctx.eps

    def test_algebraic_tail_is_rejected(self, ctx):
        with pytest.raises(DivergenceError) as info:
            integrate_semi_infinite(lambda x: 1 / (1 + x * x), ctx, max_panels=16)
        assert info.value.partial is not None

    def test_log_singularity_at_origin(self, ctx):
        with ctx.activate():
            value = integrate_semi_infinite(lambda x: -mp.log(x) * mp.exp(-x) if x else mp.mpf(0), ctx)
            assert abs(value - mp.euler) < 1000 * ctx.eps


class TestRootFinding:
    def test_dottie_number(self, ctx):
        with ctx.activate():
            res = find_root_bracketed(lambda x: mp.cos(x) - x, 0, 1, ctx)
            oracle = mp.findroot(lambda x: mp.cos(x) - x, mp.mpf("0.739"))
            assert abs(res.root - oracle) < 10 * ctx.eps
            assert res.iterations < 30

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=2, max_value=50))
    def test_square_roots(self, k):
        ctx = PrecisionContext(40)
        with ctx.activate():
            res = find_root_bracketed(lambda x: x * x - k, 0, k, ctx)
            assert abs(res.root - mp.sqrt(k)) < 10 * ctx.eps * mp.sqrt(k)
            lo, hi = res.bracket
            assert lo <= res.root <= hi

    def test_root_on_endpoint(self, ctx):
        with ctx.activate():
            assert find_root_bracketed(lambda x: x - 2, 2, 5, ctx).root == 2

    def test_same_sign_bracket(self, ctx):
        with pytest.raises(BracketError):
            find_root_bracketed(lambda x: x * x + 1, -1, 1, ctx)

    def test_jump_is_not_a_root(self, ctx):
        # a sign change without a zero cannot meet the residual test
        with pytest.raises(PrecisionError):
            find_root_bracketed(lambda x: mp.mpf(-1) if x < mp.mpf("0.3") else mp.mpf(1), 0, 1, ctx)


class TestSeries:
    def test_euler_number(self, ctx):
        with ctx.activate():
            state = {"t": mp.mpf(1)}

            def term(k):
                if k:
                    state["t"] /= k
                return state["t"]

            assert abs(sum_series(term, ctx) - mp.e) < 10 * ctx.eps

    def test_zero_terms_do_not_stop_early(self, ctx):
        # cosh(1) written with zero odd terms
        with ctx.activate():
            value = sum_series(lambda k: mp.mpf(0) if k % 2 else 1 / mp.factorial(k), ctx)
            assert abs(value - mp.cosh(1)) < 10 * ctx.eps

    def test_divergent_series_reports_partial(self, ctx):
        with pytest.raises(DivergenceError) as info:
            sum_series(lambda k: mp.mpf(1) / (k + 1), ctx, max_terms=50)
        assert info.value.partial > 4
