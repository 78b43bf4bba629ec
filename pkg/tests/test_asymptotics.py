import math
from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ahespec.asymptotics import (
    FitError,
    expansion_targets,
    fit_expansion,
    scaled_residuals,
    two_term_report,
)
from ahespec.models import Warping, WarpedModel

PI2 = math.pi**2


class TestFit:
    def test_exact_band_law(self):
        data = [(R, 9 / 4 + PI2 / (4 * R * R)) for R in (5, 8, 12, 20, 30)]
        fit = fit_expansion(data, (0, 2))
        assert fit.c0 == pytest.approx(2.25, abs=1e-10)
        assert fit.c2 == pytest.approx(PI2 / 4, abs=1e-8)
        assert fit.c3 == 0.0

    def test_constant(self):
        fit = fit_expansion([(R, 7.0) for R in (5, 8, 12, 20, 30)], (0, 2))
        assert fit.c0 == pytest.approx(7.0, abs=1e-13)
        assert fit.c2 == pytest.approx(0.0, abs=1e-10)
        assert fit.residual_norm < 1e-13

    @given(
        c0=st.floats(-5, 5),
        c2=st.floats(-50, 50),
        c3=st.floats(-50, 50),
    )
    @settings(max_examples=40, deadline=None)
    def test_recovers_synthetic_coefficients(self, c0, c2, c3):
        radii = (5.0, 7.0, 10.0, 14.0, 20.0, 28.0)
        data = [(R, c0 + c2 / R**2 + c3 / R**3) for R in radii]
        fit = fit_expansion(data)
        assert fit.c0 == pytest.approx(c0, abs=1e-9)
        assert fit.c2 == pytest.approx(c2, abs=1e-6)
        assert fit.c3 == pytest.approx(c3, abs=1e-5)

    @given(st.permutations([5.0, 7.0, 10.0, 14.0, 20.0]))
    @settings(max_examples=20, deadline=None)
    def test_order_invariant(self, radii):
        data = [(R, 1 + 2 / R**2 - 3 / R**3) for R in radii]
        fit = fit_expansion(data)
        assert fit.c2 == pytest.approx(2.0, abs=1e-8)

    def test_duplicate_radii(self):
        with pytest.raises(FitError, match="duplicated"):
            fit_expansion([(5, 1), (5, 1), (8, 1), (9, 1), (10, 1)])

    def test_too_few(self):
        with pytest.raises(FitError, match="at least"):
            fit_expansion([(5, 1), (8, 1), (9, 1)])

    def test_bad_powers(self):
        with pytest.raises(FitError, match="powers"):
            fit_expansion([(R, 1.0) for R in (5, 6, 7, 8)], (0, 1))

    def test_nonfinite(self):
        with pytest.raises(FitError):
            fit_expansion([(5, 1), (6, math.nan), (8, 1), (9, 1), (10, 1)])

    def test_condition_warning(self):
        data = [(100.0 + 0.01 * k, 1.0) for k in range(5)]
        with pytest.warns(RuntimeWarning, match="ill-conditioned"):
            fit = fit_expansion(data)
        assert fit.condition_estimate > 1e12


class TestTargets:
    def test_targets(self):
        assert expansion_targets(WarpedModel(3, Warping.SINH)) == (2.25, PI2)
        assert expansion_targets(WarpedModel(2, Warping.EXP)) == (1.0, PI2 / 4)
        assert expansion_targets(WarpedModel(2, Warping.COSH)) == (1.0, PI2 / 4)
        c0, c2 = expansion_targets(WarpedModel(2, Warping.LINEAR))
        assert c0 == 0.0
        assert c2 == pytest.approx(PI2, rel=1e-14)
        assert expansion_targets(WarpedModel(1, Warping.LINEAR))[1] == pytest.approx(2.404825557695773**2, rel=1e-14)

    def test_scaled_residuals(self):
        m = WarpedModel(2, Warping.SINH)
        assert scaled_residuals(m, [(10.0, 1 + PI2 / 100 + 1e-3)]) == [pytest.approx(1.0, rel=1e-9)]


class TestTwoTerm:
    def test_hyperbolic_3_ball(self):
        rep = two_term_report(WarpedModel(2, Warping.SINH), (10, 14, 20, 28, 40))
        assert rep.fit.c0 == pytest.approx(1.0, abs=1e-8)
        assert rep.fit.c2 == pytest.approx(PI2, abs=1e-5)
        assert rep.max_scaled_residual < 1e-4
        assert rep.passed

    def test_exp_band(self):
        rep = two_term_report(WarpedModel(2, Warping.EXP), (5, 8, 12, 20, 30))
        assert rep.fit.c0 == pytest.approx(1.0, abs=1e-8)
        assert rep.fit.c2 == pytest.approx(PI2 / 4, abs=1e-6)
        assert rep.max_scaled_residual < 1e-4

    def test_sinh_n3(self):
        rep = two_term_report(WarpedModel(3, Warping.SINH), (10, 14, 20, 28, 40))
        assert rep.c0_pass and rep.c2_pass
        assert rep.max_scaled_residual < 50

    def test_executor_matches_serial(self):
        m = WarpedModel(2, Warping.COSH)
        radii = (3, 4, 5, 6, 8)
        with ThreadPoolExecutor(4) as pool:
            a = two_term_report(m, radii, executor=pool)
        b = two_term_report(m, radii)
        assert a.samples == b.samples

    def test_preconditions(self):
        m = WarpedModel(2, Warping.EXP)
        with pytest.raises(FitError, match="at least 5"):
            two_term_report(m, (5, 10, 20))
        with pytest.raises(FitError, match="factor of 2"):
            two_term_report(m, (10, 11, 12, 13, 14))

    def test_solver_failure_names_radius(self, monkeypatch):
        from ahespec import asymptotics
        from ahespec.radial_solver import BracketError

        def boom(model, spec, tol):
            raise BracketError("no eigenvalue")

        monkeypatch.setattr(asymptotics, "first_eigenvalue", boom)
        with pytest.raises(BracketError, match="radius R=5.0"):
            two_term_report(WarpedModel(2, Warping.EXP), (5, 8, 12, 20, 30))
