import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ahespec.models import (
    DomainError,
    DomainKind,
    DomainSpec,
    ModelError,
    RadialFunction,
    Warping,
    WarpedModel,
    drift_coefficient,
    volume_density,
)

ALL_MODELS = [
    WarpedModel(2, Warping.SINH),
    WarpedModel(3, Warping.SINH),
    WarpedModel(1, Warping.SINH),
    WarpedModel(2, Warping.LINEAR),
    WarpedModel(3, Warping.LINEAR),
    WarpedModel(2, Warping.EXP),
    WarpedModel(3, Warping.EXP),
    WarpedModel(2, Warping.COSH),
]


def test_drift_exp_band_is_n():
    assert drift_coefficient(WarpedModel(2, Warping.EXP), 0.7) == 2.0


def test_drift_cosh_band():
    assert drift_coefficient(WarpedModel(2, Warping.COSH), 1.0) == pytest.approx(2 * math.tanh(1.0), rel=1e-15)
    assert drift_coefficient(WarpedModel(2, Warping.COSH), 1.0) == pytest.approx(1.5231883119115296, rel=1e-14)


def test_drift_sinh_ball_matches_log_density_difference():
    # oracle: d/dt log(sinh(t)^2) by central differences on plain math calls
    h = 1e-5
    oracle = (2 * math.log(math.sinh(1 + h)) - 2 * math.log(math.sinh(1 - h))) / (2 * h)
    got = drift_coefficient(WarpedModel(2, Warping.SINH), 1.0)
    assert got == pytest.approx(oracle, abs=1e-8)
    assert got == pytest.approx(2.6260705, abs=1e-6)


def test_volume_density_examples():
    assert volume_density(WarpedModel(2, Warping.SINH), 0.0) == 0.0
    assert volume_density(WarpedModel(3, Warping.EXP), math.log(2)) == pytest.approx(8.0, rel=1e-14)
    e = math.e
    assert volume_density(WarpedModel(2, Warping.COSH), 1.0) == pytest.approx((e + 1 / e) ** 2 / 4, rel=1e-14)


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: f"{m.name}-{m.fiber_dim}")
def test_drift_is_log_derivative_of_density(model):
    h = 1e-5
    ts = [0.3, 0.9, 2.0, 4.5] if model.is_ball else [-3.0, -0.4, 0.2, 1.7]
    for t in ts:
        fd = (math.log(volume_density(model, t + h)) - math.log(volume_density(model, t - h))) / (2 * h)
        assert drift_coefficient(model, t) == pytest.approx(fd, abs=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_sinh_drift_near_center(n):
    model = WarpedModel(n, Warping.SINH)
    for t in np.geomspace(1e-4, 0.099, 25):
        # n coth t - n/t = n t / 3 - O(t^3)
        assert abs(drift_coefficient(model, t) - n / t) <= n * t / 3 + 1e-9


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: f"{m.name}-{m.fiber_dim}")
def test_radial_operator_annihilates_constants(model):
    # f = const: f'' + drift f' == 0 exactly
    t = np.linspace(0.1, 3.0, 7)
    drift = drift_coefficient(model, t)
    assert np.all(0.0 + drift * 0.0 == 0.0)


@pytest.mark.parametrize("model", [m for m in ALL_MODELS if m.is_ball], ids=lambda m: f"{m.name}-{m.fiber_dim}")
def test_ball_metric_closes_smoothly(model):
    assert float(model.w(0.0)) == 0.0
    assert float(model.dw(0.0)) == 1.0


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: f"{m.name}-{m.fiber_dim}")
def test_potential_matches_normal_form(model):
    # q = (1/2) drift' + (1/4) drift^2 computed from drift by differences
    h = 1e-5
    for t in (0.5, 1.3, 2.9):
        d = drift_coefficient(model, t)
        dd = (drift_coefficient(model, t + h) - drift_coefficient(model, t - h)) / (2 * h)
        assert float(model.potential(t)) == pytest.approx(0.5 * dd + 0.25 * d * d, abs=1e-7)
        assert model.scalar_potential()(t) == pytest.approx(float(model.potential(t)), rel=1e-14)


def test_log_w_is_stable_far_out():
    m = WarpedModel(3, Warping.SINH)
    assert float(m.log_w(800.0)) == pytest.approx(800.0 - math.log(2.0), rel=1e-15)
    c = WarpedModel(2, Warping.COSH)
    assert float(c.log_w(-800.0)) == pytest.approx(800.0 - math.log(2.0), rel=1e-15)


@given(st.floats(0.05, 30.0))
@settings(max_examples=50, deadline=None)
def test_log_w_agrees_with_w(t):
    for m in ALL_MODELS:
        assert float(m.log_w(t)) == pytest.approx(math.log(float(m.w(t))), abs=1e-12)


class TestConstruction:
    def test_pairings(self):
        assert WarpedModel(2, Warping.SINH).domain_kind is DomainKind.BALL
        assert WarpedModel(2, Warping.EXP).domain_kind is DomainKind.BAND
        with pytest.raises(ModelError, match="pairs only with the ball"):
            WarpedModel(2, Warping.SINH, DomainKind.BAND)
        with pytest.raises(ModelError, match="pairs only with the band"):
            WarpedModel(2, Warping.EXP, DomainKind.BALL)

    def test_cosh_needs_surface_fiber(self):
        with pytest.raises(ModelError, match="fiber_dim=2"):
            WarpedModel(3, Warping.COSH)

    def test_bad_fiber_dim(self):
        for bad in (-1, 2.5, True):
            with pytest.raises(ModelError):
                WarpedModel(bad, Warping.SINH)

    def test_from_name(self):
        m = WarpedModel.from_name("exp-band", 3)
        assert m == WarpedModel(3, Warping.EXP)
        assert m.name == "exp-band"
        assert WarpedModel.from_name("sinh", 2).name == "sinh-ball"
        with pytest.raises(ModelError, match="unknown warping"):
            WarpedModel.from_name("tanh-ball", 2)
        with pytest.raises(ModelError, match="pairs only"):
            WarpedModel.from_name("cosh-ball", 2)

    def test_domain_spec(self):
        assert DomainSpec(3).radius == 3.0
        for bad in (0.0, -1.0, math.inf, math.nan):
            with pytest.raises(DomainError):
                DomainSpec(bad)

    def test_models_are_hashable_values(self):
        assert len({WarpedModel(2, Warping.SINH), WarpedModel(2, "sinh")}) == 1


def test_drift_refuses_center_and_nonfinite():
    with pytest.raises(DomainError, match="center"):
        drift_coefficient(WarpedModel(2, Warping.SINH), 0.0)
    with pytest.raises(DomainError):
        drift_coefficient(WarpedModel(2, Warping.EXP), math.nan)
    with pytest.raises(DomainError):
        volume_density(WarpedModel(2, Warping.LINEAR), -0.5)


def test_radial_function_derivative_consistency():
    f = RadialFunction.from_callables(lambda t: np.sin(t) * np.exp(-t), lambda t: (np.cos(t) - np.sin(t)) * np.exp(-t), "demo")
    t = np.linspace(0.2, 3.0, 30)
    for h in (1e-3, 5e-4):
        fd = (f.value(t + h) - f.value(t - h)) / (2 * h)
        assert np.max(np.abs(fd - f.derivative(t))) < h * h
    assert f.tag == "demo"
