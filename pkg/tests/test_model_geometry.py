import math

import mpmath as mp
import pytest
import sympy as sp
from hypothesis import given, strategies as st
from scipy.integrate import quad

from cosmobounds.errors import DegenerateMetricError, DomainError
from cosmobounds.model_geometry import (ModelGeometry, model_area, model_mean_curvature,
                                        model_volume, power_mean_integral, scale_factor,
                                        warped_invariants)
from cosmobounds.congruence import comparison_envelope


def test_scale_factor_examples():
    assert scale_factor(ModelGeometry(3, 3.0), 0.0) == 1.0
    assert scale_factor(ModelGeometry(3, 3.0), 1.0) == 2.0
    assert scale_factor(ModelGeometry(3, 0.0), 7.0) == 1.0


def test_scale_factor_matches_integrated_derivative():
    # a' = 1, so a(1) = a(0) + int_0^1 1 ds
    m = ModelGeometry(3, 3.0)
    assert scale_factor(m, 1.0) == pytest.approx(scale_factor(m, 0.0) + quad(lambda s: 1.0, 0, 1)[0])


def test_scale_factor_rejects_negative_time():
    with pytest.raises(DomainError):
        scale_factor(ModelGeometry(3, 3.0), -0.1)


@pytest.mark.parametrize("n, beta", [(1, 1.0), (3, -1.0), (2.5, 1.0), (3, math.nan)])
def test_model_geometry_validation(n, beta):
    with pytest.raises(DomainError):
        ModelGeometry(n, beta)


def test_model_area_examples():
    m = ModelGeometry(3, 3.0)
    ratio = (scale_factor(m, 1.0) / scale_factor(m, 0.0)) ** 3
    assert model_area(m, 1.0, 1.0) == 8.0 == ratio
    assert model_area(ModelGeometry(3, 0.0), 5.0, 9.0) == 5.0
    assert model_area(ModelGeometry(4, 1.3), 2.5, 0.0) == 2.5


def test_model_volume_examples():
    m = ModelGeometry(3, 3.0)
    oracle = quad(lambda s: model_area(m, 1.0, s), 0, 1)[0]
    assert oracle == pytest.approx(3.75, rel=1e-12)
    assert model_volume(m, 1.0, 1.0) == pytest.approx(3.75, rel=1e-14)
    assert model_volume(ModelGeometry(3, 0.0), 1.0, 4.0) == 4.0
    assert model_volume(m, 1.0, 0.0) == 0.0


@pytest.mark.parametrize("fn", [model_area, model_volume])
def test_negative_inputs_rejected(fn):
    m = ModelGeometry(3, 1.0)
    with pytest.raises(DomainError):
        fn(m, -1.0, 1.0)
    with pytest.raises(DomainError):
        fn(m, 1.0, -1.0)


@given(st.integers(2, 6), st.floats(1e-3, 50), st.floats(0, 20), st.floats(0, 10))
def test_area_is_scale_factor_ratio(n, beta, t, area):
    m = ModelGeometry(n, beta)
    expected = area * (scale_factor(m, t) / scale_factor(m, 0.0)) ** n
    assert model_area(m, area, t) == pytest.approx(expected, rel=1e-12, abs=1e-300)


@given(st.integers(2, 6), st.floats(0, 20), st.floats(0.05, 10))
def test_volume_derivative_is_area(n, beta, t):
    m = ModelGeometry(n, beta)
    h = 1e-4 * t
    fd = (model_volume(m, 1.0, t + h) - model_volume(m, 1.0, t - h)) / (2 * h)
    assert fd == pytest.approx(model_area(m, 1.0, t), rel=1e-6)


@pytest.mark.parametrize("n", [2, 3, 7])
@pytest.mark.parametrize("x", [0.0, 1e-12, -3e-9, 0.99e-8, 1.01e-8, 1e-6, 0.3, -0.5, 5.0])
def test_power_mean_integral_against_mpmath(n, x):
    mp.mp.dps = 50
    xm = mp.mpf(x)
    exact = 1 if x == 0 else ((1 + xm) ** (n + 1) - 1) / ((n + 1) * xm)
    assert power_mean_integral(x, n) == pytest.approx(float(exact), rel=1e-14)


def test_power_mean_integral_endpoint():
    assert power_mean_integral(-1.0, 3) == 0.25
    with pytest.raises(DomainError):
        power_mean_integral(-1.5, 3)


def test_warped_invariants_model():
    inv = warped_invariants(1.0, 1.0, 0.0, 3, -1)
    assert inv.ric_tt == 0.0
    assert inv.mean_curvature == 3.0
    # (n-1)(a'/a)^2 + (n-1)c/a^2 + a''/a = 2 - 2 + 0
    assert inv.ric_spatial_coeff == 0.0


def test_warped_invariants_dust_like_profile():
    t = sp.symbols("t")
    a = (1 + t) ** sp.Rational(2, 3)
    vals = [float(sp.diff(a, t, k).subs(t, 0)) for k in range(3)]
    inv = warped_invariants(*vals, n=3, c=-1)
    assert inv.ric_tt == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert inv.mean_curvature == pytest.approx(2.0, rel=1e-14)


def test_warped_invariants_static_and_degenerate():
    inv = warped_invariants(2.0, 0.0, 0.0, 3, 0)
    assert (inv.ric_tt, inv.mean_curvature) == (0.0, 0.0)
    with pytest.raises(DegenerateMetricError):
        warped_invariants(0.0, 1.0, 0.0, 3)
    with pytest.raises(DomainError):
        warped_invariants(1.0, 1.0, 0.0, 3, c=2)


@given(st.integers(2, 6), st.floats(1e-3, 50), st.floats(0, 100))
def test_model_is_ricci_flat_and_matches_envelope(n, beta, t):
    m = ModelGeometry(n, beta)
    inv = warped_invariants(scale_factor(m, t), 1.0, 0.0, n)
    assert inv.ric_tt == 0.0
    assert inv.mean_curvature == pytest.approx(model_mean_curvature(m, t), rel=1e-14)
    assert model_mean_curvature(m, t) == pytest.approx(comparison_envelope(beta, n, t), rel=1e-14)
