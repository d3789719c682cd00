import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from cosmobounds import integral_bounds as ib
from cosmobounds.errors import DomainError
from cosmobounds.initial_data import Cell, InitialDataSet, restrict
from cosmobounds.model_geometry import ModelGeometry, model_area

from conftest import random_data

seeds = st.integers(0, 2 ** 32 - 1)
times = st.floats(0, 10)


def test_exact_area_examples(single_cell, rng):
    assert ib.area_bound_exact(single_cell, 1.0) == 8.0
    assert ib.area_bound_exact(single_cell, 1.0) == model_area(ModelGeometry(3, 3.0), 1.0, 1.0)
    data = random_data(rng)
    assert ib.area_bound_exact(data, 0.0) == pytest.approx(data.total_area, rel=1e-15)
    neg = InitialDataSet(2, [Cell("a", 0.5, -1.0), Cell("b", 1.5, 0.0)])
    assert ib.area_bound_exact(neg, 7.0) == 2.0


def test_exact_volume_examples(single_cell):
    oracle = quad(lambda s: ib.area_bound_exact(single_cell, s), 0, 1)[0]
    assert ib.volume_bound_exact(single_cell, 1.0) == pytest.approx(3.75, rel=1e-14)
    assert oracle == pytest.approx(3.75, rel=1e-12)
    neg = InitialDataSet(2, [Cell("a", 0.5, -1.0), Cell("b", 1.5, 0.0)])
    assert ib.volume_bound_exact(neg, 3.0) == pytest.approx(6.0, rel=1e-15)
    assert ib.volume_bound_exact(single_cell, 0.0) == 0.0


def test_negative_time_rejected(single_cell):
    for fn in (ib.area_bound_exact, ib.volume_bound_exact, ib.area_bound_jensen,
               ib.volume_bound_jensen, ib.area_bound_binomial):
        with pytest.raises(DomainError):
            fn(single_cell, -1.0)


def test_jensen_examples(single_cell):
    assert ib.area_bound_jensen(single_cell, 1.0) == 8.0
    assert ib.area_bound_jensen(single_cell, 1.0, use_k=True) == 8.0
    zero = InitialDataSet(3, [Cell("a", 2.0, 0.0)])
    assert ib.area_bound_jensen(zero, 5.0) == 4 * 2.0
    # 4 * ((1/(27*4)) * 27 + 1) = 4 * 1.25
    assert ib.volume_bound_jensen(single_cell, 1.0) == pytest.approx(5.0, rel=1e-15)
    oracle = quad(lambda s: ib.area_bound_jensen(single_cell, s), 0, 1)[0]
    assert oracle == pytest.approx(5.0, rel=1e-12)
    assert ib.volume_bound_jensen(single_cell, 0.0) == 0.0
    assert ib.volume_bound_jensen(zero, 1.5) == pytest.approx(4 * 1.5 * 2.0)


def test_jensen_k_volume_is_integral_of_area(single_cell):
    oracle = quad(lambda s: ib.area_bound_jensen(single_cell, s, use_k=True), 0, 2)[0]
    assert ib.volume_bound_jensen(single_cell, 2.0, use_k=True) == pytest.approx(oracle, rel=1e-12)


def test_binomial_examples(single_cell):
    terms = ib.area_bound_binomial(single_cell, 1.0)
    assert terms == pytest.approx([1.0, 3.0, 3.0, 1.0], rel=1e-15)
    assert sum(terms) == 8.0
    zero = InitialDataSet(3, [Cell("a", 2.0, 0.0), Cell("b", 1.0, -4.0)])
    assert ib.area_bound_binomial(zero, 2.0) == [3.0, 0.0, 0.0, 0.0]


def test_binomial_two_cells_brute_force():
    data = InitialDataSet(3, [Cell("a", 0.3, 1.7), Cell("b", 0.9, 4.2)])
    t = 1.3
    brute = sum(c.weight * (c.mean_curvature * t / 3 + 1) ** 3 for c in data.cells)
    assert math.fsum(ib.area_bound_binomial(data, t)) == pytest.approx(brute, rel=1e-12)
    assert ib.area_bound_exact(data, t) == pytest.approx(brute, rel=1e-14)


def test_volume_binomial_is_term_by_term_integral(single_cell):
    # model equality case: sum equals the exact volume 15/4
    terms = ib.volume_bound_binomial(single_cell, 1.0)
    assert terms == pytest.approx([1.0, 1.5, 1.0, 0.25], rel=1e-15)
    for k in range(4):
        oracle = quad(lambda s: ib.area_bound_binomial(single_cell, s)[k], 0, 1)[0]
        assert terms[k] == pytest.approx(oracle, rel=1e-12)


def test_tg_examples():
    assert ib.tg_pointwise_area(3.0, 1.0, 3, 1.0) == 8.0
    assert ib.tg_pointwise_area(-3.0, 1.0, 3, 1.0) == 0.0
    with pytest.raises(DomainError):
        ib.tg_pointwise_area(-3.0, 1.0, 3, 1.5)
    assert ib.tg_pointwise_volume(3.0, 1.0, 3, 1.0) == pytest.approx(3.75, rel=1e-14)
    oracle = quad(lambda s: ib.tg_pointwise_area(-3.0, 2.0, 3, s), 0, 1)[0]
    assert ib.tg_pointwise_volume(-3.0, 2.0, 3, 1.0) == pytest.approx(oracle, rel=1e-12)


def test_empty_restriction_gives_zero(single_cell):
    empty = restrict(single_cell, [])
    assert ib.area_bound_exact(empty, 2.0) == 0.0
    assert ib.volume_bound_exact(empty, 2.0) == 0.0
    assert ib.area_bound_jensen(empty, 2.0, use_k=True) == 0.0
    assert ib.area_bound_binomial(empty, 2.0) == [0.0] * 4
    report = ib.area_report(empty, 2.0)
    assert report.exact == 0.0 and report.tg_pointwise is None


def test_report_fields_and_json(single_cell):
    r = ib.area_report(single_cell, 1.0)
    assert (r.exact, r.jensen_h, r.from_k, r.tg_pointwise, r.tg_beta) == (8.0, 8.0, 8.0, 8.0, 3.0)
    assert r.sec_assumed and all(r.ordering.values())
    doc = json.loads(json.dumps(r.to_dict()))
    assert set(doc) >= {"t", "exact", "jensen_h", "from_k", "binomial_terms", "tg_pointwise"}
    v = ib.volume_report(single_cell, 1.0)
    assert v.exact == pytest.approx(3.75) and v.jensen_h == pytest.approx(5.0)
    assert all(v.ordering.values())


def test_sweep_csv_columns(single_cell):
    text = ib.sweep_csv([ib.area_report(single_cell, t) for t in (0.0, 1.0)], 3)
    lines = text.splitlines()
    assert lines[0] == "t,exact,jensen_h,from_k,tg,binomial_k0,binomial_k1,binomial_k2,binomial_k3"
    assert lines[2].split(",")[:5] == ["1.0", "8.0", "8.0", "8.0", "8.0"]


@given(seeds, times)
def test_ordering_chain(seed, t):
    data = random_data(np.random.default_rng(seed))
    for r in (ib.area_report(data, t), ib.volume_report(data, t)):
        assert all(r.ordering.values()), r.ordering


@given(seeds, times)
def test_binomial_identity(seed, t):
    data = random_data(np.random.default_rng(seed))
    assert math.fsum(ib.area_bound_binomial(data, t)) == pytest.approx(ib.area_bound_exact(data, t), rel=1e-12)
    assert math.fsum(ib.volume_bound_binomial(data, t)) == pytest.approx(ib.volume_bound_exact(data, t), rel=1e-12)


@given(seeds, st.floats(0.05, 10))
def test_volume_derivative_is_area(seed, t):
    data = random_data(np.random.default_rng(seed))
    h = 1e-4 * t
    fd = (ib.volume_bound_exact(data, t + h) - ib.volume_bound_exact(data, t - h)) / (2 * h)
    assert fd == pytest.approx(ib.area_bound_exact(data, t), rel=1e-6)


@given(seeds, times)
def test_partition_additivity(seed, t):
    rng = np.random.default_rng(seed)
    data = random_data(rng)
    labels = rng.integers(0, 3, size=len(data))
    parts = [restrict(data, [c.id for c, lab in zip(data.cells, labels) if lab == k]) for k in range(3)]
    for fn in (ib.area_bound_exact, ib.volume_bound_exact, ib.area_bound_jensen, ib.volume_bound_jensen):
        assert math.fsum(fn(p, t) for p in parts) == pytest.approx(fn(data, t), rel=1e-12)


@given(seeds, times)
def test_growing_restrictions_converge_monotonically(seed, t):
    data = random_data(np.random.default_rng(seed))
    values = [ib.area_bound_exact(restrict(data, data.ids[:k]), t) for k in range(len(data) + 1)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] == ib.area_bound_exact(data, t)


@given(seeds, times, st.floats(0, 5))
def test_higher_p_never_lowers_jensen_bound_on_unit_area(seed, t, dp):
    data = random_data(np.random.default_rng(seed))
    unit = InitialDataSet(data.n, [Cell(c.id, c.weight / data.total_area, c.mean_curvature, c.k_norm)
                                   for c in data.cells])
    n = data.n
    assert ib.area_bound_jensen(unit, t) <= ib.area_bound_jensen(unit, t, p=n + dp) * (1 + 1e-12)


@settings(max_examples=50)
@given(seeds, times)
def test_pointwise_bound_dominates(seed, t):
    data = random_data(np.random.default_rng(seed))
    beta = float(np.max(np.maximum(data.mean_curvature, 0)))
    assert ib.area_bound_exact(data, t) <= ib.tg_pointwise_area(beta, data.total_area, data.n, t) * (1 + 1e-12)
