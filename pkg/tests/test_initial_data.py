import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cosmobounds.errors import DomainError, ValidationError
from cosmobounds.initial_data import (Cell, InitialDataSet, h_plus, initial_data_from_dict,
                                      load_initial_data, lp_norm, restrict)
from cosmobounds.counterexample import build_counterexample

from conftest import random_data


def test_load_single_row():
    data = load_initial_data("# n=3\nid,weight,H,K\nc0,1.0,3.0,1.0\n")
    assert data.n == 3
    assert len(data) == 1
    assert data.total_area == 1.0
    assert data.cells[0] == Cell("c0", 1.0, 3.0, 1.0)


def test_load_without_k_column_and_blank_k():
    data = load_initial_data(io.StringIO("id,weight,H\na,0.5,1\nb,0.25,-2\n"), n=2)
    assert not data.has_k
    data = load_initial_data("# n=2\nid,weight,H,K\na,0.5,1,\nb,0.25,-2,1.5\n")
    assert data.cells[0].k_norm is None and data.cells[1].k_norm == 1.5
    with pytest.raises(ValidationError):
        lp_norm(data, "K", 2)


@pytest.mark.parametrize("body, fragment", [
    ("id,weight,H,K\nc0,-1,3,1\n", "row 3"),
    ("id,weight,H,K\nc0,0,3,1\n", "weight"),
    ("id,weight,H,K\nc0,1,4,1\n", "inconsistent"),
    ("id,weight,H,K\nc0,1,x,1\n", "not a number"),
    ("id,weight,H,K\nc0,1,1,1\nc0,1,1,1\n", "duplicate"),
    ("id,weight,H,K\nc0,1\n", "columns"),
    ("id,area,H\nc0,1,1\n", "header"),
    ("id,weight,H,K\n", "no cells"),
])
def test_load_rejects(body, fragment):
    with pytest.raises(ValidationError, match=fragment):
        load_initial_data("# n=3\n" + body)


def test_load_needs_dimension():
    with pytest.raises(ValidationError, match="dimension"):
        load_initial_data("id,weight,H\na,1,1\n")
    with pytest.raises(ValidationError, match="mismatch"):
        load_initial_data("# n=3\nid,weight,H\na,1,1\n", n=2)


def test_consistency_tolerance_is_relative():
    # |H| = 3(1 + 1e-10) passes, 3(1 + 1e-8) does not
    load_initial_data(f"# n=3\nid,weight,H,K\na,1,{3 * (1 + 1e-10)!r},1\n")
    with pytest.raises(ValidationError):
        load_initial_data(f"# n=3\nid,weight,H,K\na,1,{3 * (1 + 1e-8)!r},1\n")


def test_csv_and_json_round_trip(rng):
    data = random_data(rng, n=3, ncells=7)
    again = load_initial_data(data.to_csv())
    assert again.cells == data.cells
    again = initial_data_from_dict(json.loads(json.dumps(data.to_dict())))
    assert again.cells == data.cells and again.n == data.n


def test_h_plus_examples():
    data = InitialDataSet(3, [Cell("a", 1, 3.0), Cell("b", 1, -2.0), Cell("c", 1, 0.0)])
    assert h_plus(data).tolist() == [3.0, 0.0, 0.0]
    neg = InitialDataSet(3, [Cell("a", 1, -1.0), Cell("b", 2, -5.0)])
    assert h_plus(neg).tolist() == [0.0, 0.0]
    assert h_plus(InitialDataSet(3, [Cell("a", 1, 5.0)])).tolist() == [5.0]


@pytest.mark.parametrize("p", [1, 1.5, 3, 7])
def test_lp_norm_constant_field(p):
    cells = [Cell(f"c{i}", w, 2.5) for i, w in enumerate([0.2, 0.7, 1.6])]
    data = InitialDataSet(3, cells)
    direct = sum(abs(c.mean_curvature) ** p * c.weight for c in cells) ** (1 / p)
    assert lp_norm(data, "H", p) == pytest.approx(direct, rel=1e-14)
    assert lp_norm(data, "H", p) == pytest.approx(2.5 * 2.5 ** (1 / p), rel=1e-14)


def test_lp_norm_counterexample_and_zero():
    for j in (1, 7, 1000):
        inst = build_counterexample(j, 1.5, 3)
        assert lp_norm(inst.initial_data(), "H", 1.5) == pytest.approx(1.0, abs=1e-12)
    zero = InitialDataSet(3, [Cell("a", 1, 0.0), Cell("b", 3, 0.0)])
    assert lp_norm(zero, "H", 2) == 0.0
    with pytest.raises(DomainError):
        lp_norm(zero, "H", 0.5)
    with pytest.raises(DomainError):
        lp_norm(zero, "Q", 2)


def test_restrict_examples():
    data = InitialDataSet(3, [Cell("a", 1, 1.0), Cell("b", 2, -1.0)])
    assert restrict(data, lambda cid: True).cells == data.cells
    empty = restrict(data, lambda cid: False)
    assert len(empty) == 0 and empty.total_area == 0.0
    assert restrict(data, ["b"]).total_area == 2.0
    inst = build_counterexample(5, 1, 3)
    assert restrict(inst.initial_data(), ["A1"]).total_area == pytest.approx(1 / 10)


@given(st.integers(0, 2 ** 32 - 1), st.floats(1, 6), st.floats(0, 6))
def test_lp_norm_monotone_in_p_on_unit_area(seed, p, dp):
    rng = np.random.default_rng(seed)
    data = random_data(rng, with_k=False)
    cells = [Cell(c.id, c.weight / data.total_area, c.mean_curvature) for c in data.cells]
    unit = InitialDataSet(data.n, cells)
    assert lp_norm(unit, "H", p) <= lp_norm(unit, "H", p + dp) * (1 + 1e-12)


@given(st.integers(0, 2 ** 32 - 1))
def test_h_norm_controlled_by_k_norm(seed):
    data = random_data(np.random.default_rng(seed))
    n = data.n
    assert lp_norm(data, "H+", n) ** n <= n ** n * lp_norm(data, "K", n) ** n * (1 + 1e-12)


@given(st.integers(0, 2 ** 32 - 1))
def test_restrict_idempotent_and_additive(seed):
    rng = np.random.default_rng(seed)
    data = random_data(rng)
    labels = rng.integers(0, 3, size=len(data))
    parts = [restrict(data, [c.id for c, lab in zip(data.cells, labels) if lab == k]) for k in range(3)]
    assert math.fsum(p.total_area for p in parts) == pytest.approx(data.total_area, rel=1e-14)
    once = restrict(data, lambda cid: cid.endswith("1"))
    assert restrict(once, lambda cid: cid.endswith("1")).cells == once.cells
