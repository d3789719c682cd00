"""A family showing that ``L^p`` bounds on ``H`` with ``p < n`` control nothing.

Instance ``j`` glues two pieces of model spacetimes: a small region of
area ``1/(2j)`` with initial mean curvature ``j^(1/p)`` and its complement
in a unit-area set with mean curvature ``(2 - 1/j)^(-1/p)``.  The ``L^p``
norm of ``H`` stays exactly 1 while the evolved area grows like
``j^(n/p - 1)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .congruence import FLRWCell, GeneralizedFLRW, LinearProfile
from .errors import DomainError
from .initial_data import Cell, InitialDataSet, lp_norm

__all__ = [
    "CounterexampleInstance",
    "build_counterexample",
    "counterexample_lp_norm",
    "counterexample_area",
    "divergence_report",
    "DivergenceReport",
    "growth_slope",
]

CELL_IDS = ("A1", "A2")


@dataclass(frozen=True)
class CounterexampleInstance:
    j: int
    p: float
    n: int
    beta1: float
    beta2: float
    area1: float
    area2: float

    def initial_data(self) -> InitialDataSet:
        """Two cells with constant ``H``; ``|K|`` is the umbilic value ``H / sqrt(n)``."""
        rt = math.sqrt(self.n)
        return InitialDataSet(
            n=self.n,
            cells=[Cell(CELL_IDS[0], self.area1, self.beta1, self.beta1 / rt),
                   Cell(CELL_IDS[1], self.area2, self.beta2, self.beta2 / rt)],
            label=f"counterexample(j={self.j}, p={self.p}, n={self.n})",
        )

    def spacetime(self) -> GeneralizedFLRW:
        """Cellwise model metrics ``f = t + n/beta``.

        Fiber weights are rescaled by ``(beta/n)^n`` so that the initial
        areas equal ``area1`` and ``area2``.
        """
        n = self.n
        cells = []
        for cid, area, beta in zip(CELL_IDS, (self.area1, self.area2), (self.beta1, self.beta2)):
            offset = n / beta
            cells.append(FLRWCell(cid, area / offset ** n, LinearProfile(offset, 1.0)))
        return GeneralizedFLRW(n=n, cells=cells, label=f"counterexample(j={self.j}, p={self.p})")


def build_counterexample(j: int, p: float, n: int) -> CounterexampleInstance:
    """Instance ``j`` of the family for exponent ``1 <= p < n``."""
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    if not (1 <= p < n):
        raise DomainError(f"the construction needs 1 <= p < n, got p={p!r}, n={n!r}")
    if int(j) != j or j < 1:
        raise DomainError(f"j must be an integer >= 1, got {j!r}")
    j = int(j)
    return CounterexampleInstance(
        j=j, p=float(p), n=int(n),
        beta1=j ** (1.0 / p),
        beta2=(1.0 / (2.0 - 1.0 / j)) ** (1.0 / p),
        area1=1.0 / (2 * j),
        area2=1.0 - 1.0 / (2 * j),
    )


def counterexample_lp_norm(inst: CounterexampleInstance) -> float:
    """``||H||_{L^p}`` over the two cells; equals 1 up to rounding."""
    return lp_norm(inst.initial_data(), "H", inst.p)


def counterexample_area(inst: CounterexampleInstance, t: float) -> float:
    """Area of the time-``t`` level set over both cells, in closed form."""
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    n = inst.n
    return math.fsum([
        inst.area1 * (inst.beta1 * t / n + 1.0) ** n,
        inst.area2 * (inst.beta2 * t / n + 1.0) ** n,
    ])


def _lp_jensen_bound(inst: CounterexampleInstance, t: float, norm: float) -> float:
    n = inst.n
    total = inst.area1 + inst.area2
    return 2 ** (n - 1) * ((t / n) ** n * norm ** n + total)


@dataclass
class DivergenceReport:
    """Evolved area against the would-be ``L^p`` Jensen bound, per ``j``.

    ``certified`` means the ratio area/bound increases strictly along
    ``j`` from the first violating entry onward.
    """

    p: float
    n: int
    t: float
    rows: list
    first_violation: object
    certified: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "area", "bound", "ratio"])
        for r in self.rows:
            writer.writerow([r["j"], repr(r["area"]), repr(r["bound"]), repr(r["ratio"])])
        return buf.getvalue()


def divergence_report(p: float, n: int, t: float, j_list: Sequence[int]) -> DivergenceReport:
    """Compare ``|S_t(A_j)|`` with ``2^(n-1) ((t/n)^n ||H_j||_p^n + |A_j|)`` for each ``j``."""
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    js = sorted(set(int(j) for j in j_list))
    rows = []
    for j in js:
        inst = build_counterexample(j, p, n)
        area = counterexample_area(inst, t)
        bound = _lp_jensen_bound(inst, t, counterexample_lp_norm(inst))
        rows.append({"j": j, "area": area, "bound": bound, "ratio": area / bound,
                     "violated": area > bound})
    first = next((i for i, r in enumerate(rows) if r["violated"]), None)
    if first is None:
        certified = False
    else:
        tail = [r["ratio"] for r in rows[first:]]
        certified = all(b > a for a, b in zip(tail, tail[1:]))
    return DivergenceReport(p=float(p), n=int(n), t=float(t), rows=rows,
                            first_violation=None if first is None else rows[first]["j"],
                            certified=certified)


def growth_slope(p: float, n: int, t: float, j_list: Sequence[int]) -> float:
    """Least-squares slope of ``log |S_t(A_j)|`` against ``log j``."""
    js = np.asarray(sorted(j_list), dtype=float)
    areas = [counterexample_area(build_counterexample(int(j), p, n), t) for j in js]
    slope, _ = np.polyfit(np.log(js), np.log(areas), 1)
    return float(slope)
