"""Oracle checks run by ``cosmobounds verify`` and the acceptance tests.

Each check compares an estimator against an independent closed form or
an exact oracle spacetime and returns a :class:`CheckResult`.  The
randomized oracle class consists of cellwise warped products whose
warping functions are linear or concave powers of ``t``; these satisfy
the strong energy condition along the ``t``-lines by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import congruence as cg
from . import counterexample as cx
from . import integral_bounds as ib
from . import level_sets as ls
from .initial_data import Cell, InitialDataSet, restrict
from .model_geometry import ModelGeometry, model_area, model_volume

__all__ = ["CheckResult", "random_sec_spacetime", "oracle_instances", "CHECKS", "run_all"]

DEFAULT_SEED = 20240521
N_INSTANCES = 25
BOUND_TIMES = (0.1, 1.0, 5.0)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.name}: {self.detail}"


def random_sec_spacetime(rng: np.random.Generator, label: str = "") -> cg.GeneralizedFLRW:
    """A random oracle spacetime with 1-50 cells and ``n`` in {2, 3, 4}.

    Linear profiles may have a small negative slope, which makes the
    initial mean curvature negative on that cell; ``f`` stays positive
    up to ``t = 5``.
    """
    n = int(rng.choice([2, 3, 4]))
    cells = []
    for i in range(int(rng.integers(1, 51))):
        weight = float(rng.uniform(0.01, 1.0))
        if rng.random() < 0.5:
            offset = float(rng.uniform(0.3, 3.0))
            slope = float(rng.uniform(-0.05, 2.0))
            profile = cg.LinearProfile(offset, slope)
        else:
            profile = cg.PowerProfile(float(rng.uniform(0.3, 3.0)), float(rng.uniform(0.05, 3.0)),
                                      float(rng.uniform(0.1, 1.0)))
        cells.append(cg.FLRWCell(f"c{i}", weight, profile))
    return cg.GeneralizedFLRW(n=n, cells=cells, label=label)


def oracle_instances(seed: int = DEFAULT_SEED, count: int = N_INSTANCES) -> list:
    rng = np.random.default_rng(seed)
    return [random_sec_spacetime(rng, label=f"oracle-{k}") for k in range(count)]


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _with_k(data: InitialDataSet, rng: np.random.Generator) -> InitialDataSet:
    """Replace |K| by ``|H|/n (1 + u)`` with ``u >= 0`` random."""
    cells = [Cell(c.id, c.weight, c.mean_curvature,
                  abs(c.mean_curvature) / data.n * (1.0 + float(rng.uniform(0.0, 2.0))))
             for c in data.cells]
    return InitialDataSet(n=data.n, cells=cells, label=data.label)


# --------------------------------------------------------------------------

def check_model_regression(seed: int) -> CheckResult:
    def max_err(step):
        tr = cg.integrate_raychaudhuri(3.0, cg.RicciProfile.zero(), 3, 2.0, step)
        theta = 3.0 / (tr.taus + 1.0)
        area = (1.0 + tr.taus) ** 3
        return max(np.max(np.abs(tr.thetas - theta) / theta), np.max(np.abs(tr.areas - area) / area))

    coarse, fine = max_err(1e-3), max_err(5e-4)
    gain = coarse / fine if fine > 0 else math.inf
    ok = coarse <= 1e-6 and gain >= 12
    return CheckResult(1, "model regression", ok,
                       f"max rel err {coarse:.3e} (<=1e-6), halving gain {gain:.1f}x (>=12)")


def check_area_bound(seed: int) -> CheckResult:
    worst = math.inf
    for st in oracle_instances(seed):
        if not cg.sec_check(st, np.linspace(0, 5, 11)).passed:
            return CheckResult(2, "area bound on oracle class", False, f"{st.label} fails SEC")
        data = cg.induced_initial_data(st)
        for t in BOUND_TIMES:
            bound = ib.area_bound_exact(data, t)
            margin = (bound - cg.evolve_flrw_areas(st, None, t)) / bound
            worst = min(worst, margin)
    return CheckResult(2, "area bound on oracle class", worst >= -1e-9,
                       f"min relative margin {worst:.3e} (>= -1e-9) over {N_INSTANCES} instances")


def check_ordering(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed + 1)
    failures, worst_binom = [], 0.0
    for st in oracle_instances(seed):
        data = _with_k(cg.induced_initial_data(st), rng)
        for t in BOUND_TIMES:
            r = ib.area_report(data, t)
            chain = [("exact<=jensen_h", r.exact, r.jensen_h),
                     ("jensen_h<=from_k", r.jensen_h, r.from_k),
                     ("exact<=tg", r.exact, r.tg_pointwise)]
            for name, lo, hi in chain:
                if lo > hi + 1e-9 * max(abs(lo), abs(hi)):
                    failures.append(f"{st.label} t={t} {name}")
            worst_binom = max(worst_binom, _rel(math.fsum(r.binomial_terms), r.exact))
    ok = not failures and worst_binom <= 1e-12
    detail = f"{len(failures)} ordering failures, max binomial rel err {worst_binom:.2e} (<=1e-12)"
    return CheckResult(3, "bound ordering chain", ok, detail)


def check_coarea(seed: int) -> CheckResult:
    worst_vol = 0.0
    for n in (2, 3, 4):
        for beta in (0.0, 0.5, 3.0, 10.0):
            m = ModelGeometry(n, beta)
            hist = ls.AreaHistory.closed_form(lambda s, m=m: model_area(m, 1.7, s), 5.0)
            for t in (0.3, 1.0, 5.0):
                worst_vol = max(worst_vol, _rel(ls.omega_volume(hist, t), model_volume(m, 1.7, t)))
    worst_fd = 0.0
    for st in oracle_instances(seed)[:10]:
        data = cg.induced_initial_data(st)
        for t in (0.5, 1.0, 5.0):
            h = 1e-4 * t
            fd = (ib.volume_bound_exact(data, t + h) - ib.volume_bound_exact(data, t - h)) / (2 * h)
            worst_fd = max(worst_fd, _rel(fd, ib.area_bound_exact(data, t)))
    ok = worst_vol <= 1e-9 and worst_fd <= 1e-6
    return CheckResult(4, "coarea consistency", ok,
                       f"volume rel err {worst_vol:.2e} (<=1e-9), d/dt rel err {worst_fd:.2e} (<=1e-6)")


def jump_history(T: float = 1.0, left: float = 2.0, at: float = 1.0, t_max: float = 2.0) -> ls.AreaHistory:
    """History equal to ``left`` before ``T`` and ``at`` from ``T`` on."""
    return ls.AreaHistory.closed_form(lambda s: left if s < T else at, t_max, label="jump")


def smooth_oracle_histories(seed: int) -> list:
    """``(history, T, |S_T|)`` triples with known continuous areas."""
    out = [(ls.AreaHistory.closed_form(lambda s: (1.0 + s) ** 2, 2.0), 1.0, 4.0)]
    m = ModelGeometry(3, 3.0)
    out.append((ls.AreaHistory.model(m, 1.0, 3.0), 2.0, model_area(m, 1.0, 2.0)))
    for st in oracle_instances(seed)[:5]:
        hist = ls.AreaHistory.closed_form(lambda s, st=st: cg.evolve_flrw_areas(st, None, s), 5.0)
        out.append((hist, 1.0, cg.evolve_flrw_areas(st, None, 1.0)))
    return out


def check_sandwich(seed: int) -> CheckResult:
    worst = 0.0
    for hist, T, s_T in smooth_oracle_histories(seed):
        est = ls.generalized_area(hist, T)
        worst = max(worst, _rel(est.estimate, s_T))
    jump = jump_history()
    est = ls.generalized_area(jump, 1.0)
    lim = ls.left_limsup(jump, 1.0)
    verdict = ls.sandwich_check(jump(1.0), est, lim, 1e-6)
    jump_ok = jump(1.0) < est.estimate and abs(est.estimate - 2.0) <= 1e-6 and verdict.passed
    ok = worst <= 1e-4 and jump_ok
    return CheckResult(5, "generalized area sandwich", ok,
                       f"smooth rel err {worst:.2e} (<=1e-4); jump: s_T=1 < estimate={est.estimate:.9f}, left limit 2")


def check_counterexample(seed: int) -> CheckResult:
    worst = 0.0
    for j in (1, 10, 10 ** 2, 10 ** 4):
        for p in (1.0, 1.5, 2.0):
            worst = max(worst, abs(cx.counterexample_lp_norm(cx.build_counterexample(j, p, 3)) - 1.0))
    report = cx.divergence_report(1.0, 3, 3.0, [100])
    ratio = report.rows[0]["ratio"]
    inst = cx.build_counterexample(100, 1.0, 3)
    closed = ((1 / 200) * (100 * 3 / 3 + 1) ** 3 + (1 - 1 / 200) * (3 / (1.99 * 3) + 1) ** 3) / 8.0
    area_match = _rel(cx.counterexample_area(inst, 3.0), cg.evolve_flrw_areas(inst.spacetime(), None, 3.0))
    slope = cx.growth_slope(1.0, 3, 3.0, [10 ** 2, 10 ** 3, 10 ** 4])
    ok = (worst <= 1e-12 and _rel(ratio, closed) <= 0.01 and abs(ratio - 644) / 644 <= 0.01
          and _rel(slope, 2.0) <= 0.05 and area_match <= 1e-12)
    return CheckResult(6, "counterexample reproduction", ok,
                       f"max |norm-1| {worst:.1e}, ratio {ratio:.2f} (~644), slope {slope:.4f} (2 +-5%)")


def check_focal(seed: int) -> CheckResult:
    tr = cg.integrate_raychaudhuri(-3.0, cg.RicciProfile.zero(), 3, 2.0, 1e-3)
    ft = tr.focal_time
    ok = ft is not None and abs(ft - 1.0) <= 1e-6
    return CheckResult(7, "focal time", ok, f"focal_time {ft!r} (1 +- 1e-6)")


def check_monotone_quotient(seed: int) -> CheckResult:
    worst = 0.0
    grid = np.linspace(0.0, 5.0, 101)
    for st in oracle_instances(seed):
        data = cg.induced_initial_data(st)
        beta = float(np.max(np.maximum(data.mean_curvature, 0.0)))
        v = cg.monotone_quotient_check(grid, lambda s, st=st: cg.evolve_flrw_areas(st, None, s), beta, st.n)
        worst = max(worst, v.max_increase)
    tr = cg.integrate_raychaudhuri(2.0, cg.RicciProfile.constant(0.5), 3, 5.0, 1e-3)
    v = cg.monotone_quotient_check(tr.taus, tr.areas, 2.0, 3)
    worst = max(worst, v.max_increase)
    return CheckResult(8, "monotone area quotient", worst <= 1e-9,
                       f"max relative increase {worst:.2e} (<=1e-9)")


def check_partition(seed: int) -> CheckResult:
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for st in oracle_instances(seed):
        data = _with_k(cg.induced_initial_data(st), rng)
        labels = rng.integers(0, 3, size=len(data))
        parts = [[c.id for c, lab in zip(data.cells, labels) if lab == k] for k in range(3)]
        for t in BOUND_TIMES:
            pairs = [
                (lambda d: ib.area_bound_exact(d, t)),
                (lambda d: ib.volume_bound_exact(d, t)),
                (lambda d: ib.area_bound_jensen(d, t)),
                (lambda d: ib.area_bound_jensen(d, t, use_k=True)),
                (lambda d: ib.volume_bound_jensen(d, t)),
                (lambda d: math.fsum(ib.area_bound_binomial(d, t))),
            ]
            for fn in pairs:
                whole = fn(data)
                pieces = math.fsum(fn(restrict(data, ids)) for ids in parts)
                worst = max(worst, _rel(pieces, whole))
            whole = cg.evolve_flrw_areas(st, None, t)
            pieces = math.fsum(cg.evolve_flrw_areas(st, ids, t) for ids in parts)
            worst = max(worst, _rel(pieces, whole))
    return CheckResult(9, "partition additivity", worst <= 1e-12,
                       f"max relative defect {worst:.2e} (<=1e-12)")


CHECKS: List[Callable[[int], CheckResult]] = [
    check_model_regression,
    check_area_bound,
    check_ordering,
    check_coarea,
    check_sandwich,
    check_counterexample,
    check_focal,
    check_monotone_quotient,
    check_partition,
]


def run_all(seed: int = DEFAULT_SEED) -> list:
    return [check(seed) for check in CHECKS]
