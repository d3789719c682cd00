"""Area and volume upper bounds for cosmological-time level sets.

Given initial data on a Cauchy hypersurface and assuming the strong
energy condition along the normal geodesics, the area of the time-``t``
level set is bounded by ``int (H_+ t/n + 1)^n dmu`` and the volume of the
region below it by the time integral of that.  This module evaluates
that bound together with its weaker closed forms:

* the Jensen form ``2^(n-1) ((t/n)^n ||H||_n^n + |Sigma|)``,
* the same with ``n^n ||K||_n^n`` replacing ``||H||_n^n``,
* the binomial expansion in the ``L^k`` norms of ``H_+``,
* the pointwise comparison ``|Sigma| (beta t/n + 1)^n`` with ``beta >= sup H``.

None of these functions can check the energy condition; reports carry
``sec_assumed=True`` to make the caller's assumption explicit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .initial_data import InitialDataSet, h_plus, integrate, lp_norm
from .model_geometry import power_mean_integral

__all__ = [
    "AreaBoundReport",
    "VolumeBoundReport",
    "area_bound_exact",
    "volume_bound_exact",
    "area_bound_jensen",
    "volume_bound_jensen",
    "area_bound_binomial",
    "volume_bound_binomial",
    "tg_pointwise_area",
    "tg_pointwise_volume",
    "area_report",
    "volume_report",
    "sweep_csv",
    "ORDER_RTOL",
]

ORDER_RTOL = 1e-9


def _check_t(t: float) -> None:
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"t must be finite and >= 0, got {t!r}")


def _le(a: float, b: float, rtol: float = ORDER_RTOL) -> bool:
    return a <= b + rtol * max(abs(a), abs(b), 1e-300)


def area_bound_exact(data: InitialDataSet, t: float) -> float:
    """``sum_cells (H_+ t/n + 1)^n w``."""
    _check_t(t)
    if len(data) == 0:
        return 0.0
    n = data.n
    return integrate(data, (h_plus(data) * t / n + 1.0) ** n)


def volume_bound_exact(data: InitialDataSet, t: float) -> float:
    """``sum_cells w int_0^t (H_+ s/n + 1)^n ds`` via the per-cell antiderivative."""
    _check_t(t)
    if len(data) == 0:
        return 0.0
    n = data.n
    per_cell = [t * power_mean_integral(x, n) for x in h_plus(data) * t / n]
    return integrate(data, per_cell)


def _norm_power(data: InitialDataSet, use_k: bool, p: Optional[float]) -> float:
    """``||H||_p^n`` (or ``||K||_p^n``) with ``p`` defaulting to ``n``."""
    n = data.n
    p = n if p is None else p
    name = "K" if use_k else "H"
    if p == n:
        return integrate(data, np.abs(data.field(name)) ** n)
    return lp_norm(data, name, p) ** n


def area_bound_jensen(data: InitialDataSet, t: float, use_k: bool = False,
                      p: Optional[float] = None) -> float:
    """Jensen form of the area bound.

    ``2^(n-1) ((t/n)^n ||H||^n + |Sigma|)``, or with ``use_k``
    ``2^(n-1) (t^n ||K||^n + |Sigma|)``.  The norm is ``L^n`` unless ``p``
    is given.  Only ``p >= n`` yields a valid bound; smaller ``p`` is
    accepted so that the failure of the estimate can be exhibited.
    """
    _check_t(t)
    if len(data) == 0:
        return 0.0
    n = data.n
    scaled = t ** n * _norm_power(data, use_k, p)
    if not use_k:
        scaled /= n ** n
    return 2 ** (n - 1) * (scaled + data.total_area)


def volume_bound_jensen(data: InitialDataSet, t: float, use_k: bool = False,
                        p: Optional[float] = None) -> float:
    """Time integral of :func:`area_bound_jensen` over ``[0, t]``."""
    _check_t(t)
    if len(data) == 0:
        return 0.0
    n = data.n
    scaled = t ** (n + 1) * _norm_power(data, use_k, p) / (n + 1)
    if not use_k:
        scaled /= n ** n
    return 2 ** (n - 1) * (scaled + t * data.total_area)


def _hplus_moments(data: InitialDataSet) -> list:
    """``[int H_+^k dmu for k = 0..n]``; the k = 0 entry is the area."""
    hp = h_plus(data)
    return [data.total_area] + [integrate(data, hp ** k) for k in range(1, data.n + 1)]


def area_bound_binomial(data: InitialDataSet, t: float) -> list:
    """Terms ``C(n,k) (t/n)^k ||H_+||_k^k`` for ``k = 0..n``.

    Their sum is :func:`area_bound_exact` up to rounding.
    """
    _check_t(t)
    n = data.n
    if len(data) == 0:
        return [0.0] * (n + 1)
    moments = _hplus_moments(data)
    return [math.comb(n, k) * t ** k * moments[k] / n ** k for k in range(n + 1)]


def volume_bound_binomial(data: InitialDataSet, t: float) -> list:
    """Time-integrated binomial terms ``C(n,k) t^(k+1) / (n^k (k+1)) ||H_+||_k^k``."""
    _check_t(t)
    n = data.n
    if len(data) == 0:
        return [0.0] * (n + 1)
    moments = _hplus_moments(data)
    return [math.comb(n, k) * t ** (k + 1) * moments[k] / (n ** k * (k + 1))
            for k in range(n + 1)]


def _check_tg(beta: float, base_area: float, n: int, t: float) -> None:
    _check_t(t)
    if not base_area >= 0:
        raise DomainError(f"base_area must be >= 0, got {base_area!r}")
    if beta < 0 and t > n / abs(beta):
        raise DomainError(
            f"pointwise comparison with beta={beta!r} < 0 only holds for t <= n/|beta| = {n / abs(beta)!r}, got t={t!r}"
        )


def tg_pointwise_area(beta: float, base_area: float, n: int, t: float) -> float:
    """``|Sigma| (beta t/n + 1)^n`` for a pointwise bound ``H <= beta``."""
    _check_tg(beta, base_area, n, t)
    return base_area * max(beta * t / n + 1.0, 0.0) ** n


def tg_pointwise_volume(beta: float, base_area: float, n: int, t: float) -> float:
    """``|Sigma| int_0^t (beta s/n + 1)^n ds`` for a pointwise bound ``H <= beta``."""
    _check_tg(beta, base_area, n, t)
    return base_area * t * power_mean_integral(max(beta * t / n, -1.0), n)


@dataclass
class AreaBoundReport:
    """Every area bound at one time, plus the checked orderings between them."""

    t: float
    exact: float
    jensen_h: float
    from_k: Optional[float]
    binomial_terms: list
    tg_pointwise: Optional[float]
    tg_beta: Optional[float] = None
    sec_assumed: bool = True
    ordering: dict = field(default_factory=dict)

    @property
    def jensen_gap(self) -> float:
        return self.jensen_h - self.exact

    def to_dict(self) -> dict:
        out = asdict(self)
        out["jensen_gap"] = self.jensen_gap
        return out


@dataclass
class VolumeBoundReport:
    t: float
    exact: float
    jensen_h: float
    from_k: Optional[float]
    binomial_terms: list
    tg_pointwise: Optional[float]
    tg_beta: Optional[float] = None
    sec_assumed: bool = True
    ordering: dict = field(default_factory=dict)

    @property
    def jensen_gap(self) -> float:
        return self.jensen_h - self.exact

    def to_dict(self) -> dict:
        out = asdict(self)
        out["jensen_gap"] = self.jensen_gap
        return out


def _ordering(exact, jensen_h, from_k, tg, terms) -> dict:
    total = math.fsum(terms)
    cert = {
        "exact<=jensen_h": _le(exact, jensen_h),
        "binomial_sum==exact": abs(total - exact) <= 1e-12 * max(abs(exact), 1e-300),
    }
    if from_k is not None:
        cert["jensen_h<=from_k"] = _le(jensen_h, from_k)
    if tg is not None:
        cert["exact<=tg_pointwise"] = _le(exact, tg)
    return cert


def _tg_beta(data: InitialDataSet) -> Optional[float]:
    if len(data) == 0:
        return None
    return float(np.max(h_plus(data)))


def area_report(data: InitialDataSet, t: float) -> AreaBoundReport:
    """All area bounds at time ``t``; the pointwise bound uses ``beta = max H_+``."""
    exact = area_bound_exact(data, t)
    jensen_h = area_bound_jensen(data, t)
    from_k = area_bound_jensen(data, t, use_k=True) if len(data) and data.has_k else None
    terms = area_bound_binomial(data, t)
    beta = _tg_beta(data)
    tg = None if beta is None else tg_pointwise_area(beta, data.total_area, data.n, t)
    return AreaBoundReport(t=t, exact=exact, jensen_h=jensen_h, from_k=from_k,
                           binomial_terms=terms, tg_pointwise=tg, tg_beta=beta,
                           ordering=_ordering(exact, jensen_h, from_k, tg, terms))


def volume_report(data: InitialDataSet, t: float) -> VolumeBoundReport:
    """All volume bounds at time ``t``; mirrors :func:`area_report`."""
    exact = volume_bound_exact(data, t)
    jensen_h = volume_bound_jensen(data, t)
    from_k = volume_bound_jensen(data, t, use_k=True) if len(data) and data.has_k else None
    terms = volume_bound_binomial(data, t)
    beta = _tg_beta(data)
    tg = None if beta is None else tg_pointwise_volume(beta, data.total_area, data.n, t)
    return VolumeBoundReport(t=t, exact=exact, jensen_h=jensen_h, from_k=from_k,
                             binomial_terms=terms, tg_pointwise=tg, tg_beta=beta,
                             ordering=_ordering(exact, jensen_h, from_k, tg, terms))


def sweep_header(n: int) -> list:
    return ["t", "exact", "jensen_h", "from_k", "tg"] + [f"binomial_k{k}" for k in range(n + 1)]


def sweep_rows(reports: Sequence) -> list:
    rows = []
    for r in reports:
        rows.append([r.t, r.exact, r.jensen_h, r.from_k, r.tg_pointwise, *r.binomial_terms])
    return rows


def sweep_csv(reports: Sequence, n: int) -> str:
    """CSV table of a bound-vs-t sweep.  Missing values are left blank."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(sweep_header(n))
    for row in sweep_rows(reports):
        writer.writerow(["" if v is None else repr(float(v)) for v in row])
    return buf.getvalue()
