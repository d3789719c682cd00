"""Evolution of the normal geodesic congruence of a Cauchy hypersurface.

Along a unit-speed normal geodesic the mean curvature ``theta`` of the
level sets and the relative area element ``A`` obey

    dtheta/dtau = -theta^2/n - Ric(gamma', gamma'),    dA/dtau = theta A,

where the first equation is the traced Riccati equation with the
shear-free inequality ``(tr S)^2 <= n tr S^2`` saturated.  Solutions with
``theta(0) <= beta`` and ``Ric >= 0`` stay below ``n / (tau + n/beta)``,
which is the slice mean curvature of the model spacetime.

The second half of the module handles spacetimes
``-dt^2 + f(t, x)^2 h`` with a warping function that is constant on each
cell.  There the normal geodesics are the ``t``-lines, they never cross,
and the level-set areas are exact cell sums.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateMetricError, DomainError, HypothesisError, ValidationError
from .initial_data import Cell, InitialDataSet

__all__ = [
    "RicciProfile",
    "CongruenceTrajectory",
    "integrate_raychaudhuri",
    "step_halving_error",
    "comparison_envelope",
    "envelope_violation",
    "LinearProfile",
    "PowerProfile",
    "TableProfile",
    "FLRWCell",
    "GeneralizedFLRW",
    "load_spacetime",
    "profile_from_dict",
    "evolve_flrw_areas",
    "induced_initial_data",
    "monotone_quotient_check",
    "QuotientVerdict",
    "sec_check",
    "SecVerdict",
]

FOCAL_AREA = 1e-12
BLOWUP_THETA = 1e12
BISECT_TOL = 1e-10
# Substeps keep |theta| h <= RESOLUTION * n so RK4 stays accurate as theta
# diverges near a focal point.
RESOLUTION = 0.05
SEC_TOL = 1e-12
QUOTIENT_TOL = 1e-9


# --------------------------------------------------------------------------
# Ricci profiles and the Raychaudhuri integrator
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RicciProfile:
    """``Ric(gamma', gamma')`` as a function of proper time along one fiber.

    Build with :meth:`zero`, :meth:`constant` or :meth:`table`; tables are
    linearly interpolated and cannot be evaluated outside their range.
    """

    kind: str
    value: float = 0.0
    taus: tuple = ()
    values: tuple = ()

    @classmethod
    def zero(cls) -> "RicciProfile":
        return cls("zero")

    @classmethod
    def constant(cls, rho: float) -> "RicciProfile":
        if not math.isfinite(rho):
            raise DomainError(f"Ricci value must be finite, got {rho!r}")
        return cls("constant", value=float(rho))

    @classmethod
    def table(cls, taus: Sequence[float], values: Sequence[float]) -> "RicciProfile":
        taus = tuple(float(x) for x in taus)
        values = tuple(float(x) for x in values)
        if len(taus) < 2 or len(taus) != len(values):
            raise DomainError("Ricci table needs at least two (tau, value) pairs of equal length")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise DomainError("Ricci table taus must be strictly increasing")
        if not all(map(math.isfinite, values)):
            raise DomainError("Ricci table values must be finite")
        return cls("table", taus=taus, values=values)

    @classmethod
    def parse(cls, text: str) -> "RicciProfile":
        """Parse ``zero``, ``constant:<rho>`` or a bare number."""
        text = text.strip()
        if text == "zero":
            return cls.zero()
        if text.startswith("constant:"):
            text = text.split(":", 1)[1]
        try:
            return cls.constant(float(text))
        except ValueError:
            raise DomainError(f"cannot parse Ricci profile {text!r}") from None

    @property
    def satisfies_sec(self) -> bool:
        """True when every stored value is ``>= 0``."""
        if self.kind == "zero":
            return True
        if self.kind == "constant":
            return self.value >= 0
        return min(self.values) >= 0

    def __call__(self, tau: float) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.value
        if not (self.taus[0] - 1e-12 <= tau <= self.taus[-1] + 1e-12):
            raise DomainError(
                f"Ricci table defined on [{self.taus[0]}, {self.taus[-1]}], evaluated at tau={tau!r}"
            )
        return float(np.interp(tau, self.taus, self.values))

    def describe(self) -> str:
        if self.kind == "table":
            return f"table[{len(self.taus)}]"
        if self.kind == "constant":
            return f"constant:{self.value!r}"
        return "zero"


@dataclass(frozen=True)
class CongruenceTrajectory:
    """Samples ``(tau, theta, A)`` along one fiber.

    ``focal_time`` is set when the area element collapsed (or ``theta``
    blew up) before ``t_end``; the samples then stop there.
    """

    n: int
    taus: np.ndarray
    thetas: np.ndarray
    areas: np.ndarray
    focal_time: Optional[float] = None
    sec: bool = True
    ricci: str = "zero"

    @property
    def focal(self) -> bool:
        return self.focal_time is not None

    @property
    def theta0(self) -> float:
        return float(self.thetas[0])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["tau", "theta", "A"])
        for row in zip(self.taus, self.thetas, self.areas):
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ricci": self.ricci,
            "sec": self.sec,
            "focal_time": self.focal_time,
            "tau": self.taus.tolist(),
            "theta": self.thetas.tolist(),
            "A": self.areas.tolist(),
        }


def _rk4(ricci, n, tau, theta, area, h):
    def rhs(s, th, a):
        return -th * th / n - ricci(s), th * a

    k1t, k1a = rhs(tau, theta, area)
    k2t, k2a = rhs(tau + h / 2, theta + h / 2 * k1t, area + h / 2 * k1a)
    k3t, k3a = rhs(tau + h / 2, theta + h / 2 * k2t, area + h / 2 * k2a)
    k4t, k4a = rhs(tau + h, theta + h * k3t, area + h * k3a)
    return (theta + h / 6 * (k1t + 2 * k2t + 2 * k3t + k4t),
            area + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a))


def _valid(theta, area):
    return (math.isfinite(theta) and math.isfinite(area)
            and area > FOCAL_AREA and abs(theta) < BLOWUP_THETA)


def _advance(ricci, n, tau, theta, area, target):
    """Integrate from ``tau`` to ``target``.

    Returns ``(tau, theta, area, hit)`` where ``hit`` is True if the state
    left the valid region; ``tau`` is then within BISECT_TOL of the exit.
    """
    while target - tau > 1e-15 * max(1.0, abs(target)):
        h = target - tau
        while abs(theta) * h > RESOLUTION * n:
            h /= 2
        new = _rk4(ricci, n, tau, theta, area, h)
        if _valid(*new):
            tau, (theta, area) = tau + h, new
            continue
        while h > BISECT_TOL:
            h /= 2
            new = _rk4(ricci, n, tau, theta, area, h)
            if _valid(*new):
                tau, (theta, area) = tau + h, new
        return tau, theta, area, True
    return target, theta, area, False


def integrate_raychaudhuri(theta0: float, ricci: RicciProfile, n: int, t_end: float,
                           step: float) -> CongruenceTrajectory:
    """Fixed-step RK4 solution of the traced Riccati system.

    Samples are recorded on the grid ``k * step``.  When the area element
    drops below ``1e-12`` the crossing is bracketed by step bisection and
    the focal time is extrapolated from ``A^(1/n)``, which is linear in
    ``tau`` to leading order (``tau_f = tau - n/theta``).  A blow-up
    ``|theta| > 1e12`` also truncates the trajectory.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not (t_end > 0 and math.isfinite(t_end)):
        raise DomainError(f"t_end must be finite and > 0, got {t_end!r}")
    if not (step > 0 and step <= t_end / 10 * (1 + 1e-12)):
        raise DomainError(f"step must lie in (0, t_end/10], got {step!r}")
    if not math.isfinite(theta0):
        raise DomainError(f"theta0 must be finite, got {theta0!r}")

    taus, thetas, areas = [0.0], [float(theta0)], [1.0]
    tau, theta, area = 0.0, float(theta0), 1.0
    focal_time = None
    nsteps = math.ceil(t_end / step - 1e-9)
    for k in range(1, nsteps + 1):
        target = min(k * step, t_end)
        tau, theta, area, hit = _advance(ricci, n, tau, theta, area, target)
        taus.append(tau)
        thetas.append(theta)
        areas.append(area)
        if hit:
            focal_time = tau - n / theta if theta < 0 else tau
            break
    return CongruenceTrajectory(
        n=n,
        taus=np.array(taus),
        thetas=np.array(thetas),
        areas=np.array(areas),
        focal_time=focal_time,
        sec=ricci.satisfies_sec,
        ricci=ricci.describe(),
    )


def step_halving_error(theta0: float, ricci: RicciProfile, n: int, t_end: float,
                       step: float) -> float:
    """Richardson estimate of the max relative error of a trajectory at ``step``.

    Compares against a run at ``step/2`` on the shared grid; for a
    fourth-order method the error of the coarse run is ``16/15`` of the
    difference.
    """
    coarse = integrate_raychaudhuri(theta0, ricci, n, t_end, step)
    fine = integrate_raychaudhuri(theta0, ricci, n, t_end, step / 2)
    m = min(len(coarse.taus), (len(fine.taus) + 1) // 2)
    err = 0.0
    for name in ("thetas", "areas"):
        c = getattr(coarse, name)[:m]
        f = getattr(fine, name)[: 2 * m : 2]
        scale = np.maximum(np.abs(f), 1e-300)
        err = max(err, float(np.max(np.abs(c - f) / scale)))
    return err * 16 / 15


def comparison_envelope(beta: float, n: int, tau: float) -> float:
    """Upper bound ``n / (tau + n/beta)`` on the expansion for ``theta(0) <= beta``."""
    if not beta > 0:
        raise DomainError(f"envelope needs beta > 0, got {beta!r}")
    if not tau >= 0:
        raise DomainError(f"tau must be >= 0, got {tau!r}")
    return n / (tau + n / beta)


def envelope_violation(traj: CongruenceTrajectory, beta: float, n: int) -> float:
    """Largest ``theta(tau) - n/(tau + n/beta)`` over the samples.

    A non-positive value (up to integration error) confirms the comparison.
    """
    if not traj.sec:
        raise HypothesisError(
            f"Ricci profile {traj.ricci} is negative somewhere; the envelope comparison needs Ric >= 0"
        )
    env = np.array([comparison_envelope(beta, n, float(t)) for t in traj.taus])
    return float(np.max(traj.thetas - env))


# --------------------------------------------------------------------------
# Cellwise warped products -dt^2 + f(t, x)^2 h
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearProfile:
    """``f(t) = offset + slope * t``.  With ``slope = 1``, ``offset = n/beta`` this is the model."""

    offset: float
    slope: float = 1.0
    kind = "linear"

    def value(self, t):
        return self.offset + self.slope * np.asarray(t, dtype=float)

    def d1(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.slope)

    def d2(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def to_dict(self):
        return {"kind": "linear", "offset": self.offset, "slope": self.slope}


@dataclass(frozen=True)
class PowerProfile:
    """``f(t) = scale * (1 + rate * t)^exponent``; concave for ``0 <= exponent <= 1``."""

    scale: float
    rate: float
    exponent: float
    kind = "power"

    def _base(self, t):
        base = 1.0 + self.rate * np.asarray(t, dtype=float)
        if np.any(base <= 0):
            raise DegenerateMetricError(f"power profile base 1 + rate*t is non-positive at t={t!r}")
        return base

    def value(self, t):
        return self.scale * self._base(t) ** self.exponent

    def d1(self, t):
        return self.scale * self.exponent * self.rate * self._base(t) ** (self.exponent - 1)

    def d2(self, t):
        a = self.exponent
        return self.scale * a * (a - 1) * self.rate ** 2 * self._base(t) ** (a - 2)

    def to_dict(self):
        return {"kind": "power", "scale": self.scale, "rate": self.rate, "exponent": self.exponent}


@dataclass(frozen=True)
class TableProfile:
    """Sampled ``f`` with a not-a-knot cubic spline through the samples."""

    t: tuple
    f: tuple
    kind = "table"
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        t = tuple(float(x) for x in self.t)
        f = tuple(float(x) for x in self.f)
        if len(t) < 4 or len(t) != len(f):
            raise ValidationError("table profile needs at least four (t, f) samples")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValidationError("table profile times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "_spline", CubicSpline(t, f))

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t[0] - 1e-12) or np.any(t > self.t[-1] + 1e-12):
            raise DomainError(f"table profile defined on [{self.t[0]}, {self.t[-1]}], queried at {t!r}")
        return t

    def value(self, t):
        return self._spline(self._check(t))

    def d1(self, t):
        return self._spline(self._check(t), 1)

    def d2(self, t):
        return self._spline(self._check(t), 2)

    def to_dict(self):
        return {"kind": "table", "t": list(self.t), "f": list(self.f)}


def profile_from_dict(doc: dict):
    kind = doc.get("kind")
    try:
        if kind == "linear":
            return LinearProfile(float(doc["offset"]), float(doc.get("slope", 1.0)))
        if kind == "power":
            return PowerProfile(float(doc["scale"]), float(doc["rate"]), float(doc["exponent"]))
        if kind == "table":
            return TableProfile(tuple(doc["t"]), tuple(doc["f"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed {kind} profile: {exc}") from exc
    raise ValidationError(f"unknown profile kind {kind!r}; expected linear, power or table")


@dataclass(frozen=True)
class FLRWCell:
    id: str
    weight: float
    profile: object


@dataclass(frozen=True)
class GeneralizedFLRW:
    """Spacetime ``-dt^2 + f(t, x)^2 h`` with ``f`` constant in ``x`` on each cell.

    ``weight`` is the cell's measure in the reference fiber metric ``h``,
    so the initial area of a cell is ``weight * f(0)^n``.
    """

    n: int
    cells: tuple
    label: str = ""

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "cells", tuple(self.cells))
        seen = set()
        for c in self.cells:
            if c.id in seen:
                raise ValidationError(f"duplicate cell id {c.id!r}")
            seen.add(c.id)
            if not (math.isfinite(c.weight) and c.weight > 0):
                raise ValidationError(f"cell {c.id!r}: weight must be finite and > 0, got {c.weight!r}")

    def select(self, subset=None) -> list:
        if subset is None:
            return list(self.cells)
        if not callable(subset):
            chosen = set(subset)
            subset = chosen.__contains__
        return [c for c in self.cells if subset(c.id)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "label": self.label,
            "cells": [{"id": c.id, "weight": c.weight, "profile": c.profile.to_dict()}
                      for c in self.cells],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GeneralizedFLRW":
        try:
            n = int(doc["n"])
            cells = [FLRWCell(str(c["id"]), float(c["weight"]), profile_from_dict(c["profile"]))
                     for c in doc["cells"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed spacetime document: {exc}") from exc
        return cls(n=n, cells=cells, label=str(doc.get("label", "")))


def load_spacetime(source: TextIO | str) -> GeneralizedFLRW:
    """Read a spacetime spec from a JSON stream or string."""
    text = source if isinstance(source, str) else source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"spacetime spec is not valid JSON: {exc}") from exc
    return GeneralizedFLRW.from_dict(doc)


def _positive_value(cell: FLRWCell, t: float) -> float:
    f = float(cell.profile.value(t))
    if not f > 0:
        raise DegenerateMetricError(f"cell {cell.id!r}: warping function f={f!r} <= 0 at t={t!r}")
    return f


def evolve_flrw_areas(st: GeneralizedFLRW, subset=None, t: float = 0.0) -> float:
    """Exact area ``sum w f(t)^n`` of the time-``t`` level set over the selected cells.

    ``subset`` is ``None`` (all cells), a predicate on ids or a collection
    of ids.
    """
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t!r}")
    terms = []
    for c in st.select(subset):
        _positive_value(c, 0.0)
        terms.append(c.weight * _positive_value(c, t) ** st.n)
    return math.fsum(terms)


def induced_initial_data(st: GeneralizedFLRW, subset=None) -> InitialDataSet:
    """Initial data on ``t = 0``: area ``w f(0)^n``, ``H = n f'/f`` and ``|K| = sqrt(n) |f'/f|``.

    The time-zero slice is umbilic with ``K = (f'/f) h``, hence the norms.
    """
    n = st.n
    cells = []
    for c in st.select(subset):
        f0 = _positive_value(c, 0.0)
        hubble = float(c.profile.d1(0.0)) / f0
        cells.append(Cell(c.id, c.weight * f0 ** n, n * hubble, math.sqrt(n) * abs(hubble)))
    return InitialDataSet(n=n, cells=cells, label=st.label)


@dataclass(frozen=True)
class SecVerdict:
    per_cell: dict
    violations: list

    @property
    def passed(self) -> bool:
        return all(self.per_cell.values())


def sec_check(st: GeneralizedFLRW, t_grid: Iterable[float]) -> SecVerdict:
    """Check ``Ric(d_t, d_t) = -n f''/f >= 0`` on every cell at every grid time."""
    t_grid = np.asarray(list(t_grid), dtype=float)
    per_cell, violations = {}, []
    for c in st.cells:
        ok = True
        for t in t_grid:
            ric = -st.n * float(c.profile.d2(t)) / _positive_value(c, float(t))
            if ric < -SEC_TOL:
                ok = False
                violations.append((c.id, float(t), ric))
        per_cell[c.id] = ok
    return SecVerdict(per_cell, violations)


@dataclass(frozen=True)
class QuotientVerdict:
    quotients: np.ndarray
    max_increase: float
    passed: bool


def monotone_quotient_check(t_grid: Sequence[float], areas, beta: float, n: int,
                            tol: float = QUOTIENT_TOL) -> QuotientVerdict:
    """Check that ``area(t) / (beta t/n + 1)^n`` is non-increasing on the grid.

    ``areas`` is either a callable of ``t`` or a sequence aligned with
    ``t_grid``.  Increases are measured relative to ``max(1, |quotient|)``.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 2 or np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be strictly increasing with at least two points")
    if not beta >= 0:
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    a = np.array([areas(float(s)) for s in t]) if callable(areas) else np.asarray(areas, dtype=float)
    if a.shape != t.shape:
        raise DomainError("areas and t_grid differ in length")
    q = a / (beta * t / n + 1.0) ** n
    rise = np.diff(q) / np.maximum(1.0, np.abs(q[:-1]))
    max_increase = float(max(np.max(rise), 0.0))
    return QuotientVerdict(q, max_increase, max_increase <= tol)
