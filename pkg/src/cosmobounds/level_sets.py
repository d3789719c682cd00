"""Level sets of the cosmological time: volumes and generalized areas.

In the spacetimes handled here the cosmological time of ``(t, x)`` is
``t`` itself, so an area history ``t -> |S_t|`` determines everything:
``|Omega_t|`` is its integral and the generalized area of the time-``T``
slice is the limsup of window averages ``(1/h) int_{T-h}^T |S_s| ds``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import DomainError
from .model_geometry import ModelGeometry, model_area, model_volume

__all__ = [
    "AreaHistory",
    "GeneralizedAreaEstimate",
    "SandwichVerdict",
    "adaptive_simpson",
    "omega_volume",
    "generalized_area",
    "left_limsup",
    "sandwich_check",
]

QUAD_RTOL = 1e-10
MAX_DEPTH = 50


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     rtol: float = QUAD_RTOL, max_depth: int = MAX_DEPTH) -> float:
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]`` to relative tolerance ``rtol``.

    The absolute target is ``rtol`` times a 16-panel composite estimate.
    Subintervals stop refining at ``max_depth``, which bounds the work on
    integrands with jumps.
    """
    if b == a:
        return 0.0
    panels = 16
    xs = np.linspace(a, b, 2 * panels + 1)
    ys = [float(f(x)) for x in xs]
    coarse = math.fsum(
        (xs[2 * i + 2] - xs[2 * i]) / 6 * (ys[2 * i] + 4 * ys[2 * i + 1] + ys[2 * i + 2])
        for i in range(panels)
    )
    tol = rtol * max(abs(coarse), 1e-300)

    def simpson(x0, x1, f0, fm, f1):
        return (x1 - x0) / 6 * (f0 + 4 * fm + f1)

    def recurse(x0, x1, f0, fm, f1, whole, eps, depth):
        m = (x0 + x1) / 2
        lm, rm = (x0 + m) / 2, (m + x1) / 2
        flm, frm = float(f(lm)), float(f(rm))
        left = simpson(x0, m, f0, flm, fm)
        right = simpson(m, x1, fm, frm, f1)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15 * eps:
            return left + right + delta / 15
        return (recurse(x0, m, f0, flm, fm, left, eps / 2, depth + 1)
                + recurse(m, x1, fm, frm, f1, right, eps / 2, depth + 1))

    parts = []
    for i in range(panels):
        x0, x1 = xs[2 * i], xs[2 * i + 2]
        f0, fm, f1 = ys[2 * i], ys[2 * i + 1], ys[2 * i + 2]
        parts.append(recurse(x0, x1, f0, fm, f1, simpson(x0, x1, f0, fm, f1), tol / panels, 0))
    return math.fsum(parts)


@dataclass(frozen=True)
class AreaHistory:
    """Area ``|S_t|`` of the level sets on ``[0, t_max]``.

    ``volume`` is an optional closed-form ``t -> int_0^t |S_s| ds``.
    Histories built from samples interpolate with a cubic (or linear)
    spline, whose integral is exact.
    """

    func: Callable[[float], float]
    t_max: float
    volume: Optional[Callable[[float], float]] = None
    spline: object = None
    label: str = ""

    @classmethod
    def closed_form(cls, func, t_max, volume=None, label=""):
        return cls(func=func, t_max=float(t_max), volume=volume, label=label)

    @classmethod
    def from_samples(cls, ts: Sequence[float], areas: Sequence[float], kind: str = "cubic", label=""):
        ts = np.asarray(ts, dtype=float)
        areas = np.asarray(areas, dtype=float)
        if ts.ndim != 1 or ts.shape != areas.shape or len(ts) < 2:
            raise DomainError("history samples must be two equal-length 1-D sequences")
        if ts[0] != 0 or np.any(np.diff(ts) <= 0):
            raise DomainError("history sample times must start at 0 and increase strictly")
        if np.any(areas < 0):
            raise DomainError("areas must be non-negative")
        k = {"cubic": 3, "linear": 1}[kind]
        if len(ts) <= k:
            k = 1
        spline = make_interp_spline(ts, areas, k=k)
        anti = spline.antiderivative()
        return cls(func=lambda t: float(spline(t)), t_max=float(ts[-1]),
                   volume=lambda t: float(anti(t) - anti(0.0)), spline=spline, label=label)

    @classmethod
    def model(cls, m: ModelGeometry, base_area: float, t_max: float):
        return cls(func=lambda t: model_area(m, base_area, t), t_max=float(t_max),
                   volume=lambda t: model_volume(m, base_area, t),
                   label=f"model(n={m.n}, beta={m.beta})")

    def _check(self, t):
        if not (0 <= t <= self.t_max * (1 + 1e-14)):
            raise DomainError(f"t={t!r} outside history domain [0, {self.t_max}]")

    def __call__(self, t: float) -> float:
        self._check(t)
        return float(self.func(t))

    def window_volume(self, a: float, b: float) -> float:
        """``int_a^b |S_s| ds`` computed directly, without differencing volumes."""
        self._check(a)
        self._check(b)
        if self.spline is not None:
            return float(self.spline.integrate(a, b))
        return adaptive_simpson(self.func, a, b)


def omega_volume(history: AreaHistory, t: float) -> float:
    """``|Omega_t| = int_0^t |S_s| ds``; closed form when the history carries one."""
    history._check(t)
    if history.volume is not None:
        return float(history.volume(t))
    return adaptive_simpson(history.func, 0.0, t)


@dataclass
class GeneralizedAreaEstimate:
    """Finite surrogate for ``limsup_{h->0+} (|Omega_T| - |Omega_{T-h}|)/h``.

    ``estimate`` is the largest quotient over the last ``tail_fraction``
    of the geometric schedule.  ``clipped`` records windows that would
    start before ``t = 0`` and were replaced by ``[0, h]``; ``truncated``
    records that the schedule ran below resolvable widths.
    """

    T: float
    h_schedule: list
    quotients: list
    estimate: float
    tail_fraction: float
    truncated: bool = False
    clipped: bool = False

    @property
    def tail_start(self) -> int:
        return len(self.quotients) - math.ceil(self.tail_fraction * len(self.quotients))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["h", "quotient"])
        for h, q in zip(self.h_schedule, self.quotients):
            writer.writerow([repr(h), repr(q)])
        return buf.getvalue()


def _schedule(T, h0, ratio, count, tail_fraction):
    if not (0 < ratio < 1):
        raise DomainError(f"ratio must lie in (0, 1), got {ratio!r}")
    if int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    if not (0 < tail_fraction <= 1):
        raise DomainError(f"tail_fraction must lie in (0, 1], got {tail_fraction!r}")
    if h0 is None:
        h0 = T / 10 if T > 0 else 0.1
    if not h0 > 0:
        raise DomainError(f"h0 must be > 0, got {h0!r}")
    floor = 1e3 * np.finfo(float).eps * max(T, 1.0)
    hs = [h0 * ratio ** k for k in range(int(count))]
    kept = [h for h in hs if h >= floor]
    return kept, len(kept) < len(hs)


def generalized_area(history: AreaHistory, T: float, h0: Optional[float] = None,
                     ratio: float = 0.5, count: int = 20,
                     tail_fraction: float = 0.5) -> GeneralizedAreaEstimate:
    """Estimate the generalized area of the time-``T`` slice.

    Quotients ``(1/h_k) int_{T-h_k}^T |S_s| ds`` for ``h_k = h0 ratio^k``
    (default ``h0 = T/10``).  A window reaching below 0 is clipped to
    ``[0, h_k]``; at ``T = 0`` every window is, and the estimate
    tends to ``|S_0|``.
    """
    history._check(T)
    hs, truncated = _schedule(T, h0, ratio, count, tail_fraction)
    if truncated:
        warnings.warn("generalized_area: schedule truncated below resolvable window width",
                      RuntimeWarning, stacklevel=2)
    if not hs:
        raise DomainError("no resolvable window widths in the schedule")
    quotients, clipped = [], False
    for h in hs:
        if T - h >= 0:
            a, b = T - h, T
        else:
            clipped = True
            a, b = 0.0, min(h, history.t_max)
        quotients.append(history.window_volume(a, b) / (b - a))
    n_tail = math.ceil(tail_fraction * len(quotients))
    estimate = max(quotients[-n_tail:])
    return GeneralizedAreaEstimate(T=T, h_schedule=hs, quotients=quotients, estimate=estimate,
                                   tail_fraction=tail_fraction, truncated=truncated,
                                   clipped=clipped)


def left_limsup(history: AreaHistory, T: float, h0: Optional[float] = None,
                ratio: float = 0.5, count: int = 20, tail_fraction: float = 0.5) -> float:
    """Surrogate for ``limsup_{t->T-} |S_t|`` on the same schedule as :func:`generalized_area`."""
    history._check(T)
    if T == 0:
        return history(0.0)
    hs, _ = _schedule(T, h0, ratio, count, tail_fraction)
    values = [history(T - h) for h in hs if T - h >= 0]
    if not values:
        return history(T)
    n_tail = math.ceil(tail_fraction * len(values))
    return max(values[-n_tail:])


@dataclass(frozen=True)
class SandwichVerdict:
    lower_margin: float
    upper_margin: float
    passed: bool


def sandwich_check(s_T: float, est: GeneralizedAreaEstimate, left_limsup: float,
                   tol: float) -> SandwichVerdict:
    """Check ``|S_T| <= a(Sigma_T) <= limsup_{t->T-} |S_t|`` up to ``tol``.

    Margins are ``estimate - s_T`` and ``left_limsup - estimate``; both are
    non-negative when the inequalities hold exactly.
    """
    for name, v in (("s_T", s_T), ("estimate", est.estimate), ("left_limsup", left_limsup)):
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")
    lower = est.estimate - s_T
    upper = left_limsup - est.estimate
    return SandwichVerdict(lower, upper, lower >= -tol and upper >= -tol)
