"""Model warped-product spacetimes and their curvature invariants.

The model spacetime with initial mean curvature ``beta`` is
``[0, inf) x H^n`` with metric ``-dt^2 + (t + n/beta)^2 h_{-1}``.  Its
constant-time slices are umbilic with mean curvature ``n / a(t)`` and the
metric is Ricci-flat, which makes it the equality case of every area and
volume estimate in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateMetricError, DomainError

__all__ = [
    "ModelGeometry",
    "WarpedInvariants",
    "scale_factor",
    "model_mean_curvature",
    "model_area",
    "model_volume",
    "warped_invariants",
    "power_mean_integral",
]

# Below this |x| the closed form of power_mean_integral divides by a tiny
# number; switch to the truncated series.
SERIES_THRESHOLD = 1e-8


@dataclass(frozen=True)
class ModelGeometry:
    """Model spacetime of dimension ``n + 1`` with initial mean curvature ``beta``.

    ``beta = 0`` is the static limit: the scale factor is constant and
    normalized to 1.
    """

    n: int
    beta: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension n must be an integer >= 2, got {self.n!r}")
        if not math.isfinite(self.beta) or self.beta < 0:
            raise DomainError(f"beta must be finite and >= 0, got {self.beta!r}")


@dataclass(frozen=True)
class WarpedInvariants:
    ric_tt: float
    mean_curvature: float
    ric_spatial_coeff: float


def _check_time(t: float, name: str = "t") -> None:
    if not t >= 0:
        raise DomainError(f"{name} must be >= 0, got {t!r}")


def power_mean_integral(x: float, n: int) -> float:
    """Return ``int_0^1 (1 + x u)^n du = ((1+x)^(n+1) - 1) / ((n+1) x)``.

    Valid for ``x >= -1``.  For ``|x| < 1e-8`` a four-term Taylor series
    is used instead of the closed form.
    """
    if x < -1:
        raise DomainError(f"power_mean_integral needs x >= -1, got {x!r}")
    if abs(x) < SERIES_THRESHOLD:
        return (1.0 + n * x / 2.0 + n * (n - 1) * x * x / 6.0
                + n * (n - 1) * (n - 2) * x ** 3 / 24.0)
    if x == -1:
        return 1.0 / (n + 1)
    # expm1/log1p avoid the cancellation in (1+x)^(n+1) - 1 for small x
    return math.expm1((n + 1) * math.log1p(x)) / ((n + 1) * x)


def scale_factor(m: ModelGeometry, t: float) -> float:
    """Scale factor ``a(t) = t + n/beta`` (or 1 in the static limit)."""
    _check_time(t)
    if m.beta == 0:
        return 1.0
    return t + m.n / m.beta


def model_mean_curvature(m: ModelGeometry, t: float) -> float:
    """Mean curvature ``n / a(t)`` of the time-``t`` slice (0 when static)."""
    _check_time(t)
    if m.beta == 0:
        return 0.0
    return m.n / scale_factor(m, t)


def model_area(m: ModelGeometry, base_area: float, t: float) -> float:
    """Area ``|A| (1 + beta t / n)^n`` of the time-``t`` evolution of ``A``."""
    _check_time(t)
    if not base_area >= 0:
        raise DomainError(f"base_area must be >= 0, got {base_area!r}")
    return base_area * (1.0 + m.beta * t / m.n) ** m.n


def model_volume(m: ModelGeometry, base_area: float, t: float) -> float:
    """Spacetime volume swept by ``A`` between times 0 and ``t``."""
    _check_time(t)
    if not base_area >= 0:
        raise DomainError(f"base_area must be >= 0, got {base_area!r}")
    return base_area * t * power_mean_integral(m.beta * t / m.n, m.n)


def warped_invariants(a: float, da: float, dda: float, n: int, c: int = -1) -> WarpedInvariants:
    """Curvature of ``-dt^2 + a(t)^2 h_c`` from the values ``a, a', a''`` at one time.

    Returns ``Ric(d_t, d_t) = -n a''/a``, the slice mean curvature
    ``n a'/a`` and the coefficient of ``g`` in the spatial Ricci block.
    """
    if c not in (-1, 0, 1):
        raise DomainError(f"curvature constant c must be -1, 0 or 1, got {c!r}")
    if not a > 0:
        raise DegenerateMetricError(f"scale factor must be positive, got a={a!r}")
    hubble = da / a
    return WarpedInvariants(
        ric_tt=-n * dda / a,
        mean_curvature=n * hubble,
        ric_spatial_coeff=(n - 1) * hubble ** 2 + (n - 1) * c / a ** 2 + dda / a,
    )
