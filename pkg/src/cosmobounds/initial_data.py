"""Discretized initial data sets: weighted cells carrying H and |K|.

Fields are piecewise constant on cells and every integral against the
induced measure becomes a weighted cell sum.  Sums go through
:func:`math.fsum`, which is correctly rounded and independent of cell
order, so results are reproducible bit for bit.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Optional, TextIO

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "Cell",
    "InitialDataSet",
    "load_initial_data",
    "initial_data_from_dict",
    "h_plus",
    "lp_norm",
    "integrate",
    "restrict",
    "FIELDS",
]

CONSISTENCY_RTOL = 1e-9
FIELDS = ("H", "H+", "K")

_N_HEADER = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


@dataclass(frozen=True)
class Cell:
    id: str
    weight: float
    mean_curvature: float
    k_norm: Optional[float] = None


def _check_cell(cell: Cell, n: int, where: str) -> None:
    if not (math.isfinite(cell.weight) and cell.weight > 0):
        raise ValidationError(f"{where}: weight must be finite and > 0, got {cell.weight!r}")
    if not math.isfinite(cell.mean_curvature):
        raise ValidationError(f"{where}: H must be finite, got {cell.mean_curvature!r}")
    if cell.k_norm is None:
        return
    if not (math.isfinite(cell.k_norm) and cell.k_norm >= 0):
        raise ValidationError(f"{where}: K must be finite and >= 0, got {cell.k_norm!r}")
    # |H| <= n |K| since H is the trace of K
    limit = n * cell.k_norm
    if abs(cell.mean_curvature) > limit * (1 + CONSISTENCY_RTOL) + 1e-300:
        raise ValidationError(
            f"{where}: inconsistent curvature, |H|={abs(cell.mean_curvature)!r} "
            f"exceeds n*|K|={limit!r}"
        )


@dataclass(frozen=True)
class InitialDataSet:
    """A finite collection of cells on an ``n``-dimensional hypersurface.

    Construction validates every cell and the uniqueness of ids.  An empty
    cell list is allowed so that restrictions to empty subsets behave
    like zero-area sets; loaders reject empty files.
    """

    n: int
    cells: tuple = ()
    label: str = ""

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"dimension n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "cells", tuple(self.cells))
        seen = set()
        for cell in self.cells:
            if cell.id in seen:
                raise ValidationError(f"duplicate cell id {cell.id!r}")
            seen.add(cell.id)
            _check_cell(cell, self.n, f"cell {cell.id!r}")

    def __len__(self):
        return len(self.cells)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.cells], dtype=float)

    @cached_property
    def mean_curvature(self) -> np.ndarray:
        return np.array([c.mean_curvature for c in self.cells], dtype=float)

    @property
    def has_k(self) -> bool:
        return all(c.k_norm is not None for c in self.cells)

    @cached_property
    def k_norm(self) -> np.ndarray:
        if not self.has_k:
            raise ValidationError(f"data set {self.label!r} does not carry |K| on every cell")
        return np.array([c.k_norm for c in self.cells], dtype=float)

    @cached_property
    def total_area(self) -> float:
        return math.fsum(self.weights)

    @property
    def ids(self) -> list:
        return [c.id for c in self.cells]

    def field(self, name: str) -> np.ndarray:
        """Per-cell values of ``"H"``, ``"H+"`` or ``"K"``."""
        if name == "H":
            return self.mean_curvature
        if name == "H+":
            return h_plus(self)
        if name == "K":
            return self.k_norm
        raise DomainError(f"unknown field {name!r}; expected one of {FIELDS}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "label": self.label,
            "cells": [
                {"id": c.id, "weight": c.weight, "H": c.mean_curvature, "K": c.k_norm}
                for c in self.cells
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# n={self.n}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "weight", "H", "K"])
        for c in self.cells:
            writer.writerow([c.id, repr(c.weight), repr(c.mean_curvature),
                             "" if c.k_norm is None else repr(c.k_norm)])
        return buf.getvalue()


def initial_data_from_dict(doc: dict) -> InitialDataSet:
    """Inverse of :meth:`InitialDataSet.to_dict`."""
    try:
        n = int(doc["n"])
        cells = [
            Cell(str(c["id"]), float(c["weight"]), float(c["H"]),
                 None if c.get("K") is None else float(c["K"]))
            for c in doc["cells"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed initial data document: {exc}") from exc
    return InitialDataSet(n=n, cells=cells, label=str(doc.get("label", "")))


def _parse_float(text: str, column: str, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"row {lineno}: column {column} is not a number: {text!r}") from None


def load_initial_data(source: TextIO | str, n: Optional[int] = None, label: str = "") -> InitialDataSet:
    """Read an initial data set from CSV text.

    The first non-comment line is the header ``id,weight,H[,K]``.  A
    comment line ``# n=<int>`` supplies the dimension unless ``n`` is
    given explicitly, in which case the two must agree.  A blank ``K``
    entry means |K| is unknown on that cell.

    Errors name the 1-based line number of the offending row.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    file_n = None
    rows = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _N_HEADER.match(line)
            if m:
                file_n = int(m.group(1))
            continue
        rows.append((lineno, raw))

    if n is None:
        n = file_n
    elif file_n is not None and file_n != n:
        raise ValidationError(f"dimension mismatch: file declares n={file_n}, caller gave n={n}")
    if n is None:
        raise ValidationError("dimension unknown: add a '# n=<int>' line or pass n explicitly")
    if not rows:
        raise ValidationError("no header line found")

    header_line, header_raw = rows[0]
    header = [h.strip() for h in next(csv.reader([header_raw]))]
    if header[:3] != ["id", "weight", "H"] or len(header) > 4 or (len(header) == 4 and header[3] != "K"):
        raise ValidationError(f"row {header_line}: expected header 'id,weight,H[,K]', got {header_raw.strip()!r}")

    cells = []
    seen = set()
    for lineno, raw in rows[1:]:
        values = [v.strip() for v in next(csv.reader([raw]))]
        if len(values) < 3 or len(values) > len(header):
            raise ValidationError(f"row {lineno}: expected {len(header)} columns, got {len(values)}")
        cid = values[0]
        if not cid:
            raise ValidationError(f"row {lineno}: empty cell id")
        if cid in seen:
            raise ValidationError(f"row {lineno}: duplicate cell id {cid!r}")
        seen.add(cid)
        k = None
        if len(values) == 4 and values[3] != "":
            k = _parse_float(values[3], "K", lineno)
        cell = Cell(cid, _parse_float(values[1], "weight", lineno),
                    _parse_float(values[2], "H", lineno), k)
        _check_cell(cell, n, f"row {lineno}")
        cells.append(cell)

    if not cells:
        raise ValidationError("data set has no cells")
    data = InitialDataSet(n=n, cells=cells, label=label)
    if not (math.isfinite(data.total_area) and data.total_area > 0):
        raise ValidationError(f"total area must be finite and > 0, got {data.total_area!r}")
    return data


def h_plus(data: InitialDataSet) -> np.ndarray:
    """Positive part ``max(H, 0)`` per cell."""
    return np.maximum(data.mean_curvature, 0.0)


def integrate(data: InitialDataSet, values: Iterable[float]) -> float:
    """Integral of a per-cell field against the cell weights."""
    values = np.asarray(values, dtype=float)
    if values.shape != data.weights.shape:
        raise DomainError(f"field has shape {values.shape}, data set has {len(data)} cells")
    return math.fsum(values * data.weights)


def lp_norm(data: InitialDataSet, field: str, p: float) -> float:
    """``(sum |f|^p w)^(1/p)`` for ``field`` in ``{"H", "H+", "K"}``."""
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p!r}")
    values = np.abs(data.field(field))
    return integrate(data, values ** p) ** (1.0 / p)


def restrict(data: InitialDataSet, selector: Callable[[str], bool] | Iterable[str]) -> InitialDataSet:
    """Sub-data-set of the cells whose id is selected.

    ``selector`` is a predicate on cell ids or a collection of ids.
    """
    if not callable(selector):
        chosen = set(selector)
        selector = chosen.__contains__
    cells = [c for c in data.cells if selector(c.id)]
    return InitialDataSet(n=data.n, cells=cells, label=data.label)
