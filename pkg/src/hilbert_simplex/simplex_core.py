"""Points of the open probability simplex, the positive cone and the
zero-sum log space, plus the isometry between the simplex and that space.

All point types wrap a read-only float64 array and expose ``__array__`` so
they can be handed straight to the distance functions.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionTooSmall,
    GeometryError,
    NonPositiveCoordinate,
    NotZeroSum,
    OverflowGuard,
)

#: Coordinates at or below this value are considered on the boundary.
MIN_COORD = 1e-300


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


class _Point:
    __slots__ = ("coords",)

    def __init__(self, coords: np.ndarray):
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.coords
        return self.coords.astype(dtype)

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords.tolist())

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return bool(np.array_equal(self.coords, other.coords))

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.coords.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{x:.6g}" for x in self.coords)
        return f"{type(self).__name__}({body})"

    @property
    def dim(self) -> int:
        return len(self.coords) - 1


def _check_positive(arr: np.ndarray, min_len: int) -> None:
    if arr.ndim != 1:
        raise GeometryError(f"expected a flat vector, got shape {arr.shape}")
    if arr.size < min_len:
        raise DimensionTooSmall(f"need at least {min_len} coordinates, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise NonPositiveCoordinate("coordinates must be finite")
    bad = np.flatnonzero(arr <= MIN_COORD)
    if bad.size:
        raise NonPositiveCoordinate(
            f"coordinate {int(bad[0])} = {arr[bad[0]]!r} is not strictly positive"
        )


class SimplexPoint(_Point):
    """Strictly positive probability vector with ``d + 1`` coordinates."""

    __slots__ = ()

    def __init__(self, raw: Iterable[float]):
        arr = np.asarray(raw, dtype=float)
        _check_positive(arr, 2)
        super().__init__(_frozen(arr / arr.sum()))


class ConeVector(_Point):
    """Strictly positive, unnormalized measure."""

    __slots__ = ()

    def __init__(self, raw: Iterable[float]):
        arr = np.asarray(raw, dtype=float)
        _check_positive(arr, 1)
        super().__init__(_frozen(arr))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def normalize(self) -> SimplexPoint:
        return SimplexPoint(self.coords)


class NormedPoint(_Point):
    """Zero-sum vector of the normed space isometric to the open simplex."""

    __slots__ = ()

    def __init__(self, raw: Iterable[float], atol: float = 1e-10):
        arr = np.asarray(raw, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise DimensionTooSmall("a normed point needs at least 2 coordinates")
        if not np.all(np.isfinite(arr)):
            raise GeometryError("coordinates must be finite")
        total = float(arr.sum())
        if abs(total) > atol * max(1.0, float(np.abs(arr).max())):
            raise NotZeroSum(f"coordinates sum to {total!r}, expected 0")
        super().__init__(_frozen(arr))


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_iter: int = 100

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise GeometryError("tolerances must be positive")
        if self.max_iter < 1:
            raise GeometryError("max_iter must be a positive integer")


def make_simplex_point(raw: Sequence[float]) -> SimplexPoint:
    """Validate ``raw`` and rescale it onto the simplex.

    >>> make_simplex_point([2, 6])
    SimplexPoint(0.25, 0.75)
    """
    return SimplexPoint(raw)


def simplex_to_normed(p) -> NormedPoint:
    """Centered log map ``v_i = log p_i - mean_j log p_j``."""
    logs = np.log(np.asarray(p, dtype=float))
    v = logs - logs.mean()
    return NormedPoint(v - v.mean())


def normed_to_simplex(v) -> SimplexPoint:
    """Softmax, the inverse of :func:`simplex_to_normed`."""
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise OverflowGuard("non-finite coordinate in normed point")
    w = np.exp(arr - arr.max())
    w /= w.sum()
    if w.min() <= MIN_COORD:
        raise OverflowGuard("coordinate spread too large: softmax underflows to 0")
    return SimplexPoint(w)


def hilbert_norm(v):
    """Variation norm: largest coordinate minus smallest (along the last axis)."""
    arr = np.asarray(v, dtype=float)
    out = arr.max(axis=-1) - arr.min(axis=-1)
    return float(out) if out.ndim == 0 else out


def natural_params(p) -> np.ndarray:
    """Natural parameters ``log(p_i / p_0)`` for ``i = 1..d``."""
    arr = np.asarray(p, dtype=float)
    return np.log(arr[1:]) - np.log(arr[0])


def from_natural_params(theta) -> SimplexPoint:
    theta = np.concatenate([[0.0], np.asarray(theta, dtype=float)])
    return normed_to_simplex(theta - theta.mean())


# -- serialization ---------------------------------------------------------


def _parse_rows(rows: Iterable[Sequence[str]]) -> list[list[float]]:
    out = []
    for lineno, row in enumerate(rows, start=1):
        cells = [c.strip() for c in row if c.strip() != ""]
        if not cells:
            continue
        try:
            out.append([float(c) for c in cells])
        except ValueError as exc:
            raise GeometryError(f"row {lineno}: {exc}") from None
    return out


def _validated(rows: list[list[float]], kind: type) -> list:
    points = []
    for i, row in enumerate(rows, start=1):
        try:
            points.append(kind(row))
        except GeometryError as exc:
            raise type(exc)(f"row {i}: {exc}") from None
    if points:
        width = len(points[0])
        for i, p in enumerate(points, start=1):
            if len(p) != width:
                raise GeometryError(f"row {i}: expected {width} coordinates, got {len(p)}")
    return points


def read_points_csv(source, kind: type = SimplexPoint) -> list:
    """Read one point per CSV row. ``source`` is a path or a text stream."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            rows = _parse_rows(csv.reader(fh))
    else:
        rows = _parse_rows(csv.reader(source))
    return _validated(rows, kind)


def read_points_json(source, kind: type = SimplexPoint) -> list:
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text())
    else:
        data = json.load(source)
    if isinstance(data, dict):
        data = data["points"]
    return _validated([list(map(float, r)) for r in data], kind)


def format_number(x: float) -> str:
    return f"{x:.9g}"


def points_to_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for p in points:
        writer.writerow([format_number(x) for x in np.asarray(p, dtype=float)])
    return buf.getvalue()


def write_points_csv(path, points) -> None:
    Path(path).write_text(points_to_csv(points))


def write_points_json(path, points) -> None:
    data = [np.asarray(p, dtype=float).tolist() for p in points]
    Path(path).write_text(json.dumps(data))
