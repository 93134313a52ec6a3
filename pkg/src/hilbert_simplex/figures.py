"""Static SVG figures of the 2-simplex: ball boundaries and distance profiles."""

from __future__ import annotations

import numpy as np
from contourpy import contour_generator

from .errors import GeometryError
from .simplex_core import make_simplex_point

# triangle vertices for (x0, x1, x2)
VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])
DEFAULT_CONTOUR_STEP = 0.2


def to_plane(P) -> np.ndarray:
    """Barycentric coordinates to points in the equilateral triangle."""
    return np.asarray(P, dtype=float) @ VERTICES


def from_plane(XY) -> np.ndarray:
    XY = np.asarray(XY, dtype=float)
    T = np.column_stack([VERTICES[1] - VERTICES[0], VERTICES[2] - VERTICES[0]])
    l12 = np.linalg.solve(T, (XY - VERTICES[0]).T).T
    return np.column_stack([1.0 - l12.sum(axis=1), l12])


def _exit_time(c: np.ndarray, u: np.ndarray) -> float:
    neg = u < 0
    return float(np.min(-c[neg] / u[neg]))


def ball_boundary(center, radius: float, rho, n_dirs: int = 720, tol: float = 1e-12) -> np.ndarray:
    """Boundary of ``{x : rho(center, x) <= radius}`` by radial bisection.

    For each of ``n_dirs`` directions in the tangent plane the distance along
    the ray is bisected for the radius; rays that reach the simplex boundary
    first are clipped just inside it.  Returns ``(n_dirs, 3)`` points.
    """
    c = make_simplex_point(center).coords
    if c.size != 3:
        raise GeometryError("figures are drawn in the 2-simplex only")
    e1 = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
    e2 = np.array([1.0, 1.0, -2.0]) / np.sqrt(6.0)
    out = np.empty((n_dirs, 3))
    for k, th in enumerate(np.linspace(0.0, 2 * np.pi, n_dirs, endpoint=False)):
        u = np.cos(th) * e1 + np.sin(th) * e2
        hi = _exit_time(c, u) * (1.0 - 1e-9)
        if float(rho(c, c + hi * u)) <= radius:
            out[k] = c + hi * u
            continue
        lo = 0.0
        while hi - lo > tol * max(hi, 1.0):
            mid = 0.5 * (lo + hi)
            if float(rho(c, c + mid * u)) <= radius:
                lo = mid
            else:
                hi = mid
        out[k] = c + 0.5 * (lo + hi) * u
    return out


def count_segments(polygon, angle_tol: float = 1e-3) -> int:
    """Number of straight sides of a closed sampled polygon.

    Consecutive edges whose direction stays within ``angle_tol`` of the
    current run are merged.  A single edge cutting across a corner between
    two runs is not counted as a side.
    """
    P = to_plane(polygon) if np.shape(polygon)[-1] == 3 else np.asarray(polygon, dtype=float)
    E = np.roll(P, -1, axis=0) - P
    ang = np.arctan2(E[:, 1], E[:, 0])
    turns = np.abs(np.angle(np.exp(1j * (np.roll(ang, -1) - ang))))
    breaks = np.flatnonzero(turns > angle_tol)
    if breaks.size == 0:
        return 1
    # run lengths between consecutive breaks, cyclically
    lengths = np.diff(np.concatenate([breaks, [breaks[0] + len(P)]]))
    return int(np.count_nonzero(lengths > 1))


def profile_grid(reference, rho, resolution: int = 200):
    """Distance field ``rho(reference, x)`` on a grid over the triangle.

    Grid nodes outside the open simplex are masked (``nan``).
    """
    ref = make_simplex_point(reference).coords
    xs = np.linspace(0.0, 1.0, resolution)
    ys = np.linspace(0.0, VERTICES[2, 1], resolution)
    X, Y = np.meshgrid(xs, ys)
    bary = from_plane(np.column_stack([X.ravel(), Y.ravel()]))
    inside = np.all(bary > 1e-9, axis=1)
    Z = np.full(bary.shape[0], np.nan)
    Z[inside] = np.asarray(rho(bary[inside], ref), dtype=float)
    return X, Y, Z.reshape(X.shape)


def contour_levels(Z, step: float = DEFAULT_CONTOUR_STEP) -> np.ndarray:
    top = np.nanmax(Z)
    return np.arange(step, top, step)


def contour_lines(X, Y, Z, levels):
    gen = contour_generator(X, Y, np.ma.masked_invalid(Z))
    return [(float(lv), gen.lines(lv)) for lv in levels]


# ---------------------------------------------------------------------------
# SVG output

def _svg_coords(xy, size, pad):
    s = size - 2 * pad
    return pad + xy[:, 0] * s, size - pad - xy[:, 1] * s


def _path(xy, size, pad, closed=False) -> str:
    x, y = _svg_coords(xy, size, pad)
    pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))
    return f"M {pts}{' Z' if closed else ''}"


def _frame(size, pad) -> list[str]:
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">',
            f'<path d="{_path(VERTICES, size, pad, closed=True)}" fill="none" stroke="black" '
            f'stroke-width="1.5"/>']


def ball_svg(boundary, center, size: int = 400, pad: int = 20, title: str = "") -> str:
    parts = _frame(size, pad)
    if title:
        parts.append(f"<title>{title}</title>")
    parts.append(f'<path d="{_path(to_plane(boundary), size, pad, closed=True)}" '
                 f'fill="#4a90d9" fill-opacity="0.3" stroke="#1b4f8a" stroke-width="1"/>')
    cx, cy = _svg_coords(to_plane(np.atleast_2d(center)), size, pad)
    parts.append(f'<circle cx="{cx[0]:.3f}" cy="{cy[0]:.3f}" r="3" fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def profile_svg(reference, rho, resolution: int = 200, step: float = DEFAULT_CONTOUR_STEP,
                size: int = 400, pad: int = 20, title: str = "") -> str:
    """Equal-distance contours of ``rho(reference, .)`` every ``step``."""
    X, Y, Z = profile_grid(reference, rho, resolution)
    parts = _frame(size, pad)
    if title:
        parts.append(f"<title>{title}</title>")
    levels = contour_levels(Z, step)
    top = levels[-1] if levels.size else 1.0
    for lv, lines in contour_lines(X, Y, Z, levels):
        shade = int(200 * (1.0 - lv / top))
        for seg in lines:
            if len(seg) > 1:
                parts.append(f'<path d="{_path(seg, size, pad)}" fill="none" '
                             f'stroke="rgb({shade},{shade},255)" stroke-width="0.8" '
                             f'data-level="{lv:.9g}"/>')
    cx, cy = _svg_coords(to_plane(np.atleast_2d(make_simplex_point(reference).coords)), size, pad)
    parts.append(f'<circle cx="{cx[0]:.3f}" cy="{cy[0]:.3f}" r="3" fill="red"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
