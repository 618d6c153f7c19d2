"""Convex planar domains and the ray/chord queries used by the RWPM integrals.

Both domains are centred on the origin.  A rectangle spans ``[-a, a] x [-b, b]``
and a disk has radius ``R``.  All ray queries use closed-form slab or quadratic
intersections so they can sit inside vectorised integrand loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DomainError

#: Geometric tolerance, in units of the domain diameter.
GEOM_TOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class ChordSplit(NamedTuple):
    """Lengths of the two pieces a point cuts its chord into.

    ``a1`` runs forward along ``(cos phi, sin phi)``, ``a2`` backward.
    """

    a1: float
    a2: float


@dataclass(frozen=True)
class Rectangle:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("rectangle half-sides must be finite")
        if not self.a >= self.b > 0:
            raise ValueError(f"rectangle needs a >= b > 0, got a={self.a}, b={self.b}")

    @property
    def area(self) -> float:
        return 4.0 * self.a * self.b

    @property
    def diameter(self) -> float:
        return 2.0 * math.hypot(self.a, self.b)

    @property
    def corners(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, b], [-a, b], [-a, -b], [a, -b]])


@dataclass(frozen=True)
class Disk:
    R: float

    def __post_init__(self):
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValueError(f"disk radius must be positive, got {self.R}")

    @property
    def area(self) -> float:
        return math.pi * self.R**2

    @property
    def diameter(self) -> float:
        return 2.0 * self.R


ConvexDomain = Union[Rectangle, Disk]


def area(domain: ConvexDomain) -> float:
    return domain.area


def contains(domain: ConvexDomain, x, y, tol: float = GEOM_TOL):
    """Closed-domain membership, vectorised over ``x`` and ``y``.

    Points within ``tol * diameter`` of the boundary count as inside.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slack = tol * domain.diameter
    if isinstance(domain, Rectangle):
        inside = (np.abs(x) <= domain.a + slack) & (np.abs(y) <= domain.b + slack)
    else:
        inside = np.hypot(x, y) <= domain.R + slack
    return inside if inside.ndim else bool(inside)


def _require_inside(domain, x, y):
    if not np.all(contains(domain, x, y)):
        raise DomainError(f"point(s) outside {domain!r}")


def ray_exit(domain: ConvexDomain, x, y, dx, dy):
    """Distance from ``(x, y)`` to the boundary along unit direction ``(dx, dy)``.

    Vectorised and unchecked: callers guarantee the points are inside.  Points
    sitting on the boundary and looking outward give 0.
    """
    x, y, dx, dy = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, dx, dy)))
    if isinstance(domain, Rectangle):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            tx = np.where(dx > 0, (domain.a - x) / dx, np.where(dx < 0, (-domain.a - x) / dx, np.inf))
            ty = np.where(dy > 0, (domain.b - y) / dy, np.where(dy < 0, (-domain.b - y) / dy, np.inf))
        t = np.minimum(tx, ty)
    else:
        bdot = x * dx + y * dy
        c = x * x + y * y - domain.R**2
        disc = np.sqrt(np.maximum(bdot * bdot - c, 0.0))
        # two algebraically equal forms; pick the one without cancellation
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(bdot <= 0, disc - bdot, -c / (bdot + disc))
        t = np.where(np.isfinite(t), t, 0.0)
    return np.maximum(t, 0.0)


def boundary_distance(domain: ConvexDomain, p, direction) -> float:
    """Smallest ``t >= 0`` with ``p + t * direction`` on the boundary."""
    px, py = p
    dx, dy = direction
    norm = math.hypot(dx, dy)
    if not math.isclose(norm, 1.0, rel_tol=1e-9):
        raise ValueError(f"direction must be a unit vector, |d| = {norm}")
    _require_inside(domain, px, py)
    return float(ray_exit(domain, px, py, dx, dy))


def chord_split(domain: ConvexDomain, p, phi: float) -> ChordSplit:
    """Split of the chord through ``p`` with orientation ``phi`` into ``(a1, a2)``."""
    px, py = p
    _require_inside(domain, px, py)
    c, s = math.cos(phi), math.sin(phi)
    return ChordSplit(float(ray_exit(domain, px, py, c, s)), float(ray_exit(domain, px, py, -c, -s)))


def chord_lengths(domain: ConvexDomain, x, y, phi):
    """Vectorised ``(a1, a2)`` for arrays of points and angles."""
    c, s = np.cos(phi), np.sin(phi)
    return ray_exit(domain, x, y, c, s), ray_exit(domain, x, y, -c, -s)


def corner_angles(domain: ConvexDomain, x: float, y: float) -> np.ndarray:
    """Sorted directions in ``[0, 2*pi)`` from ``(x, y)`` to the rectangle corners.

    Ray-exit distances are only piecewise smooth in the angle; these are the
    breakpoints.  Disks have none.
    """
    if isinstance(domain, Disk):
        return np.empty(0)
    cx, cy = domain.corners.T
    ang = np.mod(np.arctan2(cy - y, cx - x), 2 * np.pi)
    return np.sort(ang)


def angular_breaks(domain: ConvexDomain, x: float, y: float) -> np.ndarray:
    """Directions where the ray-exit distance from ``(x, y)`` is not smooth.

    Corner directions for a rectangle.  For a disk only a boundary point has
    any: the two tangent directions, beyond which rays leave at once.
    """
    if isinstance(domain, Rectangle):
        return corner_angles(domain, x, y)
    if math.hypot(x, y) < domain.R * (1 - 1e-9):
        return np.empty(0)
    base = math.atan2(y, x)
    return np.sort(np.mod([base + 0.5 * math.pi, base - 0.5 * math.pi], 2 * np.pi))


def _segment_area_below(u, r):
    """``int_{-r}^{u} sqrt(r^2 - X^2) dX`` with ``u`` clipped to ``[-r, r]``."""
    u = np.clip(u, -r, r)
    return 0.5 * (u * np.sqrt(np.maximum(r * r - u * u, 0.0)) + r * r * np.arcsin(u / r)) + 0.25 * np.pi * r * r


def _disk_quadrant_area(x, y, r):
    # area of {X <= x, Y <= y} inside the disk of radius r centred at the origin
    y = np.clip(y, -r, r)
    w = np.sqrt(np.maximum(r * r - y * y, 0.0))
    xc = np.clip(x, -r, r)
    m = np.clip(xc, -w, w)
    inner = _segment_area_below(m, r) - _segment_area_below(-w, r)
    return np.where(y >= 0, 2.0 * _segment_area_below(xc, r) - inner + y * (m + w), inner + y * (m + w))


def disk_rectangle_overlap(cx, cy, r, x0, x1, y0, y1):
    """Exact area of the disk ``|p - c| <= r`` intersected with ``[x0,x1] x [y0,y1]``.

    Inclusion-exclusion over the four corner quadrants, each a closed-form
    circular-segment area.  Vectorised over the centre coordinates.
    """
    cx = np.asarray(cx, dtype=float)
    cy = np.asarray(cy, dtype=float)
    X0, X1, Y0, Y1 = x0 - cx, x1 - cx, y0 - cy, y1 - cy
    out = (
        _disk_quadrant_area(X1, Y1, r)
        - _disk_quadrant_area(X0, Y1, r)
        - _disk_quadrant_area(X1, Y0, r)
        + _disk_quadrant_area(X0, Y0, r)
    )
    return np.maximum(out, 0.0)


def disk_domain_overlap(domain: ConvexDomain, cx, cy, r):
    """Area of ``domain`` within distance ``r`` of ``(cx, cy)``."""
    if isinstance(domain, Rectangle):
        return disk_rectangle_overlap(cx, cy, r, -domain.a, domain.a, -domain.b, domain.b)
    return lens_area(np.hypot(cx, cy), r, domain.R)


def lens_area(d, r1, r2):
    """Intersection area of two disks with radii ``r1``, ``r2`` and centre distance ``d``."""
    d = np.asarray(d, dtype=float)
    small, big = min(r1, r2), max(r1, r2)
    with np.errstate(divide="ignore", invalid="ignore"):
        c1 = np.clip((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0)
        c2 = np.clip((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0)
        kite = 0.5 * np.sqrt(np.maximum((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2), 0.0))
        partial = r1 * r1 * np.arccos(c1) + r2 * r2 * np.arccos(c2) - kite
    out = np.where(d >= r1 + r2, 0.0, np.where(d <= big - small, np.pi * small * small, partial))
    return out if out.ndim else float(out)
