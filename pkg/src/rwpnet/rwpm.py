"""Stationary spatial distribution of random-waypoint nodes.

A node is either paused (uniform over the domain) or on a leg; the moving part
has density proportional to the chord moment

    M(p) = int_0^pi a1 a2 (a1 + a2) dphi,

where ``a1``, ``a2`` are the distances from ``p`` to the boundary along a line
of orientation ``phi``.  Normalising by ``lbar * V**2`` (mean leg length times
squared area) gives the mobile pdf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Literal, NamedTuple

import numpy as np
from scipy import special as _special

from .errors import DomainError
from .geometry import ConvexDomain, Disk, Rectangle, chord_lengths, contains, corner_angles
from .numerics import DEFAULT_1D, QuadratureSpec, integrate_1d, integrate_box

PdfKind = Literal["exact", "approximate"]


@dataclass(frozen=True)
class MobilityParams:
    """Speed drawn uniformly on ``[v_min, k * v_min]``, pause uniformly on ``[0, t_max]``."""

    v_min: float
    k: float = 1.0
    t_max: float = 0.0

    def __post_init__(self):
        if not self.v_min > 0:
            raise ValueError("v_min must be positive")
        if not self.k >= 1:
            raise ValueError("speed ratio k must be >= 1")
        if not self.t_max >= 0:
            raise ValueError("t_max must be non-negative")

    @property
    def v_max(self) -> float:
        return self.k * self.v_min


class LegStatistics(NamedTuple):
    mean_leg_length: float
    mean_leg_time: float
    mean_pause_time: float
    pause_probability: float


# ---------------------------------------------------------------------------
# mean leg length


def _rect_chord_power_integral(a, b, phi, power=4):
    """``int L(u)**power du`` over chords of the rectangle with orientation ``phi``.

    The chord length is piecewise linear in the offset ``u``, so a 3-point
    Gauss-Legendre rule per piece is exact for ``power <= 5``.
    """
    e = np.array([math.cos(phi), math.sin(phi)])
    n = np.array([-e[1], e[0]])
    corners = np.array([[a, b], [-a, b], [-a, -b], [a, -b]])
    cuts = np.unique(corners @ n)
    gx, gw = np.polynomial.legendre.leggauss(3)
    lo, hi = cuts[:-1], cuts[1:]
    u = (0.5 * (hi - lo))[:, None] * gx[None, :] + (0.5 * (hi + lo))[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = []
        for half, nk, ek in ((a, n[0], e[0]), (b, n[1], e[1])):
            if abs(ek) < 1e-300:
                t.append((np.full_like(u, -np.inf), np.full_like(u, np.inf)))
                continue
            t1 = (-half - u * nk) / ek
            t2 = (half - u * nk) / ek
            t.append((np.minimum(t1, t2), np.maximum(t1, t2)))
    length = np.maximum(np.minimum(t[0][1], t[1][1]) - np.maximum(t[0][0], t[1][0]), 0.0)
    return float(np.sum((0.5 * (hi - lo))[:, None] * gw[None, :] * length**power))


@lru_cache(maxsize=64)
def mean_leg_length_numeric(domain: ConvexDomain, spec: QuadratureSpec = DEFAULT_1D) -> float:
    """Mean leg length ``(1/V^2) int_V int_0^pi a1 a2 (a1 + a2) dphi dr``.

    The area integral is done chord by chord: along a chord of length ``L`` the
    weight ``a1 a2 (a1 + a2)`` integrates to ``L**4 / 6``.  What remains is an
    adaptive integral over the chord orientation.
    """
    V = domain.area
    if isinstance(domain, Disk):
        R = domain.R
        # L(u) = 2 sqrt(R^2 - u^2) makes L^4 a quartic; 3-point Gauss is exact
        gx, gw = np.polynomial.legendre.leggauss(3)
        per_phi = float(np.sum(R * gw * (2.0 * np.sqrt(R * R - (R * gx) ** 2)) ** 4)) / 6.0
        return per_phi * math.pi / V**2
    a, b = domain.a, domain.b
    diag = math.atan2(b, a)
    res = integrate_1d(lambda phi: _rect_chord_power_integral(a, b, phi) / 6.0, 0.0, math.pi, spec,
                       points=[diag, 0.5 * math.pi, math.pi - diag])
    return res.value / V**2


def mean_leg_length_rect_closed(a: float, b: float) -> float:
    """Closed-form rectangle mean leg length, written exactly as published.

    Known to disagree with :func:`mean_leg_length_numeric`; kept for auditing
    (see :func:`rwpnet.audit.leg_length_report`).
    """
    if not a >= b > 0:
        raise ValueError("need a >= b > 0")
    d = 2.0 * math.sqrt(a * a + b * b)
    return (d / 3.0 + a * a / (6.0 * b) * math.log((d + b) / a) - b * b / (6.0 * a) * math.log((d - a) / b)
            + (a**3 - d**3) / (15.0 * b * b) + (b**3 - d**3) / (15.0 * a * a))


def mean_leg_length_rect_sides(a: float, b: float) -> float:
    """Mean distance between two uniform points of a ``2a x 2b`` rectangle.

    The classical formula in terms of the side lengths ``W = 2a``, ``H = 2b``
    and the diagonal ``d``; an independent check on the chord route.
    """
    W, H = 2.0 * a, 2.0 * b
    d = math.hypot(W, H)
    return ((W**3 / H**2 + H**3 / W**2 + d * (3.0 - W**2 / H**2 - H**2 / W**2)) / 15.0
            + (W**2 / H * math.log((H + d) / W) + H**2 / W * math.log((W + d) / H)) / 6.0)


def _log_ratio_over_km1(k):
    if k == 1.0:
        return 1.0
    return math.log1p(k - 1.0) / (k - 1.0)


def leg_statistics(domain: ConvexDomain, mobility: MobilityParams) -> LegStatistics:
    lbar = mean_leg_length_numeric(domain)
    mean_leg_time = _log_ratio_over_km1(mobility.k) * lbar / mobility.v_min
    mean_pause = 0.5 * mobility.t_max
    total = mean_pause + mean_leg_time
    return LegStatistics(lbar, mean_leg_time, mean_pause, mean_pause / total)


# ---------------------------------------------------------------------------
# chord moment and the numeric mobile pdf


def chord_moment_numeric(domain: ConvexDomain, x, y, spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-11)):
    """``int_0^pi a1 a2 (a1 + a2) dphi`` by adaptive quadrature, vectorised over points.

    Each point's angular range is cut at its corner directions, so every
    Gauss-Kronrod panel sees a smooth integrand.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    x, y = np.broadcast_arrays(x, y)
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    if not np.all(contains(domain, x, y)):
        raise DomainError("chord moment requested outside the domain")
    if isinstance(domain, Disk):
        edges = np.tile([0.0, math.pi], (x.size, 1))
    else:
        br = np.sort(np.mod(np.stack([corner_angles(domain, xi, yi) for xi, yi in zip(x, y)]), math.pi), axis=1)
        edges = np.column_stack([np.zeros(x.size), br, np.full(x.size, math.pi)])
    pieces = edges.shape[1] - 1
    widths = np.diff(edges, axis=1)

    def integrand(u):
        u = u[:, 0]
        k = np.minimum(np.floor(u).astype(int), pieces - 1)
        frac = u - k
        phi = edges[:, k] + frac[None, :] * widths[:, k]
        a1, a2 = chord_lengths(domain, x[:, None], y[:, None], phi)
        return (a1 * a2 * (a1 + a2) * widths[:, k]).T

    res = integrate_box(integrand, [0.0], [float(pieces)], spec, splits=[np.arange(1, pieces)])
    return np.reshape(res.value, shape)


def pdf_mobile_numeric(domain: ConvexDomain, x, y):
    """Mobile-node pdf by direct angular quadrature; the reference for every closed form."""
    m = chord_moment_numeric(domain, x, y)
    out = m / (mean_leg_length_numeric(domain) * domain.area**2)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# rectangle: exact closed form


def _anti(kind, p):
    """Antiderivatives of ``1/(g1 g2 g3)`` for products of sines and cosines."""
    s, c = np.sin(p), np.cos(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == 3:  # sec^3
            return 0.5 * (s / (c * c) + np.log(np.abs((1.0 + s) / c)))
        if kind == 0:  # csc^3
            return -0.5 * c / (s * s) + 0.5 * np.log(np.abs(np.tan(0.5 * p)))
        if kind == 2:  # 1 / (cos^2 sin)
            return 1.0 / c + np.log(np.abs(np.tan(0.5 * p)))
        return -1.0 / s + np.log(np.abs((1.0 + s) / c))  # 1 / (cos sin^2)


def _rect_moment_closed(x, y, a, b):
    """Closed-form chord moment at interior points of ``[-a,a] x [-b,b]``.

    Between consecutive corner directions each ray leaves through a fixed side,
    so ``a1 = h1 / |cos|`` or ``h1 / |sin|`` and likewise ``a2``; the products
    have elementary antiderivatives.
    """
    A, B, C, D = a - x, a + x, b - y, b + y
    fr = np.arctan2(C, A)             # forward ray: right -> top
    ft = np.pi - np.arctan2(C, B)     # forward ray: top -> left
    bl = np.arctan2(D, B)             # backward ray: left -> bottom
    bb = np.pi - np.arctan2(D, A)     # backward ray: bottom -> right
    br = np.sort(np.stack([fr, ft, bl, bb]), axis=0)
    edges = np.concatenate([np.zeros((1,) + A.shape), br, np.full((1,) + A.shape, np.pi)])
    total = np.zeros(A.shape)
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = 0.5 * (lo + hi)
        h1 = np.where(m < fr, A, np.where(m < ft, C, B))
        c1 = np.where(m < fr, 1, np.where(m < ft, 0, 1))   # 1: cos in denominator, 0: sin
        s1 = np.where(m < ft, 1.0, -1.0)
        h2 = np.where(m < bl, B, np.where(m < bb, D, A))
        c2 = np.where(m < bl, 1, np.where(m < bb, 0, 1))
        s2 = np.where(m < bb, 1.0, -1.0)
        nonempty = hi > lo
        k1 = 2 * c1 + c2          # cos count in g1 g1 g2
        k2 = c1 + 2 * c2          # cos count in g1 g2 g2
        piece = np.zeros(A.shape)
        for kind in range(4):
            for kk, coef in ((k1, h1 * h1 * h2 * s2), (k2, h1 * h2 * h2 * s1)):
                sel = nonempty & (kk == kind)
                if np.any(sel):
                    piece[sel] += coef[sel] * (_anti(kind, hi[sel]) - _anti(kind, lo[sel]))
        total += piece
    return total


def _reference_cell(x, y, a, b):
    """Fold to the first quadrant, then into the cell above the diagonal ``y/b = x/a``.

    Reflections in both axes and the relabelling ``(x, y, a, b) -> (y, x, b, a)``
    generate the eight-fold symmetry of the rectangle.
    """
    x, y = np.abs(x), np.abs(y)
    below = y * a < x * b
    xr = np.where(below, y, x)
    yr = np.where(below, x, y)
    ar = np.where(below, b, a)
    br = np.where(below, a, b)
    return xr, yr, ar, br


def rect_moment_exact(a: float, b: float, x, y):
    """Exact chord moment in the rectangle; zero on the boundary."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xr, yr, ar, brr = _reference_cell(x, y, a, b)
    interior = (xr < ar) & (yr < brr)
    xs = np.where(interior, xr, 0.0)
    ys = np.where(interior, yr, 0.0)
    out = np.where(interior, _rect_moment_closed(xs, ys, ar, brr), 0.0)
    return np.maximum(out, 0.0)


def pdf_mobile_rect_exact(a: float, b: float, x, y, lbar: float | None = None):
    """Exact mobile-node pdf in ``[-a, a] x [-b, b]``."""
    if lbar is None:
        lbar = mean_leg_length_numeric(Rectangle(a, b))
    out = rect_moment_exact(a, b, x, y) / (16.0 * a * a * b * b * lbar)
    return float(out) if np.ndim(out) == 0 else out


def rect_moment_printed(a: float, b: float, x, y):
    """The published single-cell expression for the chord moment, verbatim.

    Evaluated at ``(x, y)`` as given (no symmetry folding).  It does not match
    the chord moment in any of the eight cells; see the audit module.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d1 = np.sqrt((a - x) ** 2 + (b - y) ** 2)
    d2 = np.sqrt((a + x) ** 2 + (b + y) ** 2)
    d3 = np.sqrt((a - x) ** 2 + (b + y) ** 2)
    d4 = np.sqrt((a + x) ** 2 + (b - y) ** 2)
    c1 = a * (a - x) * (a + x)
    c2 = b * (b - y) * (b + y)
    c3 = (a + x) * (b - y) ** 2
    c4 = (a + x) ** 2 * (b - y)
    c5 = (x - a) * (b - y) ** 2
    c6 = (x - a) ** 2 * (b - y)

    def ln(v):
        return np.log(np.abs(v))

    with np.errstate(divide="ignore", invalid="ignore"):
        return (d1 * (b - y) * (a + x) * (a - 2 * x) / (a - x)
                + d4 * (a - x) * (a + 2 * x) * (b - y) / (a + x)
                + (d3 * (a - x) + d2 * (a + x)) * ((b - y) * (b + 2 * y) / (b + y))
                + 2 * x * (b - y) ** 2 * ln((a - x) / (a + x)) + 4 * a * x * (b - y) * ln((b - y) / (b + y))
                + c1 * (ln((b - y + d1) / (a - x)) + ln((y - d4 - b) / (a + x)))
                + c2 * ln((d3 + a - x) / (d2 - a - x)) + c3 * ln((d2 + b + y) / (d1 + b - y))
                + c4 * ln((d2 - a - x) / (d1 + x - a)) - c5 * ln((y - d4 - b) / (-d3 - b - y))
                + c6 * ln((d4 + a + x) / (d3 + a - x)))


def pdf_mobile_rect_approx(a: float, b: float, x, y):
    """Separable polynomial approximation ``9/(16 a^3 b^3) (x^2 - a^2)(y^2 - b^2)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = 9.0 / (16.0 * a**3 * b**3) * (x * x - a * a) * (y * y - b * b)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# disk


def disk_angular_integral(R: float, r, spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-12)):
    """``int_0^pi sqrt(R^2 - r^2 cos^2 phi) dphi`` by quadrature, vectorised over ``r``.

    Reference path for :func:`disk_moment_exact`.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    shape = r.shape
    rr = r.ravel()
    # symmetric about pi/2; the integrand is smallest (possibly kinked at r=R) at 0
    res = integrate_box(lambda p: np.sqrt(np.maximum(R * R - np.outer(np.cos(p[:, 0]) ** 2, rr * rr), 0.0)),
                        [0.0], [0.5 * math.pi], spec)
    return np.reshape(2.0 * np.asarray(res.value), shape)


def disk_moment_exact(R: float, r):
    """Chord moment of a disk, ``4 R (R^2 - r^2) E((r/R)^2)``.

    Along any line through the point ``a1 a2 = R^2 - r^2`` and
    ``a1 + a2 = 2 sqrt(R^2 - r^2 sin^2 phi)``, so the angular integral is a
    complete elliptic integral of the second kind (parameter ``m = k^2``).
    """
    r = np.asarray(r, dtype=float)
    m = np.minimum((r / R) ** 2, 1.0)
    return 4.0 * R * (R * R - r * r) * _special.ellipe(m)


@lru_cache(maxsize=64)
def disk_mean_leg_length(R: float, spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-12)) -> float:
    """Mean leg length obtained by integrating the unnormalised disk pdf over the disk."""
    V = math.pi * R * R
    res = integrate_box(lambda p: 2 * math.pi * p[:, 0] * disk_moment_exact(R, p[:, 0]), [0.0], [R], spec)
    return float(res.value) / V**2


def pdf_mobile_disk_exact(R: float, r):
    """Exact mobile-node pdf in a disk at radius ``r``."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > R * (1 + 1e-12))):
        raise DomainError("radius outside the disk")
    out = disk_moment_exact(R, np.minimum(r, R)) / (disk_mean_leg_length(R) * (math.pi * R * R) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def pdf_mobile_disk_approx(R: float, r):
    """``2/(pi R^2) (1 - (r/R)^2)``."""
    r = np.asarray(r, dtype=float)
    out = 2.0 / (math.pi * R * R) * (1.0 - (r / R) ** 2)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# the mixture


@dataclass(frozen=True)
class StationaryDistribution:
    """Paused nodes uniform, moving nodes following the RWPM mobile pdf."""

    domain: ConvexDomain
    pause_probability: float = 0.0
    mobile_pdf_kind: PdfKind = "approximate"

    def __post_init__(self):
        if not 0.0 <= self.pause_probability <= 1.0:
            raise ValueError("pause probability must lie in [0, 1]")
        if self.mobile_pdf_kind not in ("exact", "approximate"):
            raise ValueError(f"unknown mobile pdf kind {self.mobile_pdf_kind!r}")

    @classmethod
    def from_mobility(cls, domain: ConvexDomain, mobility: MobilityParams, kind: PdfKind = "approximate"):
        return cls(domain, leg_statistics(domain, mobility).pause_probability, kind)

    @cached_property
    def mean_leg_length(self) -> float:
        if isinstance(self.domain, Disk) and self.mobile_pdf_kind == "exact":
            return disk_mean_leg_length(self.domain.R)
        return mean_leg_length_numeric(self.domain)

    def mobile_pdf(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = self.domain
        if isinstance(d, Rectangle):
            if self.mobile_pdf_kind == "exact":
                out = rect_moment_exact(d.a, d.b, x, y) / (16.0 * d.a**2 * d.b**2 * self.mean_leg_length)
            else:
                out = pdf_mobile_rect_approx(d.a, d.b, x, y)
        else:
            r = np.minimum(np.hypot(x, y), d.R)
            if self.mobile_pdf_kind == "exact":
                out = disk_moment_exact(d.R, r) / (self.mean_leg_length * d.area**2)
            else:
                out = pdf_mobile_disk_approx(d.R, r)
        return np.where(contains(d, x, y), out, 0.0)

    def pdf(self, x, y):
        """Mixture density; zero outside the domain."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        wp = self.pause_probability
        uniform = np.where(contains(self.domain, x, y), 1.0 / self.domain.area, 0.0)
        if wp == 1.0:
            out = uniform * np.ones(np.broadcast(x, y).shape)
        else:
            out = wp * uniform + (1.0 - wp) * self.mobile_pdf(x, y)
        return float(out) if np.ndim(out) == 0 else out


def stationary_pdf(dist: StationaryDistribution, x, y):
    if not np.all(contains(dist.domain, x, y)):
        raise DomainError("stationary pdf requested outside the domain")
    return dist.pdf(x, y)
