"""Quadrature and special functions behind the closed-form and numeric evaluators.

``integrate_1d`` wraps QUADPACK through :func:`scipy.integrate.quad`.  The
vectorised integrators (``integrate_box``, ``integrate_2d``,
``integrate_polar_about``) share a batched adaptive tensor Gauss-Kronrod
(7/15) rule: every region whose error is still too large is bisected in one
numpy pass, so array-valued integrands (one component per parameter value)
cost a single adaptive run.  In 2D a region is halved only along the axis
whose one-dimensional Kronrod/Gauss difference dominates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import integrate as _sci_integrate
from scipy import special as _special

from .errors import ConvergenceError, UnsupportedError
from .geometry import ConvexDomain, Disk, Rectangle, angular_breaks, ray_exit


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 0.0
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol >= 0:
            raise ValueError("abs_tol must be non-negative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_1D = QuadratureSpec(rel_tol=1e-8)
DEFAULT_2D = QuadratureSpec(rel_tol=1e-6)


class QuadResult(NamedTuple):
    value: float
    error: float


# ---------------------------------------------------------------------------
# 1D scalar quadrature


def integrate_1d(f: Callable[[float], float], lo: float, hi: float, spec: QuadratureSpec = DEFAULT_1D,
                 points: Optional[Sequence[float]] = None) -> QuadResult:
    """Adaptive integral of a scalar function over ``[lo, hi]``.

    Raises :class:`ConvergenceError` (carrying the best estimate) when the
    subdivision budget runs out before the requested accuracy is reached.
    """
    pts = None
    if points is not None:
        pts = sorted(p for p in points if lo < p < hi)
        pts = pts or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _sci_integrate.IntegrationWarning)
        out = _sci_integrate.quad(f, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                                  limit=spec.max_subdivisions, points=pts, full_output=1)
    value, error, info = out[0], out[1], out[2]
    # with full_output, a fourth element (the message) appears only on trouble
    if len(out) > 3 and error > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise ConvergenceError(f"1D quadrature did not converge ({out[3].splitlines()[0]})",
                               estimate=value, error=error)
    return QuadResult(float(value), float(error))


# ---------------------------------------------------------------------------
# batched adaptive Gauss-Kronrod on boxes

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
W_KRONROD = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1::2] = np.concatenate([_WG[:-1], [_WG[-1]], _WG[-2::-1]])
W_GAUSS_1D = W_GAUSS


def _tensor_rule(dim):
    if dim == 1:
        return NODES[:, None], W_KRONROD, W_GAUSS
    if dim == 2:
        gx, gy = np.meshgrid(NODES, NODES, indexing="ij")
        return (np.column_stack([gx.ravel(), gy.ravel()]),
                np.outer(W_KRONROD, W_KRONROD).ravel(), np.outer(W_GAUSS, W_GAUSS).ravel())
    raise UnsupportedError("only 1D and 2D boxes are supported")


class BoxResult(NamedTuple):
    value: np.ndarray
    error: np.ndarray
    regions: int


def integrate_box(f, lo, hi, spec: QuadratureSpec = DEFAULT_2D, splits=None, chunk_points: int = 400_000) -> BoxResult:
    """Adaptive integral of ``f`` over an axis-aligned box in 1 or 2 dimensions.

    ``f`` takes an ``(n, dim)`` array of points and returns ``(n,)`` or ``(n, m)``.
    ``splits`` optionally lists, per axis, interior coordinates at which the box
    is cut before adaptation starts (known kinks go there).  Convergence is
    declared when every component satisfies
    ``error <= max(abs_tol, rel_tol * |value|)``.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    dim = lo.size
    nodes, wk, wg = _tensor_rule(dim)

    edges = []
    for k in range(dim):
        cuts = [] if splits is None or splits[k] is None else [c for c in splits[k] if lo[k] < c < hi[k]]
        edges.append(np.unique(np.concatenate([[lo[k]], np.asarray(cuts, dtype=float), [hi[k]]])))
    if dim == 1:
        rlo = edges[0][:-1, None]
        rhi = edges[0][1:, None]
    else:
        ex0, ey0 = np.meshgrid(edges[0][:-1], edges[1][:-1], indexing="ij")
        ex1, ey1 = np.meshgrid(edges[0][1:], edges[1][1:], indexing="ij")
        rlo = np.column_stack([ex0.ravel(), ey0.ravel()])
        rhi = np.column_stack([ex1.ravel(), ey1.ravel()])

    def evaluate(rlo, rhi):
        half = 0.5 * (rhi - rlo)
        mid = 0.5 * (rhi + rlo)
        vol = np.prod(half, axis=1)
        per_chunk = max(1, chunk_points // len(wk))
        ks, gs, axs = [], [], []
        for start in range(0, len(rlo), per_chunk):
            sl = slice(start, start + per_chunk)
            pts = mid[sl, None, :] + half[sl, None, :] * nodes[None, :, :]
            vals = np.asarray(f(pts.reshape(-1, dim)), dtype=float)
            vals = vals.reshape(pts.shape[0], len(wk), -1)
            ks.append(np.einsum("rnm,n->rm", vals, wk) * vol[sl, None])
            gs.append(np.einsum("rnm,n->rm", vals, wg) * vol[sl, None])
            if dim == 2:
                # Kronrod minus Gauss along one axis only, to pick the split direction
                grid = vals.reshape(pts.shape[0], 15, 15, -1)
                dx = np.abs(np.einsum("rijm,i,j->rm", grid, W_KRONROD - W_GAUSS_1D, W_KRONROD))
                dy = np.abs(np.einsum("rijm,i,j->rm", grid, W_KRONROD, W_KRONROD - W_GAUSS_1D))
                axs.append(np.stack([dx, dy], axis=-1) * vol[sl, None, None])
        k = np.concatenate(ks)
        g = np.concatenate(gs)
        ax = np.concatenate(axs) if axs else None
        return k, np.abs(k - g), ax

    est, err, axerr = evaluate(rlo, rhi)
    done_val = np.zeros(est.shape[1])
    done_err = np.zeros(est.shape[1])
    splits_done = 0
    eps = np.finfo(float).eps
    while True:
        total = done_val + est.sum(axis=0)
        total_err = done_err + err.sum(axis=0)
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
        floor = 50 * eps * (np.abs(done_val) + np.abs(est).sum(axis=0))
        tol = np.maximum(tol, floor)
        if np.all(total_err <= tol):
            break
        if splits_done >= spec.max_subdivisions:
            raise ConvergenceError(
                f"{dim}D adaptive quadrature exceeded {spec.max_subdivisions} subdivisions",
                estimate=_squeeze(total), error=_squeeze(total_err))
        safe_tol = np.where(tol > 0, tol, np.inf)
        score = np.max(np.where(np.isfinite(safe_tol), err / safe_tol, np.where(err > 0, np.inf, 0.0)), axis=1)
        # retire regions whose error is negligible; split the worst ones
        n = len(score)
        order = np.argsort(score)[::-1]
        cum = np.cumsum(score[order])
        need = max(1, int(np.searchsorted(cum, 0.5 * cum[-1]) + 1))
        split_idx = order[:need]
        negligible = score * n < 0.05
        negligible[split_idx] = False
        if np.any(negligible):
            done_val += est[negligible].sum(axis=0)
            done_err += err[negligible].sum(axis=0)
        keep_mask = ~negligible
        keep_mask[split_idx] = False
        keep_idx = np.flatnonzero(keep_mask)
        slo, shi = rlo[split_idx], rhi[split_idx]
        smid = 0.5 * (slo + shi)
        if dim == 1:
            nlo = np.concatenate([slo, smid])
            nhi = np.concatenate([smid, shi])
        else:
            # bisect along the dominant axis, or both when neither dominates
            a = np.max(axerr[split_idx] / safe_tol[None, :, None], axis=1)
            cut_x = a[:, 0] >= 0.25 * a[:, 1]
            cut_y = a[:, 1] >= 0.25 * a[:, 0]
            lo_parts, hi_parts = [], []
            for cx, cy in ((True, True), (True, False), (False, True)):
                sel = (cut_x == cx) & (cut_y == cy)
                if not np.any(sel):
                    continue
                a0, a1, am = slo[sel], shi[sel], smid[sel]
                xs = [(a0[:, 0], am[:, 0]), (am[:, 0], a1[:, 0])] if cx else [(a0[:, 0], a1[:, 0])]
                ys = [(a0[:, 1], am[:, 1]), (am[:, 1], a1[:, 1])] if cy else [(a0[:, 1], a1[:, 1])]
                for xl, xh in xs:
                    for yl, yh in ys:
                        lo_parts.append(np.column_stack([xl, yl]))
                        hi_parts.append(np.column_stack([xh, yh]))
            nlo = np.concatenate(lo_parts)
            nhi = np.concatenate(hi_parts)
        nest, nerr, nax = evaluate(nlo, nhi)
        rlo = np.concatenate([rlo[keep_idx], nlo])
        rhi = np.concatenate([rhi[keep_idx], nhi])
        est = np.concatenate([est[keep_idx], nest])
        err = np.concatenate([err[keep_idx], nerr])
        if dim == 2:
            axerr = np.concatenate([axerr[keep_idx], nax])
        splits_done += len(split_idx)
    return BoxResult(_squeeze(total), _squeeze(total_err), len(rlo))


def _squeeze(v):
    v = np.asarray(v, dtype=float)
    return float(v[0]) if v.shape == (1,) else v


def integrate_2d(f, domain: ConvexDomain, spec: QuadratureSpec = DEFAULT_2D, splits=None) -> QuadResult:
    """Integral of ``f(x, y)`` (vectorised) over a rectangle or disk.

    Rectangles use the product rule directly; disks are mapped to polar
    coordinates about the centre.  Array-valued integrands are allowed.
    """
    if isinstance(domain, Rectangle):
        res = integrate_box(lambda p: f(p[:, 0], p[:, 1]), [-domain.a, -domain.b], [domain.a, domain.b],
                            spec, splits=splits)
    else:
        def polar(p):
            r, th = p[:, 0], p[:, 1]
            val = np.asarray(f(r * np.cos(th), r * np.sin(th)), dtype=float)
            return val * (r if val.ndim == 1 else r[:, None])

        res = integrate_box(polar, [0.0, 0.0], [domain.R, 2 * np.pi], spec, splits=splits)
    return QuadResult(res.value, res.error)


def integrate_polar_about(f, domain: ConvexDomain, center, spec: QuadratureSpec = DEFAULT_2D,
                          t_min: float = 1e-12, max_radius: float = math.inf) -> QuadResult:
    """Integral of ``f(x, y)`` over ``domain`` in polar coordinates about ``center``.

    Along each ray the relative radius ``t`` (distance over boundary distance)
    is mapped from an auxiliary variable ``w``:

    * ``w in [log(2 t_min), 0]``: ``t = exp(w) / 2``, a log scale that resolves
      integrands peaked at ``center``;
    * ``w in [0, 1]``: ``t = 1 - (1 - w)**3 / 2``, which flattens the
      ``delta * log(delta)`` behaviour some densities have at the boundary.

    The disk of relative radius ``t_min`` around the centre is dropped; its
    contribution is at most ``t_min**2`` times the domain area times the peak
    value.  Angular pieces are cut at the corner directions, where the
    boundary distance has kinks (rectangle corners, tangents at a disk
    boundary point).  ``max_radius`` clips the region to a disk
    about ``center``.
    """
    cx, cy = float(center[0]), float(center[1])
    breaks = angular_breaks(domain, cx, cy)
    w_min = math.log(2.0 * t_min)

    def integrand(p):
        th, w = p[:, 0], p[:, 1]
        c, s = np.cos(th), np.sin(th)
        rmax = np.minimum(ray_exit(domain, cx, cy, c, s), max_radius)
        inner = w <= 0
        wi = np.minimum(w, 0.0)
        wo = 1.0 - np.clip(w, 0.0, 1.0)
        t = np.where(inner, 0.5 * np.exp(wi), 1.0 - 0.5 * wo**3)
        dt = np.where(inner, t, 1.5 * wo**2)
        rho = rmax * t
        val = np.asarray(f(cx + rho * c, cy + rho * s), dtype=float)
        jac = rmax * rmax * t * dt
        return val * (jac if val.ndim == 1 else jac[:, None])

    res = integrate_box(integrand, [0.0, w_min], [2 * np.pi, 1.0], spec, splits=[breaks, [0.0]])
    return QuadResult(res.value, res.error)


# ---------------------------------------------------------------------------
# special functions


def erf(x):
    """Error function (scipy's Cephes implementation)."""
    return _special.erf(x)


_SERIES_MAX_TERMS = 2000


def _series(a, b, c, z):
    """Maclaurin series of 2F1 for ``|z| <= 1/2``."""
    total = 1.0
    term = 1.0
    for n in range(_SERIES_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if term == 0.0 or abs(term) < 1e-17 * abs(total):
            return total
    raise ConvergenceError("2F1 series did not converge", estimate=total)


def _near_int(v, tol=1e-9):
    r = round(v)
    return abs(v - r) < tol, int(r)


def _about_one(a, b, c, x):
    """2F1(a, b; c; 1 - x) for ``0 < x < 1/2`` via the connection formulas at 1."""
    is_int, m = _near_int(c - a - b)
    if not is_int:
        rg = _special.rgamma
        g = _special.gamma
        t1 = g(c) * g(c - a - b) * rg(c - a) * rg(c - b) * _series(a, b, a + b - c + 1, x)
        t2 = x ** (c - a - b) * g(c) * g(a + b - c) * rg(a) * rg(b) * _series(c - a, c - b, c - a - b + 1, x)
        return t1 + t2
    if m < 0:
        # Euler transformation flips the sign of c - a - b
        return x ** (c - a - b) * _about_one(c - a, c - b, c, x)
    return _log_case(a, b, m, x)


def _log_case(a, b, m, x):
    """Degenerate connection formula for ``c = a + b + m`` with integer ``m >= 0``."""
    rg = _special.rgamma
    psi = _special.digamma
    c = a + b + m
    head = 0.0
    if m > 0:
        term = 1.0
        for k in range(m):
            if k > 0:
                term *= (a + k - 1) * (b + k - 1) / k
            head += term * math.factorial(m - k - 1) * (-x) ** k
        head *= rg(a + m) * rg(b + m)
    lnx = math.log(x)
    tail = 0.0
    coef = 1.0 / math.factorial(m)
    for k in range(_SERIES_MAX_TERMS):
        if k > 0:
            coef *= (a + m + k - 1) * (b + m + k - 1) / (k * (k + m)) * x
        piece = coef * (lnx - psi(k + 1) - psi(k + m + 1) + psi(a + k + m) + psi(b + k + m))
        tail += piece
        if k > 5 and abs(piece) < 1e-17 * max(abs(tail), 1e-300):
            break
    tail *= (-1.0) ** m * x**m * rg(a) * rg(b)
    # 15.8.10-type identity normalised by 1/Gamma(c)
    return _special.gamma(c) * (head - tail)


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function for real parameters and ``z <= 0``.

    The Pfaff transformation maps ``z`` to ``w = z / (z - 1)`` in ``[0, 1)``.
    For ``w <= 1/2`` the Maclaurin series is summed directly; beyond that the
    ``1 - w`` connection formulas are used, including the logarithmic case
    when ``c - a - b`` is an integer.  Supported range: ``c > b > 0``.
    """
    if not (c > b > 0):
        raise UnsupportedError(f"hyp2f1 needs c > b > 0, got b={b}, c={c}")
    if not z <= 0:
        raise UnsupportedError(f"hyp2f1 supports z <= 0 only, got z={z}")
    if z == 0:
        return 1.0
    if math.isinf(z):
        raise UnsupportedError("hyp2f1 needs finite z")
    if z >= -1.0:
        # Pfaff on the b slot keeps the prefactor bounded
        return (1.0 - z) ** (-b) * _series(c - a, b, c, z / (z - 1.0))
    # 1 - z/(z-1) formed directly to keep its relative accuracy
    return (1.0 - z) ** (-b) * _about_one(c - a, b, c, 1.0 / (1.0 - z))
