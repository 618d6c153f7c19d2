"""Spatial density of successful transmissions at a receiver.

    mu(r_j) = (N - 1) int_V f_X(r_i) H(|r_i - r_j|) dr_i

``mu_numeric`` is the reference path used everywhere downstream.  The published
closed forms for the SNR and unit-disk regimes are kept verbatim next to it
for auditing; they do not agree with the quadrature (see ``rwpnet.audit``).
"""

from __future__ import annotations

import math
from typing import Iterable, Literal

import numpy as np

from .channel import (ChannelParams, LaplaceCache, Process, _check_receiver, interference_factor,
                      laplace_argument)
from .errors import UnsupportedError
from .geometry import Rectangle, disk_domain_overlap
from .numerics import QuadratureSpec, erf, integrate_polar_about
from .rwpm import StationaryDistribution, mean_leg_length_numeric

MU_SPEC = QuadratureSpec(rel_tol=1e-7, max_subdivisions=20000)

SpecialPoint = Literal["centre", "edge_mid_x", "edge_mid_y", "corner"]


def farthest_distance(domain, receiver) -> float:
    x, y = receiver
    if isinstance(domain, Rectangle):
        return math.hypot(domain.a + abs(x), domain.b + abs(y))
    return domain.R + math.hypot(x, y)


def laplace_cache(dist: StationaryDistribution, params: ChannelParams, receiver, points: int = 256) -> LaplaceCache:
    """Interference-exponent table covering every link length that ends at ``receiver``."""
    return LaplaceCache.for_link_range(dist, receiver, params, farthest_distance(dist.domain, receiver), points)


def mu_numeric(dist: StationaryDistribution, params: ChannelParams, receiver, node_count,
               cache: LaplaceCache | None = None, spec: QuadratureSpec = MU_SPEC,
               process: Process = "poisson"):
    """Expected number of nodes a receiver can decode, by quadrature.

    ``node_count`` may be a scalar or a sequence; the whole profile comes from
    one adaptive run with one component per node count.  The interference
    exponent is read from ``cache`` (built on demand when ``gamma > 0``).
    With ``process="binomial"`` each of the ``N - 1`` candidate transmitters
    faces exactly ``N - 2`` interferers.
    """
    _check_receiver(dist.domain, receiver)
    counts = np.atleast_1d(np.asarray(node_count, dtype=float))
    if np.any(counts < 2):
        raise ValueError("node count must be at least 2")
    rx, ry = float(receiver[0]), float(receiver[1])
    if params.gamma > 0 and cache is None:
        cache = laplace_cache(dist, params, (rx, ry))
    noise_coef = params.threshold * params.noise / params.power

    def integrand(x, y):
        d = np.hypot(x - rx, y - ry)
        inv_g = params.epsilon + d**params.eta
        log_h = -noise_coef * inv_g
        base = dist.pdf(x, y) * np.exp(log_h)
        if params.gamma == 0:
            return np.repeat(base[:, None], counts.size, axis=1)
        J = cache.exponent(laplace_argument(d, params))
        k = None if process == "poisson" else counts - 2.0
        return base[:, None] * interference_factor(J, counts, process, k)

    res = integrate_polar_about(integrand, dist.domain, (rx, ry), spec)
    out = (counts - 1.0) * np.atleast_1d(res.value)
    return float(out[0]) if np.ndim(node_count) == 0 else out


def mu_vs_density_profile(dist: StationaryDistribution, params: ChannelParams, receiver,
                          node_counts: Iterable[float], cache: LaplaceCache | None = None) -> np.ndarray:
    """Table of ``(N, mu)`` rows for a receiver."""
    n = np.asarray(list(node_counts), dtype=float)
    return np.column_stack([n, mu_numeric(dist, params, receiver, n, cache=cache)])


def mu_unit_disk_numeric(dist: StationaryDistribution, receiver, node_count, radius: float = 1.0,
                         spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-9)):
    """``mu`` for the deterministic link ``H = 1{d < radius}``.

    The uniform part is the exact disk/domain overlap area; the mobile part is
    integrated over the same lens in polar coordinates about the receiver.
    """
    _check_receiver(dist.domain, receiver)
    counts = np.atleast_1d(np.asarray(node_count, dtype=float))
    rx, ry = float(receiver[0]), float(receiver[1])
    wp = dist.pause_probability
    covered = float(disk_domain_overlap(dist.domain, rx, ry, radius))
    mass = wp * covered / dist.domain.area
    if wp < 1:
        mob = integrate_polar_about(dist.mobile_pdf, dist.domain, (rx, ry), spec, max_radius=radius).value
        mass += (1 - wp) * mob
    out = (counts - 1.0) * mass
    return float(out[0]) if np.ndim(node_count) == 0 else out


# ---------------------------------------------------------------------------
# closed forms


def mu_snr_closed(a: float, b: float, x0: float, y0: float, wp: float, N: float) -> float:
    """Published SNR closed form (``gamma = 0``, ``eta = 2``), transcribed verbatim.

    Assumes ``q N0 / P = 1`` and ``epsilon = 0`` and the separable polynomial
    mobile pdf.
    """
    V = 4.0 * a * b
    sp = math.sqrt(math.pi)
    uniform = (N - 1) * wp * math.pi / (4.0 * V) * (erf(a - x0) + erf(a + x0)) * (erf(b - y0) + erf(b + y0))

    def bracket(h, c):
        return (math.exp((c - h) ** 2) * (-2.0 * (h + c) * math.exp(2.0 * h * c) + sp * (2 * c * c - 2 * h * h) * erf(h - c))
                + math.exp(-(h * h + c * c)) * (-2.0 * (h - c) + sp * (2 * c * c - 2 * h * h) * erf(h + c) * math.exp((h + c) ** 2)))

    mobile = ((N - 1) * 9.0 * (1 - wp) * math.exp(-2.0 * (a * x0 + b * y0)) / (256.0 * (a * b) ** 3)
              * bracket(a, x0) * bracket(b, y0))
    return float(uniform + mobile)


def _gauss_poly_moment(h, c):
    """``int_{-h}^{h} (x^2 - h^2) exp(-(x - c)^2) dx``."""
    sp = math.sqrt(math.pi)
    return (sp / 4.0 * (1.0 + 2.0 * c * c - 2.0 * h * h) * (erf(h - c) + erf(h + c))
            - 0.5 * ((h + c) * math.exp(-(h - c) ** 2) + (h - c) * math.exp(-(h + c) ** 2)))


def mu_snr_rect_gaussian(a: float, b: float, x0: float, y0: float, wp: float, N: float) -> float:
    """SNR ``mu`` from Gaussian moments, same assumptions as :func:`mu_snr_closed`.

    With ``H = exp(-d^2)`` both the uniform and the polynomial mobile pdf
    separate in ``x`` and ``y``, so the integral reduces to 1D Gaussian moments.
    """
    sp = math.sqrt(math.pi)
    V = 4.0 * a * b
    ux = 0.5 * sp * (erf(a - x0) + erf(a + x0))
    uy = 0.5 * sp * (erf(b - y0) + erf(b + y0))
    mob = 9.0 / (16.0 * a**3 * b**3) * _gauss_poly_moment(a, x0) * _gauss_poly_moment(b, y0)
    return float((N - 1) * (wp * ux * uy / V + (1 - wp) * mob))


def mu_unit_disk_closed(a: float, b: float, wp: float, N: float, point: SpecialPoint) -> float:
    """Published unit-disk ``mu`` at the four special receiver positions, verbatim.

    ``lbar`` is the numeric mean leg length of the rectangle.
    """
    if not (a >= 1 and b >= 1):
        raise UnsupportedError("unit-disk closed forms assume a, b >= 1")
    lbar = mean_leg_length_numeric(Rectangle(a, b))
    V = 4.0 * a * b
    pi = math.pi
    ab3 = (a * b) ** 3
    if point == "centre":
        return (N - 1) * wp * pi / (lbar * V) + (N - 1) * (1 - wp) * pi / (42.0 * ab3) * (-6.0 * (a * a + b * b) + 24.0 * (a * b) ** 2)
    if point == "edge_mid_x":
        return (N - 1) * wp * pi / (8.0 * lbar * a * b) + (N - 1) * (1 - wp) / (426.0 * ab3) * (5 * pi - 64 * a - 30 * pi * b * b + 320 * a * b * b)
    if point == "edge_mid_y":
        return (N - 1) * wp * pi / (8.0 * lbar * a * b) + (N - 1) * (1 - wp) / (426.0 * ab3) * (5 * pi - 64 * b - 30 * pi * a * a + 320 * a * a * b)
    if point == "corner":
        return (N - 1) * wp * pi / (16.0 * lbar * a * b) + (N - 1) * (1 - wp) / (854.0 * ab3) * (5 * pi - 64 * (a + b) + 120 * a * b)
    raise UnsupportedError(f"unknown special point {point!r}")


def special_point(domain: Rectangle, point: SpecialPoint):
    return {"centre": (0.0, 0.0), "edge_mid_x": (domain.a, 0.0), "edge_mid_y": (0.0, domain.b),
            "corner": (domain.a, domain.b)}[point]


