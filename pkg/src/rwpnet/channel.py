"""Path loss, interference Laplace transform and SINR connection probability.

With Rayleigh fading the success probability of a link factorises into a
noise term and the Laplace transform of the interference.  Under the Poisson
approximation of the node process the latter is ``exp(-N * J(s))`` with the
interference exponent

    J(s) = int_V f_X(r) * s / (eps + |r - r_j|**eta + s) dr,

which does not depend on ``N``.  For exactly ``K`` independent interferers
the transform is ``(1 - J(s))**K`` instead.  :class:`LaplaceCache` tabulates ``J`` once per
receiver so the nested integrals of the throughput module stay cheap.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, SingularityError
from .geometry import Disk, contains
from .numerics import QuadratureSpec, hyp2f1, integrate_polar_about
from .rwpm import StationaryDistribution

LAPLACE_SPEC = QuadratureSpec(rel_tol=1e-7, max_subdivisions=20000)

Process = Literal["poisson", "binomial"]


@dataclass(frozen=True)
class ChannelParams:
    power: float = 1.0
    noise: float = 1.0
    eta: float = 4.0
    epsilon: float = 0.0
    gamma: float = 1.0
    threshold: float = 1.0

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("transmit power must be positive")
        if not self.noise >= 0:
            raise ValueError("noise power must be non-negative")
        if not self.eta >= 2:
            raise ValueError("path-loss exponent must be >= 2")
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        if not 0 <= self.gamma <= 1:
            raise ValueError("gamma must lie in [0, 1]")
        if not self.threshold > 0:
            raise ValueError("SINR threshold must be positive")
        if self.eta > 6:
            warnings.warn(f"path-loss exponent {self.eta} outside the usual range [2, 6]", stacklevel=3)


@dataclass(frozen=True)
class NetworkConfig:
    node_count: int
    distribution: StationaryDistribution

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("a network needs at least two nodes")

    @property
    def domain(self):
        return self.distribution.domain

    @property
    def density(self) -> float:
        return self.node_count / self.distribution.domain.area


def path_loss(d, params: ChannelParams):
    """``g(d) = 1 / (eps + d**eta)``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    if params.epsilon == 0 and np.any(d == 0):
        raise SingularityError("path loss is singular at d = 0 when epsilon = 0")
    out = 1.0 / (params.epsilon + d**params.eta)
    return float(out) if out.ndim == 0 else out


def laplace_argument(d, params: ChannelParams):
    """``s = q * gamma / (P * g(d))``, the transform argument for a link of length ``d``."""
    d = np.asarray(d, dtype=float)
    return params.threshold * params.gamma * (params.epsilon + d**params.eta) / params.power


def interference_exponent(dist: StationaryDistribution, receiver, s, eta: float, epsilon: float,
                          spec: QuadratureSpec = LAPLACE_SPEC):
    """``J(s)`` for one receiver, vectorised over ``s`` in a single adaptive run.

    The domain is integrated in polar coordinates about the receiver, which
    resolves the peak of the integrand at zero distance when ``epsilon = 0``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros(s.shape)
    pos = s > 0
    if not np.any(pos):
        return out
    sp = s[pos]
    rx, ry = float(receiver[0]), float(receiver[1])

    def integrand(x, y):
        d_eta = np.hypot(x - rx, y - ry) ** eta
        return dist.pdf(x, y)[:, None] * (sp[None, :] / (epsilon + d_eta[:, None] + sp[None, :]))

    res = integrate_polar_about(integrand, dist.domain, (rx, ry), spec)
    out[pos] = np.atleast_1d(res.value)
    return out


def laplace_interference_numeric(config: NetworkConfig, params: ChannelParams, receiver, s):
    """``L(s) = exp(-N J(s))`` by direct quadrature."""
    _check_receiver(config.domain, receiver)
    J = interference_exponent(config.distribution, receiver, s, params.eta, params.epsilon)
    out = np.exp(-config.node_count * J)
    return float(out[0]) if np.ndim(s) == 0 else out


def _check_receiver(domain, receiver):
    if not contains(domain, receiver[0], receiver[1]):
        raise DomainError(f"receiver {tuple(receiver)} outside {domain!r}")


@dataclass
class LaplaceCache:
    """Tabulated interference exponent for one receiver.

    ``J`` is sampled on a log-spaced grid of ``s`` and interpolated with a
    monotone cubic in ``(log s, log J)``.  Below the grid ``J`` is continued as
    a power law through the two smallest nodes; above it ``1 - J`` decays like
    ``1/s`` towards the total mass.  Build once, then read from any thread.
    """

    dist: StationaryDistribution
    receiver: tuple
    eta: float
    epsilon: float
    s_min: float
    s_max: float
    points: int = 256
    s_grid: np.ndarray = field(init=False, repr=False)
    j_grid: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.receiver = (float(self.receiver[0]), float(self.receiver[1]))
        self.s_grid = np.geomspace(self.s_min, self.s_max, self.points)
        self.j_grid = interference_exponent(self.dist, self.receiver, self.s_grid, self.eta, self.epsilon)
        ls, lj = np.log(self.s_grid), np.log(self.j_grid)
        self._interp = PchipInterpolator(ls, lj, extrapolate=False)
        self._lo_slope = (lj[1] - lj[0]) / (ls[1] - ls[0])

    @classmethod
    def for_link_range(cls, dist, receiver, params: ChannelParams, d_max: float, points: int = 256,
                       decades: float = 14.0):
        s_hi = float(laplace_argument(d_max, params)) * (1 + 1e-9)
        s_lo = max(params.threshold * params.gamma * params.epsilon / params.power, s_hi * 10.0**-decades)
        s_lo = min(s_lo, s_hi / 10.0)
        return cls(dist, receiver, params.eta, params.epsilon, s_lo, s_hi, points)

    def exponent(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        pos = s > 0
        sp = s[pos]
        ls = np.log(sp)
        lo, hi = math.log(self.s_grid[0]), math.log(self.s_grid[-1])
        val = np.empty(sp.shape)
        mid = (ls >= lo) & (ls <= hi)
        val[mid] = np.exp(self._interp(ls[mid]))
        below = ls < lo
        val[below] = self.j_grid[0] * np.exp(self._lo_slope * (ls[below] - lo))
        above = ls > hi
        # f_X has unit mass, so J -> 1 with a 1/s tail
        val[above] = 1.0 - (1.0 - self.j_grid[-1]) * self.s_grid[-1] / sp[above]
        out[pos] = val
        return out

    def laplace(self, s, node_count):
        return np.exp(-node_count * self.exponent(s))


def interference_factor(J, node_count, process: Process = "poisson", interferers: int | None = None):
    """Interference part of the success probability given the exponent ``J``.

    ``"poisson"`` is the Poisson approximation ``exp(-N J)``.  ``"binomial"``
    is exact for a fixed population of independently placed interferers,
    ``(1 - J)**K`` with ``K = interferers`` (default ``N - 1``).
    """
    if process == "poisson":
        return np.exp(-np.multiply.outer(J, node_count))
    if process == "binomial":
        k = np.asarray(node_count, dtype=float) - 1.0 if interferers is None else interferers
        with np.errstate(divide="ignore"):
            return np.exp(np.multiply.outer(np.log1p(-np.minimum(J, 1.0)), k))
    raise ValueError(f"unknown point process {process!r}")


def connection_probability(config: NetworkConfig, params: ChannelParams, d_ij, receiver,
                           cache: LaplaceCache | None = None, process: Process = "poisson"):
    """SINR success probability ``exp(-q N0 / (P g)) * L(q gamma / (P g))``.

    ``process`` selects the interference model, see :func:`interference_factor`.
    Without a cache the interference exponent is integrated directly for every
    distinct ``d_ij``.
    """
    _check_receiver(config.domain, receiver)
    d = np.asarray(d_ij, dtype=float)
    if np.any(d < 0):
        raise ValueError("link length must be non-negative")
    if params.epsilon == 0 and np.any(d == 0):
        raise SingularityError("link of zero length with epsilon = 0")
    inv_g = params.epsilon + d**params.eta
    noise_term = np.exp(-params.threshold * params.noise * inv_g / params.power)
    if params.gamma == 0:
        out = noise_term
    else:
        s = laplace_argument(d, params)
        if cache is not None:
            J = cache.exponent(s)
        else:
            flat = np.atleast_1d(s).ravel()
            J = interference_exponent(config.distribution, receiver, flat, params.eta, params.epsilon)
            J = J.reshape(np.shape(s))
        out = noise_term * interference_factor(J, config.node_count, process)
    return float(out) if np.ndim(out) == 0 else out


def unit_disk_probability(d_ij, threshold_radius: float = 1.0):
    """Deterministic link: 1 inside the connection radius, 0 outside."""
    d = np.asarray(d_ij, dtype=float)
    if np.any(d < 0):
        raise ValueError("link length must be non-negative")
    out = np.where(d < threshold_radius, 1.0, 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# closed forms at the centre of a disk (approximate mobile pdf)


def laplace_disk_center_hyp2f1(R, rho, wp, eta, epsilon, s):
    """General-``eta`` closed form through Gauss hypergeometric functions."""
    if s == 0:
        return 1.0
    c = s + epsilon
    z = -(R**eta) / c
    f2 = hyp2f1(1.0, 2.0 / eta, 2.0 / eta + 1.0, z)
    f4 = hyp2f1(1.0, 4.0 / eta, 4.0 / eta + 1.0, z)
    pre = math.pi * R * R * s * rho / c
    return math.exp(-wp * pre * f2 - (1.0 - wp) * pre * (2.0 * f2 - f4))


def laplace_disk_center_eta2(R, rho, wp, epsilon, s):
    c = s + epsilon
    if s == 0:
        return 1.0
    lg = math.log1p(R * R / c)
    return math.exp(-wp * s * math.pi * rho * lg
                    + 2.0 * rho * math.pi * s * (1.0 - wp) / (R * R) * (R * R - (c + R * R) * lg))


def laplace_disk_center_eta4(R, rho, wp, epsilon, s):
    if s == 0:
        return 1.0
    rc = math.sqrt(s + epsilon)
    at = math.atan(R * R / rc)
    return math.exp(-wp * s * math.pi * rho / rc * at
                    + rho * math.pi * s * (1.0 - wp) / rc * (rc / (R * R) * math.log1p(R**4 / rc**2) - 2.0 * at))


def laplace_disk_center_closed(R, rho, wp, eta, epsilon, s):
    """Laplace transform of the interference at the disk centre.

    Dispatches to the elementary forms for ``eta`` equal to 2 or 4 and to the
    hypergeometric form otherwise.  ``rho = N / (pi R^2)``.
    """
    if eta == 2:
        return laplace_disk_center_eta2(R, rho, wp, epsilon, s)
    if eta == 4:
        return laplace_disk_center_eta4(R, rho, wp, epsilon, s)
    return laplace_disk_center_hyp2f1(R, rho, wp, eta, epsilon, s)


def is_disk_center(domain, receiver) -> bool:
    return isinstance(domain, Disk) and receiver[0] == 0 and receiver[1] == 0
