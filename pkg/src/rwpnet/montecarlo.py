"""Monte-Carlo counterpart of the analytic results.

Everything here draws from :class:`numpy.random.Generator` instances derived
from a user seed, so identical seeds give bit-identical output.  Trials are
grouped in fixed-size blocks; block ``i`` always uses the stream
``SeedSequence(seed, spawn_key=(i,))``, which keeps results independent of
how blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelParams, NetworkConfig, _check_receiver
from .errors import GeometryError
from .geometry import ConvexDomain, Disk, Rectangle, contains
from .rwpm import MobilityParams, StationaryDistribution

BLOCK = 1000
WARMUP_LEGS = 100


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


@dataclass(frozen=True)
class SnapshotEstimate:
    """Sample mean with its standard error; 95% interval is ``value +/- 1.96 * std_error``."""

    value: float
    std_error: float
    sample_count: int

    @property
    def ci95(self):
        return (self.value - 1.96 * self.std_error, self.value + 1.96 * self.std_error)

    def brackets(self, target: float, k: float = 3.0) -> bool:
        return abs(self.value - target) <= k * self.std_error


def _estimate(samples) -> SnapshotEstimate:
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    mean = math.fsum(samples) / n
    var = math.fsum((samples - mean) ** 2) / (n - 1) if n > 1 else 0.0
    return SnapshotEstimate(mean, math.sqrt(var / n), n)


# ---------------------------------------------------------------------------
# sampling


def uniform_points(domain: ConvexDomain, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(domain, Rectangle):
        return np.column_stack([rng.uniform(-domain.a, domain.a, n), rng.uniform(-domain.b, domain.b, n)])
    r = domain.R * np.sqrt(rng.random(n))
    th = rng.uniform(0.0, 2 * np.pi, n)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def mobile_points(domain: ConvexDomain, n: int, rng: np.random.Generator) -> np.ndarray:
    """Positions of moving nodes: a uniform point on a length-biased random leg.

    Endpoint pairs are accepted with probability ``|P1 P2| / diameter``.
    """
    out = np.empty((0, 2))
    diam = domain.diameter
    while len(out) < n:
        want = int(1.2 * (n - len(out)) * 3) + 16
        p1 = uniform_points(domain, want, rng)
        p2 = uniform_points(domain, want, rng)
        length = np.hypot(*(p2 - p1).T)
        keep = rng.random(want) * diam < length
        u = rng.random(int(keep.sum()))
        out = np.concatenate([out, p1[keep] + u[:, None] * (p2[keep] - p1[keep])])
    return out[:n]


def _sample(dist: StationaryDistribution, count: int, rng: np.random.Generator) -> np.ndarray:
    paused = rng.random(count) < dist.pause_probability
    pts = np.empty((count, 2))
    n_p = int(paused.sum())
    pts[paused] = uniform_points(dist.domain, n_p, rng)
    pts[~paused] = mobile_points(dist.domain, count - n_p, rng)
    return pts


def sample_stationary(dist: StationaryDistribution, count: int, seed: int = 0) -> np.ndarray:
    """``count`` independent node positions from the stationary mixture.

    The moving component always follows the true RWPM law, whichever analytic
    pdf kind ``dist`` carries.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    chunks = []
    for block, start in enumerate(range(0, count, BLOCK * 100)):
        chunks.append(_sample(dist, min(BLOCK * 100, count - start), block_rng(seed, block)))
    return np.concatenate(chunks)


def sampler_acceptance_rate(domain: ConvexDomain, lbar: float) -> float:
    """Expected acceptance of the leg sampler, ``lbar / diameter``."""
    return lbar / domain.diameter


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True)
class Trajectory:
    """A node's legs.  Leg ``i`` runs ``waypoints[i] -> waypoints[i+1]``, then pauses."""

    waypoints: np.ndarray
    speeds: np.ndarray
    pauses: np.ndarray

    @property
    def leg_lengths(self) -> np.ndarray:
        return np.hypot(*np.diff(self.waypoints, axis=0).T)

    @property
    def start_times(self) -> np.ndarray:
        """Departure time of every leg (plus the end of the last pause)."""
        per_leg = self.leg_lengths / self.speeds + self.pauses
        return np.concatenate([[0.0], np.cumsum(per_leg)])

    @property
    def duration(self) -> float:
        return float(self.start_times[-1])

    def leg_start(self, i: int) -> float:
        return float(self.start_times[i])


def simulate_trajectory(domain: ConvexDomain, mobility: MobilityParams, duration: float, seed: int = 0) -> Trajectory:
    """Random-waypoint path long enough to cover ``[0, duration]``."""
    if not duration > 0:
        raise ValueError("duration must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pts = [uniform_points(domain, 1, rng)]
    speeds, pauses = [], []
    elapsed = 0.0
    batch = 64
    while elapsed < duration:
        wp = uniform_points(domain, batch, rng)
        v = rng.uniform(mobility.v_min, mobility.v_max, batch)
        tp = rng.uniform(0.0, mobility.t_max, batch) if mobility.t_max > 0 else np.zeros(batch)
        prev = np.concatenate([pts[-1][-1:], wp[:-1]])
        legs = np.hypot(*(wp - prev).T) / v + tp
        cum = elapsed + np.cumsum(legs)
        need = int(np.searchsorted(cum, duration) + 1)
        need = min(need, batch)
        pts.append(wp[:need])
        speeds.append(v[:need])
        pauses.append(tp[:need])
        elapsed = float(cum[need - 1])
    return Trajectory(np.concatenate(pts), np.concatenate(speeds), np.concatenate(pauses))


def positions_at(traj: Trajectory, t) -> tuple[np.ndarray, np.ndarray]:
    """Positions and paused flags at times ``t`` (vectorised)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    starts = traj.start_times
    if np.any(t < 0) or np.any(t > starts[-1] * (1 + 1e-12)):
        raise ValueError("time outside the trajectory")
    leg = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(traj.speeds) - 1)
    travel = traj.leg_lengths[leg] / traj.speeds[leg]
    tau = t - starts[leg]
    moving_frac = np.where(travel > 0, np.minimum(tau / np.where(travel > 0, travel, 1.0), 1.0), 1.0)
    p0 = traj.waypoints[leg]
    p1 = traj.waypoints[leg + 1]
    pos = p0 + moving_frac[:, None] * (p1 - p0)
    paused = tau >= travel
    return pos, paused


def position_at(traj: Trajectory, t: float):
    pos, paused = positions_at(traj, t)
    return (float(pos[0, 0]), float(pos[0, 1])), bool(paused[0])


def simulate_ensemble(domain, mobility: MobilityParams, nodes: int, legs_after_warmup: int, seed: int = 0):
    """Independent trajectories, each with ``WARMUP_LEGS`` burn-in legs plus ``legs_after_warmup``."""
    out = []
    for i in range(nodes):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        n = WARMUP_LEGS + legs_after_warmup
        wp = uniform_points(domain, n + 1, rng)
        v = rng.uniform(mobility.v_min, mobility.v_max, n)
        tp = rng.uniform(0.0, mobility.t_max, n) if mobility.t_max > 0 else np.zeros(n)
        out.append(Trajectory(wp, v, tp))
    return out


def sample_times(traj: Trajectory, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random epochs in the post-warm-up window of ``traj``."""
    start = traj.leg_start(min(WARMUP_LEGS, len(traj.speeds)))
    return rng.uniform(start, traj.duration, count)


def ensemble_positions(trajectories: Sequence[Trajectory], per_node: int, seed: int = 0):
    pos, flags = [], []
    for i, tr in enumerate(trajectories):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(10_000_000 + i,)))
        p, f = positions_at(tr, sample_times(tr, per_node, rng))
        pos.append(p)
        flags.append(f)
    return np.concatenate(pos), np.concatenate(flags)


def empirical_pause_probability(trajectories: Sequence[Trajectory], per_node: int = 200, seed: int = 0) -> SnapshotEstimate:
    """Fraction of time spent paused, from random post-warm-up epochs.

    Nodes are independent, so the standard error comes from the spread of the
    per-node fractions.
    """
    fractions = []
    for i, tr in enumerate(trajectories):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(10_000_000 + i,)))
        _, paused = positions_at(tr, sample_times(tr, per_node, rng))
        fractions.append(paused.mean())
    est = _estimate(fractions)
    return SnapshotEstimate(est.value, est.std_error, len(trajectories) * per_node)


# ---------------------------------------------------------------------------
# link-level simulation


def _place_transmitters(domain, receiver, d, n, rng, max_tries: int = 1000):
    rx, ry = receiver
    out = np.empty((n, 2))
    todo = np.arange(n)
    for _ in range(max_tries):
        th = rng.uniform(0.0, 2 * np.pi, todo.size)
        cand = np.column_stack([rx + d * np.cos(th), ry + d * np.sin(th)])
        ok = contains(domain, cand[:, 0], cand[:, 1], tol=0.0)
        out[todo[ok]] = cand[ok]
        todo = todo[~ok]
        if todo.size == 0:
            return out
    raise GeometryError(f"no transmitter position at distance {d} from {receiver} inside the domain")


def _has_valid_direction(domain, receiver, d) -> bool:
    th = np.linspace(0, 2 * np.pi, 3601)
    return bool(np.any(contains(domain, receiver[0] + d * np.cos(th), receiver[1] + d * np.sin(th), tol=0.0)))


def _gain(d, params: ChannelParams):
    return 1.0 / (params.epsilon + d**params.eta)


def empirical_connection_probability(config: NetworkConfig, params: ChannelParams, d_ij: float, receiver,
                                     trials: int = 10_000, seed: int = 0) -> SnapshotEstimate:
    """Fraction of trials with SINR above threshold.

    Each trial drops ``N - 1`` interferers from the stationary law, puts the
    transmitter at distance ``d_ij`` from the receiver in a uniformly random
    direction (redrawn until it lands inside the domain) and draws unit-mean
    exponential fading on every link.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    _check_receiver(config.domain, receiver)
    if not _has_valid_direction(config.domain, receiver, d_ij):
        raise GeometryError(f"link length {d_ij} does not fit inside the domain from {tuple(receiver)}")
    n_int = config.node_count - 1
    rx, ry = float(receiver[0]), float(receiver[1])
    hits = []
    for block, start in enumerate(range(0, trials, BLOCK)):
        m = min(BLOCK, trials - start)
        rng = block_rng(seed, block)
        _place_transmitters(config.domain, (rx, ry), d_ij, m, rng)
        pts = _sample(config.distribution, m * n_int, rng).reshape(m, n_int, 2)
        dk = np.hypot(pts[..., 0] - rx, pts[..., 1] - ry)
        interference = params.power * np.sum(rng.exponential(1.0, (m, n_int)) * _gain(dk, params), axis=1)
        signal = params.power * rng.exponential(1.0, m) * _gain(d_ij, params)
        sinr = signal / (params.noise + params.gamma * interference)
        hits.append(sinr > params.threshold)
    return _estimate(np.concatenate(hits))


def empirical_mu(config: NetworkConfig, params: ChannelParams, receiver, trials: int = 10_000,
                 seed: int = 0) -> SnapshotEstimate:
    """Mean number of the ``N - 1`` other nodes whose transmission the receiver decodes.

    Every candidate transmitter is judged against the ``N - 2`` remaining nodes
    as interferers, scaled by ``gamma``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    _check_receiver(config.domain, receiver)
    n = config.node_count - 1
    rx, ry = float(receiver[0]), float(receiver[1])
    counts = []
    for block, start in enumerate(range(0, trials, BLOCK)):
        m = min(BLOCK, trials - start)
        rng = block_rng(seed, block)
        pts = _sample(config.distribution, m * n, rng).reshape(m, n, 2)
        dk = np.hypot(pts[..., 0] - rx, pts[..., 1] - ry)
        with np.errstate(divide="ignore"):
            power = params.power * rng.exponential(1.0, (m, n)) * _gain(dk, params)
        total = power.sum(axis=1, keepdims=True)
        sinr = power / (params.noise + params.gamma * (total - power))
        counts.append(np.sum(sinr > params.threshold, axis=1))
    return _estimate(np.concatenate(counts))


# ---------------------------------------------------------------------------
# histogram gates


@dataclass(frozen=True)
class GateResult:
    statistic: float
    threshold: float
    passed: bool
    detail: str = ""


def _gl_bins(f, xe, ye, order: int = 12):
    """Per-bin integrals of ``f`` over a tensor grid of bins, by Gauss-Legendre."""
    t, w = np.polynomial.legendre.leggauss(order)
    hx, cx = np.diff(xe) / 2, (xe[1:] + xe[:-1]) / 2
    hy, cy = np.diff(ye) / 2, (ye[1:] + ye[:-1]) / 2
    xs = (cx[:, None] + hx[:, None] * t[None, :]).ravel()
    ys = (cy[:, None] + hy[:, None] * t[None, :]).ravel()
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    vals = f(X.ravel(), Y.ravel()).reshape(xe.size - 1, order, ye.size - 1, order)
    return np.einsum("iajb,a,b->ij", vals, w, w) * hx[:, None] * hy[None, :]


def bin_probabilities(dist: StationaryDistribution, bins: int):
    """Model probability of each histogram cell.

    Rectangles use a ``bins x bins`` Cartesian grid; disks use ``bins``
    equal-width rings.  Returns ``(edges, probabilities)``.
    """
    dom = dist.domain
    if isinstance(dom, Rectangle):
        xe = np.linspace(-dom.a, dom.a, bins + 1)
        ye = np.linspace(-dom.b, dom.b, bins + 1)
        probs = _gl_bins(dist.pdf, xe, ye)
        return (xe, ye), probs
    re = np.linspace(0.0, dom.R, bins + 1)
    t, w = np.polynomial.legendre.leggauss(16)
    h, c = np.diff(re) / 2, (re[1:] + re[:-1]) / 2
    r = c[:, None] + h[:, None] * t[None, :]
    vals = dist.pdf(r.ravel(), np.zeros(r.size)).reshape(r.shape)
    return re, 2 * np.pi * h * ((vals * r) @ w)


def empirical_counts(dom: ConvexDomain, pts: np.ndarray, edges):
    if isinstance(dom, Rectangle):
        counts, _, _ = np.histogram2d(pts[:, 0], pts[:, 1], bins=list(edges))
        return counts
    counts, _ = np.histogram(np.hypot(pts[:, 0], pts[:, 1]), bins=edges)
    return counts


def binomial_bin_gate(counts, probs, k: float = 4.0) -> GateResult:
    """Largest per-bin z-score of observed counts against binomial expectations."""
    counts = np.asarray(counts, dtype=float).ravel()
    probs = np.asarray(probs, dtype=float).ravel()
    n = counts.sum()
    se = np.sqrt(n * probs * (1 - probs))
    z = float(np.max(np.abs(counts - n * probs) / se))
    return GateResult(z, k, z <= k, f"max |z| over {counts.size} bins")


def chi_square_gate(counts, probs, alpha: float = 0.01) -> GateResult:
    from scipy.stats import chisquare

    counts = np.asarray(counts, dtype=float).ravel()
    probs = np.asarray(probs, dtype=float).ravel()
    res = chisquare(counts, counts.sum() * probs / probs.sum())
    return GateResult(float(res.pvalue), alpha, bool(res.pvalue > alpha), "chi-square p-value")


def two_sample_gate(counts_a, counts_b, alpha: float = 0.01) -> GateResult:
    """Chi-square homogeneity test between two histograms on the same bins."""
    from scipy.stats import chi2_contingency

    table = np.vstack([np.asarray(counts_a).ravel(), np.asarray(counts_b).ravel()])
    table = table[:, table.sum(axis=0) > 0]
    res = chi2_contingency(table, correction=False)
    return GateResult(float(res.pvalue), alpha, bool(res.pvalue > alpha), "homogeneity p-value")


# ---------------------------------------------------------------------------
# validation grid


@dataclass(frozen=True)
class GridCase:
    domain: ConvexDomain
    pause_probability: float
    gamma: float
    eta: float
    node_count: int
    receiver: tuple
    link_length: float


def validation_grid() -> list:
    """Forty cases covering both domain shapes, three pause probabilities,
    three interference fractions and two path-loss exponents."""
    shapes = [(Rectangle(3.0, 2.0), [(0.0, 0.0), (2.0, 1.0), (3.0, 2.0)]),
              (Disk(2.5), [(0.0, 0.0), (1.5, 0.0), (0.0, 2.5)])]
    cases = []
    i = 0
    for dom, receivers in shapes:
        for wp in (0.0, 0.5, 1.0):
            for gamma in (0.0, 0.5, 1.0):
                for eta in (2.0, 4.0):
                    rx = receivers[i % 3]
                    d = (0.4, 0.7, 1.0)[(i // 3) % 3]
                    n = (20, 40)[i % 2]
                    cases.append(GridCase(dom, wp, gamma, eta, n, rx, d))
                    i += 1
    cases += [GridCase(Rectangle(3.0, 2.0), 0.25, 0.75, 3.0, 30, (1.0, -1.0), 0.5),
              GridCase(Disk(2.5), 0.25, 0.75, 3.0, 30, (-1.0, 1.0), 0.5),
              GridCase(Rectangle(4.0, 4.0), 0.0, 1.0, 4.0, 60, (4.0, 4.0), 0.6),
              GridCase(Disk(4.0), 1.0, 0.5, 2.0, 60, (0.0, 0.0), 0.6)]
    return cases
