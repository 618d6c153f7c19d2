import math

import numpy as np
import pytest

from rwpnet.channel import ChannelParams, NetworkConfig, connection_probability
from rwpnet.errors import GeometryError
from rwpnet.geometry import Disk, Rectangle, contains
from rwpnet.montecarlo import (SnapshotEstimate, bin_probabilities, binomial_bin_gate, chi_square_gate,
                               empirical_connection_probability, empirical_counts, empirical_mu,
                               empirical_pause_probability, ensemble_positions, position_at, positions_at,
                               sample_stationary, sampler_acceptance_rate, simulate_ensemble, simulate_trajectory,
                               two_sample_gate, validation_grid)
from rwpnet.rwpm import MobilityParams, StationaryDistribution, leg_statistics, mean_leg_length_numeric
from rwpnet.throughput import mu_numeric


def test_estimate_interval():
    est = SnapshotEstimate(0.5, 0.01, 100)
    assert est.ci95 == pytest.approx((0.4804, 0.5196))
    assert est.brackets(0.529) and not est.brackets(0.531)


def test_sampler_is_deterministic_and_inside():
    dist = StationaryDistribution(Disk(2), 0.3)
    a = sample_stationary(dist, 5000, seed=3)
    assert np.array_equal(a, sample_stationary(dist, 5000, seed=3))
    assert not np.array_equal(a, sample_stationary(dist, 5000, seed=4))
    assert np.all(contains(dist.domain, a[:, 0], a[:, 1]))
    with pytest.raises(ValueError):
        sample_stationary(dist, 0)


@pytest.mark.parametrize("dom", [Rectangle(1, 1), Rectangle(5, 2), Disk(1)])
@pytest.mark.parametrize("wp", [0.0, 0.5])
def test_sampler_histogram_gates(dom, wp):
    dist = StationaryDistribution(dom, wp, "exact")
    edges, probs = bin_probabilities(dist, 10)
    assert probs.sum() == pytest.approx(1.0, abs=1e-5)
    passes = 0
    for seed in range(5):
        counts = empirical_counts(dom, sample_stationary(dist, 200_000, seed=seed), edges)
        assert binomial_bin_gate(counts, probs).passed
        passes += chi_square_gate(counts, probs).passed
    # at alpha = 0.01 one chance rejection in five runs has probability ~5%
    assert passes >= 4


def test_gate_detects_the_approximate_density():
    # the separable polynomial is visibly off the true law at this sample size
    dom = Rectangle(1, 1)
    edges, probs = bin_probabilities(StationaryDistribution(dom, 0.0, "approximate"), 10)
    counts = empirical_counts(dom, sample_stationary(StationaryDistribution(dom, 0.0), 1_000_000, seed=2), edges)
    assert not chi_square_gate(counts, probs).passed


def test_acceptance_rate():
    dom = Rectangle(3, 2)
    assert sampler_acceptance_rate(dom, mean_leg_length_numeric(dom)) == pytest.approx(
        mean_leg_length_numeric(dom) / dom.diameter)


def test_trajectory_geometry():
    dom = Rectangle(3, 2)
    tr = simulate_trajectory(dom, MobilityParams(1.0, 2.0, 0.5), 200.0, seed=5)
    assert tr.duration >= 200.0
    assert position_at(tr, 0.0)[0] == pytest.approx(tuple(tr.waypoints[0]))
    t = np.linspace(0, 200, 4001)
    pos, paused = positions_at(tr, t)
    assert np.all(contains(dom, pos[:, 0], pos[:, 1]))
    step = np.hypot(*np.diff(pos, axis=0).T)
    # never faster than v_max
    assert np.all(step <= 2.0 * (t[1] - t[0]) * (1 + 1e-9))
    assert np.all(step[paused[1:] & paused[:-1]] < 1e-12)
    with pytest.raises(ValueError):
        positions_at(tr, tr.duration * 2)


def test_trajectory_positions_match_direct_sampler():
    dom = Rectangle(1, 1)
    mob = MobilityParams(1.0, 1.0, 0.0)
    pos, _ = ensemble_positions(simulate_ensemble(dom, mob, 400, 100, seed=6), 25, seed=6)
    dist = StationaryDistribution(dom, 0.0)
    direct = sample_stationary(dist, len(pos), seed=7)
    edges, _ = bin_probabilities(dist, 8)
    gate = two_sample_gate(empirical_counts(dom, pos, edges), empirical_counts(dom, direct, edges))
    assert gate.passed


def test_pause_probability_from_trajectories():
    dom = Rectangle(1, 1)
    lbar = mean_leg_length_numeric(dom)
    mob = MobilityParams(1.0, 1.0, 0.6 * lbar)  # E[Tp] = 0.3 lbar
    target = leg_statistics(dom, mob).pause_probability
    est = empirical_pause_probability(simulate_ensemble(dom, mob, 300, 200, seed=8), 100, seed=8)
    assert est.brackets(target)
    assert empirical_pause_probability(simulate_ensemble(dom, MobilityParams(1.0), 5, 10), 10).value == 0.0


def test_link_simulation_brackets_the_binomial_form():
    dist = StationaryDistribution(Rectangle(3, 2), 0.5, "exact")
    net = NetworkConfig(20, dist)
    p = ChannelParams(eta=4.0, gamma=0.5)
    est = empirical_connection_probability(net, p, 0.6, (2.0, 1.0), 10_000, seed=9)
    assert est.brackets(connection_probability(net, p, 0.6, (2.0, 1.0), process="binomial"))
    again = empirical_connection_probability(net, p, 0.6, (2.0, 1.0), 10_000, seed=9)
    assert again == est


def test_mu_simulation_brackets_snr_quadrature():
    dist = StationaryDistribution(Disk(2), 0.0, "exact")
    net = NetworkConfig(30, dist)
    p = ChannelParams(eta=2.0, gamma=0.0)
    est = empirical_mu(net, p, (1.0, 0.0), 10_000, seed=10)
    assert est.brackets(mu_numeric(dist, p, (1.0, 0.0), 30))


def test_link_longer_than_domain_is_rejected():
    net = NetworkConfig(5, StationaryDistribution(Disk(1)))
    with pytest.raises(GeometryError):
        empirical_connection_probability(net, ChannelParams(), 2.5, (0, 0), 10)
    with pytest.raises(ValueError):
        empirical_mu(net, ChannelParams(), (0, 0), 0)


def test_validation_grid_coverage():
    grid = validation_grid()
    assert len(grid) == 40
    assert {type(c.domain) for c in grid} == {Rectangle, Disk}
    assert {0.0, 0.5, 1.0} <= {c.pause_probability for c in grid}
    assert {0.0, 0.5, 1.0} <= {c.gamma for c in grid}
    assert {2.0, 4.0} <= {c.eta for c in grid}
    for c in grid:
        assert contains(c.domain, *c.receiver)
        assert c.link_length < c.domain.diameter / 2
        assert math.isfinite(c.link_length)
