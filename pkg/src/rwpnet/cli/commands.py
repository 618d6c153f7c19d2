"""Subcommand bodies.  Each returns a :class:`Run` holding tables and plot jobs."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..channel import NetworkConfig, connection_probability, unit_disk_probability
from ..geometry import Disk, Rectangle, contains
from ..montecarlo import (bin_probabilities, binomial_bin_gate, empirical_connection_probability, empirical_counts,
                          empirical_mu, empirical_pause_probability, sample_stationary, sampler_acceptance_rate,
                          simulate_ensemble, validation_grid)
from ..rwpm import StationaryDistribution, leg_statistics
from ..throughput import laplace_cache, mu_numeric
from . import svg
from .config import ConfigError, ExperimentConfig
from .tables import ResultTable

THREADS_ENV = "RWPNET_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError([(THREADS_ENV, "must be a positive integer")]) from None
        if n < 1:
            raise ConfigError([(THREADS_ENV, "must be a positive integer")])
        return n
    return os.cpu_count() or 1


def pmap(fn, items):
    """Ordered parallel map; output order never depends on scheduling."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class Run:
    tables: list = field(default_factory=list)
    plots: list = field(default_factory=list)  # (filename, callable(path))
    failed_gates: int = 0


def base_metadata(cfg: ExperimentConfig, command: str, extra=()):
    return [("artifact", "rwpnet"), ("version", __version__), ("command", command), *extra, *cfg.flat()]


def _wp_label(wp):
    return f"wp={wp:g}"


# ---------------------------------------------------------------------------
# pdf


def cmd_pdf(cfg: ExperimentConfig, name: str = "pdf") -> Run:
    run = Run()
    dom = cfg.domain
    wps = cfg.pause_probabilities()
    n = cfg.grid
    meta = base_metadata(cfg, "pdf")
    if isinstance(dom, Rectangle):
        xs = np.linspace(-dom.a, dom.a, n)
        ys = np.linspace(-dom.b, dom.b, n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        cols = [cfg.distribution(wp).pdf(X.ravel(), Y.ravel()) for wp in wps]
        run.tables.append(ResultTable(name, ["x", "y"] + [f"f_X[{_wp_label(w)}]" for w in wps],
                                      ["length", "length"] + ["1/area"] * len(wps),
                                      np.column_stack([X.ravel(), Y.ravel(), *cols]), meta))
        run.plots.append((f"{name}.svg", lambda p: svg.heatmap(p, xs, ys, cols[0].reshape(n, n),
                                                              title=f"stationary pdf, {_wp_label(wps[0])}")))
        if cfg.flag("compare"):
            exact = StationaryDistribution(dom, 0.0, "exact").mobile_pdf(X.ravel(), Y.ravel())
            approx = StationaryDistribution(dom, 0.0, "approximate").mobile_pdf(X.ravel(), Y.ravel())
            diff = approx - exact
            run.tables.append(ResultTable(f"{name}_difference", ["x", "y", "exact", "approximate", "approx_minus_exact"],
                                          ["length", "length", "1/area", "1/area", "1/area"],
                                          np.column_stack([X.ravel(), Y.ravel(), exact, approx, diff]), meta))
            run.plots.append((f"{name}_difference.svg",
                              lambda p: svg.heatmap(p, xs, ys, diff.reshape(n, n), diverging=True,
                                                    title="approximate minus exact mobile pdf")))
        return run
    r = np.linspace(0.0, dom.R, n)
    zero = np.zeros_like(r)
    cols = [cfg.distribution(wp).pdf(r, zero) for wp in wps]
    series = [(f"f_X[{_wp_label(w)}]", c) for w, c in zip(wps, cols)]
    names = [s for s, _ in series]
    data = [r, *cols]
    if cfg.flag("compare"):
        exact = StationaryDistribution(dom, 0.0, "exact").mobile_pdf(r, zero)
        approx = StationaryDistribution(dom, 0.0, "approximate").mobile_pdf(r, zero)
        names += ["exact", "approximate", "approx_minus_exact"]
        data += [exact, approx, approx - exact]
        series += [("exact mobile", exact), ("approximate mobile", approx)]
    run.tables.append(ResultTable(name, ["r"] + names, ["length"] + ["1/area"] * len(names), np.column_stack(data), meta))
    run.plots.append((f"{name}.svg", lambda p: svg.line_chart(p, r, series, "r", "pdf", "radial profile")))
    return run


# ---------------------------------------------------------------------------
# connect


def _link_lengths(cfg):
    d = cfg.link_lengths
    if float(cfg.get("channel", "epsilon")) == 0 and np.any(d == 0):
        raise ConfigError([("network.link_lengths", "zero distance is singular when epsilon = 0")])
    return d


def cmd_connect(cfg: ExperimentConfig, name: str = "connect") -> Run:
    if cfg.flag("heatmap"):
        return _connect_heatmap(cfg, name)
    run = Run()
    d = _link_lengths(cfg)
    params = cfg.channel()
    jobs = [(label, pt, wp, n) for n in cfg.node_counts for label, pt in cfg.receivers() for wp in cfg.pause_probabilities()]

    def one(job):
        label, pt, wp, n = job
        net = NetworkConfig(n, cfg.distribution(wp))
        return connection_probability(net, params, d, pt)

    curves = pmap(one, jobs)
    names = [f"H[{label} {_wp_label(wp)} N={n}]" for label, _, wp, n in jobs]
    snr = np.exp(-params.threshold * params.noise * (params.epsilon + d**params.eta) / params.power)
    unit = unit_disk_probability(d)
    cols = names + ["H[snr]", "H[unit_disk]"]
    table = ResultTable(name, ["d"] + cols, ["length"] + ["probability"] * len(cols),
                        np.column_stack([d, *curves, snr, unit]), base_metadata(cfg, "connect"))
    run.tables.append(table)
    series = list(zip(names, curves)) + [("SNR", snr), ("unit disk", unit)]
    run.plots.append((f"{name}.svg", lambda p: svg.line_chart(p, d, series, "link length d", "H",
                                                              f"connection probability, {type(cfg.domain).__name__}")))
    return run


def _connect_heatmap(cfg, name):
    run = Run()
    dom = cfg.domain
    n = cfg.grid
    d = float(_link_lengths(cfg)[0])
    wp = cfg.pause_probabilities()[0]
    params = cfg.channel()
    net = NetworkConfig(cfg.node_counts[0], cfg.distribution(wp))
    ex, ey = (dom.a, dom.b) if isinstance(dom, Rectangle) else (dom.R, dom.R)
    xs, ys = np.linspace(0.0, ex, n), np.linspace(0.0, ey, n)
    pts = [(x, y) for x in xs for y in ys]

    def one(pt):
        if not contains(dom, *pt):
            return math.nan
        return connection_probability(net, params, d, pt)

    h = np.array(pmap(one, pts))
    meta = base_metadata(cfg, "connect", [("link_length", repr(d)), ("pause_probability", repr(wp))])
    run.tables.append(ResultTable(name, ["x", "y", "H"], ["length", "length", "probability"],
                                  np.column_stack([np.array(pts), h]), meta))
    run.plots.append((f"{name}.svg", lambda p: svg.heatmap(p, xs, ys, h.reshape(n, n),
                                                          title=f"H at d={d:g}, receiver position")))
    return run


# ---------------------------------------------------------------------------
# mu


def cmd_mu(cfg: ExperimentConfig, name: str = "mu") -> Run:
    run = Run()
    params = cfg.channel()
    counts = np.unique(cfg.node_counts)
    jobs = [(label, pt, wp) for label, pt in cfg.receivers() for wp in cfg.pause_probabilities()]

    def one(job):
        label, pt, wp = job
        dist = cfg.distribution(wp)
        cache = laplace_cache(dist, params, pt) if params.gamma > 0 else None
        return np.atleast_1d(mu_numeric(dist, params, pt, counts, cache=cache))

    profiles = pmap(one, jobs)
    names = [f"mu[{label} {_wp_label(wp)}]" for label, _, wp in jobs]
    meta = base_metadata(cfg, "mu", [("density", "N / area, area=" + repr(cfg.domain.area))])
    run.tables.append(ResultTable(name, ["N"] + names, ["count"] + ["count"] * len(names),
                                  np.column_stack([counts, *profiles]), meta))
    series = list(zip(names, profiles))
    run.plots.append((f"{name}.svg", lambda p: svg.line_chart(p, counts, series, "N", "mu",
                                                              f"eps={params.epsilon:g}, gamma={params.gamma:g}",
                                                              logx=True)))
    return run


# ---------------------------------------------------------------------------
# simulate


SIM_COLUMNS = ["case", "estimate", "std_error", "analytic_poisson", "analytic_binomial", "z", "passed"]
SIM_UNITS = ["index", "value", "value", "value", "value", "sigma", "flag"]


def _sim_row(i, est, poisson, binomial):
    z = 0.0 if est.std_error == 0 and est.value == binomial else (
        (est.value - binomial) / est.std_error if est.std_error > 0 else math.inf)
    return [i, est.value, est.std_error, poisson, binomial, z, float(abs(z) <= 3.0)]


def cmd_simulate(cfg: ExperimentConfig, name: str = "simulate") -> Run:
    if cfg.get("run", "suite") == "grid":
        return _simulate_grid(cfg, name)
    run = Run()
    dom = cfg.domain
    seed = cfg.seed
    rows, cases = [], []
    extra = []

    # sampler histograms against the exact pdf
    for wp in cfg.pause_probabilities():
        dist = StationaryDistribution(dom, wp, "exact")
        edges, probs = bin_probabilities(dist, 16)
        gate = binomial_bin_gate(empirical_counts(dom, sample_stationary(dist, 10**5, seed), edges), probs)
        cases.append(f"sampler histogram {_wp_label(wp)}: max bin |z| (gate {gate.threshold:g})")
        rows.append([len(rows), gate.statistic, 0.0, math.nan, math.nan, gate.statistic, float(gate.passed)])
    extra.append(("sampler_acceptance_rate", repr(sampler_acceptance_rate(dom, StationaryDistribution(dom).mean_leg_length))))

    # pause probability from trajectories
    stats = leg_statistics(dom, cfg.mobility)
    est = empirical_pause_probability(simulate_ensemble(dom, cfg.mobility, 200, 300, seed), 100, seed)
    cases.append("pause probability from trajectories")
    rows.append(_sim_row(len(rows), est, stats.pause_probability, stats.pause_probability))

    params = cfg.channel()
    n = cfg.node_counts[0]
    for label, pt in cfg.receivers():
        for wp in cfg.pause_probabilities():
            dist = StationaryDistribution(dom, wp, "exact")
            net = NetworkConfig(n, dist)
            for d in _link_lengths(cfg)[:3]:
                est = empirical_connection_probability(net, params, float(d), pt, cfg.trials, seed + len(rows))
                hp = connection_probability(net, params, float(d), pt)
                hb = connection_probability(net, params, float(d), pt, process="binomial")
                cases.append(f"H {label} {_wp_label(wp)} N={n} d={float(d):g}")
                rows.append(_sim_row(len(rows), est, hp, hb))
            est = empirical_mu(net, params, pt, cfg.trials, seed + len(rows))
            mp = mu_numeric(dist, params, pt, n)
            mb = mu_numeric(dist, params, pt, n, process="binomial")
            cases.append(f"mu {label} {_wp_label(wp)} N={n}")
            rows.append(_sim_row(len(rows), est, mp, mb))
    run.failed_gates = int(sum(1 for r in rows if not r[-1]))
    meta = base_metadata(cfg, "simulate", extra + [(f"case.{i}", c) for i, c in enumerate(cases)])
    run.tables.append(ResultTable(name, SIM_COLUMNS, SIM_UNITS, np.array(rows), meta))
    return run


def run_grid(trials: int, seed: int):
    """The 40-case bracketing grid; returns ``(rows, case labels)``."""
    rows, cases = [], []
    from ..channel import ChannelParams

    for k, c in enumerate(validation_grid()):
        dist = StationaryDistribution(c.domain, c.pause_probability, "exact")
        net = NetworkConfig(c.node_count, dist)
        p = ChannelParams(eta=c.eta, gamma=c.gamma)
        desc = (f"{type(c.domain).__name__} {_wp_label(c.pause_probability)} gamma={c.gamma:g} eta={c.eta:g} "
                f"N={c.node_count} rx=({c.receiver[0]:g},{c.receiver[1]:g})")
        est = empirical_connection_probability(net, p, c.link_length, c.receiver, trials, seed + 2 * k)
        rows.append(_sim_row(len(rows), est, connection_probability(net, p, c.link_length, c.receiver),
                             connection_probability(net, p, c.link_length, c.receiver, process="binomial")))
        cases.append(f"H {desc} d={c.link_length:g}")
        est = empirical_mu(net, p, c.receiver, trials, seed + 2 * k + 1)
        rows.append(_sim_row(len(rows), est, mu_numeric(dist, p, c.receiver, c.node_count),
                             mu_numeric(dist, p, c.receiver, c.node_count, process="binomial")))
        cases.append(f"mu {desc}")
    return np.array(rows), cases


def _simulate_grid(cfg, name):
    run = Run()
    rows, cases = run_grid(cfg.trials, cfg.seed)
    h, m = rows[0::2], rows[1::2]
    frac_h, frac_m = h[:, -1].mean(), m[:, -1].mean()
    # the Poisson form is reported for comparison only
    pois = lambda r: np.mean(np.abs(r[:, 1] - r[:, 3]) <= 3 * r[:, 2])
    extra = [("bracketed_fraction_H", repr(float(frac_h))), ("bracketed_fraction_mu", repr(float(frac_m))),
             ("bracketed_fraction_H_poisson", repr(float(pois(h)))),
             ("bracketed_fraction_mu_poisson", repr(float(pois(m))))]
    run.failed_gates = int(frac_h < 0.95) + int(frac_m < 0.95)
    meta = base_metadata(cfg, "simulate", extra + [(f"case.{i}", c) for i, c in enumerate(cases)])
    run.tables.append(ResultTable(name, SIM_COLUMNS, SIM_UNITS, rows, meta))
    return run


# ---------------------------------------------------------------------------
# figure presets


def _merge(base, over):
    out = {s: dict(v) for s, v in base.items()}
    for s, keys in over.items():
        out.setdefault(s, {}).update(keys)
    return out


FIG3_A = 10.0
FIG5_R = 5.0
# integer node counts, log-spaced, with the checkpoints 200, 235 and 2000 included
FIG5_NODES = ", ".join(str(n) for n in sorted(set(np.round(np.geomspace(2, 2000, 80)).astype(int)) | {200, 235}))

PRESETS = {
    "fig2": [("fig2", "pdf", {"domain": {"shape": "rectangle", "a": "1", "b": "1"},
                              "mobility": {"pause_probabilities": "0"},
                              "run": {"grid": "101", "compare": "true"}})],
    "fig3": [(f"fig3_{shape}", "connect",
              {"domain": dom,
               "mobility": {"pause_probabilities": "0, 1", "pdf": "exact"},
               "channel": {"power": "1", "noise": "1", "threshold": "1", "eta": "2", "epsilon": "0", "gamma": "1"},
               "network": {"nodes": repr(4 * FIG3_A * FIG3_A), "receivers": recv,
                           "link_lengths": "lin:0.01:2.0:200"}})
             for shape, dom, recv in [("disk", {"shape": "disk", "R": repr(2 * FIG3_A / math.sqrt(math.pi))}, "centre, edge"),
                                      ("rectangle", {"shape": "rectangle", "a": repr(FIG3_A), "b": repr(FIG3_A)},
                                       "centre, edge, corner")]],
    "fig4": [("fig4_pdf", "pdf", {"domain": {"shape": "rectangle", "a": "5", "b": "2"},
                                  "mobility": {"pause_probabilities": "0", "pdf": "exact"}, "run": {"grid": "41"}}),
             ("fig4_connect", "connect", {"domain": {"shape": "rectangle", "a": "5", "b": "2"},
                                          "mobility": {"pause_probabilities": "0", "pdf": "exact"},
                                          "channel": {"power": "1", "noise": "1", "threshold": "1", "gamma": "1",
                                                      "eta": "4", "epsilon": "0"},
                                          "network": {"nodes": "40", "link_lengths": "0.5", "heatmap": "true",
                                                      "receivers": "centre"},
                                          "run": {"grid": "21"}})],
    "fig5": [(f"fig5_{shape}_eps{eps}", "mu",
              {"domain": dom,
               "mobility": {"pause_probabilities": "0, 0.5, 1", "pdf": "exact"},
               "channel": {"power": "1", "noise": "1", "threshold": "1", "eta": "4", "gamma": "0.5", "epsilon": eps},
               "network": {"nodes": FIG5_NODES, "receivers": recv}})
             for shape, dom, recv in [("disk", {"shape": "disk", "R": repr(FIG5_R)}, "centre, edge"),
                                      ("square", {"shape": "rectangle", "a": repr(math.sqrt(math.pi) * FIG5_R / 2),
                                                  "b": repr(math.sqrt(math.pi) * FIG5_R / 2)}, "centre, edge, corner")]
             for eps in ("0", "0.01")],
}

COMMANDS = {"pdf": cmd_pdf, "connect": cmd_connect, "mu": cmd_mu, "simulate": cmd_simulate}


def preset_configs(figure: str, overrides=None, base: ExperimentConfig | None = None):
    """``[(table name, command, config)]`` for a figure; ``overrides`` apply to every panel."""
    if figure not in PRESETS:
        raise ConfigError([("figure", f"unknown figure {figure!r}; choose from {', '.join(PRESETS)}")])
    out = []
    for name, command, mapping in PRESETS[figure]:
        cfg = ExperimentConfig.from_mapping(_merge(mapping, overrides or {}), base)
        out.append((name, command, cfg))
    return out


def cmd_figure(figure: str, overrides=None, base=None) -> Run:
    run = Run()
    for name, command, cfg in preset_configs(figure, overrides, base):
        part = COMMANDS[command](cfg, name)
        for t in part.tables:
            t.metadata.insert(3, ("figure", figure))
        run.tables += part.tables
        run.plots += part.plots
        run.failed_gates += part.failed_gates
    return run


__all__ = ["COMMANDS", "PRESETS", "Run", "cmd_connect", "cmd_figure", "cmd_mu", "cmd_pdf", "cmd_simulate",
           "preset_configs", "run_grid", "thread_count"]
