"""Experiment configuration: an INI file with fixed sections, overridable by flags.

Every value is stored as a canonical string so that a configuration written
out by :meth:`ExperimentConfig.to_ini` (or embedded in a table header) reads
back to exactly the same experiment.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..channel import ChannelParams
from ..geometry import Disk, Rectangle
from ..rwpm import MobilityParams, StationaryDistribution, leg_statistics


class ConfigError(ValueError):
    """Invalid configuration; ``problems`` lists ``(field path, message)`` pairs."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(f"{p}: {m}" for p, m in self.problems))


def _canon_float(text):
    return repr(float(text))


def _canon_int(text):
    v = float(text)
    if v != int(v):
        raise ValueError("expected an integer")
    return str(int(v))


def _canon_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return "true"
    if t in ("0", "false", "no", "off"):
        return "false"
    raise ValueError("expected true or false")


def _choice(*options):
    def canon(text):
        t = str(text).strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t
    return canon


def _canon_list(text):
    return ", ".join(p.strip() for p in str(text).split(",") if p.strip())


def _canon_numbers(text):
    """A comma list, or ``lin:start:stop:n`` / ``log:start:stop:n``."""
    t = str(text).strip().replace(" ", "")
    if t.startswith(("lin:", "log:")):
        kind, *rest = t.split(":")
        if len(rest) != 3:
            raise ValueError(f"{kind} spacing needs start:stop:count")
        lo, hi, n = float(rest[0]), float(rest[1]), _canon_int(rest[2])
        if int(n) < 1:
            raise ValueError("count must be positive")
        if kind == "log" and not (lo > 0 and hi > 0):
            raise ValueError("log spacing needs positive bounds")
        return f"{kind}:{lo!r}:{hi!r}:{n}"
    if not t:
        return ""
    return ", ".join(repr(float(p)) for p in t.split(","))


def expand_numbers(spec: str) -> np.ndarray:
    if not spec:
        return np.empty(0)
    if spec.startswith(("lin:", "log:")):
        kind, lo, hi, n = spec.split(":")
        fn = np.linspace if kind == "lin" else np.geomspace
        return fn(float(lo), float(hi), int(n))
    return np.array([float(p) for p in spec.split(",")])


# section -> key -> (canonicaliser, default, help)
SCHEMA = {
    "domain": {
        "shape": (_choice("rectangle", "disk"), "rectangle", "rectangle [-a,a]x[-b,b] or disk of radius R"),
        "a": (_canon_float, "1.0", "rectangle half-width (a >= b)"),
        "b": (_canon_float, "1.0", "rectangle half-height"),
        "R": (_canon_float, "1.0", "disk radius"),
    },
    "mobility": {
        "v_min": (_canon_float, "1.0", "minimum speed"),
        "k": (_canon_float, "1.0", "speed ratio v_max / v_min"),
        "t_max": (_canon_float, "0.0", "maximum pause time"),
        "pause_probabilities": (_canon_numbers, "", "pause probabilities to sweep; empty derives one from the mobility"),
        "pdf": (_choice("approximate", "exact"), "approximate", "mobile pdf used by the analytic paths"),
    },
    "channel": {
        "power": (_canon_float, "1.0", "transmit power P"),
        "noise": (_canon_float, "1.0", "noise power N0"),
        "eta": (_canon_float, "4.0", "path-loss exponent"),
        "epsilon": (_canon_float, "0.0", "path-loss regulariser"),
        "gamma": (_canon_float, "1.0", "interference fraction"),
        "threshold": (_canon_float, "1.0", "SINR threshold q"),
    },
    "network": {
        "nodes": (_canon_numbers, "40.0", "node count(s) N"),
        "receivers": (_canon_list, "centre, edge", "named points (centre, edge, edge_y, corner) or x:y"),
        "link_lengths": (_canon_numbers, "lin:0.05:2.0:40", "transmitter-receiver distances"),
        "heatmap": (_canon_bool, "false", "connect: H over the top-right quadrant instead of curves"),
    },
    "run": {
        "grid": (_canon_int, "51", "grid resolution per axis"),
        "seed": (_canon_int, "0", "random seed"),
        "trials": (_canon_int, "10000", "Monte-Carlo trials per estimate"),
        "format": (_choice("csv", "json"), "csv", "table format"),
        "plot": (_canon_bool, "false", "also write SVG plots"),
        "compare": (_canon_bool, "false", "pdf: add the exact-minus-approximate table"),
        "suite": (_choice("scenario", "grid"), "scenario", "simulate: this configuration or the 40-case grid"),
    },
}

NAMED_POINTS = ("centre", "edge", "edge_y", "corner")


@dataclass
class ExperimentConfig:
    values: dict = field(default_factory=lambda: {s: {k: v[1] for k, v in keys.items()} for s, keys in SCHEMA.items()})

    # -- construction -------------------------------------------------------

    @classmethod
    def from_mapping(cls, mapping, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        """Merge ``{section: {key: value}}`` into ``base`` (or the defaults), then validate."""
        cfg = cls({s: dict(v) for s, v in (base or cls()).values.items()})
        problems = []
        for section, keys in mapping.items():
            if section not in SCHEMA:
                problems.append((section, "unknown section"))
                continue
            for key, raw in keys.items():
                if key not in SCHEMA[section]:
                    problems.append((f"{section}.{key}", "unknown key"))
                    continue
                try:
                    cfg.values[section][key] = SCHEMA[section][key][0](raw)
                except (ValueError, TypeError) as exc:
                    problems.append((f"{section}.{key}", str(exc)))
        try:
            cfg.validate()
        except ConfigError as exc:
            problems += exc.problems
        if problems:
            raise ConfigError(problems)
        return cfg

    @classmethod
    def from_text(cls, text: str, base=None) -> "ExperimentConfig":
        lines = text.splitlines()
        if lines and lines[0].startswith("#"):
            return cls.from_mapping(_mapping_from_header(lines), base)
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError([("file", str(exc).splitlines()[0])]) from None
        return cls.from_mapping({s: dict(parser[s]) for s in parser.sections()}, base)

    @classmethod
    def from_file(cls, path, base=None) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError([("--config", str(exc))]) from None
        return cls.from_text(text, base)

    def to_ini(self) -> str:
        out = []
        for s, keys in self.values.items():
            out.append(f"[{s}]")
            out.extend(f"{k} = {v}" for k, v in keys.items())
            out.append("")
        return "\n".join(out)

    def flat(self):
        return [(f"config.{s}.{k}", v) for s, keys in self.values.items() for k, v in keys.items()]

    def replace(self, **sections) -> "ExperimentConfig":
        return ExperimentConfig.from_mapping(sections, self)

    # -- validation ---------------------------------------------------------

    def validate(self):
        problems = []
        d = self.values["domain"]
        if d["shape"] == "rectangle":
            a, b = float(d["a"]), float(d["b"])
            if not b > 0:
                problems.append(("domain.b", "must be positive"))
            if not a >= b:
                problems.append(("domain.a", "must be >= domain.b"))
        elif not float(d["R"]) > 0:
            problems.append(("domain.R", "must be positive"))
        m = self.values["mobility"]
        if not float(m["v_min"]) > 0:
            problems.append(("mobility.v_min", "must be positive"))
        if not float(m["k"]) >= 1:
            problems.append(("mobility.k", "must be >= 1"))
        if not float(m["t_max"]) >= 0:
            problems.append(("mobility.t_max", "must be non-negative"))
        wp = expand_numbers(m["pause_probabilities"])
        if np.any((wp < 0) | (wp > 1)):
            problems.append(("mobility.pause_probabilities", "must lie in [0, 1]"))
        c = {k: float(v) for k, v in self.values["channel"].items()}
        checks = [("power", c["power"] > 0, "must be positive"), ("noise", c["noise"] >= 0, "must be non-negative"),
                  ("eta", c["eta"] >= 2, "must be >= 2"), ("epsilon", c["epsilon"] >= 0, "must be non-negative"),
                  ("gamma", 0 <= c["gamma"] <= 1, "must lie in [0, 1]"),
                  ("threshold", c["threshold"] > 0, "must be positive")]
        problems += [(f"channel.{k}", msg) for k, ok, msg in checks if not ok]
        n = expand_numbers(self.values["network"]["nodes"])
        if n.size == 0 or np.any(n < 2) or np.any(n != np.round(n)):
            problems.append(("network.nodes", "node counts must be integers >= 2"))
        ll = expand_numbers(self.values["network"]["link_lengths"])
        if ll.size == 0 or np.any(ll < 0):
            problems.append(("network.link_lengths", "need at least one non-negative distance"))
        if not any(path.startswith("domain.") for path, _ in problems):
            try:
                self.receivers()
            except ConfigError as exc:
                problems += exc.problems
        r = self.values["run"]
        if int(r["grid"]) < 2:
            problems.append(("run.grid", "must be at least 2"))
        if int(r["trials"]) < 1:
            problems.append(("run.trials", "must be at least 1"))
        if not 0 <= int(r["seed"]) < 2**64:
            problems.append(("run.seed", "must be an unsigned 64-bit integer"))
        if problems:
            raise ConfigError(problems)

    # -- typed views --------------------------------------------------------

    def get(self, section, key):
        return self.values[section][key]

    @property
    def domain(self):
        d = self.values["domain"]
        if d["shape"] == "rectangle":
            return Rectangle(float(d["a"]), float(d["b"]))
        return Disk(float(d["R"]))

    @property
    def mobility(self) -> MobilityParams:
        m = self.values["mobility"]
        return MobilityParams(float(m["v_min"]), float(m["k"]), float(m["t_max"]))

    @property
    def pdf_kind(self) -> str:
        return self.values["mobility"]["pdf"]

    def pause_probabilities(self):
        wp = expand_numbers(self.values["mobility"]["pause_probabilities"])
        if wp.size:
            return [float(w) for w in wp]
        return [leg_statistics(self.domain, self.mobility).pause_probability]

    def distribution(self, wp: float) -> StationaryDistribution:
        return StationaryDistribution(self.domain, wp, self.pdf_kind)

    def channel(self, **over) -> ChannelParams:
        c = {k: float(v) for k, v in self.values["channel"].items()}
        c.update(over)
        return ChannelParams(**c)

    @property
    def node_counts(self):
        return [int(round(n)) for n in expand_numbers(self.values["network"]["nodes"])]

    @property
    def link_lengths(self) -> np.ndarray:
        return expand_numbers(self.values["network"]["link_lengths"])

    def receivers(self):
        """``[(label, (x, y))]`` resolved against the domain."""
        dom = self.domain
        out = []
        problems = []
        for item in _canon_list(self.values["network"]["receivers"]).split(", "):
            if not item:
                continue
            if ":" in item:
                try:
                    x, y = (float(t) for t in item.split(":"))
                except ValueError:
                    problems.append(("network.receivers", f"bad coordinate {item!r}"))
                    continue
                out.append((f"{x:g}:{y:g}", (x, y)))
                continue
            if item not in NAMED_POINTS:
                problems.append(("network.receivers", f"unknown point {item!r}"))
                continue
            if isinstance(dom, Rectangle):
                pt = {"centre": (0.0, 0.0), "edge": (dom.a, 0.0), "edge_y": (0.0, dom.b), "corner": (dom.a, dom.b)}[item]
            else:
                if item == "corner":
                    problems.append(("network.receivers", "a disk has no corner"))
                    continue
                pt = {"centre": (0.0, 0.0), "edge": (dom.R, 0.0), "edge_y": (0.0, dom.R)}[item]
            out.append((item, pt))
        for label, (x, y) in out:
            inside = (abs(x) <= dom.a and abs(y) <= dom.b) if isinstance(dom, Rectangle) else math.hypot(x, y) <= dom.R
            if not inside:
                problems.append(("network.receivers", f"{label} lies outside the domain"))
        if not out and not problems:
            problems.append(("network.receivers", "need at least one receiver"))
        if problems:
            raise ConfigError(problems)
        return out

    @property
    def grid(self) -> int:
        return int(self.values["run"]["grid"])

    @property
    def seed(self) -> int:
        return int(self.values["run"]["seed"])

    @property
    def trials(self) -> int:
        return int(self.values["run"]["trials"])

    def flag(self, key) -> bool:
        return self.values["run"][key] == "true" if key in self.values["run"] else self.values["network"][key] == "true"


def _mapping_from_header(lines):
    mapping = {}
    for line in lines:
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if not body.startswith("config.") or "=" not in body:
            continue
        key, value = body.split("=", 1)
        _, section, name = key.split(".", 2)
        mapping.setdefault(section, {})[name] = value
    return mapping
