"""Command-line front end.

``rwpnet <command> [--config FILE] [--out DIR] [--<key> VALUE ...]``

Every configuration key is also a flag (underscores become hyphens), and
flags override the config file.  Exit status: 0 success, 2 configuration
error, 3 numerical convergence failure, 4 validation-gate failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .. import __version__
from ..errors import ConvergenceError, DomainError, GeometryError, SingularityError
from .commands import COMMANDS, PRESETS, cmd_figure
from .config import SCHEMA, ConfigError, ExperimentConfig

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_VALIDATION = 0, 2, 3, 4

BOOL_KEYS = {k for keys in SCHEMA.values() for k, v in keys.items() if v[1] in ("true", "false")}


def _flag(key):
    return "--" + key.replace("_", "-")


def _add_config_flags(p):
    p.add_argument("--config", help="INI file with [domain] [mobility] [channel] [network] [run] sections")
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    for section, keys in SCHEMA.items():
        group = p.add_argument_group(section)
        for key, (_, default, text) in keys.items():
            dest = f"{section}.{key}"
            if key in BOOL_KEYS:
                group.add_argument(_flag(key), dest=dest, action="store_const", const="true", help=text)
                group.add_argument("--no-" + key.replace("_", "-"), dest=dest, action="store_const", const="false",
                                   help=argparse.SUPPRESS)
            else:
                group.add_argument(_flag(key), dest=dest, metavar="VALUE", help=f"{text} (default {default!r})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rwpnet", description="Random-waypoint network connectivity and throughput.")
    parser.add_argument("--version", action="version", version=f"rwpnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"pdf": "stationary node density on a grid", "connect": "connection probability curves or heatmap",
             "mu": "spatial density of successful transmissions vs node count",
             "simulate": "Monte-Carlo validation against the analytic results"}
    for name in COMMANDS:
        _add_config_flags(sub.add_parser(name, help=helps[name]))
    fig = sub.add_parser("figure", help="preset reproductions of the reference figures")
    fig.add_argument("name", choices=sorted(PRESETS))
    _add_config_flags(fig)
    audit = sub.add_parser("audit", help="compare published closed forms with the quadrature paths")
    audit.add_argument("--out", default="out")
    return parser


def _overrides(ns):
    over = {}
    for section, keys in SCHEMA.items():
        for key in keys:
            v = getattr(ns, f"{section}.{key}", None)
            if v is not None:
                over.setdefault(section, {})[key] = v
    return over


def _emit(run, out: Path, fmt: str, plot: bool, started: float, command: str):
    out.mkdir(parents=True, exist_ok=True)
    written = [str(t.write(out, fmt).name) for t in run.tables]
    if plot:
        for name, render in run.plots:
            render(out / name)
            written.append(name)
    # wall-clock data lives here so the tables stay byte-stable
    manifest = {"version": __version__, "command": command, "files": written,
                "elapsed_seconds": round(time.perf_counter() - started, 3)}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    for w in written:
        print(out / w)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    started = time.perf_counter()
    out = Path(ns.out)
    try:
        if ns.command == "audit":
            from ..audit import write_report

            print(write_report(out / "closed_form_audit.md"))
            return EXIT_OK
        over = _overrides(ns)
        base = ExperimentConfig.from_file(ns.config) if ns.config else None
        if ns.command == "figure":
            run = cmd_figure(ns.name, over, base)
            cfg = ExperimentConfig.from_mapping(over, base)
            label = f"figure {ns.name}"
        else:
            cfg = ExperimentConfig.from_mapping(over, base)
            run = COMMANDS[ns.command](cfg)
            label = ns.command
        _emit(run, out, cfg.get("run", "format"), cfg.flag("plot"), started, label)
    except ConfigError as exc:
        for path, msg in exc.problems:
            print(f"config error: {path}: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (GeometryError, DomainError, SingularityError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    if run.failed_gates:
        print(f"validation: {run.failed_gates} gate(s) failed", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


__all__ = ["EXIT_CONFIG", "EXIT_CONVERGENCE", "EXIT_OK", "EXIT_VALIDATION", "build_parser", "main"]
