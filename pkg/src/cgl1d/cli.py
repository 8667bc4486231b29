"""Command line interface.

Usage::

    cgl1d run --config run.ini [--problem ID] [--order {3,5,7}] [--solver {hll,hlli,rusanov}]
              [--n N] [--cfl C] [--t-end T] [--tau X | --no-source] [--out DIR]
              [--dump-every K] [--no-flattener] [--convergence n1,n2,...]

The optional config file is INI-style; keys in ``[run]`` have the same names
as the long options (with underscores), and ``[convergence]`` may hold
``meshes = 10,20,40``::

    [run]
    problem = accuracy
    order = 5
    solver = hll
    tau = none

    [convergence]
    meshes = 10,20,40,80,160

Command-line flags override the file. Exit codes: 0 success, 2 configuration
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from .errors import CGLError, ConfigError, NoExactSolution, NonPhysical, UnknownProblem
from .harness import DEFAULT, RunConfig, convergence_table, run_simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_NONE_WORDS = {"none", "off", "disabled", "no", "false"}


def _parse_meshes(text: str):
    try:
        return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError as exc:
        raise ConfigError(f"bad mesh list {text!r}") from exc


def _parse_tau(text):
    if text is None:
        return DEFAULT
    t = str(text).strip().lower()
    if t in _NONE_WORDS:
        return None
    if t == DEFAULT:
        return DEFAULT
    try:
        return float(t)
    except ValueError as exc:
        raise ConfigError(f"bad tau value {text!r}") from exc


def _bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean {text!r}")


def load_config_file(path) -> dict:
    """Settings from an INI file as a flat dict of RunConfig keyword values."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {str(p)!r} not found")
    cp = configparser.ConfigParser()
    try:
        cp.read(p)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {str(p)!r}: {exc}") from exc
    unknown = set(cp.sections()) - {"run", "convergence"}
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    out: dict = {}
    if cp.has_section("run"):
        sec = cp["run"]
        conv = {
            "problem": str, "order": int, "solver": str, "n": int, "cfl": float, "t_end": float,
            "out": str, "dump_every": int, "flattener": _bool, "tau": _parse_tau,
        }
        for key, raw in sec.items():
            if key not in conv:
                raise ConfigError(f"unknown key {key!r} in [run]")
            try:
                out[key] = conv[key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    if cp.has_section("convergence"):
        sec = cp["convergence"]
        for key in sec:
            if key != "meshes":
                raise ConfigError(f"unknown key {key!r} in [convergence]")
        if "meshes" in sec:
            out["convergence"] = _parse_meshes(sec["meshes"])
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse's own exit code is already 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cgl1d", description="1-D CGL anisotropic-plasma solver")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run a problem or a convergence study")
    run.add_argument("--config", help="INI configuration file")
    run.add_argument("--problem")
    run.add_argument("--order", type=int, choices=(3, 5, 7))
    run.add_argument("--solver", choices=("hll", "hlli", "rusanov"))
    run.add_argument("--n", type=int)
    run.add_argument("--cfl", type=float)
    run.add_argument("--t-end", dest="t_end", type=float)
    src = run.add_mutually_exclusive_group()
    src.add_argument("--tau", help="relaxation time (or 'none')")
    src.add_argument("--no-source", action="store_true", help="switch the relaxation source off")
    run.add_argument("--out", help="output directory")
    run.add_argument("--dump-every", dest="dump_every", type=int, help="write fields every K steps")
    run.add_argument("--no-flattener", action="store_true")
    run.add_argument("--convergence", help="comma-separated mesh sizes")
    return parser


def config_from_args(args) -> RunConfig:
    settings = load_config_file(args.config) if args.config else {}
    for key in ("problem", "order", "solver", "n", "cfl", "t_end", "out", "dump_every"):
        v = getattr(args, key)
        if v is not None:
            settings[key] = v
    if args.no_source:
        settings["tau"] = None
    elif args.tau is not None:
        settings["tau"] = _parse_tau(args.tau)
    if args.no_flattener:
        settings["flattener"] = False
    if args.convergence:
        settings["convergence"] = _parse_meshes(args.convergence)
    try:
        return RunConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, UnknownProblem) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if cfg.convergence:
            rows, text = convergence_table(cfg)
            print(text)
        else:
            res = run_simulation(cfg)
            s = res.summary()
            print(f"{cfg.spec.id}: t = {s['time']:.6g} after {s['steps']} steps "
                  f"(min rho {s['min_rho']:.6g}, {s['wall_time_s']} s)")
            for f in res.files:
                print(f"  wrote {f}")
    except NonPhysical as exc:
        where = f" (zone {exc.index}, t = {exc.time})" if exc.index is not None else ""
        print(f"numerical failure: {exc}{where}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, UnknownProblem, NoExactSolution) as exc:
        # asking for a convergence study of a problem without an exact solution
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CGLError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
