"""Command-line entry point: ``fdms simulate | reduce | reconstruct | momentum | verify``.

Exit codes: 0 success, 1 failed verification, 2 solver failure, 3 invalid
configuration or input file.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys

import numpy as np

from . import acceptance
from .errors import BasePointMismatch, EvaluationError, FDMSError, NoSection, NonConvergence, SingularJacobian
from .library import FAMILIES, build
from .momentum import drift_report
from .reconstruction import reconstruct
from .reduction import ReducedCurve, reduce_trajectory
from .solver import DiscreteCurve, StepConfig, trajectory

log = logging.getLogger("fdms")

EXIT_OK, EXIT_VERIFY, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2, 3


class ConfigError(FDMSError):
    pass


def fmt(x):
    # shortest round-tripping repr; never locale dependent
    return repr(float(x))


# --- CSV -------------------------------------------------------------------

def _emit(header, rows, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def write_curve(curve, out=None):
    header = ["k"] + [f"q_{i}" for i in range(curve.dim)]
    rows = [[str(k)] + [fmt(v) for v in q] for k, q in enumerate(curve.points)]
    _emit(header, rows, out)


def write_reduced(rcurve, out=None):
    """Rows k = 0..N carry tau_k and w_k; the last row has no holonomy."""
    k_dim, m = rcurve.taus.shape[1], rcurve.ws.shape[1]
    header = ["k"] + [f"tau_{i}" for i in range(k_dim)] + [f"w_{i}" for i in range(m)]
    rows = []
    for k in range(len(rcurve) + 1):
        w = [fmt(v) for v in rcurve.ws[k]] if k < len(rcurve) else [""] * m
        rows.append([str(k)] + [fmt(v) for v in rcurve.tau(k)] + w)
    _emit(header, rows, out)


def _read_rows(path):
    try:
        with open(path, newline="", encoding="ascii") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{path} is empty")
    header, body = rows[0], rows[1:]
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise ConfigError(f"{path} row {i + 1} has {len(row)} fields, header has {len(header)}")
        if row[0] != str(i):
            raise ConfigError(f"{path} row {i + 1} has index {row[0]!r}, expected {i}")
    return header, body


def _floats(cells, path):
    try:
        return [float(c) for c in cells]
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def read_curve(path, dim=None):
    header, body = _read_rows(path)
    n = len(header) - 1
    if header != ["k"] + [f"q_{i}" for i in range(n)]:
        raise ConfigError(f"{path} is not a trajectory file (header {','.join(header)})")
    if dim is not None and n != dim:
        raise ConfigError(f"{path} has {n} coordinates, system has {dim}")
    if len(body) < 2:
        raise ConfigError(f"{path} needs at least two points")
    return DiscreteCurve(np.array([_floats(r[1:], path) for r in body]).reshape(len(body), n))


def read_reduced(path, shape_dim, group_dim):
    header, body = _read_rows(path)
    expected = ["k"] + [f"tau_{i}" for i in range(shape_dim)] + [f"w_{i}" for i in range(group_dim)]
    if header != expected:
        raise ConfigError(f"{path} header {','.join(header)} does not match {','.join(expected)}")
    if len(body) < 2:
        raise ConfigError(f"{path} needs at least two rows")
    taus = np.array([_floats(r[1:1 + shape_dim], path) for r in body]).reshape(len(body), shape_dim)
    if any(c != "" for c in body[-1][1 + shape_dim:]):
        raise ConfigError(f"{path}: the last row must not carry a holonomy")
    ws = np.array([_floats(r[1 + shape_dim:], path) for r in body[:-1]]).reshape(len(body) - 1, group_dim)
    return ReducedCurve(taus[0], ws, taus[1:])


# --- system selection ------------------------------------------------------

def _parse_params(pairs):
    out = {}
    for item in pairs or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigError(f"--param {key}: {exc}") from exc
    return out


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(cfg) - {"name", "dim", "group_dim", "params", "seeds"}
    if extra:
        raise ConfigError(f"unknown config fields: {', '.join(sorted(extra))}")
    if "name" not in cfg:
        raise ConfigError("config needs a 'name'")
    fam = FAMILIES.get(cfg["name"])
    if fam is None:
        raise ConfigError(f"unknown system {cfg['name']!r}")
    for key, want in (("dim", fam.dim), ("group_dim", fam.group_dim)):
        if key in cfg and cfg[key] != want:
            raise ConfigError(f"config {key}={cfg[key]} but {cfg['name']} has {key}={want}")
    params = cfg.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("config 'params' must be an object")
    seeds = cfg.get("seeds")
    if seeds is not None and (not isinstance(seeds, list) or len(seeds) != 2):
        raise ConfigError("config 'seeds' must be a list of two points")
    return cfg["name"], params, seeds


def select_system(args):
    seeds = None
    params = {}
    name = args.system
    if args.config:
        cfg_name, params, seeds = _load_config(args.config)
        if name and name != cfg_name:
            raise ConfigError(f"--system {name} conflicts with config name {cfg_name}")
        name = cfg_name
    if not name:
        raise ConfigError("no system given (use --system or --config)")
    params = {**params, **_parse_params(args.param)}
    if args.h is not None:
        params["h"] = args.h
    try:
        b = build(name, **params)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc.args[0]) if exc.args else str(exc)) from exc
    if seeds is not None:
        seeds = tuple(_point(s, b.system.dim, "seed") for s in seeds)
    return b, seeds or b.seeds


def _point(value, dim, what):
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    try:
        q = np.atleast_1d(np.asarray(value, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: {exc}") from exc
    if q.ndim != 1 or q.size != dim or not np.all(np.isfinite(q)):
        raise ConfigError(f"{what} must be {dim} finite numbers, got {value!r}")
    return q


def _require_setup(b):
    if b.setup is None:
        raise ConfigError(f"system {b.name} has no quotient setup registered")
    return b.setup


# --- commands --------------------------------------------------------------

def cmd_simulate(args):
    b, seeds = select_system(args)
    dim = b.system.dim
    q0 = _point(args.q0, dim, "--q0") if args.q0 is not None else np.asarray(seeds[0], float)
    q1 = _point(args.q1, dim, "--q1") if args.q1 is not None else np.asarray(seeds[1], float)
    if args.steps < 1:
        raise ConfigError("--steps must be at least 1")
    log.info("simulating %s for %d steps", b.name, args.steps)
    curve = trajectory(b.system, q0, q1, args.steps, StepConfig())
    write_curve(curve, args.out)
    return EXIT_OK


def cmd_reduce(args):
    b, _ = select_system(args)
    setup = _require_setup(b)
    curve = read_curve(args.input, b.system.dim)
    write_reduced(reduce_trajectory(setup, curve), args.out)
    return EXIT_OK


def cmd_reconstruct(args):
    b, _ = select_system(args)
    setup = _require_setup(b)
    rcurve = read_reduced(args.input, setup.shape_dim, setup.group_dim)
    if args.q0 is None:
        raise ConfigError("reconstruct needs --q0")
    q0 = _point(args.q0, b.system.dim, "--q0")
    write_curve(reconstruct(setup, rcurve, q0), args.out)
    return EXIT_OK


def cmd_momentum(args):
    b, _ = select_system(args)
    curve = read_curve(args.input, b.system.dim)
    m = b.action.group_dim
    xi = _point(args.xi, m, "--xi") if args.xi is not None else np.eye(m)[0]
    rep = drift_report(b.system, b.action, xi, curve)
    rows = [[str(k), fmt(rep.j_plus[k]), fmt(rep.j_minus[k]), fmt(rep.noether_residual[k])]
            for k in range(len(rep.j_plus))]
    _emit(["k", "j_plus", "j_minus", "noether_residual"], rows, args.out)
    return EXIT_OK


def cmd_verify(args):
    try:
        checks = acceptance.run(args.only, args.tolerance)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from exc
    verdicts = acceptance.summarize(checks)
    for v in verdicts:
        log.info(v.line())
    text = json.dumps([v.as_dict() for v in verdicts], indent=2) + "\n"
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_VERIFY


def _add_system_args(p):
    p.add_argument("--system", choices=sorted(FAMILIES), help="built-in system name")
    p.add_argument("--config", help="JSON system config (name, dim, group_dim, params, seeds)")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="override a system parameter")
    p.add_argument("--h", type=float, help="time step")
    p.add_argument("--out", help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="fdms", description="Forced discrete mechanical systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="solve the forced DEL equations from two seed points")
    _add_system_args(p)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--q0", help="first seed point, comma or space separated")
    p.add_argument("--q1", help="second seed point")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reduce", help="reduce a trajectory CSV to shape and holonomy data")
    _add_system_args(p)
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("reconstruct", help="lift a reduced CSV through --q0")
    _add_system_args(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--q0")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("momentum", help="momentum maps along a trajectory CSV")
    _add_system_args(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--xi", help="Lie algebra element (default first basis vector)")
    p.set_defaults(func=cmd_momentum)

    p = sub.add_parser("verify", help="run the acceptance criteria and print a JSON report")
    p.add_argument("--only", action="append", choices=list(acceptance.CRITERIA))
    p.add_argument("--tolerance", type=float, help="override every criterion's tolerance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def _setup_logging():
    level = os.environ.get("FDMS_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors with status 2; those are configuration errors here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (NonConvergence, SingularJacobian, EvaluationError) as exc:
        print(f"fdms: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ConfigError, BasePointMismatch, NoSection, ValueError) as exc:
        print(f"fdms: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
