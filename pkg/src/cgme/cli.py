"""Command-line front end.

Subcommands: coeffs (dump coefficient blocks and the Kossakowski matrix),
witness (single point), sweep (parameter grid), evolve (trajectory).
Flags mirror the parameter names; a JSON config file may supply defaults
with flags overriding.  Data goes to --out (or stdout); diagnostics go to
stderr.  Exit codes: 0 success, 2 validation failure, 1 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bath import BathSpectrum
from .coefficients import (
    ConsistencyError,
    SystemConfig,
    dissipative_block_frequency_domain,
    dissipative_block_time_domain,
    hamiltonian_block,
    kossakowski,
    lamb_shift_interaction,
)
from .dynamics import build_generator, evolve, initial_state_down_up
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .sweep import SweepSpec, emit, emit_trajectory, run_point, run_sweep

_PARAM_FLAGS = {
    "omega1": "--omega1",
    "omega2": "--omega2",
    "beta": "--beta",
    "omega_c": "--omega-c",
    "delta_t": "--delta-t",
    "lambda": "--lambda",
}


def _add_common(parser):
    parser.add_argument("--config", help="JSON file supplying default parameter values")
    parser.add_argument("--omega1", type=float, help="qubit 1 frequency")
    parser.add_argument("--omega2", type=float, help="qubit 2 frequency")
    parser.add_argument("--beta", type=float, help="inverse bath temperature")
    parser.add_argument("--omega-c", dest="omega_c", type=float, help="Debye cutoff")
    parser.add_argument("--delta-t", dest="delta_t", type=float, help="coarse-graining time")
    parser.add_argument("--lambda", dest="lam", type=float, help="coupling constant")
    parser.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    parser.add_argument("--abs-tol", type=float, help="quadrature absolute tolerance")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", help="output path (default: stdout)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cgme",
        description="Finite coarse-graining-time dissipative dynamics of two "
        "qubits in a common Ohmic bath: coefficients, entanglement witnesses, "
        "sweeps, trajectories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_coeffs = sub.add_parser("coeffs", help="dump coefficient blocks (JSON)")
    _add_common(p_coeffs)
    p_coeffs.add_argument(
        "--method",
        choices=("frequency", "time"),
        default="frequency",
        help="dissipative-block evaluation path",
    )

    p_witness = sub.add_parser("witness", help="witness quantities at one point")
    _add_common(p_witness)

    p_sweep = sub.add_parser("sweep", help="witness quantities over a grid")
    _add_common(p_sweep)
    p_sweep.add_argument(
        "--axis",
        action="append",
        default=[],
        metavar="NAME=START:STOP:COUNT | NAME=V1,V2,...",
        help="sweep axis; repeat for a Cartesian product (row order follows "
        "axis order, last axis fastest)",
    )
    p_sweep.add_argument("--omega-mean", dest="omega_mean", type=float)
    p_sweep.add_argument("--workers", type=int, default=1)

    p_evolve = sub.add_parser("evolve", help="integrate a trajectory from |down,up>")
    _add_common(p_evolve)
    p_evolve.add_argument("--t-final", dest="t_final", type=float, required=True)
    p_evolve.add_argument("--steps", type=int, default=200)
    p_evolve.add_argument("--include-single-qubit-shift", action="store_true")
    return parser


def _load_config(path):
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object of parameter values")
    return data


def _gather_params(args, names):
    """Merge config-file defaults with CLI flags (flags win)."""
    values = {}
    if args.config:
        cfg = _load_config(args.config)
        for name in names:
            if name in cfg:
                values[name] = float(cfg[name])
    flag_attr = {"lambda": "lam"}
    for name in names:
        attr = flag_attr.get(name, name)
        arg = getattr(args, attr, None)
        if arg is not None:
            values[name] = arg
    missing = [n for n in names if n not in values]
    if missing:
        flags = ", ".join(_PARAM_FLAGS[n] for n in missing)
        raise ValueError(f"missing parameters: set {flags} or use --config")
    return values


def _quad_config(args):
    rel = args.rel_tol if args.rel_tol is not None else DEFAULT_CONFIG.rel_tol
    abs_ = args.abs_tol if args.abs_tol is not None else DEFAULT_CONFIG.abs_tol
    return QuadratureConfig(rel_tol=rel, abs_tol=abs_)


def _complex_matrix(m):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def _cmd_coeffs(args):
    params = _gather_params(args, list(_PARAM_FLAGS))
    cfg = _quad_config(args)
    if args.format != "json":
        raise ValueError("coeffs output is JSON only; pass --format json")
    bath = BathSpectrum(params["beta"], params["omega_c"])
    system = SystemConfig(params["omega1"], params["omega2"], params["delta_t"], params["lambda"])
    block_fn = (
        dissipative_block_frequency_domain
        if args.method == "frequency"
        else dissipative_block_time_domain
    )
    payload = {
        "parameters": params,
        "method": args.method,
        "epsilon_order": ["+", "-"],
        "dissipative_blocks": {
            f"{a}{b}": _complex_matrix(block_fn(bath, system, a, b, cfg).entries)
            for a in (1, 2)
            for b in (1, 2)
        },
        "hamiltonian_blocks": {
            f"{a}{b}": _complex_matrix(hamiltonian_block(bath, system, a, b, cfg).entries)
            for a in (1, 2)
            for b in (1, 2)
        },
    }
    km = kossakowski(bath, system, cfg, method=args.method)
    shift = lamb_shift_interaction(bath, system, cfg)
    payload["kossakowski"] = _complex_matrix(km.entries)
    payload["kossakowski_min_eigenvalue"] = km.raw_min_eigenvalue
    payload["lamb_shift_interaction"] = [[float(v) for v in row] for row in shift.h]
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_witness(args):
    params = _gather_params(args, list(_PARAM_FLAGS))
    cfg = _quad_config(args)
    rows = [run_point(params, cfg)]
    emit(rows, format=args.format, destination=args.out)
    return 0


def _parse_axis(text):
    name, _, grid_text = text.partition("=")
    name = name.strip()
    grid_text = grid_text.strip()
    if not name or not grid_text:
        raise ValueError(f"malformed axis {text!r}; expected NAME=...")
    if "," in grid_text:
        values = np.array([float(v) for v in grid_text.split(",")])
    else:
        parts = grid_text.split(":")
        if len(parts) != 3:
            raise ValueError(
                f"malformed axis grid {grid_text!r}; expected START:STOP:COUNT or a comma list"
            )
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        values = np.linspace(start, stop, count)
    return name, values


def _cmd_sweep(args):
    if not args.axis:
        raise ValueError("sweep needs at least one --axis")
    axes = [_parse_axis(text) for text in args.axis]
    axis_names = {name for name, _ in axes}
    fixed = {}
    if args.config:
        for name, value in _load_config(args.config).items():
            if name in _PARAM_FLAGS and name not in axis_names:
                fixed[name] = float(value)
    flag_attr = {"lambda": "lam"}
    for name in _PARAM_FLAGS:
        attr = flag_attr.get(name, name)
        value = getattr(args, attr, None)
        if value is not None and name not in axis_names:
            fixed[name] = value
    if "delta_omega" in axis_names or "delta_omega" in fixed:
        fixed.pop("omega1", None)
        fixed.pop("omega2", None)
    spec = SweepSpec(axes=axes, fixed=fixed, omega_mean=args.omega_mean)
    cfg = _quad_config(args)
    rows = run_sweep(spec, cfg, workers=args.workers)
    emit(rows, format=args.format, destination=args.out)
    return 0


def _cmd_evolve(args):
    params = _gather_params(args, list(_PARAM_FLAGS))
    cfg = _quad_config(args)
    bath = BathSpectrum(params["beta"], params["omega_c"])
    system = SystemConfig(params["omega1"], params["omega2"], params["delta_t"], params["lambda"])
    liou = build_generator(bath, system, args.include_single_qubit_shift, cfg)
    traj = evolve(liou, initial_state_down_up(), args.t_final, args.steps)
    emit_trajectory(traj, format=args.format, destination=args.out)
    return 0


_COMMANDS = {
    "coeffs": _cmd_coeffs,
    "witness": _cmd_witness,
    "sweep": _cmd_sweep,
    "evolve": _cmd_evolve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, ConsistencyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
