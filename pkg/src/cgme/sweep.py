"""Parameter sweeps over the witness quantities and deterministic emission.

Rows follow the Cartesian product of the axes in lexicographic axis-index
order regardless of execution parallelism; floats are serialized with 17
significant digits so CSV output round-trips bit-exactly.  A point whose
evaluation fails numerically is recorded with an error code, never
dropped; invalid parameter values fail the whole spec up front.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import sys as _sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bath import BathSpectrum
from .coefficients import ConsistencyError, SystemConfig
from .quadrature import DEFAULT_CONFIG, QuadratureError
from .witness import witness

__all__ = ["COLUMNS", "TRAJECTORY_COLUMNS", "SweepSpec", "run_point", "run_sweep", "emit", "emit_trajectory"]

COLUMNS = [
    "omega1",
    "omega2",
    "beta",
    "omega_c",
    "delta_t",
    "lambda",
    "d11_mm",
    "d22_pp",
    "re_d12",
    "im_d12",
    "re_h12",
    "im_h12",
    "delta",
    "delta_tilde",
    "entangling",
    "dissipatively_entangling",
    "error",
]

TRAJECTORY_COLUMNS = ["t", "concurrence", "trace_residual", "min_eigenvalue"] + [
    f"{part}_rho_{i}{j}" for i in range(4) for j in range(4) for part in ("re", "im")
]

PARAMETER_NAMES = ("omega1", "omega2", "delta_omega", "beta", "omega_c", "delta_t", "lambda")


@dataclass
class SweepSpec:
    """Axes (name, grid) swept in Cartesian product over fixed values.

    Using a delta_omega axis (or fixed value) derives the qubit
    frequencies as omega_mean -+ delta_omega, which requires omega_mean
    and excludes omega1/omega2.
    """

    axes: list
    fixed: dict = field(default_factory=dict)
    omega_mean: float | None = None
    outputs: list | None = None

    def __post_init__(self):
        bound = []
        for name, grid in self.axes:
            if name not in PARAMETER_NAMES:
                raise ValueError(f"unknown sweep parameter {name!r}")
            g = np.asarray(grid, dtype=float)
            if g.ndim != 1 or g.size == 0:
                raise ValueError(f"axis {name!r} grid must be a non-empty 1-D array")
            if g.size > 1:
                diffs = np.diff(g)
                if not (np.all(diffs > 0) or np.all(diffs < 0)):
                    raise ValueError(f"axis {name!r} grid must be strictly monotone")
            bound.append(name)
        for name in self.fixed:
            if name not in PARAMETER_NAMES:
                raise ValueError(f"unknown parameter {name!r}")
            bound.append(name)
        dupes = {n for n in bound if bound.count(n) > 1}
        if dupes:
            raise ValueError(f"parameters bound more than once: {sorted(dupes)}")
        uses_split = "delta_omega" in bound
        if uses_split:
            if "omega1" in bound or "omega2" in bound:
                raise ValueError("delta_omega excludes explicit omega1/omega2")
            if self.omega_mean is None:
                raise ValueError("delta_omega requires omega_mean")
            required = {"delta_omega", "beta", "omega_c", "delta_t", "lambda"}
        else:
            required = {"omega1", "omega2", "beta", "omega_c", "delta_t", "lambda"}
        missing = required - set(bound)
        if missing:
            raise ValueError(f"parameters not bound: {sorted(missing)}")
        if uses_split:
            for name, grid in self.axes:
                if name == "delta_omega":
                    extreme = float(np.max(np.abs(np.asarray(grid))))
                    if self.omega_mean - extreme <= 0:
                        raise ValueError(
                            "omega_mean - |delta_omega| must stay positive"
                        )
            if "delta_omega" in self.fixed:
                if self.omega_mean - abs(self.fixed["delta_omega"]) <= 0:
                    raise ValueError("omega_mean - |delta_omega| must stay positive")

    def grid_shape(self):
        return tuple(len(np.asarray(g)) for _, g in self.axes)

    def point_parameters(self, index):
        params = dict(self.fixed)
        for (name, grid), k in zip(self.axes, index):
            params[name] = float(np.asarray(grid, dtype=float)[k])
        if "delta_omega" in params:
            dw = params.pop("delta_omega")
            params["omega1"] = self.omega_mean - dw
            params["omega2"] = self.omega_mean + dw
        return params


def run_point(params: dict, cfg=DEFAULT_CONFIG) -> dict:
    """Evaluate the full witness record at one parameter point.

    Invalid parameters raise ValueError before any computation; numerical
    failures are recorded in the 'error' column of the returned record.
    """
    bath = BathSpectrum(beta=params["beta"], omega_c=params["omega_c"])
    system = SystemConfig(
        omega1=params["omega1"],
        omega2=params["omega2"],
        delta_t=params["delta_t"],
        lam=params["lambda"],
    )
    record = {
        "omega1": system.omega1,
        "omega2": system.omega2,
        "beta": bath.beta,
        "omega_c": bath.omega_c,
        "delta_t": system.delta_t,
        "lambda": system.lam,
        "d11_mm": None,
        "d22_pp": None,
        "re_d12": None,
        "im_d12": None,
        "re_h12": None,
        "im_h12": None,
        "delta": None,
        "delta_tilde": None,
        "entangling": None,
        "dissipatively_entangling": None,
        "error": None,
    }
    try:
        rep = witness(bath, system, cfg, include_hamiltonian=True)
    except QuadratureError:
        record["error"] = "quadrature"
        return record
    except ConsistencyError:
        record["error"] = "consistency"
        return record
    record.update(
        d11_mm=rep.d11_mm,
        d22_pp=rep.d22_pp,
        re_d12=rep.d12.real,
        im_d12=rep.d12.imag,
        re_h12=rep.h12.real,
        im_h12=rep.h12.imag,
        delta=rep.delta,
        delta_tilde=rep.delta_tilde,
        entangling=rep.entangling,
        dissipatively_entangling=rep.dissipatively_entangling,
    )
    return record


def _point_task(args):
    idx, params, cfg = args
    return idx, run_point(params, cfg)


def run_sweep(spec: SweepSpec, cfg=DEFAULT_CONFIG, workers: int = 1) -> list:
    """Evaluate the Cartesian product of the axes; rows in lexicographic
    axis order (last axis fastest) independent of worker count."""
    shape = spec.grid_shape()
    indices = list(itertools.product(*(range(n) for n in shape)))
    tasks = [(flat, spec.point_parameters(idx), cfg) for flat, idx in enumerate(indices)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_point_task, tasks, chunksize=1))
        results.sort(key=lambda pair: pair[0])
        return [rec for _, rec in results]
    return [run_point(params, cfg) for _, params, _ in tasks]


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _open_destination(destination):
    if destination is None:
        return _sys.stdout, False
    if hasattr(destination, "write"):
        return destination, False
    return open(destination, "w", newline=""), True


def emit(rows, format: str = "csv", destination=None, columns=None):
    """Write records as CSV (exact header, 17-digit floats) or JSON."""
    cols = list(columns) if columns else COLUMNS
    if format not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {format!r}")
    stream, owned = _open_destination(destination)
    try:
        if format == "csv":
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(cols)
            for row in rows:
                writer.writerow([_format_cell(row.get(c)) for c in cols])
        else:
            payload = [{c: _json_cell(row.get(c)) for c in cols} for row in rows]
            json.dump(payload, stream, indent=None, separators=(",", ":"))
            stream.write("\n")
    finally:
        if owned:
            stream.close()


def _json_cell(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def emit_trajectory(traj, format: str = "csv", destination=None):
    """Serialize a trajectory: per time point the concurrence, state
    residuals, and the 16 state entries in row-major order (re/im)."""
    rows = []
    for k in range(len(traj.times)):
        row = {
            "t": float(traj.times[k]),
            "concurrence": float(traj.concurrence[k]),
            "trace_residual": float(traj.trace_residuals[k]),
            "min_eigenvalue": float(traj.min_eigenvalues[k]),
        }
        state = traj.states[k]
        for i in range(4):
            for j in range(4):
                row[f"re_rho_{i}{j}"] = float(state[i, j].real)
                row[f"im_rho_{i}{j}"] = float(state[i, j].imag)
        rows.append(row)
    emit(rows, format=format, destination=destination, columns=TRAJECTORY_COLUMNS)
