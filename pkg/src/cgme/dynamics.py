"""Two-qubit Lindblad generator assembly and trajectory integration.

Basis ordering (uu, ud, du, dd) with sigma_3 |u> = +|u>; qubit 1 is the
left tensor factor.  Density matrices are vectorized row-major, so
A rho B maps to (A kron B^T) vec(rho).  Trajectories advance by exact
matrix-exponential stepping of the 16x16 generator; each state is
re-Hermitized after the step and every stored point is checked against
the trace / Hermiticity / positivity tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .bath import BathSpectrum
from .coefficients import (
    SystemConfig,
    kossakowski,
    lamb_shift_interaction,
    single_qubit_shift,
)
from .quadrature import DEFAULT_CONFIG

__all__ = [
    "Liouvillian",
    "Trajectory",
    "IntegrationError",
    "SIGMA",
    "sigma_two_qubit",
    "build_generator",
    "evolve",
    "concurrence",
    "initial_state_down_up",
    "entanglement_onset",
    "choi_matrix",
    "trace_preservation_residual",
    "density_matrix_residuals",
]

TRACE_TOL = 1e-9
HERM_TOL = 1e-10
POSITIVITY_TOL = 1e-8

_ID2 = np.eye(2, dtype=complex)
_ID4 = np.eye(4, dtype=complex)
SIGMA = (
    _ID2,
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


class IntegrationError(RuntimeError):
    """A state invariant was violated during integration."""

    def __init__(self, message, step=None, invariant=None):
        super().__init__(message)
        self.step = step
        self.invariant = invariant


def sigma_two_qubit(i: int, qubit: int) -> np.ndarray:
    """sigma_i acting on the given qubit (1 = left factor, 2 = right)."""
    if qubit == 1:
        return np.kron(SIGMA[i], _ID2)
    if qubit == 2:
        return np.kron(_ID2, SIGMA[i])
    raise ValueError(f"qubit must be 1 or 2, got {qubit}")


@dataclass
class Liouvillian:
    """16x16 generator acting on row-major-vectorized density matrices."""

    matrix: np.ndarray
    bath: BathSpectrum
    sys: SystemConfig
    include_single_qubit_shift: bool
    kossakowski_norm: float


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    concurrence: np.ndarray
    trace_residuals: np.ndarray
    min_eigenvalues: np.ndarray
    hermiticity_residuals: np.ndarray


def _left(a):
    return np.kron(a, _ID4)


def _right(b):
    return np.kron(_ID4, b.T)


def build_generator(
    bath: BathSpectrum,
    sys: SystemConfig,
    include_single_qubit_shift: bool = False,
    cfg=DEFAULT_CONFIG,
) -> Liouvillian:
    """Assemble the full generator: free Hamiltonian, lambda^2-weighted
    bath-mediated interaction, and the dissipator with the PSD-validated
    coefficient matrix (also carrying lambda^2).

    Single-qubit shift terms (the a = b Hamiltonian blocks) enter only
    when requested; they shift local phases and leave the witness alone.
    """
    h_sys = 0.5 * sys.omega1 * sigma_two_qubit(3, 1) + 0.5 * sys.omega2 * sigma_two_qubit(3, 2)
    lam2 = sys.lam**2
    h_total = h_sys.astype(complex)
    if lam2 > 0.0:
        h_int = np.zeros((4, 4), dtype=complex)
        hmat = lamb_shift_interaction(bath, sys, cfg).h
        for i in (1, 2):
            for j in (1, 2):
                h_int += hmat[i - 1, j - 1] * np.kron(SIGMA[i], SIGMA[j])
        h_total += lam2 * h_int
        if include_single_qubit_shift:
            for a in (1, 2):
                m = single_qubit_shift(bath, sys, a, cfg)
                local = np.zeros((2, 2), dtype=complex)
                for i in (1, 2):
                    for j in (1, 2):
                        local += m[i - 1, j - 1] * (SIGMA[i] @ SIGMA[j])
                h_total += lam2 * (
                    np.kron(local, _ID2) if a == 1 else np.kron(_ID2, local)
                )

    c = kossakowski(bath, sys, cfg)
    liou = -1j * (_left(h_total) - _right(h_total))
    for a in (1, 2):
        for b in (1, 2):
            for i in (1, 2):
                for j in (1, 2):
                    cij = c.entries[2 * (a - 1) + (i - 1), 2 * (b - 1) + (j - 1)]
                    if cij == 0.0:
                        continue
                    sa = sigma_two_qubit(i, a)
                    sb = sigma_two_qubit(j, b)
                    ba = sb @ sa
                    liou += cij * (
                        np.kron(sa, sb.T) - 0.5 * (_left(ba) + _right(ba))
                    )
    return Liouvillian(
        matrix=liou,
        bath=bath,
        sys=sys,
        include_single_qubit_shift=include_single_qubit_shift,
        kossakowski_norm=c.norm,
    )


def trace_preservation_residual(liou: Liouvillian | np.ndarray) -> float:
    """Max |vec(I)^T L|: zero for a trace-preserving generator."""
    m = liou.matrix if isinstance(liou, Liouvillian) else np.asarray(liou)
    return float(np.max(np.abs(_ID4.reshape(-1) @ m)))


def density_matrix_residuals(rho: np.ndarray):
    """(trace residual, Hermiticity residual, min eigenvalue) of a state."""
    trace_res = abs(np.trace(rho) - 1.0)
    herm_res = float(np.linalg.norm(rho - rho.conj().T))
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    return float(trace_res), herm_res, min_eig


def _check_state(rho, herm_res, step):
    trace_res = abs(np.trace(rho) - 1.0)
    if trace_res > TRACE_TOL:
        raise IntegrationError(
            f"trace residual {trace_res:.3e} at step {step}", step, "trace"
        )
    if herm_res > HERM_TOL:
        raise IntegrationError(
            f"Hermiticity residual {herm_res:.3e} at step {step}", step, "hermiticity"
        )
    min_eig = float(np.linalg.eigvalsh(rho).min())
    if min_eig < -POSITIVITY_TOL:
        raise IntegrationError(
            f"min eigenvalue {min_eig:.3e} at step {step}", step, "positivity"
        )
    return float(trace_res), min_eig


def evolve(liou: Liouvillian, rho0: np.ndarray, t_final: float, n_steps: int) -> Trajectory:
    """Propagate rho0 over [0, t_final] in n_steps exponential steps.

    Returns the trajectory on the uniform grid including t = 0; raises
    IntegrationError the moment a stored state violates an invariant.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not (t_final > 0):
        raise ValueError("t_final must be > 0")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (4, 4):
        raise ValueError("rho0 must be 4x4")
    dt = t_final / n_steps
    matrix = liou.matrix if isinstance(liou, Liouvillian) else np.asarray(liou)
    propagator = expm(matrix * dt)
    n_pts = n_steps + 1
    times = np.linspace(0.0, t_final, n_pts)
    states = np.empty((n_pts, 4, 4), dtype=complex)
    conc = np.empty(n_pts)
    trace_res = np.empty(n_pts)
    min_eigs = np.empty(n_pts)
    herm_res = np.empty(n_pts)

    vec = rho0.reshape(-1).copy()
    for k in range(n_pts):
        if k > 0:
            vec = propagator @ vec
        rho = vec.reshape(4, 4)
        h_res = float(np.linalg.norm(rho - rho.conj().T))
        rho = 0.5 * (rho + rho.conj().T)
        t_res, m_eig = _check_state(rho, h_res, k)
        vec = rho.reshape(-1)
        states[k] = rho
        conc[k] = concurrence(rho)
        trace_res[k] = t_res
        min_eigs[k] = m_eig
        herm_res[k] = h_res
    return Trajectory(
        times=times,
        states=states,
        concurrence=conc,
        trace_residuals=trace_res,
        min_eigenvalues=min_eigs,
        hermiticity_residuals=herm_res,
    )


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state, in [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    flip = np.kron(SIGMA[2], SIGMA[2])
    r = rho @ flip @ rho.conj() @ flip
    eigs = np.linalg.eigvals(r)
    lam = np.sqrt(np.clip(eigs.real, 0.0, None))
    lam.sort()
    value = lam[-1] - lam[-2] - lam[-3] - lam[-4]
    return float(np.clip(value, 0.0, 1.0))


def initial_state_down_up() -> np.ndarray:
    """Projector onto |down> x |up> (third basis vector)."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[2, 2] = 1.0
    return rho


def entanglement_onset(
    bath: BathSpectrum,
    sys: SystemConfig,
    cfg=DEFAULT_CONFIG,
    n_steps: int = 200,
    include_single_qubit_shift: bool = False,
) -> float:
    """Max concurrence reached from |down> x |up> over the onset horizon.

    The horizon is 10% of the dissipative time constant, 0.1 divided by
    the largest (lambda^2-weighted) coefficient-matrix eigenvalue.
    """
    if sys.lam <= 0:
        raise ValueError("entanglement onset requires lam > 0")
    if n_steps < 100:
        raise ValueError("n_steps must be >= 100 over the onset horizon")
    liou = build_generator(bath, sys, include_single_qubit_shift, cfg)
    if liou.kossakowski_norm <= 0:
        raise ValueError("dissipator vanishes; onset horizon undefined")
    t_final = 0.1 / liou.kossakowski_norm
    traj = evolve(liou, initial_state_down_up(), t_final, n_steps)
    return float(traj.concurrence.max())


def choi_matrix(map_matrix: np.ndarray) -> np.ndarray:
    """Choi matrix of a 16x16 superoperator in row-major vectorization."""
    m = np.asarray(map_matrix)
    if m.shape != (16, 16):
        raise ValueError("expected a 16x16 map")
    return m.reshape(4, 4, 4, 4).transpose(2, 0, 3, 1).reshape(16, 16)
