"""Finite coarse-graining-time Markovian dynamics of two unequal-frequency
qubits in a common Ohmic heat bath: coefficient blocks, entanglement
witnesses, Lindblad trajectories, and a sweep CLI."""

from .bath import (
    BathSpectrum,
    correlation,
    correlation_closed_form,
    correlation_imag_closed_form,
    spectral_density,
)
from .coefficients import (
    CoefficientBlock,
    ConsistencyError,
    KossakowskiMatrix,
    LambShiftInteraction,
    SystemConfig,
    dissipative_block_frequency_domain,
    dissipative_block_time_domain,
    hamiltonian_block,
    kossakowski,
    lamb_shift_interaction,
    psi_transform,
)
from .dynamics import (
    Liouvillian,
    Trajectory,
    build_generator,
    choi_matrix,
    concurrence,
    entanglement_onset,
    evolve,
    initial_state_down_up,
)
from .kernels import BACKEND
from .quadrature import (
    QuadratureConfig,
    QuadratureError,
    integrate,
    integrate_semi_infinite,
    integrate_square_2d,
)
from .witness import (
    WitnessReport,
    high_temp_d12_approx,
    high_temp_delta_tilde_approx,
    negativity_threshold,
    orthogonality_check,
    weak_coupling_limit_diag,
    weak_coupling_limit_offdiag,
    witness,
)

__version__ = "0.1.0"
