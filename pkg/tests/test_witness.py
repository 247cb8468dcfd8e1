import numpy as np
import pytest

from cgme.bath import BathSpectrum
from cgme.coefficients import SystemConfig
from cgme.quadrature import QuadratureConfig
from cgme.witness import (
    high_temp_d12_approx,
    high_temp_delta_tilde_approx,
    negativity_threshold,
    negativity_threshold_corrected,
    orthogonality_check,
    weak_coupling_limit_diag,
    weak_coupling_limit_offdiag,
    witness,
)

CFG = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-13)


def sinc(x):
    return np.sinc(x / np.pi)


def test_weak_coupling_diag_example():
    bath = BathSpectrum(beta=0.1, omega_c=100.0)
    expected = 4 * np.pi * np.exp(-0.01) / (1 - np.exp(-0.1))
    assert weak_coupling_limit_diag(bath, 1.0, -1) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(130.74, rel=1e-4)


def test_weak_coupling_diag_suppressed_at_large_beta_omega():
    bath = BathSpectrum(beta=50.0, omega_c=100.0)
    assert weak_coupling_limit_diag(bath, 2.0, 1) < 1e-40


def test_weak_coupling_diag_detailed_balance_ratio():
    bath = BathSpectrum(beta=0.7, omega_c=30.0)
    ratio = weak_coupling_limit_diag(bath, 1.3, 1) / weak_coupling_limit_diag(bath, 1.3, -1)
    assert ratio == pytest.approx(np.exp(-0.7 * 1.3), rel=1e-12)


def test_weak_coupling_diag_positive_both_signs():
    bath = BathSpectrum(beta=2.0, omega_c=10.0)
    assert weak_coupling_limit_diag(bath, 1.0, 1) > 0
    assert weak_coupling_limit_diag(bath, 1.0, -1) > 0


def test_weak_coupling_offdiag_kronecker():
    bath = BathSpectrum(beta=0.1, omega_c=100.0)
    assert weak_coupling_limit_offdiag(bath, 1.0, 1.0001) == 0.0
    expected = 2 * np.pi * np.exp(-0.01) / np.tanh(0.05)
    assert weak_coupling_limit_offdiag(bath, 1.0, 1.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(124.51, rel=1e-4)


def test_weak_coupling_offdiag_large_frequency_suppressed():
    bath = BathSpectrum(beta=0.1, omega_c=100.0)
    assert weak_coupling_limit_offdiag(bath, 3000.0, 3000.0) < 1e-5


def test_high_temp_d12_degenerate():
    bath = BathSpectrum(beta=0.01, omega_c=1000.0)
    sys_ = SystemConfig(1.0, 1.0, 5.0, 0.1)
    expected = np.pi * 2 * 1.0 * np.exp(-1e-3) / np.tanh(0.005)
    assert high_temp_d12_approx(bath, sys_) == pytest.approx(expected, rel=1e-12)


def test_high_temp_d12_sinc_zero():
    bath = BathSpectrum(beta=0.01, omega_c=1000.0)
    dw = 0.05
    sys_ = SystemConfig(1.0 - dw, 1.0 + dw, np.pi / dw, 0.1)
    assert abs(high_temp_d12_approx(bath, sys_)) < 1e-10


def test_high_temp_delta_tilde_degenerate_zero():
    bath = BathSpectrum(beta=0.01, omega_c=1000.0)
    sys_ = SystemConfig(1.0, 1.0, 5.0, 0.1)
    assert high_temp_delta_tilde_approx(bath, sys_) == pytest.approx(0.0, abs=1e-9)


def test_high_temp_delta_tilde_small_argument_expansion():
    beta, dw, dt = 0.01, 1e-3, 1.0
    bath = BathSpectrum(beta=beta, omega_c=1000.0)
    sys_ = SystemConfig(1.0 - dw, 1.0 + dw, dt, 0.1)
    full = high_temp_delta_tilde_approx(bath, sys_)
    expanded = -16 * np.pi**2 / beta**2 * (beta * dw - dw**2 * dt**2 / 3.0)
    assert full == pytest.approx(expanded, rel=1e-3)
    assert full < 0  # beta above the window threshold


def test_negativity_threshold_values():
    assert negativity_threshold(0.0, 7.0) == 0.0
    assert negativity_threshold(0.01, 10.0) == pytest.approx(1.0 / 3.0, rel=1e-14)
    assert negativity_threshold(0.03, 10.0) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        negativity_threshold(-1.0, 1.0)
    with pytest.raises(ValueError):
        negativity_threshold(0.1, 0.0)


def test_negativity_threshold_corrected_reduces_to_plain():
    # for w*dt << 1 the corrected threshold approaches dw dt^2/3
    dw, dt, w = 1e-3, 0.05, 1.0
    plain = negativity_threshold(dw, dt)
    corr = negativity_threshold_corrected(dw, dt, w)
    assert corr == pytest.approx(plain, rel=2e-3)


def test_witness_structure_and_ordering():
    bath = BathSpectrum(beta=10.0, omega_c=10.0)
    sys_ = SystemConfig(1.0, 1.2, 10.0, 0.1)
    rep = witness(bath, sys_, CFG)
    assert rep.d11_mm >= 0.0
    assert rep.d22_pp >= 0.0
    assert rep.delta <= rep.delta_tilde + 1e-9 * abs(rep.delta_tilde)
    assert rep.entangling == (rep.delta < 0)
    assert rep.dissipatively_entangling == (rep.delta_tilde < 0)


def test_witness_delta_ordering_on_sample():
    for beta, wc, w2, dt in [(1.0, 10.0, 1.05, 4.0), (0.1, 10.0, 1.3, 8.0), (10.0, 5.0, 1.0, 6.0)]:
        bath = BathSpectrum(beta=beta, omega_c=wc)
        sys_ = SystemConfig(1.0, w2, dt, 0.1)
        rep = witness(bath, sys_, CFG)
        assert rep.delta <= rep.delta_tilde + 1e-9 * max(abs(rep.delta_tilde), 1.0)


def test_witness_equal_frequencies_always_dissipatively_entangling():
    bath = BathSpectrum(beta=1.0, omega_c=10.0)
    for dt in (1.0, 5.0, 25.0):
        rep = witness(bath, SystemConfig(1.0, 1.0, dt, 0.1), CFG, include_hamiltonian=False)
        assert rep.delta_tilde < 0
        assert rep.dissipatively_entangling


def test_witness_large_dt_unequal_not_dissipatively_entangling():
    bath = BathSpectrum(beta=0.1, omega_c=10.0)
    rep = witness(bath, SystemConfig(1.0, 1.2, 60.0, 0.1), CFG, include_hamiltonian=False)
    assert rep.delta_tilde > 0
    assert not rep.dissipatively_entangling


def test_witness_without_hamiltonian_reports_none():
    bath = BathSpectrum(beta=1.0, omega_c=5.0)
    rep = witness(bath, SystemConfig(1.0, 1.1, 3.0, 0.1), CFG, include_hamiltonian=False)
    assert rep.h12 is None and rep.delta is None and rep.entangling is None


def test_witness_continuity_in_splitting():
    bath = BathSpectrum(beta=0.5, omega_c=20.0)
    base = 0.05
    rep0 = witness(bath, SystemConfig(1.0 - base, 1.0 + base, 5.0, 0.1), CFG, include_hamiltonian=False)
    eps = 1e-6
    rep1 = witness(
        bath, SystemConfig(1.0 - base - eps, 1.0 + base + eps, 5.0, 0.1), CFG, include_hamiltonian=False
    )
    for attr in ("d11_mm", "d22_pp", "delta_tilde"):
        a, b = getattr(rep0, attr), getattr(rep1, attr)
        assert abs(a - b) <= 1e-3 * max(abs(a), abs(b), 1e-12)
    assert abs(abs(rep0.d12) - abs(rep1.d12)) <= 1e-3 * abs(rep0.d12)


def test_orthogonality_degenerate_case():
    bath = BathSpectrum(beta=2.0, omega_c=8.0)
    sys_ = SystemConfig(1.0, 1.0, 4.0, 0.1)
    rep = witness(bath, sys_, CFG)
    assert abs(rep.d12.imag) <= 1e-9 * max(abs(rep.d12), 1e-12)
    assert abs(rep.h12.imag) <= 1e-9 * max(abs(rep.h12), 1e-12)


def test_orthogonality_residues_small():
    bath = BathSpectrum(beta=10.0, omega_c=10.0)
    sys_ = SystemConfig(1.0, 1.2, 10.0, 0.1)
    res_d, res_h = orthogonality_check(bath, sys_, CFG)
    rep = witness(bath, sys_, CFG)
    scale = abs(rep.d12) + abs(rep.h12)
    assert res_d <= 1e-6 * scale
    assert res_h <= 1e-6 * scale


def test_literal_reading_differs_by_rotation_cosine():
    bath = BathSpectrum(beta=10.0, omega_c=10.0)
    sys_ = SystemConfig(1.0, 1.2, 10.0, 0.1)
    rep = witness(bath, sys_, CFG)
    phi = 0.5 * (sys_.omega2 - sys_.omega1) * sys_.delta_t
    literal = rep.diagnostics["d12_literal"]
    # literal printed symmetrization = Re D12_mm = cos(phi) * |D12_mm|
    d12mm_mag = abs(rep.diagnostics["d12_mirror_mm"])
    assert abs(literal) == pytest.approx(abs(np.cos(phi)) * d12mm_mag, rel=1e-9)
