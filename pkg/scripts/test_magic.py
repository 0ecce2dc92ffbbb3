# MAGIC 결합 계산 테스트
"""
이온 사슬 평형 위치, 정상 모드, 결합 행렬 크기 확인
"""

import sys
from pathlib import Path

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

import numpy as np
import pytest

from anneal.errors import InvalidSpecError
from anneal.magic import (
    IonChainSpec,
    coupling_matrix,
    dimensionless_equilibrium,
    dimensionless_forces,
    normal_modes,
    sample_trap_fluctuation_couplings,
    trap_fluctuation_couplings,
)

OMEGA_Z = 2 * np.pi * 130e3


def test_five_ion_equilibrium_positions():
    u = dimensionless_equilibrium(5)
    np.testing.assert_allclose(u, [-1.7429, -0.8221, 0.0, 0.8221, 1.7429], atol=1e-3)
    assert np.max(np.abs(dimensionless_forces(u))) < 1e-10


def test_two_ion_positions_are_symmetric():
    u = dimensionless_equilibrium(2)
    assert u[0] == pytest.approx(-u[1])
    assert u[1] == pytest.approx(0.5 ** (2.0 / 3.0), rel=1e-8)


def test_normal_mode_frequencies():
    """최저 모드는 질량중심 모드 ω_z, 다음은 √3·ω_z"""
    modes = normal_modes(IonChainSpec(n_ions=5, axial_trap_frequency=OMEGA_Z, gradient=19.0))
    assert modes.frequencies[0] == pytest.approx(OMEGA_Z, rel=1e-6)
    assert modes.frequencies[1] == pytest.approx(np.sqrt(3.0) * OMEGA_Z, rel=1e-6)
    np.testing.assert_allclose(modes.mode_matrix.T @ modes.mode_matrix, np.eye(5), atol=1e-10)


@pytest.mark.parametrize("gradient, expected_hz", [(19.0, 26.5), (150.0, 1650.6)])
def test_max_coupling_magnitude(gradient, expected_hz):
    model = coupling_matrix(IonChainSpec(n_ions=5, axial_trap_frequency=OMEGA_Z, gradient=gradient))
    assert np.max(np.abs(model.couplings)) == pytest.approx(expected_hz, rel=0.10)


def test_coupling_scales_with_gradient_squared():
    low = coupling_matrix(IonChainSpec(n_ions=4, axial_trap_frequency=OMEGA_Z, gradient=10.0))
    high = coupling_matrix(IonChainSpec(n_ions=4, axial_trap_frequency=OMEGA_Z, gradient=20.0))
    np.testing.assert_allclose(high.couplings, 4.0 * low.couplings, rtol=1e-10)
    assert not high.has_fields


def test_trap_fluctuation_first_order():
    model = coupling_matrix(IonChainSpec(n_ions=3, axial_trap_frequency=OMEGA_Z, gradient=19.0))
    shifted = trap_fluctuation_couplings(model, OMEGA_Z, 0.01 * OMEGA_Z)
    np.testing.assert_allclose(shifted.couplings, 0.98 * model.couplings)


def test_chain_spec_validation():
    with pytest.raises(InvalidSpecError):
        IonChainSpec(n_ions=1, axial_trap_frequency=OMEGA_Z, gradient=19.0)
    with pytest.raises(InvalidSpecError):
        IonChainSpec(n_ions=5, axial_trap_frequency=-1.0, gradient=19.0)
    with pytest.raises(InvalidSpecError):
        IonChainSpec(n_ions=5, axial_trap_frequency=OMEGA_Z, gradient=19.0, magnetic_sensitivity=(1.0, 2.0))


def test_sampled_trap_fluctuation_is_seeded_scaling():
    model = coupling_matrix(IonChainSpec(n_ions=3, axial_trap_frequency=OMEGA_Z, gradient=19.0))
    a = sample_trap_fluctuation_couplings(model, OMEGA_Z, 0.01, seed=4)
    b = sample_trap_fluctuation_couplings(model, OMEGA_Z, 0.01, seed=4)
    np.testing.assert_array_equal(a.couplings, b.couplings)
    mask = model.couplings != 0
    ratios = a.couplings[mask] / model.couplings[mask]
    np.testing.assert_allclose(ratios, ratios[0])
    assert sample_trap_fluctuation_couplings(model, OMEGA_Z, 0.0, seed=4).couplings.tolist() == model.couplings.tolist()


def test_coupling_is_invariant_under_gradient_sign_flip():
    positive = coupling_matrix(IonChainSpec(n_ions=5, axial_trap_frequency=OMEGA_Z, gradient=19.0))
    negative = coupling_matrix(IonChainSpec(n_ions=5, axial_trap_frequency=OMEGA_Z, gradient=-19.0))
    np.testing.assert_allclose(negative.couplings, positive.couplings, rtol=1e-12)
    with pytest.raises(InvalidSpecError):
        IonChainSpec(n_ions=5, axial_trap_frequency=OMEGA_Z, gradient=float("nan"))
