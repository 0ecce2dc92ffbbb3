"""
DD 한 주기의 유효 해밀토니안 (Magnus 전개) 검증 도구

펄스 사이 구간 [t₀−Δt, t₀+Δt]에서 σ^x U₊ σ^x U₋ 를
exp(−i(Â₁ + Â₂ + Â₃)·2Δt)와 비교한다.

    Â₁ = H_cost + C(t₀) H_drive
    Â₂ = h^x C(t₀) Σ δh_i σ_i^y · Δt
    Â₃ = [−(2/3) h^x v Σ_{i<j} J_ij (σ_i^z σ_j^y + σ_i^y σ_j^z) + (2/3) h^x C(t₀) Σ δh_i² σ_i^x] · Δt²

모델의 국소장은 펄스에 의해 부호가 바뀌므로 δh와 합쳐 취급한다.
밀집 행렬을 쓰므로 작은 계(수 qubit)에서만 사용한다.
"""

from functools import reduce
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm, logm

from anneal.dynamics import AnnealConfig
from anneal.errors import DimensionMismatchError, SizeLimitError
from anneal.ising import IsingModel, energy_landscape

MAX_DENSE_SPINS = 8
DEFAULT_SUBSTEPS = 64

_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_operator(n_qubits: int, qubit: int, kind: str) -> np.ndarray:
    """qubit 0이 최상위 비트인 크로네커 곱 σ^kind_qubit"""
    factors = [_PAULI[kind] if q == qubit else _PAULI["i"] for q in range(n_qubits)]
    return reduce(np.kron, factors)


def _check_size(n: int) -> None:
    if n > MAX_DENSE_SPINS:
        raise SizeLimitError("밀집 행렬 계산 가능한 qubit 수를 초과했습니다", {"n_spins": n, "limit": MAX_DENSE_SPINS})


def cost_operator(model: IsingModel) -> np.ndarray:
    """결합 항만의 대각 연산자 (상수 offset 제외)"""
    return np.diag(energy_landscape(model.without_fields(), include_offset=False)).astype(complex)


def driver_operator(n_qubits: int, driver_strength: float) -> np.ndarray:
    return -driver_strength * sum(pauli_operator(n_qubits, q, "x") for q in range(n_qubits))


def longitudinal_operator(values: Sequence[float]) -> np.ndarray:
    n = len(values)
    return sum(v * pauli_operator(n, q, "z") for q, v in enumerate(values))


def _total_field(model: IsingModel, delta_h: Sequence[float]) -> np.ndarray:
    delta = np.asarray(delta_h, dtype=float)
    if delta.shape != (model.n_spins,):
        raise DimensionMismatchError("δh 길이가 spin 수와 다릅니다", {"delta_h": delta.shape, "n_spins": model.n_spins})
    return model.fields + delta


def magnus_effective_generator(
    model: IsingModel,
    config: AnnealConfig,
    delta_h: Sequence[float],
    dt: float,
    t0: Optional[float] = None,
) -> np.ndarray:
    """
    펄스 한 주기(길이 2Δt)의 유효 생성자 Â₁ + Â₂ + Â₃

    Args:
        model: 결합 모델 (J 단위)
        config: ramp, h^x, duration을 제공
        delta_h: qubit별 상수 종방향 장
        dt: 반주기 Δt
        t0: 주기 중심 시각 (None이면 T/2)
    """
    n = model.n_spins
    _check_size(n)
    t0 = config.duration / 2.0 if t0 is None else t0
    c0 = float(config.ramp_value(t0))
    hx = config.driver_strength
    v = config.ramp_slope
    delta = _total_field(model, delta_h)

    a1 = cost_operator(model) + c0 * driver_operator(n, hx)
    a2 = hx * c0 * dt * sum(d * pauli_operator(n, q, "y") for q, d in enumerate(delta))

    sy = [pauli_operator(n, q, "y") for q in range(n)]
    sz = [pauli_operator(n, q, "z") for q in range(n)]
    mixed = np.zeros_like(a1)
    for i in range(n):
        for j in range(i + 1, n):
            coupling = model.couplings[i, j]
            if coupling:
                mixed += coupling * (sz[i] @ sy[j] + sy[i] @ sz[j])
    transverse = sum(d ** 2 * pauli_operator(n, q, "x") for q, d in enumerate(delta))
    a3 = (-(2.0 / 3.0) * hx * v * mixed + (2.0 / 3.0) * hx * c0 * transverse) * dt ** 2
    return a1 + a2 + a3


def segment_propagator(
    static: np.ndarray,
    driver: np.ndarray,
    config: AnnealConfig,
    t_start: float,
    t_end: float,
    substeps: int = DEFAULT_SUBSTEPS,
) -> np.ndarray:
    """
    H(t) = static + C(t)·driver 의 [t_start, t_end] 전파자.
    선형 ramp에서 substep마다 4차 Magnus 적분기 exp(−iδH_m + (δ³/12)[H_m, Ḣ])를 곱한다.
    """
    dim = static.shape[0]
    if t_end <= t_start:
        return np.eye(dim, dtype=complex)
    delta = (t_end - t_start) / substeps
    h_dot = -config.ramp_slope * driver
    U = np.eye(dim, dtype=complex)
    for k in range(substeps):
        mid = t_start + (k + 0.5) * delta
        h_mid = static + float(config.ramp_value(mid)) * driver
        omega = -1j * delta * h_mid + (delta ** 3 / 12.0) * (h_mid @ h_dot - h_dot @ h_mid)
        U = expm(omega) @ U
    return U


def global_flip_operator(n_qubits: int) -> np.ndarray:
    return reduce(np.kron, [_PAULI["x"]] * n_qubits)


def pulse_cycle_propagator(
    model: IsingModel,
    config: AnnealConfig,
    delta_h: Sequence[float],
    dt: float,
    t0: Optional[float] = None,
    substeps: int = DEFAULT_SUBSTEPS,
) -> np.ndarray:
    """t₀에서 전역 반전, t₀+Δt에서 되돌리는 정확한 주기 전파자 X·U₊·X·U₋"""
    n = model.n_spins
    _check_size(n)
    t0 = config.duration / 2.0 if t0 is None else t0
    static = cost_operator(model) + longitudinal_operator(_total_field(model, delta_h))
    driver = driver_operator(n, config.driver_strength)
    flip = global_flip_operator(n)
    first = segment_propagator(static, driver, config, t0 - dt, t0, substeps)
    second = segment_propagator(static, driver, config, t0, t0 + dt, substeps)
    return flip @ second @ flip @ first


def effective_propagator(generator: np.ndarray, dt: float) -> np.ndarray:
    return expm(-2j * dt * generator)


def magnus_error(
    model: IsingModel,
    config: AnnealConfig,
    delta_h: Sequence[float],
    dt: float,
    t0: Optional[float] = None,
    substeps: int = DEFAULT_SUBSTEPS,
) -> float:
    """정확한 주기 전파자와 유효 전파자 차이의 연산자 노름"""
    exact = pulse_cycle_propagator(model, config, delta_h, dt, t0, substeps)
    approx = effective_propagator(magnus_effective_generator(model, config, delta_h, dt, t0), dt)
    return float(np.linalg.norm(exact - approx, ord=2))


def generator_residual(
    model: IsingModel,
    config: AnnealConfig,
    delta_h: Sequence[float],
    dt: float,
    t0: Optional[float] = None,
    substeps: int = DEFAULT_SUBSTEPS,
) -> np.ndarray:
    """정확한 주기 전파자의 로그에서 Â₁을 뺀 나머지 (i·log U / 2Δt − Â₁)"""
    n = model.n_spins
    t0 = config.duration / 2.0 if t0 is None else t0
    exact = pulse_cycle_propagator(model, config, delta_h, dt, t0, substeps)
    generator = 1j * logm(exact) / (2.0 * dt)
    a1 = cost_operator(model) + float(config.ramp_value(t0)) * driver_operator(n, config.driver_strength)
    return generator - a1


def modulated_pair_propagator(
    model: IsingModel,
    config: AnnealConfig,
    target_qubit: int,
    scale: float,
    dt: float,
    t_start: float,
    substeps: int = DEFAULT_SUBSTEPS,
) -> np.ndarray:
    """Δt₋ 동안 그대로, qubit k 반전 후 Δt₊ 동안 진행, 다시 반전: X_k U(Δt₊) X_k U(Δt₋)"""
    n = model.n_spins
    _check_size(n)
    static = cost_operator(model) + longitudinal_operator(model.fields)
    driver = driver_operator(n, config.driver_strength)
    flip = pauli_operator(n, target_qubit, "x")
    dt_minus = dt * (1.0 + scale) / 2.0
    split = t_start + dt_minus
    first = segment_propagator(static, driver, config, t_start, split, substeps)
    second = segment_propagator(static, driver, config, split, t_start + dt, substeps)
    return flip @ second @ flip @ first


def scaled_coupling_model(model: IsingModel, target_qubit: int, scale: float) -> IsingModel:
    """qubit k에 닿는 모든 J_ik와 h_k를 scale배 한 모델"""
    couplings = np.array(model.couplings, dtype=float)
    couplings[target_qubit, :] *= scale
    couplings[:, target_qubit] *= scale
    fields = np.array(model.fields, dtype=float)
    fields[target_qubit] *= scale
    return model.with_couplings(couplings).with_fields(fields)


def direct_propagator(
    model: IsingModel,
    config: AnnealConfig,
    dt: float,
    t_start: float,
    substeps: int = DEFAULT_SUBSTEPS,
) -> np.ndarray:
    n = model.n_spins
    _check_size(n)
    static = cost_operator(model) + longitudinal_operator(model.fields)
    driver = driver_operator(n, config.driver_strength)
    return segment_propagator(static, driver, config, t_start, t_start + dt, substeps)
