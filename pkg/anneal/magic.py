"""
자기장 기울기 유도 결합(MAGIC) 계산

선형 이온 사슬의 축방향 평형 위치, 정상 모드, 그리고
J_ij = Σ_l ν_l ε_il ε_jl,  ε_il = (Δz_l ∂_zω_i / ν_l) S_il,  Δz_l = √(ħ / 2mν_l)
로 주어지는 스핀-스핀 결합 행렬을 구한다.

내부 계산은 모두 rad/s, 보고되는 J는 Hz (2π로 나눔).
위치 계산은 특성 길이 ℓ = (e² / 4πε₀mω_z²)^{1/3} 단위의 무차원 좌표로 수행한다.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import constants

from anneal.errors import ConvergenceError, InvalidSpecError
from anneal.ising import IsingModel
from utils.log_utils import get_logger

logger = get_logger(__name__)

YB171_MASS_KG = 170.936323 * constants.atomic_mass
DEFAULT_SENSITIVITY = 2 * np.pi * 14e9  # rad/(s·T)
MAX_IONS = 50
FORCE_TOL = 1e-12


@dataclass(frozen=True)
class IonChainSpec:
    n_ions: int
    axial_trap_frequency: float
    gradient: float
    ion_mass: float = YB171_MASS_KG
    magnetic_sensitivity: Union[float, Sequence[float]] = DEFAULT_SENSITIVITY

    def __post_init__(self):
        if self.n_ions < 2:
            raise InvalidSpecError("이온은 2개 이상이어야 합니다", {"n_ions": self.n_ions})
        if self.n_ions > MAX_IONS:
            raise InvalidSpecError("이온 수 제한을 초과했습니다", {"n_ions": self.n_ions, "limit": MAX_IONS})
        if self.axial_trap_frequency <= 0 or self.ion_mass <= 0:
            raise InvalidSpecError("트랩 주파수와 질량은 양수여야 합니다")
        if not np.isfinite(self.gradient):
            raise InvalidSpecError("gradient는 유한한 실수여야 합니다", {"gradient": self.gradient})
        sens = np.atleast_1d(np.asarray(self.magnetic_sensitivity, dtype=float))
        if sens.size not in (1, self.n_ions) or np.any(sens <= 0):
            raise InvalidSpecError("magnetic_sensitivity는 양수 스칼라 또는 이온별 벡터여야 합니다")

    def sensitivity_vector(self) -> np.ndarray:
        sens = np.atleast_1d(np.asarray(self.magnetic_sensitivity, dtype=float))
        return np.broadcast_to(sens, (self.n_ions,)).copy()

    @property
    def frequency_gradients(self) -> np.ndarray:
        """이온별 ∂_zω_n = (∂ω/∂B)·∂_zB  [rad/(s·m)]"""
        return self.sensitivity_vector() * self.gradient


@dataclass(frozen=True, eq=False)
class NormalModes:
    frequencies: np.ndarray            # ν_l [rad/s], 오름차순
    mode_matrix: np.ndarray            # S[n, l]: 이온 n, 모드 l
    equilibrium_positions: np.ndarray  # [m]


def characteristic_length(spec: IonChainSpec) -> float:
    return (constants.e ** 2 / (4 * np.pi * constants.epsilon_0 * spec.ion_mass * spec.axial_trap_frequency ** 2)) ** (1.0 / 3.0)


def dimensionless_forces(u: np.ndarray) -> np.ndarray:
    """무차원 축방향 힘: −u_i + Σ_{j≠i} sign(u_i − u_j)/(u_i − u_j)²"""
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, np.inf)
    return -u + np.sum(np.sign(diff) / diff ** 2, axis=1)


def dimensionless_hessian(u: np.ndarray) -> np.ndarray:
    """A_ii = 1 + 2Σ 1/|u_i−u_j|³,  A_ij = −2/|u_i−u_j|³"""
    dist = np.abs(u[:, None] - u[None, :])
    np.fill_diagonal(dist, np.inf)
    inv3 = 2.0 / dist ** 3
    A = -inv3
    np.fill_diagonal(A, 1.0 + inv3.sum(axis=1))
    return A


def dimensionless_equilibrium(n_ions: int, tol: float = FORCE_TOL, max_iter: int = 200) -> np.ndarray:
    """균일 간격 초기값에서 감쇠 Newton 반복으로 평형 위치를 구한다."""
    spacing = 2.018 / n_ions ** 0.559
    u = (np.arange(n_ions) - (n_ions - 1) / 2.0) * spacing
    force = dimensionless_forces(u)

    for iteration in range(max_iter):
        residual = float(np.max(np.abs(force)))
        if residual < tol:
            logger.debug(f"[✓] 평형 위치 수렴: n={n_ions}, 반복 {iteration}회, 잔여 힘 {residual:.2e}")
            return u
        step = np.linalg.solve(dimensionless_hessian(u), force)
        alpha = 1.0
        while alpha > 1e-10:
            trial = u + alpha * step
            if np.all(np.diff(trial) > 0):
                trial_force = dimensionless_forces(trial)
                if np.max(np.abs(trial_force)) < residual:
                    break
            alpha *= 0.5
        else:
            raise ConvergenceError("평형 위치 Newton 반복이 정체되었습니다", {"n_ions": n_ions, "iteration": iteration, "residual": residual})
        u, force = trial, trial_force

    raise ConvergenceError(
        "평형 위치 계산이 수렴하지 않았습니다",
        {"n_ions": n_ions, "max_iter": max_iter, "residual": float(np.max(np.abs(force)))},
    )


def equilibrium_positions(spec: IonChainSpec) -> np.ndarray:
    """평형 위치 [m] (트랩 중심 기준, 오름차순)"""
    return dimensionless_equilibrium(spec.n_ions) * characteristic_length(spec)


def normal_modes(spec: IonChainSpec) -> NormalModes:
    u = dimensionless_equilibrium(spec.n_ions)
    eigvals, vectors = np.linalg.eigh(dimensionless_hessian(u))
    if np.any(eigvals <= 0):
        raise InvalidSpecError("Hessian이 양의 정부호가 아닙니다 (불안정한 배치)", {"eigenvalues": eigvals.tolist()})
    # 모드 벡터 부호 고정: 첫 번째 0이 아닌 성분이 양수
    for l in range(vectors.shape[1]):
        pivot = vectors[np.argmax(np.abs(vectors[:, l]) > 1e-12), l]
        if pivot < 0:
            vectors[:, l] *= -1
    return NormalModes(
        frequencies=spec.axial_trap_frequency * np.sqrt(eigvals),
        mode_matrix=vectors,
        equilibrium_positions=u * characteristic_length(spec),
    )


def lamb_dicke_parameters(spec: IonChainSpec, modes: Optional[NormalModes] = None) -> np.ndarray:
    """ε[n, l] = (Δz_l ∂_zω_n / ν_l) S[n, l]"""
    modes = modes or normal_modes(spec)
    nu = modes.frequencies
    dz = np.sqrt(constants.hbar / (2 * spec.ion_mass * nu))
    return (spec.frequency_gradients[:, None] * (dz / nu)[None, :]) * modes.mode_matrix


def coupling_matrix(spec: IonChainSpec, modes: Optional[NormalModes] = None) -> IsingModel:
    """결합 행렬 J [Hz]를 fields 0인 IsingModel로 반환"""
    modes = modes or normal_modes(spec)
    eps = lamb_dicke_parameters(spec, modes)
    J_rad = (eps * modes.frequencies[None, :]) @ eps.T
    J_hz = np.triu(J_rad, 1) / (2 * np.pi)
    logger.info(f"[📊] MAGIC 결합: n={spec.n_ions}, max|J| = {np.max(np.abs(J_hz)):.3f} Hz")
    return IsingModel(
        couplings=J_hz,
        fields=np.zeros(spec.n_ions),
        labels=tuple(f"ion_{i}" for i in range(spec.n_ions)),
    )


def trap_fluctuation_couplings(model: IsingModel, omega_z: float, delta_omega_z: float) -> IsingModel:
    """
    트랩 주파수 요동에 대한 1차 보정 J → J(1 − 2δω_z/ω_z).
    |δω_z/ω_z| ≲ 0.1 범위에서 유효하다.
    """
    ratio = delta_omega_z / omega_z
    if abs(ratio) > 0.1:
        logger.warning(f"[⚠️] δω_z/ω_z = {ratio:.3f}: 1차 근사 유효 범위(0.1)를 벗어났습니다")
    return model.with_couplings(model.couplings * (1.0 - 2.0 * ratio))


def sample_trap_fluctuation_couplings(model: IsingModel, omega_z: float, relative_sigma: float, seed: int) -> IsingModel:
    """δω_z ~ N(0, relative_sigma·ω_z) 한 번 추출해 상관된 결합 요동을 적용한다."""
    rng = np.random.default_rng(seed)
    delta = float(rng.normal(0.0, relative_sigma * omega_z))
    return trap_fluctuation_couplings(model, omega_z, delta)
