"""
상태 벡터 전파기

H(t) = −C(t) Σ h^x σ_i^x + Σ J_ij σ_i^z σ_j^z + Σ (h_i + δh_i^z(t)) σ_i^z

스텝마다 대칭 분할 exp(−iD dt/2)·exp(−iC(t_mid)H_drive dt)·exp(−iD dt/2)를 적용한다.
D(대각: 비용 + 노이즈)는 원소별 위상으로, 구동항은 qubit별 x 회전으로 처리한다.
펄스는 순간적인 스핀 반전이며, 해당 인덱스의 스텝이 끝난 뒤에 적용된다.

시간 단위는 1/J (무차원), 노이즈 값도 J 단위여야 한다.
여러 노이즈 실현(realization)을 배치 축으로 한 번에 전파할 수 있다.
"""

from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from anneal.errors import ConfigError, DimensionMismatchError, InvalidSpecError
from anneal.ising import IsingModel, SpinConfiguration, energy_landscape, ground_state_indices, spin_table
from anneal.noise import NoiseTrace
from utils.log_utils import get_logger

logger = get_logger(__name__)

PROTOCOLS = ("couplings_only", "local_fields_with_sign_flips", "coupling_modulation")
DEFAULT_STEPS = 50000
MAX_PROPAGATION_SPINS = 16

RAMPS: Dict[str, Callable[[np.ndarray, float], np.ndarray]] = {
    "linear": lambda t, T: 1.0 - t / T,
}
RAMP_SLOPES: Dict[str, Callable[[float], float]] = {
    "linear": lambda T: 1.0 / T,
}


@dataclass(frozen=True)
class AnnealConfig:
    """
    어닐링 sweep 설정

    Args:
        duration: sweep 시간 T [1/J]
        n_steps: 이산화 스텝 수
        driver_strength: h^x [J]
        ramp: C(t) 형태 태그 (linear: 1 − t/T)
        protocol: couplings_only | local_fields_with_sign_flips | coupling_modulation
        pulse_count: DD 펄스 수
        pulse_pattern: block (floor 간격 후 ceil 간격) | alternating (짧은/긴 간격 교대)
    """

    duration: float = 2.6
    n_steps: int = DEFAULT_STEPS
    driver_strength: float = 3.0
    ramp: str = "linear"
    protocol: str = "couplings_only"
    pulse_count: int = 0
    pulse_pattern: str = "block"

    def __post_init__(self):
        if self.duration <= 0:
            raise ConfigError("duration은 양수여야 합니다", {"duration": self.duration})
        if self.n_steps < 1:
            raise ConfigError("n_steps는 1 이상이어야 합니다", {"n_steps": self.n_steps})
        if self.driver_strength <= 0:
            raise ConfigError("driver_strength(h^x)는 양수여야 합니다", {"driver_strength": self.driver_strength})
        if self.pulse_count < 0:
            raise ConfigError("pulse_count는 0 이상이어야 합니다", {"pulse_count": self.pulse_count})
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"지원하지 않는 프로토콜: {self.protocol}", {"available": PROTOCOLS})
        if self.ramp not in RAMPS:
            raise ConfigError(f"지원하지 않는 ramp: {self.ramp}", {"available": sorted(RAMPS)})
        if self.pulse_pattern not in ("block", "alternating"):
            raise ConfigError(f"지원하지 않는 펄스 배치: {self.pulse_pattern}")

    @property
    def dt(self) -> float:
        return self.duration / self.n_steps

    def ramp_value(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return RAMPS[self.ramp](np.asarray(t, dtype=float), self.duration)

    @property
    def ramp_slope(self) -> float:
        """−dC/dt"""
        return RAMP_SLOPES[self.ramp](self.duration)

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "n_steps": self.n_steps,
            "driver_strength": self.driver_strength,
            "ramp": self.ramp,
            "protocol": self.protocol,
            "pulse_count": self.pulse_count,
            "pulse_pattern": self.pulse_pattern,
        }


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        size = amps.shape[0]
        if size == 0 or size & (size - 1):
            raise DimensionMismatchError("상태 벡터 길이는 2의 거듭제곱이어야 합니다", {"length": size})
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return int(self.amplitudes.shape[0]).bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def uniform(cls, n_qubits: int) -> "StateVector":
        dim = 1 << n_qubits
        return cls(np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class PulseSchedule:
    """
    펄스 스텝 인덱스 (해당 스텝 이후 적용) 목록

    masks[i]가 None이면 전역 반전, 아니면 해당 qubit들만 반전한다.
    """

    pulse_steps: Tuple[int, ...] = ()
    masks: Optional[Tuple[Optional[Tuple[int, ...]], ...]] = None

    def __post_init__(self):
        steps = tuple(int(s) for s in self.pulse_steps)
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise InvalidSpecError("펄스 인덱스는 순증가해야 합니다")
        if steps and steps[0] < 1:
            raise InvalidSpecError("펄스 인덱스는 1 이상이어야 합니다", {"first": steps[0]})
        object.__setattr__(self, "pulse_steps", steps)
        if self.masks is not None:
            masks = tuple(None if m is None else tuple(sorted(int(q) for q in m)) for m in self.masks)
            if len(masks) != len(steps):
                raise DimensionMismatchError("masks 길이가 펄스 수와 다릅니다", {"masks": len(masks), "pulses": len(steps)})
            object.__setattr__(self, "masks", masks)

    def __len__(self) -> int:
        return len(self.pulse_steps)

    @property
    def is_global(self) -> bool:
        return self.masks is None or all(m is None for m in self.masks)

    def mask_for(self, i: int) -> Optional[Tuple[int, ...]]:
        return None if self.masks is None else self.masks[i]

    def validate(self, n_steps: int) -> None:
        if self.pulse_steps and self.pulse_steps[-1] > n_steps:
            raise InvalidSpecError("펄스 인덱스가 n_steps를 넘습니다", {"last": self.pulse_steps[-1], "n_steps": n_steps})

    def spacings(self) -> List[int]:
        return list(np.diff((0,) + self.pulse_steps))


@dataclass(frozen=True)
class ModulationFragment:
    """한 주기 2펄스 조각: t=Δt₋에서 qubit k 반전, t=Δt에서 되돌림"""

    target_qubit: int
    scale: float
    base_interval: float
    dt_minus: float
    dt_plus: float

    @property
    def flip_times(self) -> Tuple[float, float]:
        return (self.dt_minus, self.base_interval)


# ---------------------------------------------------------------------------
# 펄스 배치
# ---------------------------------------------------------------------------

def pulse_positions(pulse_count: int, n_steps: int, pattern: str = "block") -> PulseSchedule:
    """
    pulse_count개 펄스를 n_steps에 배치한다. 간격은 ⌊N/P⌋와 ⌈N/P⌉로, 합은 정확히 N.

    pattern="block": 앞쪽에 floor 간격, 뒤쪽에 ceil 간격
    pattern="alternating": 짧은 간격과 긴 간격을 교대로 (나누어떨어지면 ±1로 흔듦)
    """
    if pulse_count < 0:
        raise InvalidSpecError("pulse_count는 0 이상이어야 합니다", {"pulse_count": pulse_count})
    if pulse_count > n_steps:
        raise InvalidSpecError("펄스 수가 스텝 수보다 많습니다", {"pulse_count": pulse_count, "n_steps": n_steps})
    if pulse_count == 0:
        return PulseSchedule()

    base, extra = divmod(n_steps, pulse_count)
    if pattern == "block":
        spacings = [base] * (pulse_count - extra) + [base + 1] * extra
    elif pattern == "alternating":
        if extra == 0 and base > 1:
            spacings = [base - 1 if i % 2 == 0 else base + 1 for i in range(pulse_count)]
            if pulse_count % 2 == 1:
                spacings[-1] = base
        else:
            spacings = [base] * pulse_count
            for i in (list(range(1, pulse_count, 2)) + list(range(0, pulse_count, 2)))[:extra]:
                spacings[i] += 1
    else:
        raise InvalidSpecError(f"지원하지 않는 펄스 배치: {pattern}")
    return PulseSchedule(tuple(int(v) for v in np.cumsum(spacings)))


def coupling_modulation_schedule(target_qubit: int, scale: float, base_interval: float) -> ModulationFragment:
    """
    Δt₋ − Δt₊ = scale·Δt 가 되도록 qubit k를 두 번 반전하는 조각.
    1차 근사에서 J_ik → scale·J_ik.
    """
    if abs(scale) > 1:
        raise InvalidSpecError("scale은 [−1, 1] 범위여야 합니다", {"scale": scale})
    if base_interval <= 0:
        raise InvalidSpecError("base_interval은 양수여야 합니다", {"base_interval": base_interval})
    dt_minus = base_interval * (1.0 + scale) / 2.0
    return ModulationFragment(target_qubit, scale, base_interval, dt_minus, base_interval - dt_minus)


def modulation_schedule(n_steps: int, n_cycles: int, target_qubit: int, scale: float) -> PulseSchedule:
    """modulation 조각을 sweep 전체에 반복 배치 (같은 스텝에 겹친 반전은 상쇄)"""
    cycles = pulse_positions(n_cycles, n_steps)
    events: Dict[int, set] = {}
    start = 0
    for end in cycles.pulse_steps:
        fragment = coupling_modulation_schedule(target_qubit, scale, float(end - start))
        mid = start + int(round(fragment.dt_minus))
        for step in (mid, end):
            if step <= 0:
                continue
            events.setdefault(step, set()).symmetric_difference_update({target_qubit})
        start = end
    steps = sorted(s for s, qubits in events.items() if qubits)
    return PulseSchedule(tuple(steps), tuple(tuple(sorted(events[s])) for s in steps))


# ---------------------------------------------------------------------------
# 상태 연산
# ---------------------------------------------------------------------------

def apply_global_flip(state: Union[StateVector, np.ndarray]) -> Union[StateVector, np.ndarray]:
    """기저 인덱스 b의 진폭을 비트 보수 인덱스로 옮긴다 (마지막 축 기준)"""
    if isinstance(state, StateVector):
        return StateVector(state.amplitudes[::-1].copy())
    return state[..., ::-1]


def apply_mask_flip(psi: np.ndarray, n_qubits: int, qubits: Sequence[int]) -> np.ndarray:
    """배치 상태 (R, 2^n)에서 지정 qubit들만 반전"""
    shaped = psi.reshape((psi.shape[0],) + (2,) * n_qubits)
    shaped = np.flip(shaped, axis=tuple(1 + q for q in qubits))
    return shaped.reshape(psi.shape)


def _apply_driver(psi: np.ndarray, n_qubits: int, cos_t: float, isin_t: complex) -> np.ndarray:
    """Π_q exp(+iθσ^x_q): qubit마다 (cosθ·I + i sinθ·σ^x)"""
    shaped = psi.reshape((psi.shape[0],) + (2,) * n_qubits)
    for q in range(n_qubits):
        shaped = cos_t * shaped + isin_t * np.flip(shaped, axis=1 + q)
    return shaped.reshape(psi.shape)


def _target_indices(ground_states: Iterable) -> np.ndarray:
    indices = [g.index if isinstance(g, SpinConfiguration) else int(g) for g in ground_states]
    if not indices:
        raise InvalidSpecError("바닥 상태 집합이 비어 있습니다")
    return np.array(sorted(set(indices)), dtype=np.int64)


def fidelity(state: Union[StateVector, np.ndarray], ground_states: Iterable) -> Union[float, np.ndarray]:
    """바닥 상태 기저들과의 겹침 제곱의 합 (배치 입력이면 배열)"""
    idx = _target_indices(ground_states)
    amps = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    probs = np.sum(np.abs(amps[..., idx]) ** 2, axis=-1)
    return float(probs) if np.ndim(probs) == 0 else probs


def ground_targets(model: IsingModel) -> np.ndarray:
    """모델마다 전수 탐색으로 다시 구한 바닥 상태 인덱스"""
    return ground_state_indices(model)


# ---------------------------------------------------------------------------
# 전파
# ---------------------------------------------------------------------------

@dataclass
class PropagationResult:
    states: np.ndarray                               # (R, 2^n)
    fidelities: Optional[np.ndarray] = None          # (R,)
    fidelity_trace: Optional[np.ndarray] = None      # (R, n_records)
    trace_steps: Optional[np.ndarray] = None


def _stack_noise(traces: Sequence[NoiseTrace], n_steps: int, n_qubits: int) -> Tuple[Optional[np.ndarray], bool]:
    """(R, n_steps) 공유 노이즈 또는 (R, n_steps, n) qubit별 노이즈. 전부 0이면 None."""
    for trace in traces:
        if trace.values.shape != (n_steps, n_qubits):
            raise DimensionMismatchError(
                "노이즈 시계열 크기가 (n_steps, n_spins)와 다릅니다",
                {"trace": trace.values.shape, "expected": (n_steps, n_qubits)},
            )
        if trace.units != "J" and not trace.is_zero:
            raise DimensionMismatchError("노이즈 시계열은 J 단위여야 합니다 (in_units_of_J 사용)", {"units": trace.units})
    if all(trace.is_zero for trace in traces):
        return None, True
    if all(trace.correlated for trace in traces):
        return np.stack([trace.values[:, 0] for trace in traces]), True
    return np.stack([trace.values for trace in traces]), False


def propagate_batch(
    model: IsingModel,
    config: AnnealConfig,
    traces: Sequence[NoiseTrace],
    schedule: Optional[PulseSchedule] = None,
    ground_states: Optional[Iterable] = None,
    record_every: int = 0,
) -> PropagationResult:
    """
    같은 모델/설정/펄스 배치로 여러 노이즈 실현을 동시에 전파한다.

    Args:
        model: 정규화된 비용 모델 (J 단위)
        config: 어닐링 설정
        traces: 실현별 노이즈 (J 단위, shape (n_steps, n_spins))
        schedule: 펄스 배치 (None이면 config.pulse_count로 생성)
        ground_states: 충실도 계산 대상 (None이면 전수 탐색)
        record_every: 0보다 크면 해당 스텝마다 충실도를 기록
    """
    n = model.n_spins
    if n > MAX_PROPAGATION_SPINS:
        raise InvalidSpecError("상태 벡터 전파 가능한 qubit 수를 초과했습니다", {"n_spins": n, "limit": MAX_PROPAGATION_SPINS})
    if not traces:
        raise InvalidSpecError("노이즈 실현이 하나 이상 필요합니다")
    if config.protocol == "couplings_only" and model.has_fields:
        raise InvalidSpecError("couplings_only 프로토콜에는 국소장이 없는 모델이 필요합니다 (ancilla 이차화 사용)")

    if schedule is None:
        schedule = pulse_positions(config.pulse_count, config.n_steps, config.pulse_pattern)
    schedule.validate(config.n_steps)
    if config.protocol != "coupling_modulation" and not schedule.is_global:
        raise InvalidSpecError("부분 반전 펄스는 coupling_modulation 프로토콜에서만 허용됩니다")

    n_steps, dt = config.n_steps, config.dt
    logger.debug(f"전파 시작: n={n}, 실현 {len(traces)}개, 펄스 {len(schedule)}개, 프로토콜 {config.protocol}")
    noise, shared = _stack_noise(traces, n_steps, n)
    R = len(traces)

    spins = spin_table(n).astype(float)
    e_couplings = energy_landscape(model.without_fields(), include_offset=False)
    e_fields = spins @ model.fields
    magnetization = spins.sum(axis=1)

    targets = _target_indices(ground_states) if ground_states is not None else ground_targets(model)
    dim = 1 << n
    full = dim - 1

    c_mid = config.ramp_value((np.arange(n_steps) + 0.5) * dt)
    theta = c_mid * config.driver_strength * dt

    psi = np.full((R, dim), 1.0 / np.sqrt(dim), dtype=complex)
    pulse_lookup = {step: i for i, step in enumerate(schedule.pulse_steps)}
    field_sign = 1.0
    flip_parity = 0

    static_phase = {
        +1.0: np.exp(-0.5j * dt * (e_couplings + e_fields)),
        -1.0: np.exp(-0.5j * dt * (e_couplings - e_fields)),
    }

    records: List[np.ndarray] = []
    record_steps: List[int] = []

    for k in range(n_steps):
        if noise is None:
            half = static_phase[field_sign][None, :]
        else:
            base = e_couplings + field_sign * e_fields
            if shared:
                diag = base[None, :] + noise[:, k, None] * magnetization[None, :]
            else:
                diag = base[None, :] + noise[:, k, :] @ spins.T
            half = np.exp(-0.5j * dt * diag)

        psi = psi * half
        psi = _apply_driver(psi, n, np.cos(theta[k]), 1j * np.sin(theta[k]))
        psi = psi * half

        pulse_idx = pulse_lookup.get(k + 1)
        if pulse_idx is not None:
            mask = schedule.mask_for(pulse_idx)
            if mask is None:
                psi = psi[:, ::-1]
                flip_parity ^= 1
                if config.protocol == "local_fields_with_sign_flips":
                    field_sign = -field_sign
            else:
                psi = apply_mask_flip(psi, n, mask)

        if record_every and (k + 1) % record_every == 0:
            current = targets if flip_parity == 0 or config.protocol != "local_fields_with_sign_flips" else full - targets
            records.append(np.sum(np.abs(psi[:, current]) ** 2, axis=1))
            record_steps.append(k + 1)

    if config.protocol == "local_fields_with_sign_flips" and flip_parity == 1:
        # 홀수 번 반전: 가상 프레임 보정
        psi = psi[:, ::-1]

    norms = np.linalg.norm(psi, axis=1)
    psi = psi / norms[:, None]
    fids = np.sum(np.abs(psi[:, targets]) ** 2, axis=1)
    return PropagationResult(
        states=psi,
        fidelities=fids,
        fidelity_trace=np.array(records).T if records else None,
        trace_steps=np.array(record_steps) if record_steps else None,
    )


def propagate(
    model: IsingModel,
    config: AnnealConfig,
    trace: Optional[NoiseTrace] = None,
    schedule: Optional[PulseSchedule] = None,
) -> StateVector:
    """단일 실현 전파. trace가 None이면 무잡음."""
    if trace is None:
        trace = NoiseTrace(np.zeros((config.n_steps, model.n_spins)), config.dt, correlated=True, units="J")
    result = propagate_batch(model, config, [trace], schedule)
    return StateVector(result.states[0])


def noiseless_fidelity(model: IsingModel, config: AnnealConfig) -> float:
    """무잡음, 무펄스 기준 충실도"""
    clean = replace(config, pulse_count=0)
    trace = NoiseTrace(np.zeros((config.n_steps, model.n_spins)), config.dt, correlated=True, units="J")
    return float(propagate_batch(model, clean, [trace]).fidelities[0])


def ground_fidelity_trace(
    model: IsingModel,
    config: AnnealConfig,
    trace: Optional[NoiseTrace] = None,
    schedule: Optional[PulseSchedule] = None,
    every: int = 100,
) -> Tuple[np.ndarray, np.ndarray]:
    """every 스텝마다의 바닥 상태 충실도 (스텝 인덱스, 충실도)"""
    if every < 1:
        raise InvalidSpecError("every는 1 이상이어야 합니다", {"every": every})
    if trace is None:
        trace = NoiseTrace(np.zeros((config.n_steps, model.n_spins)), config.dt, correlated=True, units="J")
    result = propagate_batch(model, config, [trace], schedule, record_every=every)
    if result.trace_steps is None:
        return np.array([], dtype=int), np.array([])
    return result.trace_steps, result.fidelity_trace[0]
