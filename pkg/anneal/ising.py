"""
QUBO / Ising 모델 표현과 변환 체인

QUBO(x ∈ {0,1}) → 페널티 접기 → Ising(s ∈ {−1,+1}) → ancilla 이차화 → 정규화
순서로 비용 해밀토니안을 만들고, 전수 탐색(brute force)으로 바닥 상태를 구한다.

기저 규약:
- 스핀 s = 1 − 2·bit, 즉 bit 0 ↔ s = +1
- 빅엔디안: qubit i ↔ 기저 인덱스의 (n−1−i)번째 비트
- x = (1 + s) / 2
"""

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from anneal.errors import DimensionMismatchError, InvalidSpecError, SizeLimitError

MAX_ENUMERATION_SPINS = 24
DEGENERACY_RTOL = 1e-9
_ENUMERATION_CHUNK = 1 << 16


def _frozen_array(values: Any, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DimensionMismatchError(f"{name}의 차원이 올바르지 않습니다", {"expected_ndim": ndim, "shape": arr.shape})
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuboProblem:
    """
    이진 변수 위의 QUBO 문제: x^T W x + λ||Ax − b||² + Σ w_ij x_i x_j

    Args:
        objective: n×n 목적 행렬 W (대칭 또는 상삼각)
        constraints: (A, b) 선형 등식 제약, 없으면 None
        penalty: 페널티 가중치 λ (≥ 0)
        product_penalties: 그대로 더해지는 (i, j, weight) 곱 페널티 목록
        labels: 변수 이름 (선택)
    """

    objective: np.ndarray
    constraints: Optional[Tuple[np.ndarray, np.ndarray]] = None
    penalty: float = 0.0
    product_penalties: Tuple[Tuple[int, int, float], ...] = ()
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        objective = _frozen_array(self.objective, 2, "objective")
        n = objective.shape[0]
        if objective.shape != (n, n):
            raise DimensionMismatchError("objective는 정방행렬이어야 합니다", {"shape": objective.shape})
        object.__setattr__(self, "objective", objective)

        if self.constraints is not None:
            A = _frozen_array(self.constraints[0], 2, "A")
            b = _frozen_array(np.atleast_1d(self.constraints[1]), 1, "b")
            if A.shape[1] != n:
                raise DimensionMismatchError("A의 열 수가 변수 수와 다릅니다", {"A_shape": A.shape, "n_vars": n})
            if A.shape[0] != b.shape[0]:
                raise DimensionMismatchError("A의 행 수와 b의 길이가 다릅니다", {"A_shape": A.shape, "b_len": b.shape[0]})
            object.__setattr__(self, "constraints", (A, b))

        if not np.isfinite(self.penalty) or self.penalty < 0:
            raise InvalidSpecError("penalty는 0 이상의 유한한 값이어야 합니다", {"penalty": self.penalty})

        products = tuple((int(i), int(j), float(w)) for i, j, w in self.product_penalties)
        for i, j, _ in products:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise DimensionMismatchError("곱 페널티 인덱스가 범위를 벗어났습니다", {"pair": (i, j), "n_vars": n})
        object.__setattr__(self, "product_penalties", products)

        labels = tuple(self.labels)
        if labels and len(labels) != n:
            raise DimensionMismatchError("labels 길이가 변수 수와 다릅니다", {"labels": len(labels), "n_vars": n})
        object.__setattr__(self, "labels", labels)

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True, eq=False)
class FoldedQubo:
    """페널티를 접은 대칭 행렬 Q와 상수항 (x^T Q x + offset)"""

    matrix: np.ndarray
    offset: float = 0.0


@dataclass(frozen=True, eq=False)
class IsingModel:
    """
    Ising 비용 해밀토니안 Σ_{i<j} J_ij s_i s_j + Σ h_i s_i + offset

    couplings는 순서 없는 쌍마다 한 번만(엄격한 상삼각) 저장한다.
    scale은 지금까지 나눈 정규화 상수의 누적값이다.
    """

    couplings: np.ndarray
    fields: np.ndarray
    offset: float = 0.0
    scale: float = 1.0
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        J = np.array(self.couplings, dtype=float)
        h = np.array(self.fields, dtype=float).reshape(-1)
        n = h.shape[0]
        if J.size == 0 and n <= 1:
            J = np.zeros((n, n))
        if J.shape != (n, n):
            raise DimensionMismatchError("couplings와 fields의 크기가 다릅니다", {"couplings": J.shape, "fields": n})
        if np.any(np.tril(J) != 0):
            # 대칭/하삼각 입력은 쌍별 합으로 접는다
            J = np.triu(J, 1) + np.triu(J.T, 1)
        J.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "couplings", J)
        object.__setattr__(self, "fields", h)
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "scale", float(self.scale))
        labels = tuple(self.labels)
        if labels and len(labels) != n:
            raise DimensionMismatchError("labels 길이가 스핀 수와 다릅니다", {"labels": len(labels), "n_spins": n})
        object.__setattr__(self, "labels", labels)

    @property
    def n_spins(self) -> int:
        return self.fields.shape[0]

    @property
    def has_fields(self) -> bool:
        return bool(np.any(self.fields != 0))

    def coupling(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        a, b = min(i, j), max(i, j)
        return float(self.couplings[a, b])

    def symmetric_couplings(self) -> np.ndarray:
        return self.couplings + self.couplings.T

    def with_couplings(self, couplings: np.ndarray) -> "IsingModel":
        return IsingModel(couplings, self.fields, self.offset, self.scale, self.labels)

    def with_fields(self, fields: np.ndarray) -> "IsingModel":
        return IsingModel(self.couplings, fields, self.offset, self.scale, self.labels)

    def without_fields(self) -> "IsingModel":
        return self.with_fields(np.zeros(self.n_spins))

    def scaled(self, factor: float) -> "IsingModel":
        """에너지 전체에 factor를 곱한 모델 (scale은 그대로)"""
        return IsingModel(self.couplings * factor, self.fields * factor, self.offset * factor, self.scale, self.labels)

    def to_dict(self) -> Dict[str, Any]:
        n = self.n_spins
        rows, cols = np.nonzero(self.couplings)
        return {
            "n_spins": n,
            "couplings": [[int(i), int(j), float(self.couplings[i, j])] for i, j in zip(rows, cols)],
            "fields": [float(v) for v in self.fields],
            "offset": self.offset,
            "scale": self.scale,
            "labels": list(self.labels),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IsingModel":
        n = int(data["n_spins"])
        J = np.zeros((n, n))
        for i, j, value in data.get("couplings", []):
            i, j = int(i), int(j)
            if not (0 <= i < j < n):
                raise DimensionMismatchError("coupling 인덱스가 상삼각 범위를 벗어났습니다", {"pair": (i, j), "n_spins": n})
            J[i, j] = float(value)
        fields = data.get("fields") or [0.0] * n
        if len(fields) != n:
            raise DimensionMismatchError("fields 길이가 n_spins와 다릅니다", {"fields": len(fields), "n_spins": n})
        return cls(
            couplings=J,
            fields=np.array(fields, dtype=float),
            offset=float(data.get("offset", 0.0)),
            scale=float(data.get("scale", 1.0)),
            labels=tuple(data.get("labels") or ()),
        )


@dataclass(frozen=True)
class SpinConfiguration:
    """계산 기저 상태 하나 (스핀값 ±1 튜플)"""

    spins: Tuple[int, ...]

    def __post_init__(self):
        spins = tuple(int(s) for s in self.spins)
        if any(s not in (-1, 1) for s in spins):
            raise InvalidSpecError("스핀 값은 ±1이어야 합니다", {"spins": spins})
        object.__setattr__(self, "spins", spins)

    @property
    def n_spins(self) -> int:
        return len(self.spins)

    @property
    def index(self) -> int:
        idx = 0
        for s in self.spins:
            idx = (idx << 1) | (1 if s < 0 else 0)
        return idx

    @classmethod
    def from_index(cls, index: int, n_spins: int) -> "SpinConfiguration":
        return cls(tuple(1 - 2 * ((index >> (n_spins - 1 - i)) & 1) for i in range(n_spins)))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "SpinConfiguration":
        """이진 변수 x로부터 (x=1 ↔ s=+1)"""
        return cls(tuple(2 * int(x) - 1 for x in bits))

    def flipped(self) -> "SpinConfiguration":
        return SpinConfiguration(tuple(-s for s in self.spins))

    def to_bits(self) -> Tuple[int, ...]:
        return tuple((1 + s) // 2 for s in self.spins)


# ---------------------------------------------------------------------------
# 변환 체인
# ---------------------------------------------------------------------------

def penalty_fold(qubo: QuboProblem) -> FoldedQubo:
    """
    Q = W + λ(AᵀA − diag(Aᵀb + bᵀA)) + 곱 페널티
    상수 λ·bᵀb는 행렬이 아닌 offset으로 분리한다.
    """
    Q = np.array(qubo.objective, dtype=float)
    offset = 0.0

    if qubo.constraints is not None and qubo.penalty != 0:
        A, b = qubo.constraints
        Atb = A.T @ b
        Q = Q + qubo.penalty * (A.T @ A - np.diag(2.0 * Atb))
        offset += qubo.penalty * float(b @ b)

    for i, j, weight in qubo.product_penalties:
        Q[i, j] += weight / 2.0
        Q[j, i] += weight / 2.0

    return FoldedQubo(matrix=Q, offset=offset)


def qubo_to_ising(Q: np.ndarray, offset: float = 0.0, labels: Sequence[str] = ()) -> IsingModel:
    """
    x_i = (1 + s_i)/2 치환으로 QUBO 행렬을 Ising 모델로 바꾼다.
    모든 s에 대해 Ising 에너지(+offset) = x^T Q x + offset 이 정확히 성립한다.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DimensionMismatchError("Q는 정방행렬이어야 합니다", {"shape": Q.shape})
    pair_total = np.triu(Q + Q.T, 1)
    diagonal = np.diag(Q)
    J = pair_total / 4.0
    h = (pair_total.sum(axis=0) + pair_total.sum(axis=1)) / 4.0 + diagonal / 2.0
    const = offset + pair_total.sum() / 4.0 + diagonal.sum() / 2.0
    return IsingModel(couplings=J, fields=h, offset=const, labels=tuple(labels))


def quadratize_with_ancilla(model: IsingModel, label: str = "ancilla") -> IsingModel:
    """
    국소장 h_i를 index 0의 ancilla와의 결합 J_{0,i+1} = h_i로 옮긴다.
    결과 해밀토니안은 전역 스핀 반전에 대해 불변이다.
    """
    n = model.n_spins
    J = np.zeros((n + 1, n + 1))
    J[1:, 1:] = model.couplings
    J[0, 1:] = model.fields
    labels = (label,) + model.labels if model.labels else ()
    return IsingModel(couplings=J, fields=np.zeros(n + 1), offset=model.offset, scale=model.scale, labels=labels)


def normalize(model: IsingModel) -> IsingModel:
    """max|J_ij| = 1이 되도록 나눈다. 결합이 모두 0이면 그대로 반환."""
    s = float(np.max(np.abs(model.couplings))) if model.n_spins > 1 else 0.0
    if s == 0.0:
        return model
    return IsingModel(
        couplings=model.couplings / s,
        fields=model.fields / s,
        offset=model.offset / s,
        scale=model.scale * s,
        labels=model.labels,
    )


def to_cost_model(qubo: QuboProblem, ancilla: bool = True, normalized: bool = True) -> IsingModel:
    """penalty_fold → qubo_to_ising → (quadratize_with_ancilla) → (normalize)"""
    folded = penalty_fold(qubo)
    model = qubo_to_ising(folded.matrix, folded.offset, labels=qubo.labels)
    if ancilla:
        model = quadratize_with_ancilla(model)
    if normalized:
        model = normalize(model)
    return model


# ---------------------------------------------------------------------------
# 에너지와 전수 탐색
# ---------------------------------------------------------------------------

def spin_table(n_spins: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """기저 인덱스 [start, stop)의 스핀 배열 (행: 상태, 열: qubit)"""
    stop = (1 << n_spins) if stop is None else stop
    indices = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n_spins - 1, -1, -1, dtype=np.int64)
    bits = (indices[:, None] >> shifts[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def energy(model: IsingModel, s: Any) -> float:
    """Σ_{i<j} J_ij s_i s_j + Σ h_i s_i + offset"""
    spins = np.asarray(s.spins if isinstance(s, SpinConfiguration) else s, dtype=float)
    if spins.shape != (model.n_spins,):
        raise DimensionMismatchError("스핀 길이가 모델과 다릅니다", {"spins": spins.shape, "n_spins": model.n_spins})
    return float(spins @ model.couplings @ spins + model.fields @ spins + model.offset)


def energy_landscape(model: IsingModel, include_offset: bool = True) -> np.ndarray:
    """모든 2^n 기저 상태의 에너지 벡터 (인덱스 순서)"""
    n = model.n_spins
    if n > MAX_ENUMERATION_SPINS:
        raise SizeLimitError("전수 탐색 가능한 스핀 수를 초과했습니다", {"n_spins": n, "limit": MAX_ENUMERATION_SPINS})
    total = 1 << n
    out = np.empty(total)
    for start in range(0, total, _ENUMERATION_CHUNK):
        stop = min(start + _ENUMERATION_CHUNK, total)
        s = spin_table(n, start, stop).astype(float)
        out[start:stop] = np.einsum("ki,ij,kj->k", s, model.couplings, s) + s @ model.fields
    if include_offset:
        out += model.offset
    return out


def ground_state_mask(energies: np.ndarray, rtol: float = DEGENERACY_RTOL) -> np.ndarray:
    """최솟값에서 rtol·(max − min) 이내인 상태들의 마스크"""
    e_min = float(np.min(energies))
    spread = float(np.max(energies)) - e_min
    return energies <= e_min + rtol * spread


def ground_state_indices(model: IsingModel) -> np.ndarray:
    return np.flatnonzero(ground_state_mask(energy_landscape(model)))


def brute_force_ground_states(model: IsingModel) -> Tuple[float, FrozenSet[SpinConfiguration]]:
    """전역 최소 에너지와 이를 (허용오차 내에서) 달성하는 모든 배치"""
    energies = energy_landscape(model)
    indices = np.flatnonzero(ground_state_mask(energies))
    states = frozenset(SpinConfiguration.from_index(int(i), model.n_spins) for i in indices)
    return float(np.min(energies)), states


def decode_ancilla(config: SpinConfiguration, ancilla_index: int = 0) -> SpinConfiguration:
    """ancilla 부호가 −1이면 나머지 스핀을 모두 뒤집고 ancilla를 제거한다."""
    sign = config.spins[ancilla_index]
    rest = config.spins[:ancilla_index] + config.spins[ancilla_index + 1:]
    return SpinConfiguration(tuple(sign * s for s in rest))


def qubo_energy(qubo: QuboProblem, x: Sequence[int]) -> float:
    """x^T W x + λ||Ax − b||² + Σ w x_i x_j 를 직접 계산"""
    x = np.asarray(x, dtype=float)
    if x.shape != (qubo.n_vars,):
        raise DimensionMismatchError("x 길이가 변수 수와 다릅니다", {"x": x.shape, "n_vars": qubo.n_vars})
    value = float(x @ qubo.objective @ x)
    if qubo.constraints is not None:
        A, b = qubo.constraints
        residual = A @ x - b
        value += qubo.penalty * float(residual @ residual)
    for i, j, weight in qubo.product_penalties:
        value += weight * x[i] * x[j]
    return value


def constraint_violation(qubo: QuboProblem, x: Sequence[int]) -> float:
    """||Ax − b||² + 활성화된 곱 페널티 쌍 수 (0이면 가능해)"""
    x = np.asarray(x, dtype=float)
    violation = 0.0
    if qubo.constraints is not None:
        A, b = qubo.constraints
        residual = A @ x - b
        violation += float(residual @ residual)
    violation += sum(float(x[i] * x[j]) for i, j, _ in qubo.product_penalties)
    return violation


def all_bit_vectors(n_vars: int) -> Iterable[Tuple[int, ...]]:
    for idx in range(1 << n_vars):
        yield tuple((idx >> (n_vars - 1 - i)) & 1 for i in range(n_vars))


def flip_canonical_indices(indices: Iterable[int], n_spins: int) -> List[int]:
    """전역 반전 쌍을 qubit 0 = +1 쪽 대표로 모은 정렬된 인덱스"""
    full = (1 << n_spins) - 1
    half = 1 << (n_spins - 1)
    return sorted({int(i) if int(i) < half else full - int(i) for i in indices})
