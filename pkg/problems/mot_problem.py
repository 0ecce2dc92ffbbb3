"""
다중 객체 추적(MOT) QUBO 생성

변수 배치: x[f, k, l] → index f·D·T + k·T + l
  f: 자유 프레임 (첫 프레임은 fixed_assignment로 고정)
  k: 검출(detection), l: 트랙(track)
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from anneal.errors import DimensionMismatchError, InvalidSpecError
from anneal.ising import QuboProblem
from problems.base_problem import AbstractProblem


@dataclass(frozen=True)
class MotSpec:
    """
    MOT 문제 정의

    Args:
        n_tracks: 트랙 수 T
        detections_per_frame: 프레임당 검출 수 D
        n_free_frames: 고정된 첫 프레임 이후의 프레임 수
        objective_weights: 자유 프레임별 (검출, 트랙) 유사도 비용, 길이 n_free_frames·D·T
        penalty: 페널티 가중치 λ
        fixed_assignment: 첫 프레임의 이진 배정 (None이면 검출 k → 트랙 k)
        offdiag_rescale: 프레임 간 결합 가중치에 곱하는 계수
        pair_weights: {(f1, f2): D×D 행렬} 같은 트랙 l에 대해 (k1,l)@f1 ↔ (k2,l)@f2 결합
        max_frame_gap: 결합을 허용하는 최대 프레임 간격
    """

    n_tracks: int
    detections_per_frame: int
    n_free_frames: int
    objective_weights: Tuple[float, ...]
    penalty: float
    fixed_assignment: Optional[Tuple[int, ...]] = None
    offdiag_rescale: float = 1.0
    pair_weights: Mapping[Tuple[int, int], Tuple[Tuple[float, ...], ...]] = field(default_factory=dict)
    max_frame_gap: int = 2

    def __post_init__(self):
        T, D, F = self.n_tracks, self.detections_per_frame, self.n_free_frames
        if T < 1 or D < 1:
            raise InvalidSpecError("트랙 수와 검출 수는 1 이상이어야 합니다", {"n_tracks": T, "detections_per_frame": D})
        if F < 1:
            raise InvalidSpecError("자유 프레임이 하나 이상 필요합니다", {"n_free_frames": F})
        if self.penalty < 0:
            raise InvalidSpecError("penalty는 0 이상이어야 합니다", {"penalty": self.penalty})

        weights = tuple(float(w) for w in self.objective_weights)
        if len(weights) != F * D * T:
            raise DimensionMismatchError(
                "objective_weights 개수가 맞지 않습니다",
                {"expected": F * D * T, "got": len(weights)},
            )
        if not np.all(np.isfinite(weights)):
            raise InvalidSpecError("objective_weights에 유한하지 않은 값이 있습니다")
        object.__setattr__(self, "objective_weights", weights)

        fixed = self.fixed_assignment
        if fixed is None:
            fixed = tuple(1 if k == l else 0 for k in range(D) for l in range(T))
        fixed = tuple(int(v) for v in fixed)
        if len(fixed) != D * T or any(v not in (0, 1) for v in fixed):
            raise InvalidSpecError("fixed_assignment는 길이 D·T의 이진 벡터여야 합니다", {"fixed_assignment": fixed})
        grid = np.array(fixed).reshape(D, T)
        if np.any(grid.sum(axis=1) != 1) or np.any(grid.sum(axis=0) != 1):
            raise InvalidSpecError("fixed_assignment가 일대일 배정 제약을 만족하지 않습니다", {"fixed_assignment": fixed})
        object.__setattr__(self, "fixed_assignment", fixed)

        pairs = {}
        for (f1, f2), matrix in dict(self.pair_weights).items():
            f1, f2 = int(f1), int(f2)
            if not (0 <= f1 < f2 < F):
                raise InvalidSpecError("pair_weights 프레임 인덱스가 잘못되었습니다", {"frames": (f1, f2), "n_free_frames": F})
            if f2 - f1 > self.max_frame_gap:
                raise InvalidSpecError("프레임 간격이 max_frame_gap을 넘습니다", {"frames": (f1, f2), "max_frame_gap": self.max_frame_gap})
            arr = np.asarray(matrix, dtype=float)
            if arr.shape != (D, D):
                raise DimensionMismatchError("pair_weights 행렬은 D×D여야 합니다", {"frames": (f1, f2), "shape": arr.shape})
            pairs[(f1, f2)] = tuple(tuple(float(v) for v in row) for row in arr)
        object.__setattr__(self, "pair_weights", pairs)

    @property
    def n_vars(self) -> int:
        return self.n_free_frames * self.detections_per_frame * self.n_tracks

    def var_index(self, frame: int, detection: int, track: int) -> int:
        D, T = self.detections_per_frame, self.n_tracks
        return frame * D * T + detection * T + track

    def labels(self) -> Tuple[str, ...]:
        return tuple(
            f"f{f + 2}_d{k}_t{l}"
            for f in range(self.n_free_frames)
            for k in range(self.detections_per_frame)
            for l in range(self.n_tracks)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_tracks": self.n_tracks,
            "detections_per_frame": self.detections_per_frame,
            "n_free_frames": self.n_free_frames,
            "objective_weights": list(self.objective_weights),
            "penalty": self.penalty,
            "fixed_assignment": list(self.fixed_assignment),
            "offdiag_rescale": self.offdiag_rescale,
            "pair_weights": [
                {"frames": [f1, f2], "weights": [list(row) for row in matrix]}
                for (f1, f2), matrix in sorted(self.pair_weights.items())
            ],
            "max_frame_gap": self.max_frame_gap,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MotSpec":
        pairs = {tuple(item["frames"]): tuple(map(tuple, item["weights"])) for item in data.get("pair_weights", [])}
        fixed = data.get("fixed_assignment")
        return cls(
            n_tracks=int(data["n_tracks"]),
            detections_per_frame=int(data["detections_per_frame"]),
            n_free_frames=int(data["n_free_frames"]),
            objective_weights=tuple(data["objective_weights"]),
            penalty=float(data["penalty"]),
            fixed_assignment=tuple(fixed) if fixed is not None else None,
            offdiag_rescale=float(data.get("offdiag_rescale", 1.0)),
            pair_weights=pairs,
            max_frame_gap=int(data.get("max_frame_gap", 2)),
        )


def _frame_constraints(D: int, T: int) -> np.ndarray:
    """한 프레임의 배정 제약: 검출별 행 D개, 트랙별 행 T개 (중복 행 제거)"""
    rows: List[np.ndarray] = []
    for k in range(D):
        row = np.zeros(D * T)
        row[k * T:(k + 1) * T] = 1.0
        rows.append(row)
    for l in range(T):
        row = np.zeros(D * T)
        row[l::T] = 1.0
        rows.append(row)

    unique: List[np.ndarray] = []
    for row in rows:
        if not any(np.array_equal(row, seen) for seen in unique):
            unique.append(row)
    return np.array(unique)


def mot_constraints(spec: MotSpec) -> Tuple[np.ndarray, np.ndarray]:
    """자유 프레임마다 블록 대각으로 쌓은 (A, b)"""
    D, T, F = spec.detections_per_frame, spec.n_tracks, spec.n_free_frames
    block = _frame_constraints(D, T)
    A = np.zeros((F * block.shape[0], F * D * T))
    for f in range(F):
        A[f * block.shape[0]:(f + 1) * block.shape[0], f * D * T:(f + 1) * D * T] = block
    b = np.ones(A.shape[0])
    return A, b


def build_mot(spec: MotSpec) -> QuboProblem:
    """
    x^T W x + λ||Ax − b||² 형태의 MOT QUBO 생성.
    단일 자유 프레임이면 W는 대각(국소장 항)만 가진다.
    """
    D, T = spec.detections_per_frame, spec.n_tracks
    W = np.diag(np.array(spec.objective_weights, dtype=float))
    for (f1, f2), matrix in spec.pair_weights.items():
        for k1 in range(D):
            for k2 in range(D):
                weight = spec.offdiag_rescale * matrix[k1][k2]
                if weight == 0:
                    continue
                for l in range(T):
                    i = spec.var_index(f1, k1, l)
                    j = spec.var_index(f2, k2, l)
                    W[i, j] += weight
                    W[j, i] += weight
    A, b = mot_constraints(spec)
    return QuboProblem(objective=W, constraints=(A, b), penalty=spec.penalty, labels=spec.labels())


def assignment_from_bits(spec: MotSpec, bits: Sequence[int]) -> List[Dict[int, Optional[int]]]:
    """프레임별 {검출: 트랙} 배정. 첫 원소는 고정 프레임."""
    D, T = spec.detections_per_frame, spec.n_tracks
    if len(bits) != spec.n_vars:
        raise DimensionMismatchError("bits 길이가 변수 수와 다릅니다", {"bits": len(bits), "n_vars": spec.n_vars})

    def _frame(values: Sequence[int]) -> Dict[int, Optional[int]]:
        grid = np.asarray(values, dtype=int).reshape(D, T)
        return {k: (int(np.argmax(grid[k])) if grid[k].sum() == 1 else None) for k in range(D)}

    frames = [_frame(spec.fixed_assignment)]
    for f in range(spec.n_free_frames):
        frames.append(_frame(bits[f * D * T:(f + 1) * D * T]))
    return frames


class MotProblem(AbstractProblem):
    """MotSpec을 감싼 문제 객체"""

    def __init__(self, spec: MotSpec, name: str = "mot"):
        self.spec = spec
        self.name = name
        self._qubo: Optional[QuboProblem] = None

    def get_qubo(self) -> QuboProblem:
        if self._qubo is None:
            self._qubo = build_mot(self.spec)
        return self._qubo

    def get_metadata(self) -> Dict[str, Any]:
        return {
            "problem": self.name,
            "kind": "mot",
            "spec": self.spec.to_dict(),
            "penalty": self.spec.penalty,
            "n_vars": self.spec.n_vars,
        }

    def decode(self, bits: Sequence[int]) -> Dict[str, Any]:
        frames = assignment_from_bits(self.spec, bits)
        return {
            "frames": [{"frame": idx + 1, "assignment": frame} for idx, frame in enumerate(frames)],
            "feasible": self.is_feasible(bits),
        }
