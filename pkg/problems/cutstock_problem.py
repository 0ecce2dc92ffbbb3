"""
1차원 cutting stock 문제의 QUBO 생성

기본 인코딩 (수요 전개):
  - 수요 d_i를 길이 l_i인 단위 조각 d_i개로 전개
  - 배정 변수 x[p, k] (조각 p를 막대 k에서 절단) → index p·Q + k
  - 막대 k마다 슬랙 비트 1+⌊log₂ L⌋개 (가중치 2^b), Σ l_p x[p,k] + Σ 2^b s[k,b] = L
  - 조각당 최대 한 막대: 모든 k < k'에 대해 곱 페널티 λ·x[p,k]·x[p,k']
  - 목적 함수: 배정 변수 대각에 −l_p (잘라낸 길이 최대화)

aggregate_demands=True이면 수요 유형별 변수 x[i,k]와
Σ_k x[i,k] + Σ 2^b t[i,b] = d_i (슬랙 1+⌊log₂ d_i⌋ 비트) 제약을 쓴다.
이 경우 한 막대에서 같은 유형은 최대 한 조각만 자를 수 있다.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from anneal.errors import DimensionMismatchError, InvalidSpecError
from anneal.ising import QuboProblem
from problems.base_problem import AbstractProblem


def slack_bit_count(bound: int) -> int:
    """0..bound를 표현하는 슬랙 비트 수 1+⌊log₂ bound⌋"""
    return 1 + int(np.floor(np.log2(bound))) if bound >= 1 else 1


@dataclass(frozen=True)
class CutStockSpec:
    bar_length: int
    piece_lengths: Tuple[int, ...]
    demands: Tuple[int, ...]
    n_bars: int = 1
    penalty: float = 1.0
    aggregate_demands: bool = False

    def __post_init__(self):
        lengths = tuple(int(v) for v in self.piece_lengths)
        demands = tuple(int(v) for v in self.demands)
        object.__setattr__(self, "piece_lengths", lengths)
        object.__setattr__(self, "demands", demands)
        if self.bar_length < 1:
            raise InvalidSpecError("막대 길이는 양의 정수여야 합니다", {"bar_length": self.bar_length})
        if not lengths:
            raise InvalidSpecError("조각이 하나 이상 필요합니다")
        if len(lengths) != len(demands):
            raise DimensionMismatchError("piece_lengths와 demands 길이가 다릅니다", {"pieces": len(lengths), "demands": len(demands)})
        if any(l < 1 for l in lengths):
            raise InvalidSpecError("조각 길이는 양의 정수여야 합니다", {"piece_lengths": lengths})
        longest = max(lengths)
        if longest > self.bar_length:
            raise InvalidSpecError("막대보다 긴 조각이 있습니다", {"piece_length": longest, "bar_length": self.bar_length})
        if any(d < 1 for d in demands):
            raise InvalidSpecError("수요는 1 이상이어야 합니다", {"demands": demands})
        if self.n_bars < 1:
            raise InvalidSpecError("막대 수는 1 이상이어야 합니다", {"n_bars": self.n_bars})
        if self.penalty < 0:
            raise InvalidSpecError("penalty는 0 이상이어야 합니다", {"penalty": self.penalty})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bar_length": self.bar_length,
            "piece_lengths": list(self.piece_lengths),
            "demands": list(self.demands),
            "n_bars": self.n_bars,
            "penalty": self.penalty,
            "aggregate_demands": self.aggregate_demands,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CutStockSpec":
        lengths = tuple(data["piece_lengths"])
        return cls(
            bar_length=int(data["bar_length"]),
            piece_lengths=lengths,
            demands=tuple(data.get("demands") or [1] * len(lengths)),
            n_bars=int(data.get("n_bars", 1)),
            penalty=float(data.get("penalty", 1.0)),
            aggregate_demands=bool(data.get("aggregate_demands", False)),
        )


@dataclass(frozen=True)
class CutStockLayout:
    """변수 배치 정보"""

    items: Tuple[int, ...]              # 배정 변수의 조각(또는 유형) 길이
    n_bars: int
    bar_slack_bits: int
    demand_slack_bits: Tuple[int, ...]  # aggregate 모드에서 유형별 슬랙 비트 수

    @property
    def n_assign(self) -> int:
        return len(self.items) * self.n_bars

    @property
    def n_vars(self) -> int:
        return self.n_assign + self.n_bars * self.bar_slack_bits + sum(self.demand_slack_bits)

    def assign_index(self, item: int, bar: int) -> int:
        return item * self.n_bars + bar

    def bar_slack_index(self, bar: int, bit: int) -> int:
        return self.n_assign + bar * self.bar_slack_bits + bit

    def demand_slack_index(self, item: int, bit: int) -> int:
        return self.n_assign + self.n_bars * self.bar_slack_bits + sum(self.demand_slack_bits[:item]) + bit


def cutstock_layout(spec: CutStockSpec) -> CutStockLayout:
    if spec.aggregate_demands:
        items = spec.piece_lengths
        demand_bits = tuple(slack_bit_count(d) for d in spec.demands)
    else:
        items = tuple(l for l, d in zip(spec.piece_lengths, spec.demands) for _ in range(d))
        demand_bits = ()
    return CutStockLayout(
        items=items,
        n_bars=spec.n_bars,
        bar_slack_bits=slack_bit_count(spec.bar_length),
        demand_slack_bits=demand_bits,
    )


def _labels(layout: CutStockLayout) -> Tuple[str, ...]:
    labels: List[str] = [f"x_{p}_{k}" for p in range(len(layout.items)) for k in range(layout.n_bars)]
    labels += [f"slack_{k}_{b}" for k in range(layout.n_bars) for b in range(layout.bar_slack_bits)]
    labels += [f"demand_slack_{i}_{b}" for i, bits in enumerate(layout.demand_slack_bits) for b in range(bits)]
    return tuple(labels)


def build_cutting_stock(spec: CutStockSpec) -> QuboProblem:
    layout = cutstock_layout(spec)
    n = layout.n_vars
    Q_bars = spec.n_bars

    W = np.zeros((n, n))
    for p, length in enumerate(layout.items):
        for k in range(Q_bars):
            W[layout.assign_index(p, k), layout.assign_index(p, k)] = -float(length)

    rows: List[np.ndarray] = []
    rhs: List[float] = []
    for k in range(Q_bars):
        row = np.zeros(n)
        for p, length in enumerate(layout.items):
            row[layout.assign_index(p, k)] = length
        for bit in range(layout.bar_slack_bits):
            row[layout.bar_slack_index(k, bit)] = 2 ** bit
        rows.append(row)
        rhs.append(float(spec.bar_length))

    products: List[Tuple[int, int, float]] = []
    if spec.aggregate_demands:
        for i, demand in enumerate(spec.demands):
            row = np.zeros(n)
            for k in range(Q_bars):
                row[layout.assign_index(i, k)] = 1.0
            for bit in range(layout.demand_slack_bits[i]):
                row[layout.demand_slack_index(i, bit)] = 2 ** bit
            rows.append(row)
            rhs.append(float(demand))
    else:
        for p in range(len(layout.items)):
            for k in range(Q_bars):
                for k2 in range(k + 1, Q_bars):
                    products.append((layout.assign_index(p, k), layout.assign_index(p, k2), spec.penalty))

    return QuboProblem(
        objective=W,
        constraints=(np.array(rows), np.array(rhs)),
        penalty=spec.penalty,
        product_penalties=tuple(products),
        labels=_labels(layout),
    )


def cut_plan(spec: CutStockSpec, bits: Sequence[int]) -> List[Dict[str, Any]]:
    """막대별 절단 계획: 잘라낸 조각 길이, 슬랙 값, 낭비 길이"""
    layout = cutstock_layout(spec)
    if len(bits) != layout.n_vars:
        raise DimensionMismatchError("bits 길이가 변수 수와 다릅니다", {"bits": len(bits), "n_vars": layout.n_vars})
    plan = []
    for k in range(spec.n_bars):
        pieces = [layout.items[p] for p in range(len(layout.items)) if bits[layout.assign_index(p, k)]]
        slack = sum(2 ** b for b in range(layout.bar_slack_bits) if bits[layout.bar_slack_index(k, b)])
        used = sum(pieces)
        plan.append({
            "bar": k,
            "pieces": pieces,
            "used_length": used,
            "slack": slack,
            "waste": spec.bar_length - used,
            "length_ok": used + slack == spec.bar_length,
        })
    return plan


class CutStockProblem(AbstractProblem):
    """CutStockSpec을 감싼 문제 객체"""

    def __init__(self, spec: CutStockSpec, name: str = "cutstock"):
        self.spec = spec
        self.name = name
        self.layout = cutstock_layout(spec)
        self._qubo: Optional[QuboProblem] = None

    def get_qubo(self) -> QuboProblem:
        if self._qubo is None:
            self._qubo = build_cutting_stock(self.spec)
        return self._qubo

    def get_metadata(self) -> Dict[str, Any]:
        return {
            "problem": self.name,
            "kind": "cutstock",
            "spec": self.spec.to_dict(),
            "penalty": self.spec.penalty,
            "n_vars": self.layout.n_vars,
        }

    def decode(self, bits: Sequence[int]) -> Dict[str, Any]:
        plan = cut_plan(self.spec, bits)
        return {
            "bars": plan,
            "total_cut": sum(bar["used_length"] for bar in plan),
            "feasible": self.is_feasible(bits),
        }
