"""
최적화 문제 추상화의 기반이 되는 AbstractProblem 클래스.
모든 문제 타입(MOT, cutting stock 등)은 이 클래스를 상속받아 구현.
- get_qubo(): 페널티 가중치가 포함된 QuboProblem 반환
- get_metadata(): 모델 파일 provenance 블록에 저장할 dict 반환
- decode(): 이진 변수 벡터를 문제 고유의 해 표현으로 변환
- is_feasible(): 제약 조건 만족 여부
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Sequence

from anneal.ising import (
    IsingModel,
    QuboProblem,
    SpinConfiguration,
    constraint_violation,
    decode_ancilla,
    to_cost_model,
)


class AbstractProblem(ABC):
    @abstractmethod
    def get_qubo(self) -> QuboProblem:
        """
        문제의 QUBO 표현 반환
        예시: QuboProblem(objective=W, constraints=(A, b), penalty=2.5)
        """
        pass

    @abstractmethod
    def get_metadata(self) -> Dict[str, Any]:
        """
        문제 단위 메타데이터 반환
        예시 반환값:
        {
            "problem": "mot",
            "spec": {...},
            "penalty": 2.5,
            "chain": ["penalty_fold", "qubo_to_ising", "quadratize_with_ancilla", "normalize"]
        }
        """
        pass

    @abstractmethod
    def decode(self, bits: Sequence[int]) -> Dict[str, Any]:
        """이진 변수 벡터 x를 사람이 읽을 수 있는 해로 변환"""
        pass

    def is_feasible(self, bits: Sequence[int]) -> bool:
        return constraint_violation(self.get_qubo(), bits) == 0

    def to_ising(self, ancilla: bool = True, normalized: bool = True) -> IsingModel:
        return to_cost_model(self.get_qubo(), ancilla=ancilla, normalized=normalized)

    def decode_ground_state(self, config: SpinConfiguration, ancilla: bool = True) -> Dict[str, Any]:
        """비용 모델의 스핀 배치를 (ancilla 보정 후) 문제 해로 변환"""
        spins = decode_ancilla(config) if ancilla else config
        return self.decode(spins.to_bits())
