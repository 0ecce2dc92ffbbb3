"""
인쇄된 비용 행렬 fixture와 CLI preset 등록

fixture 행렬은 소수 둘째 자리까지 인쇄된 값을 그대로 보관한다 (J 단위, scale=1).
index 0이 ancilla다.

cut6 주의: 인쇄된 (1,3), (2,3), (3,4) 항목 1.67은 변환 체인이 주는 1/6 ≈ 0.167과
정확히 10배 차이가 난다. 인쇄값 그대로면 바닥 상태가 막대 길이 제약을 깨므로,
corrected=True로 0.167을 넣은 변형을 함께 제공한다.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from anneal.errors import UnknownFixtureError
from anneal.ising import IsingModel
from problems.base_problem import AbstractProblem
from problems.cutstock_problem import CutStockProblem, CutStockSpec
from problems.mot_problem import MotProblem, MotSpec

_MOT5_ROWS = [
    [0, -0.87, -0.38, -0.23, -0.91],
    [0, 0, 1, 1, 0],
    [0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0],
]

_MOT9_ROWS = [
    [0, -0.96, -0.55, -0.43, -0.99, -0.84, -0.89, -0.38, -0.97],
    [0, 0, 1, 1, 0, -0.19, 0, -0.04, 0],
    [0, 0, 0, 0, 1, 0, -0.19, 0, -0.04],
    [0, 0, 0, 0, 1, -0.05, 0, -0.18, 0],
    [0, 0, 0, 0, 0, 0, -0.05, 0, -0.18],
    [0, 0, 0, 0, 0, 0, 1, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
]

_CUT5_ROWS = [
    [0, -1, -1, -0.5, -1],
    [0, 0, 0.5, 0.5, 1],
    [0, 0, 0, 0.5, 1],
    [0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0],
]

_CUT6_ROWS = [
    [0, 0.33, 0.33, 0.25, 0.5, 1],
    [0, 0, 0.33, 1.67, 0.33, 0.67],
    [0, 0, 0, 1.67, 0.33, 0.67],
    [0, 0, 0, 0, 1.67, 0.33],
    [0, 0, 0, 0, 0, 0.67],
    [0, 0, 0, 0, 0, 0],
]

CUT6_DECIMAL_SLIPS: Tuple[Tuple[int, int], ...] = ((1, 3), (2, 3), (3, 4))

# 인용된 근사 가중치. 마지막 항목은 인쇄 행렬(−0.91)보다 0.006 어긋난다.
MOT5_QUOTED_WEIGHTS = (-2.18, -0.95, -0.58, -2.26)
MOT5_WEIGHTS = (-2.18, -0.95, -0.58, -2.275)

# 9-qubit 행렬에서 역산한 가중치 (λ=3, offdiag_rescale=0.5 기준)
MOT9_WEIGHTS = (-2.19, -0.96, -0.60, -2.28, -1.80, -1.95, -0.48, -2.25)
MOT9_PAIR_WEIGHTS = {(0, 1): ((-1.14, -0.24), (-0.30, -1.08))}

MOT5_SPEC = MotSpec(
    n_tracks=2,
    detections_per_frame=2,
    n_free_frames=1,
    objective_weights=MOT5_WEIGHTS,
    penalty=2.5,
)

MOT9_SPEC = MotSpec(
    n_tracks=2,
    detections_per_frame=2,
    n_free_frames=2,
    objective_weights=MOT9_WEIGHTS,
    penalty=3.0,
    offdiag_rescale=0.5,
    pair_weights=MOT9_PAIR_WEIGHTS,
)

CUT5_SPEC = CutStockSpec(bar_length=3, piece_lengths=(1, 1), demands=(1, 1), n_bars=1, penalty=1.0)
CUT6_SPEC = CutStockSpec(bar_length=4, piece_lengths=(2, 2), demands=(1, 1), n_bars=1, penalty=1.0)


@dataclass(frozen=True)
class FixtureInfo:
    """fixture/preset 기본값과 출처"""

    name: str
    penalty: float
    driver_strength: float
    duration: float
    energy_scale_hz: float
    source: str
    notes: str = ""
    rows: Tuple[Tuple[float, ...], ...] = field(default=(), repr=False)
    builder: Callable[[], AbstractProblem] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "penalty": self.penalty,
            "driver_strength": self.driver_strength,
            "duration": self.duration,
            "energy_scale_hz": self.energy_scale_hz,
            "source": self.source,
            "notes": self.notes,
        }


def _rows(rows: List[List[float]]) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in row) for row in rows)


FIXTURES: Dict[str, FixtureInfo] = {
    "mot5": FixtureInfo(
        name="mot5",
        penalty=2.5,
        driver_strength=3.0,
        duration=2.6,
        energy_scale_hz=26.0,
        source="5-qubit MOT cost Hamiltonian (2 tracks, 2 detections, 1 free frame)",
        rows=_rows(_MOT5_ROWS),
        builder=lambda: MotProblem(MOT5_SPEC, name="mot5"),
    ),
    "mot9": FixtureInfo(
        name="mot9",
        penalty=3.0,
        driver_strength=2.0,
        duration=2.6,
        energy_scale_hz=26.0,
        source="9-qubit MOT cost Hamiltonian (2 tracks, 2 detections, 2 free frames)",
        notes="builder weights are back-solved from the printed matrix",
        rows=_rows(_MOT9_ROWS),
        builder=lambda: MotProblem(MOT9_SPEC, name="mot9"),
    ),
    "cut5": FixtureInfo(
        name="cut5",
        penalty=1.0,
        driver_strength=3.0,
        duration=26.0,
        energy_scale_hz=260.0,
        source="cutting stock L=3, pieces (1,1), one bar",
        rows=_rows(_CUT5_ROWS),
        builder=lambda: CutStockProblem(CUT5_SPEC, name="cut5"),
    ),
    "cut6": FixtureInfo(
        name="cut6",
        penalty=1.0,
        driver_strength=3.0,
        duration=26.0,
        energy_scale_hz=260.0,
        source="cutting stock L=4, pieces (2,2), one bar",
        notes="printed entries (1,3), (2,3), (3,4) read 1.67; the encoding gives 0.167",
        rows=_rows(_CUT6_ROWS),
        builder=lambda: CutStockProblem(CUT6_SPEC, name="cut6"),
    ),
}


def fixture_info(name: str) -> FixtureInfo:
    try:
        return FIXTURES[name]
    except KeyError:
        raise UnknownFixtureError(f"알 수 없는 fixture: {name}", {"available": sorted(FIXTURES)}) from None


def list_fixtures() -> List[str]:
    return sorted(FIXTURES)


def printed_fixture(name: str, corrected: bool = False) -> IsingModel:
    """
    인쇄된 행렬 그대로의 IsingModel (ancilla = index 0, fields 0, scale 1)

    Args:
        name: mot5, mot9, cut5, cut6
        corrected: cut6에서 1.67 항목을 0.167로 바로잡을지 여부
    """
    info = fixture_info(name)
    J = np.array(info.rows, dtype=float)
    if corrected and name == "cut6":
        for i, j in CUT6_DECIMAL_SLIPS:
            J[i, j] = J[i, j] / 10.0
    labels = ("ancilla",) + tuple(f"q{i}" for i in range(1, J.shape[0]))
    return IsingModel(couplings=J, fields=np.zeros(J.shape[0]), offset=0.0, scale=1.0, labels=labels)


def build_preset(name: str) -> AbstractProblem:
    """preset 이름에 해당하는 문제 객체 (빌더 체인 입력)"""
    return fixture_info(name).builder()
