# 비용 모델 생성 워크플로우
"""
문제 정의(preset, MOT, cutting stock)로부터 비용 IsingModel을 만들어
provenance 블록과 함께 JSON으로 저장하는 스크립트

워크플로우:
1. 문제 객체 생성 (preset 또는 명령행 사양)
2. 변환 체인: penalty_fold → qubo_to_ising → quadratize_with_ancilla → normalize
3. 바닥 상태 확인 및 해 디코딩
4. 모델 JSON 저장
"""

import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from anneal.errors import InvalidSpecError
from anneal.ising import IsingModel, brute_force_ground_states
from problems.base_problem import AbstractProblem
from problems.cutstock_problem import CutStockProblem, CutStockSpec
from problems.fixtures import FIXTURES, build_preset, fixture_info
from problems.mot_problem import MotProblem, MotSpec
from utils.file_utils import load_model, save_model
from utils.log_utils import get_logger

logger = get_logger(__name__)

CHAIN_WITH_ANCILLA = ["penalty_fold", "qubo_to_ising", "quadratize_with_ancilla", "normalize"]
CHAIN_WITH_FIELDS = ["penalty_fold", "qubo_to_ising", "normalize"]


def _int_list(text: Optional[str]) -> Optional[Tuple[int, ...]]:
    if text is None:
        return None
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise InvalidSpecError(f"정수 목록 형식이 아닙니다: {text}") from None


def _float_list(text: Optional[str]) -> Tuple[float, ...]:
    if not text:
        return ()
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise InvalidSpecError(f"실수 목록 형식이 아닙니다: {text}") from None


class ModelBuilder:
    """문제 정의 → 비용 모델 → JSON"""

    def __init__(self, output_dir: str = "data/results"):
        self.output_dir = Path(output_dir)

    def problem_from_args(
        self,
        kind: str,
        penalty: Optional[float] = None,
        bar_length: Optional[int] = None,
        pieces: Optional[str] = None,
        demands: Optional[str] = None,
        bars: int = 1,
        aggregate: bool = False,
        frames: Optional[int] = None,
        tracks: int = 2,
        detections: int = 2,
        weights: Optional[str] = None,
    ) -> AbstractProblem:
        """preset 이름 또는 mot / cutstock 사양으로 문제 객체 생성"""
        if kind in FIXTURES:
            problem = build_preset(kind)
            if penalty is not None:
                problem = type(problem)(replace(problem.spec, penalty=float(penalty)), name=kind)
            return problem

        if kind == "cutstock":
            if bar_length is None or pieces is None:
                raise InvalidSpecError("cutstock에는 --L과 --pieces가 필요합니다")
            lengths = _int_list(pieces)
            spec = CutStockSpec(
                bar_length=int(bar_length),
                piece_lengths=lengths,
                demands=_int_list(demands) or tuple(1 for _ in lengths),
                n_bars=int(bars),
                penalty=1.0 if penalty is None else float(penalty),
                aggregate_demands=aggregate,
            )
            return CutStockProblem(spec)

        if kind == "mot":
            spec = MotSpec(
                n_tracks=int(tracks),
                detections_per_frame=int(detections),
                n_free_frames=1 if frames is None else int(frames),
                objective_weights=_float_list(weights),
                penalty=2.5 if penalty is None else float(penalty),
            )
            return MotProblem(spec)

        raise InvalidSpecError(f"알 수 없는 문제 종류: {kind}", {"available": sorted(FIXTURES) + ["mot", "cutstock"]})

    def build(self, problem: AbstractProblem, ancilla: bool = True, normalized: bool = True) -> Tuple[IsingModel, Dict[str, Any]]:
        model = problem.to_ising(ancilla=ancilla, normalized=normalized)
        chain = list(CHAIN_WITH_ANCILLA if ancilla else CHAIN_WITH_FIELDS)
        if not normalized:
            chain.remove("normalize")

        ground_energy, ground_states = brute_force_ground_states(model)
        config = min(ground_states, key=lambda c: c.index)
        solution = problem.decode_ground_state(config, ancilla=ancilla)

        provenance = dict(problem.get_metadata())
        provenance.update({
            "chain": chain,
            "ancilla": ancilla,
            "normalized": normalized,
            "energy_scale_factor": model.scale,
            "ground_energy": ground_energy,
            "ground_degeneracy": len(ground_states),
            "solution": solution,
        })
        logger.info(f"[✓] 모델 생성: {provenance.get('problem')} ({model.n_spins} qubits, 바닥 상태 {len(ground_states)}개)")
        return model, provenance

    def save(self, model: IsingModel, provenance: Dict[str, Any], path: Optional[str] = None) -> Path:
        target = path or str(self.output_dir / f"{provenance.get('problem', 'model')}_model.json")
        saved = save_model(model, target, provenance)
        logger.info(f"[✓] 모델 저장: {saved}")
        return saved

    def run(self, kind: str, out: Optional[str] = None, ancilla: bool = True, **options) -> Tuple[IsingModel, Path]:
        print("=" * 60, file=sys.stderr)
        problem = self.problem_from_args(kind, **options)
        model, provenance = self.build(problem, ancilla=ancilla)
        return model, self.save(model, provenance, out)


def resolve_model(name: Optional[str], model_file: Optional[str], penalty: Optional[float], protocol: str) -> Tuple[IsingModel, str]:
    """설정의 problem 블록을 비용 모델로. local_fields 프로토콜은 ancilla 없이 만든다."""
    if model_file:
        model, provenance = load_model(model_file)
        return model, str(provenance.get("problem", Path(model_file).stem))
    if not name:
        raise InvalidSpecError("problem 이름이나 모델 파일이 필요합니다")
    fixture_info(name)
    builder = ModelBuilder()
    problem = builder.problem_from_args(name, penalty=penalty)
    ancilla = protocol != "local_fields_with_sign_flips"
    return problem.to_ising(ancilla=ancilla, normalized=True), name
