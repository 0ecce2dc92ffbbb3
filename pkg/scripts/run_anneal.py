# 단일 어닐링 실행 워크플로우
"""
한 번의 어닐링 sweep을 전파하고 실행 기록(run record)을 남기는 스크립트

워크플로우:
1. 설정 해석 (preset 기본값 + 파일 + 명령행)
2. 비용 모델 준비
3. 노이즈 시계열 생성 (none / spectrum / static)
4. 전파 및 충실도 계산 (선택: 100 스텝마다 충실도 기록)
5. 실행 기록 JSON 저장
"""

import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

import numpy as np

from anneal.dynamics import AnnealConfig, propagate_batch
from anneal.errors import ConfigError
from anneal.ising import IsingModel
from anneal.noise import NoiseTrace, sample_trace, static_disorder, zero_trace
from scripts.build_model import resolve_model
from utils.config import ExperimentConfig
from utils.file_utils import model_hash, write_csv_with_config, write_run_record
from utils.log_utils import get_logger

logger = get_logger(__name__)

TRACE_EVERY = 100


class AnnealRun:
    """단일 어닐링 실행"""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.model: Optional[IsingModel] = None
        self.problem_name = ""

    def prepare_model(self) -> IsingModel:
        problem = self.config.problem
        self.model, self.problem_name = resolve_model(
            problem.get("name"), problem.get("model_file"), problem.get("penalty"), self.config.anneal["protocol"],
        )
        return self.model

    def make_trace(self, anneal: AnnealConfig, amplitude_hz: float, seed: int) -> NoiseTrace:
        noise = self.config.noise
        n = self.model.n_spins
        if noise["mode"] == "none" or amplitude_hz == 0:
            return zero_trace(anneal.n_steps, n, anneal.dt)
        energy_scale = noise.get("energy_scale_hz")
        if not energy_scale:
            raise ConfigError("노이즈를 쓰려면 energy_scale_hz가 필요합니다")
        duration_s = anneal.duration / energy_scale
        if noise["mode"] == "static":
            trace = static_disorder(amplitude_hz, n, noise["correlated"], seed, anneal.n_steps, duration_s / anneal.n_steps)
        else:
            trace = sample_trace(self.config.spectrum().with_amplitude(amplitude_hz), anneal.n_steps, duration_s, n, noise["correlated"], seed)
        return trace

    def run(
        self,
        pulses: int = 0,
        amplitude_hz: Optional[float] = None,
        record_trace: bool = False,
        out: Optional[str] = None,
        trace_csv: Optional[str] = None,
    ) -> Dict[str, Any]:
        start = time.perf_counter()
        if self.model is None:
            self.prepare_model()
        anneal = self.config.anneal_config(pulse_count=pulses)
        seed = int(self.config.ensemble["master_seed"])
        if amplitude_hz is None:
            amplitudes = self.config.noise["amplitudes_hz"]
            amplitude_hz = float(amplitudes[0]) if amplitudes else 0.0

        raw_trace = self.make_trace(anneal, amplitude_hz, seed)
        if trace_csv:
            write_csv_with_config(raw_trace.to_frame(), trace_csv, self.config.to_dict())
            logger.info(f"[✓] 노이즈 시계열 저장: {trace_csv}")
        trace = raw_trace if raw_trace.units == "J" else raw_trace.in_units_of_J(self.config.noise["energy_scale_hz"])

        result = propagate_batch(self.model, anneal, [trace], record_every=TRACE_EVERY if record_trace else 0)
        fidelity = float(result.fidelities[0])
        wall = time.perf_counter() - start
        logger.info(f"[📊] 최종 충실도: {fidelity:.4f} (펄스 {pulses}개, 진폭 {amplitude_hz:g} Hz, {wall:.1f}s)")

        spectrum = self.config.spectrum()
        record: Dict[str, Any] = {
            "inputs": {
                "problem": self.problem_name,
                "model_hash": model_hash(self.model),
                "config": self.config.to_dict(),
                "seed": seed,
                "pulse_count": pulses,
                "amplitude_hz": amplitude_hz,
                "spectrum": spectrum.with_amplitude(amplitude_hz).to_dict() if spectrum is not None else self.config.noise["mode"],
            },
            "outputs": {"fidelity": fidelity},
            "wall_time_s": wall,
        }
        if record_trace and result.fidelity_trace is not None:
            record["outputs"]["fidelity_trace"] = {
                "steps": [int(s) for s in result.trace_steps],
                "fidelity": [float(v) for v in np.asarray(result.fidelity_trace[0])],
            }
        if out:
            write_run_record(out, record)
            logger.info(f"[✓] 실행 기록 저장: {out}")
        return record
