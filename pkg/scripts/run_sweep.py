# DD 펄스율 sweep 워크플로우
"""
진폭 × 펄스 수 × 실현 전 조합을 실행하고 CSV로 저장하는 스크립트

워크플로우:
1. 설정 해석 및 모델 준비
2. 기존 출력 확인 (--resume이면 완료된 실현 건너뜀)
3. 병렬 sweep 실행
4. 정렬된 CSV 저장 (첫 줄에 설정 기록) 및 요약 출력
"""

import sys
from pathlib import Path
from typing import Optional

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from analysis.sweep import SweepResult, dd_sweep, summarize
from anneal.errors import ConfigError
from scripts.build_model import resolve_model
from utils.config import ExperimentConfig
from utils.file_utils import check_output, read_csv_with_config, write_csv_with_config
from utils.log_utils import get_logger

logger = get_logger(__name__)


class SweepWorkflow:
    """설정 하나에 대한 DD sweep"""

    def __init__(self, config: ExperimentConfig, workers: int = 1):
        self.config = config
        self.workers = workers

    def default_output(self) -> str:
        name = self.config.output.get("name") or f"sweep_{self.config.problem.get('name') or 'model'}.csv"
        return str(Path(self.config.output["dir"]) / name)

    def run(self, out: Optional[str] = None, resume: bool = False) -> SweepResult:
        out = out or self.default_output()
        existing = None
        if check_output(out, resume):
            existing, _ = read_csv_with_config(out)
            logger.info(f"[✓] 기존 결과 {len(existing)}행에서 이어 합니다: {out}")

        print("=" * 60, file=sys.stderr)
        problem = self.config.problem
        anneal = self.config.anneal_config()
        model, problem_name = resolve_model(problem.get("name"), problem.get("model_file"), problem.get("penalty"), anneal.protocol)
        noise = self.config.noise
        if not noise.get("energy_scale_hz"):
            raise ConfigError("sweep에는 energy_scale_hz가 필요합니다 (preset 또는 --energy-scale)")
        mode = "spectrum" if noise["mode"] == "spectrum" else "static"
        amplitudes = noise["amplitudes_hz"] if noise["mode"] != "none" else [0.0]

        result = dd_sweep(
            model,
            anneal,
            self.config.spectrum(),
            amplitudes,
            [int(p) for p in self.config.dd["pulse_counts"]],
            int(self.config.ensemble["n_realizations"]),
            int(self.config.ensemble["master_seed"]),
            energy_scale_hz=float(noise["energy_scale_hz"]),
            mode=mode,
            correlated=bool(noise["correlated"]),
            problem=problem_name,
            workers=self.workers,
            existing=existing,
        )
        result.config = {"experiment": self.config.to_dict(), "sweep": result.config}
        write_csv_with_config(result.frame, out, result.config)
        logger.info(f"[✓] sweep 결과 저장: {out} ({len(result)}행)")

        table = summarize(result)
        for row in table.itertuples(index=False):
            logger.info(f"[📊] {row.amplitude_hz:g} Hz, 펄스 {row.pulses}: median {row.median:.3f} (q1 {row.q1:.3f}, q3 {row.q3:.3f})")
        return result
