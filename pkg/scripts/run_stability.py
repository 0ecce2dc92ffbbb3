# 바닥 상태 안정성 분석 워크플로우
"""
무질서 세기별 바닥 상태 변화 확률 표를 만들고, 선택적으로 arctan 맞춤을 붙이는 스크립트
"""

import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

import numpy as np

from analysis.fitting import arctan_fit
from analysis.stability import gs_change_probability
from anneal.errors import FitError, InsufficientDataError
from scripts.build_model import resolve_model
from utils.file_utils import write_csv_with_config
from utils.log_utils import get_logger

logger = get_logger(__name__)

DEFAULT_SIGMAS = tuple(np.round(np.arange(0.1, 3.01, 0.1), 2))


class StabilityWorkflow:
    def __init__(self, problem: str, model_file: Optional[str] = None, penalty: Optional[float] = None):
        self.model, self.problem = resolve_model(problem, model_file, penalty, "couplings_only")

    def run(
        self,
        kind: str,
        sigmas: Sequence[float] = DEFAULT_SIGMAS,
        n_samples: int = 10000,
        seed: int = 0,
        fit_from: Optional[float] = None,
        out: Optional[str] = None,
    ) -> Dict[str, Any]:
        table = gs_change_probability(self.model, kind, sigmas, n_samples, seed)
        report: Dict[str, Any] = {"table": table, "fit": None}
        if fit_from is not None:
            subset = table[table["sigma"] >= fit_from]
            try:
                fit = arctan_fit(subset["sigma"], subset["probability"])
                report["fit"] = fit.to_dict()
                logger.info(f"[📊] arctan 맞춤 (σ ≥ {fit_from:g}): a={fit.a:.3f}, b={fit.b:.3f}, c={fit.c:.3f}, d={fit.d:.3f}")
            except (FitError, InsufficientDataError) as exc:
                logger.warning(f"[⚠️] arctan 맞춤 실패: {exc}")
        if out:
            config = {
                "problem": self.problem,
                "kind": kind,
                "sigmas": [float(s) for s in sigmas],
                "n_samples": n_samples,
                "seed": seed,
                "fit": report["fit"],
            }
            write_csv_with_config(table, out, config)
            logger.info(f"[✓] 안정성 표 저장: {out}")
        return report
