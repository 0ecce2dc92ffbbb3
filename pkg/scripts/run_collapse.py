# 스케일링 collapse 분석 워크플로우
"""
sweep CSV를 읽어 u = (Δt·σ^c)⁻¹ collapse 지수를 찾고, 붕괴된 곡선에 지수 맞춤을 붙이는 스크립트
"""

import sys
from pathlib import Path
from typing import Any, Dict, Optional, Union

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from analysis.fitting import collapse_fit, exponential_fit, rescale
from anneal.errors import FitError, InsufficientDataError
from utils.file_utils import read_csv_with_config, save_json
from utils.log_utils import get_logger

logger = get_logger(__name__)


class CollapseWorkflow:
    def __init__(self, input_csv: str):
        self.input_csv = input_csv
        self.frame, self.source_config = read_csv_with_config(input_csv)

    def run(self, c: Union[float, str] = "auto", out: Optional[str] = None) -> Dict[str, Any]:
        fit = collapse_fit(self.frame, c)
        report: Dict[str, Any] = {"collapse": fit.to_dict(), "exponential_fit": None}

        curve = rescale(self.frame, fit.exponent)
        try:
            report["exponential_fit"] = exponential_fit(curve["u"], curve["fidelity"]).to_dict()
        except (FitError, InsufficientDataError) as exc:
            logger.warning(f"[⚠️] 지수 맞춤 실패: {exc}")

        report["config"] = {"input": self.input_csv, "c": c, "source": self.source_config}
        if out:
            save_json(report, out)
            logger.info(f"[✓] collapse 결과 저장: {out}")
        return report
