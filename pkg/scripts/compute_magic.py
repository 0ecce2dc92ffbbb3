# MAGIC 결합 계산 워크플로우
"""
이온 사슬 사양으로부터 평형 위치, 정상 모드, 결합 행렬 J [Hz]를 계산해 저장하는 스크립트
"""

import sys
from pathlib import Path
from typing import Any, Dict, Optional

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

import numpy as np

from anneal.magic import IonChainSpec, coupling_matrix, normal_modes
from utils.file_utils import save_json
from utils.log_utils import get_logger

logger = get_logger(__name__)


class MagicWorkflow:
    def __init__(self, n_ions: int, trap_freq_hz: float, gradient: float):
        self.spec = IonChainSpec(n_ions=n_ions, axial_trap_frequency=2 * np.pi * trap_freq_hz, gradient=gradient)
        self.trap_freq_hz = trap_freq_hz

    def run(self, out: Optional[str] = None) -> Dict[str, Any]:
        modes = normal_modes(self.spec)
        model = coupling_matrix(self.spec, modes)
        J = model.symmetric_couplings()
        report = {
            "config": {"n_ions": self.spec.n_ions, "trap_freq_hz": self.trap_freq_hz, "gradient_t_per_m": self.spec.gradient},
            "equilibrium_positions_um": [float(z * 1e6) for z in modes.equilibrium_positions],
            "mode_frequencies_hz": [float(nu / (2 * np.pi)) for nu in modes.frequencies],
            "couplings_hz": [[float(v) for v in row] for row in J],
            "max_coupling_hz": float(np.max(np.abs(J))),
        }
        logger.info(f"[📊] 최대 결합 {report['max_coupling_hz']:.2f} Hz")
        if out:
            save_json(report, out)
            logger.info(f"[✓] MAGIC 결과 저장: {out}")
        return report
