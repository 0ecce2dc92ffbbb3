"""
DD 펄스율 sweep 과 요약 통계

진폭 × 펄스 수 × 실현의 전 조합을 돈다. 한 (진폭, 펄스 수) 칸의 실현들은
한 번의 배치 전파로 함께 계산하고, 칸들은 프로세스 풀로 병렬 처리한다.

실현 시드 = SeedSequence([master_seed, 진폭 인덱스, 펄스 인덱스, 실현 인덱스])의 첫 상태값.
물리 시간 변환은 t_phys = t_dimless / J_Hz (2π 없음).
"""

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from anneal.dynamics import AnnealConfig, noiseless_fidelity, propagate_batch
from anneal.errors import InvalidSpecError, SizeLimitError
from anneal.ising import IsingModel
from anneal.noise import NoiseSpectrum, sample_trace, static_disorder
from utils.log_utils import get_logger

logger = get_logger(__name__)

SWEEP_COLUMNS = [
    "amplitude_hz", "pulses", "pulses_per_ms", "seed", "realization", "fidelity",
    "noiseless_fidelity", "normalized_fidelity", "protocol", "problem", "duration", "spectrum",
]
NOISE_MODES = ("spectrum", "static")
MAX_SWEEP_SPINS = 10


@dataclass
class SweepResult:
    """realization 한 줄씩, (amplitude_hz, pulses, seed) 순 정렬"""

    frame: pd.DataFrame
    config: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.frame):
            fid = self.frame["fidelity"].to_numpy()
            if np.any(fid < -1e-12) or np.any(fid > 1 + 1e-12):
                raise InvalidSpecError("충실도는 [0, 1] 범위여야 합니다")
        self.frame = sort_rows(self.frame)

    def __len__(self) -> int:
        return len(self.frame)


def sort_rows(frame: pd.DataFrame) -> pd.DataFrame:
    if frame.empty:
        return frame.reindex(columns=SWEEP_COLUMNS)
    return frame.sort_values(["amplitude_hz", "pulses", "seed"], kind="mergesort").reset_index(drop=True)[SWEEP_COLUMNS]


def realization_seed(master_seed: int, amplitude_idx: int, pulse_idx: int, realization_idx: int) -> int:
    seq = np.random.SeedSequence([master_seed, amplitude_idx, pulse_idx, realization_idx])
    return int(seq.generate_state(1)[0])


def pulse_rate_per_ms(pulse_count: int, duration: float, energy_scale_hz: float) -> float:
    """펄스 수 → 펄스/ms (duration은 1/J 단위)"""
    return pulse_count / (duration / energy_scale_hz * 1e3)


def pulses_for_rate(rate_per_ms: float, duration: float, energy_scale_hz: float) -> int:
    return int(round(rate_per_ms * duration / energy_scale_hz * 1e3))


def _cell_traces(task: Dict[str, Any]) -> list:
    config = AnnealConfig(**task["config"])
    n_spins = task["n_spins"]
    duration_s = config.duration / task["energy_scale_hz"]
    traces = []
    for seed in task["seeds"]:
        if task["mode"] == "static":
            trace = static_disorder(
                task["amplitude"], n_spins, task["correlated"], seed,
                n_steps=config.n_steps, dt=duration_s / config.n_steps,
            )
        else:
            spectrum = NoiseSpectrum.from_dict(task["spectrum"]).with_amplitude(task["amplitude"])
            trace = sample_trace(spectrum, config.n_steps, duration_s, n_spins, task["correlated"], seed)
        traces.append(trace.in_units_of_J(task["energy_scale_hz"]))
    return traces


def _run_cell(task: Dict[str, Any]) -> List[Dict[str, Any]]:
    """한 (진폭, 펄스 수) 칸의 모든 실현을 배치 전파 (프로세스 풀 작업 단위)"""
    model = IsingModel.from_dict(task["model"])
    config = AnnealConfig(**task["config"])
    result = propagate_batch(model, config, _cell_traces(task))
    rate = pulse_rate_per_ms(config.pulse_count, config.duration, task["energy_scale_hz"])
    rows = []
    for r_idx, (seed, fid) in zip(task["realizations"], zip(task["seeds"], result.fidelities)):
        fid = float(min(max(fid, 0.0), 1.0))
        rows.append({
            "amplitude_hz": task["amplitude"],
            "pulses": config.pulse_count,
            "pulses_per_ms": rate,
            "seed": seed,
            "realization": r_idx,
            "fidelity": fid,
            "noiseless_fidelity": task["noiseless"],
            "normalized_fidelity": fid / task["noiseless"] if task["noiseless"] > 0 else float("nan"),
            "protocol": config.protocol,
            "problem": task["problem"],
            "duration": config.duration,
            "spectrum": task["spectrum_id"],
        })
    return rows


def _completed_keys(existing: Optional[pd.DataFrame]) -> Set[Tuple[float, int, int]]:
    if existing is None or existing.empty:
        return set()
    return {
        (float(a), int(p), int(r))
        for a, p, r in existing[["amplitude_hz", "pulses", "realization"]].itertuples(index=False)
    }


def dd_sweep(
    model: IsingModel,
    config_base: AnnealConfig,
    spectrum: Optional[NoiseSpectrum],
    amplitudes: Sequence[float],
    pulse_counts: Sequence[int],
    n_realizations: int,
    seed: int,
    *,
    energy_scale_hz: float = 26.0,
    mode: str = "spectrum",
    correlated: bool = True,
    problem: str = "",
    workers: int = 1,
    existing: Optional[pd.DataFrame] = None,
) -> SweepResult:
    """
    진폭 × 펄스 수 × 실현 전 조합 sweep

    Args:
        model: 정규화된 비용 모델
        config_base: pulse_count를 제외한 어닐링 설정
        spectrum: mode="spectrum"일 때의 노이즈 스펙트럼 (진폭은 amplitudes로 덮어씀)
        amplitudes: 노이즈 진폭 목록 [Hz]
        pulse_counts: 펄스 수 목록
        n_realizations: 칸당 실현 수
        seed: master seed
        energy_scale_hz: J [Hz]
        mode: spectrum | static
        correlated: 모든 qubit에 같은 노이즈를 줄지 여부
        problem: 결과 행에 기록할 문제 이름
        workers: 프로세스 수 (1 이하면 직렬)
        existing: 이어 하기용 기존 결과 (완료된 실현은 건너뜀)
    """
    if mode not in NOISE_MODES:
        raise InvalidSpecError(f"지원하지 않는 노이즈 모드: {mode}", {"available": NOISE_MODES})
    if mode == "spectrum" and spectrum is None:
        raise InvalidSpecError("spectrum 모드에는 노이즈 스펙트럼이 필요합니다")
    if model.n_spins > MAX_SWEEP_SPINS:
        raise SizeLimitError("sweep 가능한 spin 수를 초과했습니다", {"n_spins": model.n_spins, "limit": MAX_SWEEP_SPINS})
    if n_realizations < 1:
        raise InvalidSpecError("n_realizations는 1 이상이어야 합니다", {"n_realizations": n_realizations})
    if energy_scale_hz <= 0:
        raise InvalidSpecError("energy_scale_hz는 양수여야 합니다", {"energy_scale_hz": energy_scale_hz})

    noiseless = noiseless_fidelity(model, config_base)
    logger.info(f"[📊] 무잡음 기준 충실도: {noiseless:.4f}")
    done = _completed_keys(existing)
    spectrum_id = spectrum.spectrum_id if mode == "spectrum" else "static"

    tasks = []
    for a_idx, amplitude in enumerate(amplitudes):
        for p_idx, pulses in enumerate(pulse_counts):
            pending = [r for r in range(n_realizations) if (float(amplitude), int(pulses), r) not in done]
            if not pending:
                continue
            tasks.append({
                "model": model.to_dict(),
                "n_spins": model.n_spins,
                "config": replace(config_base, pulse_count=int(pulses)).to_dict(),
                "spectrum": spectrum.to_dict() if spectrum is not None else None,
                "spectrum_id": spectrum_id,
                "amplitude": float(amplitude),
                "realizations": pending,
                "seeds": [realization_seed(seed, a_idx, p_idx, r) for r in pending],
                "mode": mode,
                "correlated": correlated,
                "energy_scale_hz": energy_scale_hz,
                "noiseless": noiseless,
                "problem": problem,
            })

    skipped = len(done)
    if skipped:
        logger.info(f"[✓] 이미 완료된 실현 {skipped}개 건너뜀")
    logger.info(f"[📊] 실행할 칸 {len(tasks)}개 (진폭 {len(amplitudes)} × 펄스 {len(pulse_counts)}, 실현 {n_realizations})")

    rows: List[Dict[str, Any]] = []
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            rows.extend(_run_cell(task))
    else:
        try:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(_run_cell, task) for task in tasks]
                for future in as_completed(futures):
                    rows.extend(future.result())
        except (PermissionError, OSError) as exc:
            logger.warning(f"[⚠️] 병렬 실행 불가 ({exc}); 직렬로 전환합니다")
            rows = []
            for task in tasks:
                rows.extend(_run_cell(task))

    frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    if existing is not None and not existing.empty:
        frame = pd.concat([existing[SWEEP_COLUMNS], frame], ignore_index=True)
    config = {
        "anneal": config_base.to_dict(),
        "spectrum": spectrum.to_dict() if spectrum is not None else None,
        "mode": mode,
        "correlated": correlated,
        "amplitudes_hz": [float(a) for a in amplitudes],
        "pulse_counts": [int(p) for p in pulse_counts],
        "n_realizations": n_realizations,
        "master_seed": seed,
        "energy_scale_hz": energy_scale_hz,
        "problem": problem,
    }
    return SweepResult(frame, config)


def quartiles(values: Sequence[float]) -> Tuple[float, float, float]:
    """
    median-of-halves 사분위수 (q1, median, q3)

    정렬 후 아래쪽 절반 x[:n//2], 위쪽 절반 x[(n+1)//2:]의 중앙값. 홀수 n이면 중앙값은 양쪽에서 제외된다.
    n = 1이면 세 값 모두 그 값.
    """
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise InvalidSpecError("빈 데이터의 사분위수는 정의되지 않습니다")
    median = float(np.median(x))
    if x.size == 1:
        return median, median, median
    n = x.size
    return float(np.median(x[: n // 2])), median, float(np.median(x[(n + 1) // 2:]))


def summarize(results, by: Sequence[str] = ("amplitude_hz", "pulses")) -> pd.DataFrame:
    """그룹별 median, q1, q3, mean, std(모표준편차), count"""
    frame = results.frame if isinstance(results, SweepResult) else results
    if frame.empty:
        raise InvalidSpecError("요약할 결과가 없습니다")
    rows = []
    for key, group in frame.groupby(list(by), sort=True):
        key = key if isinstance(key, tuple) else (key,)
        fid = group["fidelity"].to_numpy(dtype=float)
        q1, median, q3 = quartiles(fid)
        row = dict(zip(by, key))
        row.update({
            "median": median,
            "q1": q1,
            "q3": q3,
            "mean": float(fid.mean()),
            "std": float(fid.std()),
            "count": int(fid.size),
        })
        rows.append(row)
    return pd.DataFrame(rows)
