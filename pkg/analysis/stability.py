"""
바닥 상태 안정성 Monte Carlo

무질서 샘플마다 전수 탐색으로 바닥 상태 집합을 다시 구해, 깨끗한 모델의 집합과
다른 비율을 σ별로 추정한다. 에너지는 샘플 묶음 단위로 행렬곱으로 한 번에 계산한다.

비교는 전역 반전 쌍 {b, ~b} 단위로 한다. 국소장 무질서는 ancilla 모델의 이중 축퇴를
깨뜨리지만 같은 해를 가리키므로 변화로 세지 않는다.
"""

from typing import Iterable, List

import numpy as np
import pandas as pd

from anneal.errors import InvalidSpecError, SizeLimitError
from anneal.ising import DEGENERACY_RTOL, IsingModel, energy_landscape, spin_table
from utils.log_utils import get_logger

logger = get_logger(__name__)

DISORDER_KINDS = ("local_correlated", "local_uncorrelated", "coupling_uncorrelated")
MAX_STABILITY_SPINS = 12
_SAMPLE_CHUNK = 1000


def _canonical_masks(masks: np.ndarray) -> np.ndarray:
    """(2^n, m) 마스크를 반전 쌍 단위 (2^(n−1), m)로 접는다"""
    half = masks.shape[0] // 2
    return masks[:half] | masks[half:][::-1]


def _ground_masks(energies: np.ndarray) -> np.ndarray:
    """열마다 바닥 상태 마스크 (상대 허용오차는 에너지 폭 기준)"""
    lo = energies.min(axis=0)
    hi = energies.max(axis=0)
    return energies <= (lo + DEGENERACY_RTOL * (hi - lo))[None, :]


def _disorder_basis(model: IsingModel, kind: str) -> np.ndarray:
    """에너지 변화 = basis @ draw 가 되도록 하는 (2^n, k) 행렬"""
    spins = spin_table(model.n_spins).astype(float)
    if kind == "local_correlated":
        return spins.sum(axis=1, keepdims=True)
    if kind == "local_uncorrelated":
        return spins
    rows, cols = np.nonzero(model.couplings)
    return spins[:, rows] * spins[:, cols]


def gs_change_probability(
    model: IsingModel,
    disorder_kind: str,
    sigma_grid: Iterable[float],
    n_samples: int,
    seed: int,
) -> pd.DataFrame:
    """
    σ별 바닥 상태 변화 확률

    Args:
        model: 깨끗한 비용 모델 (J 단위)
        disorder_kind: local_correlated | local_uncorrelated | coupling_uncorrelated
        sigma_grid: 무질서 표준편차 목록 [J]
        n_samples: σ당 샘플 수
        seed: 난수 시드 (σ 인덱스별 SeedSequence로 분기)

    Returns:
        sigma, probability, variance, stderr, n_samples, kind 열을 가진 DataFrame
    """
    if disorder_kind not in DISORDER_KINDS:
        raise InvalidSpecError(f"지원하지 않는 무질서 종류: {disorder_kind}", {"available": DISORDER_KINDS})
    if model.n_spins > MAX_STABILITY_SPINS:
        raise SizeLimitError("안정성 분석 가능한 spin 수를 초과했습니다", {"n_spins": model.n_spins, "limit": MAX_STABILITY_SPINS})
    if n_samples < 1:
        raise InvalidSpecError("n_samples는 1 이상이어야 합니다", {"n_samples": n_samples})

    base = energy_landscape(model, include_offset=False)
    reference = _canonical_masks(_ground_masks(base[:, None]))[:, 0]
    basis = _disorder_basis(model, disorder_kind)

    rows: List[dict] = []
    for idx, sigma in enumerate(sigma_grid):
        sigma = float(sigma)
        if sigma < 0:
            raise InvalidSpecError("σ는 0 이상이어야 합니다", {"sigma": sigma})
        changed = 0
        if sigma > 0 and basis.shape[1] > 0:
            rng = np.random.default_rng(np.random.SeedSequence([seed, idx]))
            remaining = n_samples
            while remaining > 0:
                m = min(_SAMPLE_CHUNK, remaining)
                draws = rng.normal(0.0, sigma, size=(basis.shape[1], m))
                energies = base[:, None] + basis @ draws
                canonical = _canonical_masks(_ground_masks(energies))
                changed += int(np.count_nonzero(np.any(canonical != reference[:, None], axis=0)))
                remaining -= m
        p = changed / n_samples
        variance = p * (1.0 - p) / n_samples
        rows.append({
            "sigma": sigma,
            "probability": p,
            "variance": variance,
            "stderr": float(np.sqrt(variance)),
            "n_samples": n_samples,
            "kind": disorder_kind,
        })
        logger.debug(f"σ={sigma:.3f}: 변화 확률 {p:.4f}")

    table = pd.DataFrame(rows)
    logger.info(f"[📊] 안정성 분석 완료: {disorder_kind}, σ {len(table)}개, 샘플 {n_samples}개씩")
    return table


def is_nondecreasing(table: pd.DataFrame, n_stderr: float = 2.0) -> bool:
    """σ 순으로 확률이 (표준오차 n_stderr배 이내에서) 감소하지 않는지"""
    ordered = table.sort_values("sigma")
    p = ordered["probability"].to_numpy()
    n = ordered["n_samples"].to_numpy(dtype=float)
    clipped = np.clip(p, 1.0 / n, 1.0 - 1.0 / n)
    se = np.sqrt(clipped * (1.0 - clipped) / n)
    peak = np.maximum.accumulate(np.where(p == np.maximum.accumulate(p), np.arange(len(p)), 0))
    drop = p[peak] - p
    slack = n_stderr * np.sqrt(se ** 2 + se[peak] ** 2)
    return bool(np.all(drop <= slack + 1e-12))
