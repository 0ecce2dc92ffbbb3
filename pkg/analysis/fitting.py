"""
곡선 맞춤과 스케일링 붕괴(collapse)

- arctan 맞춤: f(x) = a·arctan(b(x − c)) + d
- 지수 맞춤: F(u) = F∞ − A·exp(−k·u)
- collapse: 진폭 σ, 펄스 간격 Δt 점을 u = (Δt·σ^c)⁻¹로 옮겨 진폭별 평균 곡선이 겹치는 c를 찾는다.
  잔차는 공통 u 구간에서 보간한 곡선들 사이의 최대 세로 폭이다.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, Sequence, Union

import numpy as np
import pandas as pd
from scipy.optimize import curve_fit, minimize_scalar

from anneal.errors import FitError, InsufficientDataError
from utils.log_utils import get_logger

logger = get_logger(__name__)

C_BOUNDS = (0.3, 1.0)
_GRID_POINTS = 200
_SCAN_POINTS = 36


def arctan_model(x, a, b, c, d):
    return a * np.arctan(b * (x - c)) + d


def exponential_model(u, f_inf, amplitude, rate):
    return f_inf - amplitude * np.exp(-rate * u)


@dataclass(frozen=True)
class ArctanFit:
    a: float
    b: float
    c: float
    d: float
    rms: float
    degenerate: bool = False

    def __iter__(self) -> Iterator[float]:
        return iter((self.a, self.b, self.c, self.d))

    def __call__(self, x):
        return arctan_model(np.asarray(x, dtype=float), self.a, self.b, self.c, self.d)

    def to_dict(self) -> Dict[str, Any]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "rms": self.rms, "degenerate": self.degenerate}


@dataclass(frozen=True)
class ExponentialFit:
    f_inf: float
    amplitude: float
    rate: float
    rms: float

    def __call__(self, u):
        return exponential_model(np.asarray(u, dtype=float), self.f_inf, self.amplitude, self.rate)

    def to_dict(self) -> Dict[str, Any]:
        return {"f_inf": self.f_inf, "amplitude": self.amplitude, "rate": self.rate, "rms": self.rms}


@dataclass
class CollapseFit:
    exponent: float
    collapse_residual: float
    unrescaled_residual: float
    fit_metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exponent": self.exponent,
            "collapse_residual": self.collapse_residual,
            "unrescaled_residual": self.unrescaled_residual,
            "fit_metadata": self.fit_metadata,
        }


def arctan_fit(xs: Sequence[float], ys: Sequence[float]) -> ArctanFit:
    """
    비가중 최소제곱 arctan 맞춤

    초기값: a = (max−min)/π, b = 1, c = x 중점, d = y 평균.
    y가 상수면 최적화 없이 a = b = 0인 퇴화 결과를 돌려준다.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size:
        raise InsufficientDataError("xs와 ys 길이가 다릅니다", {"xs": x.size, "ys": y.size})
    if x.size < 4:
        raise InsufficientDataError("arctan 맞춤에는 4개 이상의 점이 필요합니다", {"n_points": int(x.size)})

    mid = float((x.min() + x.max()) / 2.0)
    spread = float(y.max() - y.min())
    if spread == 0.0:
        logger.warning("[⚠️] 상수 데이터: arctan 맞춤이 퇴화합니다 (a = b = 0)")
        return ArctanFit(0.0, 0.0, mid, float(y.mean()), 0.0, degenerate=True)

    p0 = (spread / np.pi, 1.0, mid, float(y.mean()))
    try:
        popt, _ = curve_fit(arctan_model, x, y, p0=p0, xtol=1e-12, ftol=1e-12, maxfev=10000)
    except RuntimeError as exc:
        raise FitError("arctan 맞춤이 수렴하지 않았습니다", {"reason": str(exc), "p0": p0}) from exc

    a, b, c, d = (float(v) for v in popt)
    rms = float(np.sqrt(np.mean((arctan_model(x, *popt) - y) ** 2)))
    degenerate = abs(a) < 1e-9 or abs(b) < 1e-9
    if degenerate:
        logger.warning(f"[⚠️] arctan 맞춤 퇴화: a={a:.3g}, b={b:.3g}")
    return ArctanFit(a, b, c, d, rms, degenerate)


def exponential_fit(u: Sequence[float], fidelity: Sequence[float]) -> ExponentialFit:
    """F(u) = F∞ − A·exp(−k·u) 맞춤 (collapse된 곡선용)"""
    u = np.asarray(u, dtype=float)
    f = np.asarray(fidelity, dtype=float)
    if u.size != f.size or u.size < 3:
        raise InsufficientDataError("지수 맞춤에는 같은 길이의 점 3개 이상이 필요합니다", {"n_points": int(min(u.size, f.size))})
    scale = float(np.median(u[u > 0])) if np.any(u > 0) else 1.0
    p0 = (float(f.max()), float(f.max() - f.min()) or 1e-3, 1.0 / scale)
    try:
        popt, _ = curve_fit(exponential_model, u, f, p0=p0, maxfev=10000)
    except RuntimeError as exc:
        raise FitError("지수 맞춤이 수렴하지 않았습니다", {"reason": str(exc), "p0": p0}) from exc
    rms = float(np.sqrt(np.mean((exponential_model(u, *popt) - f) ** 2)))
    return ExponentialFit(float(popt[0]), float(popt[1]), float(popt[2]), rms)


def _sweep_frame(results) -> pd.DataFrame:
    frame = results.frame if hasattr(results, "frame") else results
    required = {"amplitude_hz", "pulses", "pulses_per_ms", "fidelity"}
    missing = required - set(frame.columns)
    if missing:
        raise InsufficientDataError("sweep 결과에 필요한 열이 없습니다", {"missing": sorted(missing)})
    usable = frame[(frame["pulses"] > 0) & (frame["amplitude_hz"] > 0)]
    if usable["amplitude_hz"].nunique() < 2:
        raise InsufficientDataError("collapse에는 서로 다른 진폭이 2개 이상 필요합니다", {"amplitudes": sorted(usable["amplitude_hz"].unique().tolist())})
    return usable


def rescale(results, c: float) -> pd.DataFrame:
    """
    (진폭, 펄스 수)별 평균 충실도와 u = (Δt·σ^c)⁻¹

    Δt는 펄스 간격 [ms] = 1/pulses_per_ms, σ는 amplitude_hz.
    """
    frame = _sweep_frame(results)
    means = (
        frame.groupby(["amplitude_hz", "pulses"], as_index=False)
        .agg(pulses_per_ms=("pulses_per_ms", "first"), fidelity=("fidelity", "mean"))
    )
    means["u"] = means["pulses_per_ms"] / means["amplitude_hz"] ** c
    return means.sort_values(["amplitude_hz", "u"]).reset_index(drop=True)


def collapse_residual(results, c: float) -> float:
    """공통 u 구간에서 진폭별 평균 곡선의 최대 세로 폭 (c=0이면 재스케일 전 곡선)"""
    means = rescale(results, c)
    curves = [(g["u"].to_numpy(), g["fidelity"].to_numpy()) for _, g in means.groupby("amplitude_hz")]
    lo = max(u.min() for u, _ in curves)
    hi = min(u.max() for u, _ in curves)
    if hi < lo:
        return float("inf")
    grid = np.linspace(lo, hi, _GRID_POINTS)
    stacked = np.vstack([np.interp(grid, u, f) for u, f in curves])
    return float(np.max(stacked.max(axis=0) - stacked.min(axis=0)))


def collapse_fit(results, c: Union[float, str] = "auto") -> CollapseFit:
    """
    지정 c 또는 자동 탐색(c ∈ [0.3, 1.0]) collapse

    자동 탐색은 격자 훑기 후 최적 격자점 주변에서 bounded 1차원 최소화를 한다.
    """
    unrescaled = collapse_residual(results, 0.0)
    if c != "auto":
        exponent = float(c)
        residual = collapse_residual(results, exponent)
        meta: Dict[str, Any] = {"mode": "fixed"}
    else:
        scan = np.linspace(C_BOUNDS[0], C_BOUNDS[1], _SCAN_POINTS)
        values = np.array([collapse_residual(results, v) for v in scan])
        best = int(np.argmin(values))
        step = scan[1] - scan[0]
        lo, hi = max(C_BOUNDS[0], scan[best] - step), min(C_BOUNDS[1], scan[best] + step)
        opt = minimize_scalar(lambda v: collapse_residual(results, v), bounds=(lo, hi), method="bounded", options={"xatol": 1e-4})
        if opt.fun <= values[best]:
            exponent, residual = float(opt.x), float(opt.fun)
        else:
            exponent, residual = float(scan[best]), float(values[best])
        meta = {"mode": "auto", "bounds": list(C_BOUNDS), "scan": [[float(a), float(b)] for a, b in zip(scan, values)]}

    frame = _sweep_frame(results)
    meta.update({
        "amplitudes_hz": sorted(float(a) for a in frame["amplitude_hz"].unique()),
        "pulse_counts": sorted(int(p) for p in frame["pulses"].unique()),
    })
    logger.info(f"[📊] collapse: c = {exponent:.3f}, 잔차 {residual:.4f} (재스케일 전 {unrescaled:.4f})")
    return CollapseFit(exponent, residual, unrescaled, meta)
