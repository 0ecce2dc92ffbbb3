"""
종방향 국소장 노이즈 생성

- 정적 Gaussian 무질서 (상관/비상관)
- Lorentzian 스펙트럼으로부터 근사 주파수 영역 방법으로 만든 시계열
- 결합 상수 J_ij의 비상관 Gaussian 요동

진폭(amplitude)은 생성된 시계열의 표준편차로 정의한다.
난수는 numpy PCG64(default_rng)를 쓰고, qubit별 스트림은 SeedSequence(seed).spawn으로 나눈다.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks

from anneal.errors import DimensionMismatchError, InvalidSpecError
from anneal.ising import IsingModel

TWO_PEAK_CENTERS = (50.0, 150.0)
DEFAULT_GAMMA_HZ = 3.0


@dataclass(frozen=True)
class LorentzianPeak:
    center: float       # Hz
    half_width: float   # Hz
    weight: float = 1.0

    def __post_init__(self):
        if self.half_width <= 0:
            raise InvalidSpecError("Lorentzian 반폭은 양수여야 합니다", {"half_width": self.half_width})
        if self.weight < 0:
            raise InvalidSpecError("peak weight는 0 이상이어야 합니다", {"weight": self.weight})


@dataclass(frozen=True)
class NoiseSpectrum:
    """S(f) = (1/2π) Σ_k w_k γ_k / ((f − f_k)² + γ_k²) 와 목표 표준편차 amplitude [Hz]"""

    peaks: Tuple[LorentzianPeak, ...]
    amplitude: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "peaks", tuple(self.peaks))
        if self.amplitude < 0:
            raise InvalidSpecError("amplitude는 0 이상이어야 합니다", {"amplitude": self.amplitude})

    def with_amplitude(self, amplitude: float) -> "NoiseSpectrum":
        return NoiseSpectrum(self.peaks, amplitude, self.label)

    @property
    def spectrum_id(self) -> str:
        if self.label:
            return self.label
        return "+".join(f"{p.center:g}Hz/g{p.half_width:g}" for p in self.peaks)

    def to_dict(self) -> dict:
        return {
            "peaks": [{"f": p.center, "gamma": p.half_width, "weight": p.weight} for p in self.peaks],
            "amplitude": self.amplitude,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseSpectrum":
        peaks = tuple(LorentzianPeak(float(p["f"]), float(p["gamma"]), float(p.get("weight", 1.0))) for p in data["peaks"])
        return cls(peaks=peaks, amplitude=float(data.get("amplitude", 0.0)), label=data.get("label", ""))


@dataclass(frozen=True, eq=False)
class NoiseTrace:
    """
    스텝별, qubit별 δh_i^z 값

    values: [n_steps × n_qubits], units가 "Hz"이면 dt는 초, "J"이면 1/J 단위
    """

    values: np.ndarray
    dt: float
    correlated: bool
    seed: Optional[int] = None
    units: str = "Hz"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionMismatchError("NoiseTrace values는 2차원이어야 합니다", {"shape": values.shape})
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_steps(self) -> int:
        return self.values.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.values.shape[1]

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values)

    def in_units_of_J(self, energy_scale_hz: float) -> "NoiseTrace":
        """Hz 값을 J 단위로 (t_phys = t_dimless / J_Hz)"""
        if self.units == "J":
            return self
        return NoiseTrace(self.values / energy_scale_hz, self.dt * energy_scale_hz, self.correlated, self.seed, "J")

    def to_frame(self) -> pd.DataFrame:
        """감사용 long format (step, t, qubit, value)"""
        steps, qubits = np.meshgrid(np.arange(self.n_steps), np.arange(self.n_qubits), indexing="ij")
        return pd.DataFrame({
            "step": steps.ravel(),
            "t": steps.ravel() * self.dt,
            "qubit": qubits.ravel(),
            "value": self.values.ravel(),
        })


def zero_trace(n_steps: int, n_qubits: int, dt: float = 1.0, units: str = "J") -> NoiseTrace:
    return NoiseTrace(np.zeros((n_steps, n_qubits)), dt, correlated=True, seed=None, units=units)


def lorentzian_spectrum(
    two_peak: bool = True,
    gamma: float = DEFAULT_GAMMA_HZ,
    amplitude: float = 0.0,
    center: float = TWO_PEAK_CENTERS[0],
) -> NoiseSpectrum:
    """
    two_peak=True: 50 Hz(폭 γ)와 150 Hz(폭 β = 3γ) 두 봉우리, 두 번째 봉우리 높이는 1/3
    two_peak=False: center에 단일 봉우리
    """
    if gamma <= 0:
        raise InvalidSpecError("γ는 양수여야 합니다", {"gamma": gamma})
    if two_peak:
        peaks = (LorentzianPeak(TWO_PEAK_CENTERS[0], gamma), LorentzianPeak(TWO_PEAK_CENTERS[1], 3.0 * gamma))
        label = f"two_peak_g{gamma:g}"
    else:
        peaks = (LorentzianPeak(center, gamma),)
        label = f"single_{center:g}Hz_g{gamma:g}"
    return NoiseSpectrum(peaks=peaks, amplitude=amplitude, label=label)


def spectrum_density(spectrum: NoiseSpectrum, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    total = np.zeros_like(f)
    for p in spectrum.peaks:
        total += p.weight * p.half_width / ((f - p.center) ** 2 + p.half_width ** 2)
    return total / (2 * np.pi)


def _sample_column(spectrum: NoiseSpectrum, n_steps: int, dt: float, rng: np.random.Generator) -> np.ndarray:
    """M = 3N 주파수 빈에서 복소 Gaussian 계수를 뽑아 역변환 후 앞의 N개를 취한다."""
    m_bins = 3 * n_steps
    freqs = np.fft.rfftfreq(m_bins, d=dt)
    scale = np.sqrt(spectrum_density(spectrum, freqs))
    coeff = scale * (rng.standard_normal(freqs.size) + 1j * rng.standard_normal(freqs.size)) / np.sqrt(2.0)
    coeff[0] = coeff[0].real
    if m_bins % 2 == 0:
        coeff[-1] = coeff[-1].real
    series = np.fft.irfft(coeff, n=m_bins)[:n_steps]
    std = float(np.std(series))
    if std == 0.0:
        return np.zeros(n_steps)
    return series * (spectrum.amplitude / std)


def sample_trace(
    spectrum: NoiseSpectrum,
    n_steps: int,
    duration: float,
    n_qubits: int,
    correlated: bool,
    seed: int,
) -> NoiseTrace:
    """
    스펙트럼으로부터 시간 의존 노이즈 시계열을 만든다 (표준편차 = amplitude, 사후 재스케일)

    Args:
        spectrum: Lorentzian 스펙트럼과 목표 진폭 [Hz]
        n_steps: 어닐링 이산화 스텝 수 N
        duration: 물리 sweep 시간 [s]
        n_qubits: qubit 수
        correlated: True면 한 시계열을 모든 qubit에 공유
        seed: 난수 시드
    """
    if duration <= 0 or n_steps < 1:
        raise InvalidSpecError("duration과 n_steps는 양수여야 합니다", {"duration": duration, "n_steps": n_steps})
    dt = duration / n_steps
    if spectrum.amplitude == 0:
        return NoiseTrace(np.zeros((n_steps, n_qubits)), dt, correlated, seed)

    root = np.random.SeedSequence(seed)
    if correlated:
        column = _sample_column(spectrum, n_steps, dt, np.random.default_rng(root))
        values = np.repeat(column[:, None], n_qubits, axis=1)
    else:
        streams = root.spawn(n_qubits)
        values = np.column_stack([_sample_column(spectrum, n_steps, dt, np.random.default_rng(s)) for s in streams])
    return NoiseTrace(values, dt, correlated, seed)


def static_disorder(
    sigma: float,
    n_qubits: int,
    correlated: bool,
    seed: int,
    n_steps: int = 1,
    dt: float = 1.0,
    units: str = "Hz",
) -> NoiseTrace:
    """qubit별 (또는 공유) Gaussian 한 번 추출, 모든 스텝에서 일정"""
    if sigma < 0:
        raise InvalidSpecError("σ는 0 이상이어야 합니다", {"sigma": sigma})
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if correlated:
        draw = np.full(n_qubits, rng.normal(0.0, sigma)) if sigma > 0 else np.zeros(n_qubits)
    else:
        draw = rng.normal(0.0, sigma, size=n_qubits) if sigma > 0 else np.zeros(n_qubits)
    values = np.broadcast_to(draw, (n_steps, n_qubits))
    return NoiseTrace(values, dt, correlated, seed, units)


def uncorrelated_coupling_disorder(model: IsingModel, sigma: float, seed: int) -> IsingModel:
    """0이 아닌 J_ij마다 독립 Gaussian 요동 (0 항목은 그대로)"""
    if sigma < 0:
        raise InvalidSpecError("σ는 0 이상이어야 합니다", {"sigma": sigma})
    if sigma == 0:
        return model
    rng = np.random.default_rng(seed)
    mask = model.couplings != 0
    delta = rng.normal(0.0, sigma, size=model.couplings.shape) * mask
    return model.with_couplings(model.couplings + delta)


def periodogram(values: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """단측 periodogram (주파수, 파워)"""
    values = np.asarray(values, dtype=float)
    power = np.abs(np.fft.rfft(values - values.mean(), axis=0)) ** 2
    return np.fft.rfftfreq(values.shape[0], d=dt), power


def periodogram_peaks(traces: Sequence[NoiseTrace], n_peaks: int = 2, smooth_bins: int = 1, qubit: int = 0) -> List[float]:
    """여러 시계열의 평균 periodogram에서 높이 순 상위 n_peaks개 극대 주파수"""
    if not traces:
        raise InvalidSpecError("시계열이 하나 이상 필요합니다")
    freqs, total = periodogram(traces[0].values[:, qubit], traces[0].dt)
    for trace in traces[1:]:
        total = total + periodogram(trace.values[:, qubit], trace.dt)[1]
    smoothed = uniform_filter1d(total / len(traces), size=max(1, smooth_bins))
    peak_idx, _ = find_peaks(smoothed)
    top = peak_idx[np.argsort(smoothed[peak_idx])[::-1][:n_peaks]]
    return sorted(float(freqs[i]) for i in top)
