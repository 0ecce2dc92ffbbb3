# 노이즈 생성 테스트
"""
Lorentzian 스펙트럼 시계열, 정적 무질서, 결합 요동 확인
"""

import sys
from pathlib import Path

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

import numpy as np
import pytest

from anneal.errors import DimensionMismatchError, InvalidSpecError
from anneal.ising import IsingModel
from anneal.noise import (
    NoiseSpectrum,
    NoiseTrace,
    lorentzian_spectrum,
    periodogram,
    periodogram_peaks,
    sample_trace,
    spectrum_density,
    static_disorder,
    uncorrelated_coupling_disorder,
)


def test_trace_std_equals_amplitude():
    spectrum = lorentzian_spectrum(amplitude=500.0)
    trace = sample_trace(spectrum, n_steps=4000, duration=0.1, n_qubits=3, correlated=False, seed=1)
    np.testing.assert_allclose(trace.values.std(axis=0), 500.0, rtol=1e-10)
    assert trace.dt == pytest.approx(0.1 / 4000)


def test_correlated_trace_shares_one_series():
    trace = sample_trace(lorentzian_spectrum(amplitude=250.0), 2000, 0.1, 4, correlated=True, seed=3)
    for q in range(1, 4):
        np.testing.assert_array_equal(trace.values[:, q], trace.values[:, 0])


def test_uncorrelated_trace_columns_differ():
    trace = sample_trace(lorentzian_spectrum(amplitude=250.0), 2000, 0.1, 2, correlated=False, seed=3)
    assert not np.allclose(trace.values[:, 0], trace.values[:, 1])


def test_same_seed_same_trace():
    spectrum = lorentzian_spectrum(amplitude=750.0)
    a = sample_trace(spectrum, 1000, 0.1, 2, correlated=False, seed=42)
    b = sample_trace(spectrum, 1000, 0.1, 2, correlated=False, seed=42)
    c = sample_trace(spectrum, 1000, 0.1, 2, correlated=False, seed=43)
    np.testing.assert_array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_zero_amplitude_gives_zero_trace():
    trace = sample_trace(lorentzian_spectrum(amplitude=0.0), 100, 0.1, 3, correlated=True, seed=0)
    assert trace.is_zero


def test_two_peak_spectrum_shape():
    spectrum = lorentzian_spectrum(two_peak=True, gamma=3.0)
    assert [p.center for p in spectrum.peaks] == [50.0, 150.0]
    assert spectrum.peaks[1].half_width == pytest.approx(9.0)
    # 두 번째 봉우리 높이는 첫 번째의 1/3
    ratio = spectrum_density(spectrum, np.array([150.0]))[0] / spectrum_density(spectrum, np.array([50.0]))[0]
    assert ratio == pytest.approx(1.0 / 3.0, rel=0.02)


def test_single_peak_is_recovered_from_periodogram():
    spectrum = lorentzian_spectrum(two_peak=False, center=80.0, gamma=3.0, amplitude=500.0)
    traces = [sample_trace(spectrum, 20000, 2.0, 1, correlated=True, seed=s) for s in range(10)]
    (peak,) = periodogram_peaks(traces, n_peaks=1, smooth_bins=5)
    assert abs(peak - 80.0) < 5.0


def test_two_peak_power_concentrates_near_centers():
    spectrum = lorentzian_spectrum(two_peak=True, gamma=3.0, amplitude=500.0)
    total = None
    for seed in range(10):
        trace = sample_trace(spectrum, 20000, 2.0, 1, correlated=True, seed=seed)
        freqs, power = periodogram(trace.values[:, 0], trace.dt)
        total = power if total is None else total + power

    def band(lo, hi):
        return total[(freqs >= lo) & (freqs <= hi)].mean()

    assert band(140, 160) > 5 * band(95, 115)
    assert band(45, 55) > band(140, 160)


def test_static_disorder():
    shared = static_disorder(0.5, 4, correlated=True, seed=7, n_steps=10)
    assert shared.values.shape == (10, 4)
    assert np.all(shared.values == shared.values[0, 0])
    independent = static_disorder(0.5, 4, correlated=False, seed=7)
    assert len(set(independent.values[0])) == 4
    assert static_disorder(0.0, 3, correlated=False, seed=1).is_zero
    with pytest.raises(InvalidSpecError):
        static_disorder(-1.0, 3, correlated=True, seed=1)


def test_unit_conversion_to_j():
    trace = NoiseTrace(np.full((4, 2), 26.0), dt=0.025, correlated=True)
    converted = trace.in_units_of_J(26.0)
    np.testing.assert_allclose(converted.values, 1.0)
    assert converted.dt == pytest.approx(0.65)
    assert converted.units == "J"


def test_trace_frame_layout():
    trace = NoiseTrace(np.arange(6, dtype=float).reshape(3, 2), dt=0.5, correlated=False)
    frame = trace.to_frame()
    assert list(frame.columns) == ["step", "t", "qubit", "value"]
    assert len(frame) == 6
    assert frame.iloc[-1]["t"] == pytest.approx(1.0)


def test_trace_requires_two_dimensions():
    with pytest.raises(DimensionMismatchError):
        NoiseTrace(np.zeros(5), dt=1.0, correlated=True)


def test_coupling_disorder_keeps_zero_entries():
    J = np.zeros((3, 3))
    J[0, 1] = 1.0
    model = IsingModel(couplings=J, fields=np.zeros(3))
    noisy = uncorrelated_coupling_disorder(model, 0.3, seed=5)
    assert noisy.couplings[0, 1] != 1.0
    assert noisy.couplings[0, 2] == 0.0
    assert noisy.couplings[1, 2] == 0.0
    assert uncorrelated_coupling_disorder(model, 0.0, seed=5) is model


def test_spectrum_dict_round_trip():
    spectrum = lorentzian_spectrum(two_peak=False, center=120.0, gamma=2.0, amplitude=300.0)
    restored = NoiseSpectrum.from_dict(spectrum.to_dict())
    assert restored == spectrum
    assert restored.spectrum_id == "single_120Hz_g2"
