# 어닐링 전파 테스트
"""
펄스 배치 규칙, 스핀 반전 연산, 충실도, 프로토콜별 전파 불변량 확인
"""

import sys
from dataclasses import replace
from pathlib import Path

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

import numpy as np
import pytest

from anneal.dynamics import (
    AnnealConfig,
    PulseSchedule,
    StateVector,
    apply_global_flip,
    apply_mask_flip,
    coupling_modulation_schedule,
    fidelity,
    ground_fidelity_trace,
    ground_targets,
    modulation_schedule,
    noiseless_fidelity,
    propagate,
    propagate_batch,
    pulse_positions,
)
from anneal.errors import ConfigError, DimensionMismatchError, InvalidSpecError
from anneal.ising import IsingModel, brute_force_ground_states
from anneal.noise import NoiseTrace, static_disorder, zero_trace
from problems.fixtures import build_preset, printed_fixture

FAST_STEPS = 2000


@pytest.fixture(scope="module")
def mot5():
    return build_preset("mot5").to_ising()


@pytest.fixture
def fast_config():
    return AnnealConfig(duration=2.6, n_steps=FAST_STEPS, driver_strength=3.0)


def _shared_noise(value: float, n_steps: int, n_qubits: int) -> NoiseTrace:
    return NoiseTrace(np.full((n_steps, n_qubits), value), dt=2.6 / n_steps, correlated=True, units="J")


# ---------------------------------------------------------------------------
# 펄스 배치
# ---------------------------------------------------------------------------

def test_block_spacing_300_pulses():
    schedule = pulse_positions(300, 50000)
    spacings = schedule.spacings()
    assert sum(spacings) == 50000
    assert set(spacings) == {166, 167}
    first_ceil = spacings.index(167)
    assert all(s == 166 for s in spacings[:first_ceil])
    assert all(s == 167 for s in spacings[first_ceil:])
    assert schedule.pulse_steps[-1] == 50000


def test_uniform_spacing_400_pulses():
    assert set(pulse_positions(400, 50000).spacings()) == {125}


def test_alternating_spacing_400_pulses():
    spacings = pulse_positions(400, 50000, pattern="alternating").spacings()
    assert spacings[:4] == [124, 126, 124, 126]
    assert sum(spacings) == 50000


def test_alternating_spacing_with_remainder():
    spacings = pulse_positions(300, 50000, pattern="alternating").spacings()
    assert sum(spacings) == 50000
    assert set(spacings) == {166, 167}
    assert spacings[-4:] == [166, 167, 166, 167]


def test_pulse_positions_edge_cases():
    assert len(pulse_positions(0, 100)) == 0
    assert pulse_positions(100, 100).spacings() == [1] * 100
    with pytest.raises(InvalidSpecError):
        pulse_positions(101, 100)


def test_pulse_schedule_validation():
    with pytest.raises(InvalidSpecError):
        PulseSchedule((5, 5))
    with pytest.raises(InvalidSpecError):
        PulseSchedule((0, 3))
    with pytest.raises(InvalidSpecError):
        PulseSchedule((3, 200)).validate(100)


def test_coupling_modulation_fragment():
    fragment = coupling_modulation_schedule(2, 0.5, 10.0)
    assert fragment.dt_minus - fragment.dt_plus == pytest.approx(5.0)
    assert fragment.dt_minus + fragment.dt_plus == pytest.approx(10.0)
    full = coupling_modulation_schedule(0, 1.0, 10.0)
    assert (full.dt_minus, full.dt_plus) == (10.0, 0.0)
    with pytest.raises(InvalidSpecError):
        coupling_modulation_schedule(0, 1.5, 10.0)


def test_modulation_schedule_cancels_coincident_flips():
    # scale=1이면 주기 중간 반전이 주기 끝 반전과 겹쳐 상쇄된다
    assert len(modulation_schedule(100, 10, target_qubit=1, scale=1.0)) == 0
    half = modulation_schedule(100, 10, target_qubit=1, scale=0.0)
    assert half.pulse_steps == tuple(range(5, 101, 5))
    assert all(half.mask_for(i) == (1,) for i in range(len(half)))


# ---------------------------------------------------------------------------
# 상태 연산과 충실도
# ---------------------------------------------------------------------------

def test_global_flip_is_involution():
    rng = np.random.default_rng(0)
    state = StateVector(rng.normal(size=16) + 1j * rng.normal(size=16))
    np.testing.assert_array_equal(apply_global_flip(apply_global_flip(state)).amplitudes, state.amplitudes)
    basis = StateVector.basis(4, 0b0011)
    assert np.flatnonzero(apply_global_flip(basis).amplitudes).tolist() == [0b1100]


def test_mask_flip_targets_single_qubit():
    psi = StateVector.basis(3, 0b000).amplitudes[None, :]
    flipped = apply_mask_flip(psi, 3, [0])
    assert np.flatnonzero(flipped[0]).tolist() == [0b100]
    both = apply_mask_flip(psi, 3, [0, 1, 2])
    np.testing.assert_array_equal(both, psi[:, ::-1])


def test_uniform_state_fidelity(mot5):
    targets = ground_targets(mot5)
    assert len(targets) == 2
    assert fidelity(StateVector.uniform(5), targets) == pytest.approx(2 / 32)
    _, states = brute_force_ground_states(mot5)
    assert fidelity(StateVector.uniform(5), states) == pytest.approx(2 / 32)


def test_state_vector_rejects_bad_length():
    with pytest.raises(DimensionMismatchError):
        StateVector(np.ones(6))


def test_anneal_config_validation():
    with pytest.raises(ConfigError):
        AnnealConfig(duration=-1.0)
    with pytest.raises(ConfigError):
        AnnealConfig(protocol="unknown")
    with pytest.raises(ConfigError):
        AnnealConfig(driver_strength=0.0)
    config = AnnealConfig(duration=2.0, n_steps=4)
    assert config.dt == pytest.approx(0.5)
    assert float(config.ramp_value(1.0)) == pytest.approx(0.5)
    assert config.ramp_slope == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# 전파
# ---------------------------------------------------------------------------

def test_propagation_preserves_norm(mot5, fast_config):
    trace = _shared_noise(0.8, FAST_STEPS, 5)
    state = propagate(mot5, replace(fast_config, pulse_count=37), trace)
    assert state.norm == pytest.approx(1.0, abs=1e-10)


def test_noiseless_fidelity_improves_on_uniform(mot5, fast_config):
    value = noiseless_fidelity(mot5, fast_config)
    assert 2 / 32 < value <= 1.0


def test_global_pulses_do_not_change_noiseless_couplings_only(mot5, fast_config):
    """비용 모델과 구동항이 전역 반전과 교환하므로 무잡음이면 펄스가 결과를 바꾸지 않는다"""
    plain = noiseless_fidelity(mot5, fast_config)
    pulsed = propagate_batch(mot5, replace(fast_config, pulse_count=50), [zero_trace(FAST_STEPS, 5)])
    assert pulsed.fidelities[0] == pytest.approx(plain, abs=1e-10)


def test_sign_flip_protocol_matches_unpulsed_without_noise(fast_config):
    model = build_preset("mot5").to_ising(ancilla=False)
    assert model.has_fields
    config = replace(fast_config, protocol="local_fields_with_sign_flips")
    plain = propagate_batch(model, config, [zero_trace(FAST_STEPS, 4)]).fidelities[0]
    for pulses in (7, 40):
        pulsed = propagate_batch(model, replace(config, pulse_count=pulses), [zero_trace(FAST_STEPS, 4)]).fidelities[0]
        assert pulsed == pytest.approx(plain, abs=1e-10)


def test_couplings_only_rejects_fields(fast_config):
    model = build_preset("mot5").to_ising(ancilla=False)
    with pytest.raises(InvalidSpecError):
        propagate(model, fast_config)


def test_partial_masks_require_modulation_protocol(mot5, fast_config):
    schedule = PulseSchedule((10, 20), ((1,), (1,)))
    with pytest.raises(InvalidSpecError):
        propagate(mot5, fast_config, schedule=schedule)
    state = propagate(mot5, replace(fast_config, protocol="coupling_modulation"), schedule=schedule)
    assert state.norm == pytest.approx(1.0, abs=1e-10)


def test_dd_suppresses_static_correlated_field(mot5, fast_config):
    """상관된 정적 오프셋은 조밀한 전역 반전으로 상쇄된다"""
    trace = _shared_noise(2.0, FAST_STEPS, 5)
    clean = noiseless_fidelity(mot5, fast_config)
    bare = propagate_batch(mot5, fast_config, [trace]).fidelities[0]
    decoupled = propagate_batch(mot5, replace(fast_config, pulse_count=1000), [trace]).fidelities[0]
    assert abs(decoupled - clean) < abs(bare - clean)
    assert abs(decoupled - clean) < 0.05


def test_batch_matches_individual_runs(mot5, fast_config):
    config = replace(fast_config, pulse_count=20)
    traces = [
        static_disorder(0.6, 5, correlated=False, seed=s, n_steps=FAST_STEPS, dt=config.dt, units="J")
        for s in range(3)
    ]
    batch = propagate_batch(mot5, config, traces).fidelities
    single = [propagate_batch(mot5, config, [t]).fidelities[0] for t in traces]
    np.testing.assert_allclose(batch, single, atol=1e-9)


def test_noise_trace_shape_and_units_are_checked(mot5, fast_config):
    with pytest.raises(DimensionMismatchError):
        propagate(mot5, fast_config, _shared_noise(0.1, FAST_STEPS, 4))
    hz_trace = NoiseTrace(np.full((FAST_STEPS, 5), 5.0), dt=1e-5, correlated=True, units="Hz")
    with pytest.raises(DimensionMismatchError):
        propagate(mot5, fast_config, hz_trace)


def test_fidelity_trace_records_every_interval(mot5, fast_config):
    steps, values = ground_fidelity_trace(mot5, fast_config, every=100)
    assert steps.tolist() == list(range(100, FAST_STEPS + 1, 100))
    assert values[-1] == pytest.approx(noiseless_fidelity(mot5, fast_config), abs=1e-10)
    assert np.all((values >= 0) & (values <= 1 + 1e-12))


def test_printed_fixture_propagates(fast_config):
    model = printed_fixture("mot5")
    assert isinstance(model, IsingModel)
    assert 2 / 32 < noiseless_fidelity(model, fast_config) <= 1.0


@pytest.mark.slow
def test_mot5_noiseless_reference_fidelity(mot5):
    assert noiseless_fidelity(mot5, AnnealConfig()) == pytest.approx(0.84, abs=0.02)


@pytest.mark.slow
def test_mot9_noiseless_reference_fidelity():
    mot9 = build_preset("mot9").to_ising()
    assert mot9.n_spins == 9
    assert noiseless_fidelity(mot9, AnnealConfig(driver_strength=2.0)) == pytest.approx(0.74, abs=0.02)


@pytest.mark.slow
def test_local_field_protocol_matches_ancilla_protocol(mot5):
    four = build_preset("mot5").to_ising(ancilla=False)
    ancilla_value = noiseless_fidelity(mot5, AnnealConfig())
    local_value = noiseless_fidelity(four, AnnealConfig(protocol="local_fields_with_sign_flips"))
    assert local_value == pytest.approx(ancilla_value, abs=0.03)
