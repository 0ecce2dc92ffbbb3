# 문제 인코딩 테스트
"""
MOT / cutting stock QUBO 생성, 인쇄된 fixture 행렬 재현, 가능해 우위, 해 디코딩 확인
"""

import sys
from pathlib import Path

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

import numpy as np
import pytest

from anneal.errors import DimensionMismatchError, InvalidSpecError, UnknownFixtureError
from anneal.ising import all_bit_vectors, brute_force_ground_states, constraint_violation, qubo_energy
from problems.cutstock_problem import CutStockProblem, CutStockSpec, cutstock_layout, slack_bit_count
from problems.fixtures import (
    CUT6_SPEC,
    MOT5_QUOTED_WEIGHTS,
    MOT5_SPEC,
    build_preset,
    fixture_info,
    list_fixtures,
    printed_fixture,
)
from problems.mot_problem import MotProblem, MotSpec, build_mot


@pytest.mark.parametrize("name, atol", [("mot5", 0.005), ("cut5", 0.005), ("mot9", 0.005)])
def test_builder_reproduces_printed_matrix(name, atol):
    """빌더 체인 결과가 인쇄된 행렬과 소수 둘째 자리까지 일치"""
    built = build_preset(name).to_ising()
    printed = printed_fixture(name)
    assert built.n_spins == printed.n_spins
    np.testing.assert_allclose(built.couplings, printed.couplings, atol=atol)
    assert not built.has_fields


def test_cut6_matches_only_after_decimal_correction():
    built = build_preset("cut6").to_ising()
    np.testing.assert_allclose(built.couplings, printed_fixture("cut6", corrected=True).couplings, atol=0.005)
    assert not np.allclose(built.couplings, printed_fixture("cut6").couplings, atol=0.005)


def test_mot5_quoted_weights_are_within_rounding():
    """인용된 W(−2.26)로는 마지막 ancilla 항목이 0.01 안에서만 맞는다"""
    spec = MotSpec(n_tracks=2, detections_per_frame=2, n_free_frames=1, objective_weights=MOT5_QUOTED_WEIGHTS, penalty=2.5)
    built = MotProblem(spec).to_ising()
    np.testing.assert_allclose(built.couplings, printed_fixture("mot5").couplings, atol=0.01)


@pytest.mark.parametrize("name", ["mot5", "cut5", "mot9"])
def test_printed_fixture_has_flip_pair_ground_states(name):
    _, states = brute_force_ground_states(printed_fixture(name))
    assert len(states) == 2
    first, second = sorted(states, key=lambda s: s.index)
    assert first.flipped() == second


def test_mot5_ground_state_is_identity_assignment():
    problem = build_preset("mot5")
    _, states = brute_force_ground_states(problem.to_ising())
    for config in states:
        solution = problem.decode_ground_state(config)
        assert solution["feasible"]
        assert solution["frames"][1]["assignment"] == {0: 0, 1: 1}


def test_cut5_ground_state_cuts_both_pieces():
    problem = build_preset("cut5")
    _, states = brute_force_ground_states(problem.to_ising())
    for config in states:
        solution = problem.decode_ground_state(config)
        assert solution["feasible"]
        assert solution["total_cut"] == 2
        assert solution["bars"][0]["slack"] == 1


def test_corrected_cut6_fixture_decodes_to_full_cut():
    problem = CutStockProblem(CUT6_SPEC)
    _, states = brute_force_ground_states(printed_fixture("cut6", corrected=True))
    for config in states:
        solution = problem.decode_ground_state(config)
        assert solution["feasible"]
        assert solution["bars"][0]["pieces"] == [2, 2]


@pytest.mark.parametrize("name", ["mot5", "cut5", "cut6"])
def test_feasible_configurations_dominate(name):
    """제약 위반 배치는 모두 바닥 상태보다 에너지가 높다"""
    qubo = build_preset(name).get_qubo()
    energies = {bits: qubo_energy(qubo, bits) for bits in all_bit_vectors(qubo.n_vars)}
    best = min(energies.values())
    for bits, value in energies.items():
        if constraint_violation(qubo, bits) > 0:
            assert value > best + 1e-9


def test_mot_constraint_rows_are_deduplicated():
    qubo = build_mot(MOT5_SPEC)
    A, b = qubo.constraints
    assert A.shape == (4, 4)
    np.testing.assert_allclose(b, np.ones(4))


def test_mot_spec_validation():
    with pytest.raises(DimensionMismatchError):
        MotSpec(n_tracks=2, detections_per_frame=2, n_free_frames=1, objective_weights=(1.0, 2.0), penalty=1.0)
    with pytest.raises(InvalidSpecError):
        MotSpec(n_tracks=2, detections_per_frame=2, n_free_frames=0, objective_weights=(), penalty=1.0)
    with pytest.raises(InvalidSpecError):
        MotSpec(
            n_tracks=2, detections_per_frame=2, n_free_frames=1,
            objective_weights=(0.0,) * 4, penalty=1.0, fixed_assignment=(1, 1, 0, 0),
        )


def test_cutstock_spec_validation():
    with pytest.raises(InvalidSpecError):
        CutStockSpec(bar_length=2, piece_lengths=(3,), demands=(1,))
    with pytest.raises(DimensionMismatchError):
        CutStockSpec(bar_length=4, piece_lengths=(1, 2), demands=(1,))
    with pytest.raises(InvalidSpecError):
        CutStockSpec(bar_length=4, piece_lengths=(1,), demands=(0,))


def test_slack_bits_and_layout():
    assert slack_bit_count(3) == 2
    assert slack_bit_count(4) == 3
    layout = cutstock_layout(CutStockSpec(bar_length=5, piece_lengths=(2, 1), demands=(2, 1), n_bars=2))
    assert layout.items == (2, 2, 1)
    assert layout.n_vars == 3 * 2 + 2 * 3


def test_multi_bar_cutstock_uses_product_penalties():
    problem = CutStockProblem(CutStockSpec(bar_length=3, piece_lengths=(2,), demands=(1,), n_bars=2, penalty=2.0))
    qubo = problem.get_qubo()
    assert qubo.product_penalties == ((0, 1, 2.0),)
    # 같은 조각을 두 막대에 배정하면 불가능해
    bits = [0] * qubo.n_vars
    bits[0] = bits[1] = 1
    assert not problem.is_feasible(bits)


def test_fixture_registry():
    assert list_fixtures() == ["cut5", "cut6", "mot5", "mot9"]
    info = fixture_info("mot5")
    assert (info.penalty, info.driver_strength, info.duration, info.energy_scale_hz) == (2.5, 3.0, 2.6, 26.0)
    with pytest.raises(UnknownFixtureError):
        fixture_info("mot7")
