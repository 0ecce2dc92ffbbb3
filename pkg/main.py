# 프로젝트 실행 진입점(main)
"""
어닐링 + 동적 디커플링 시뮬레이터 명령행 도구

명령: build, anneal, sweep, stability, collapse, magic, fixtures
공통 인자: --seed, --out, --workers, --config, --log-level

진단 메시지는 표준 에러, 데이터는 파일 또는 표준 출력으로만 나간다.
종료 코드: 0 성공, 2 입력/계산 오류(AnnealError), 1 예기치 못한 오류
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from anneal.errors import AnnealError
from problems.fixtures import FIXTURES, fixture_info, list_fixtures, printed_fixture
from utils.config import ExperimentConfig, env_output_dir, env_seed, env_workers, resolve_config
from utils.file_utils import save_model
from utils.log_utils import get_logger, setup_logging

logger = get_logger("main")


def _floats(text: Optional[str]) -> Optional[List[float]]:
    return None if text is None else [float(v) for v in text.split(",") if v.strip()]


def _ints(text: Optional[str]) -> Optional[List[int]]:
    return None if text is None else [int(v) for v in text.split(",") if v.strip()]


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (기본: ANNEAL_SEED)")
    common.add_argument("--out", default=None, help="출력 파일 경로")
    common.add_argument("--workers", type=int, default=None, help="병렬 작업 수 (기본: ANNEAL_WORKERS 또는 CPU 수)")
    common.add_argument("--config", default=None, help="실험 설정 JSON")
    common.add_argument("--log-level", default=None, help="로그 레벨 (기본: ANNEAL_LOG_LEVEL 또는 INFO)")
    return common


def _add_experiment_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", default=None, help="preset 이름 (mot5, mot9, cut5, cut6)")
    parser.add_argument("--model-file", default=None, help="build로 만든 모델 JSON")
    parser.add_argument("--lambda", dest="penalty", type=float, default=None, help="페널티 가중치 λ")
    parser.add_argument("--duration", type=float, default=None, help="sweep 시간 [1/J]")
    parser.add_argument("--steps", type=int, default=None, help="이산화 스텝 수")
    parser.add_argument("--hx", type=float, default=None, help="구동 세기 h^x [J]")
    parser.add_argument("--protocol", default=None, choices=["couplings_only", "local_fields_with_sign_flips", "coupling_modulation"])
    parser.add_argument("--pattern", default=None, choices=["block", "alternating"], help="펄스 간격 배치")
    parser.add_argument("--noise", default=None, choices=["none", "spectrum", "static"])
    parser.add_argument("--gamma", type=float, default=None, help="Lorentzian 반폭 γ [Hz]")
    parser.add_argument("--single-peak", action="store_true", help="단일 봉우리 스펙트럼")
    parser.add_argument("--center", type=float, default=None, help="단일 봉우리 중심 [Hz]")
    parser.add_argument("--uncorrelated", action="store_true", help="qubit별 독립 노이즈")
    parser.add_argument("--energy-scale", type=float, default=None, help="J [Hz]")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(description="양자 어닐링 + 동적 디커플링 시뮬레이터")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="비용 모델 생성")
    p.add_argument("problem", help="preset(mot5, mot9, cut5, cut6) 또는 mot / cutstock")
    p.add_argument("--L", dest="bar_length", type=int, default=None, help="막대 길이")
    p.add_argument("--pieces", default=None, help="조각 길이 목록 (쉼표 구분)")
    p.add_argument("--demands", default=None, help="조각별 수요 (쉼표 구분)")
    p.add_argument("--bars", type=int, default=1, help="막대 수")
    p.add_argument("--aggregate", action="store_true", help="수요를 슬랙 비트로 묶어 인코딩")
    p.add_argument("--lambda", dest="penalty", type=float, default=None)
    p.add_argument("--frames", type=int, default=None, help="자유 프레임 수")
    p.add_argument("--tracks", type=int, default=2)
    p.add_argument("--detections", type=int, default=2)
    p.add_argument("--weights", default=None, help="MOT 유사도 비용 (쉼표 구분)")
    p.add_argument("--no-ancilla", action="store_true", help="국소장을 ancilla로 옮기지 않음")

    p = sub.add_parser("anneal", parents=[common], help="단일 어닐링 실행")
    _add_experiment_args(p)
    p.add_argument("--pulses", type=int, default=0)
    p.add_argument("--amplitude", type=float, default=None, help="노이즈 진폭 [Hz]")
    p.add_argument("--trace", action="store_true", help="100 스텝마다 충실도 기록")
    p.add_argument("--trace-csv", default=None, help="노이즈 시계열 감사용 CSV")

    p = sub.add_parser("sweep", parents=[common], help="DD 펄스율 sweep")
    _add_experiment_args(p)
    p.add_argument("--amplitudes", default=None, help="진폭 목록 [Hz]")
    p.add_argument("--pulse-counts", default=None, help="펄스 수 목록")
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--resume", action="store_true", help="기존 출력에서 이어 하기")

    p = sub.add_parser("stability", parents=[common], help="바닥 상태 안정성")
    p.add_argument("--problem", default="mot5")
    p.add_argument("--model-file", default=None)
    p.add_argument("--lambda", dest="penalty", type=float, default=None)
    p.add_argument("--kind", default="local-correlated", choices=["local-correlated", "local-uncorrelated", "coupling-uncorrelated"])
    p.add_argument("--sigmas", default=None, help="σ/J 목록 (기본 0.1..3.0)")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--fit-from", type=float, default=None, help="이 σ 이상으로 arctan 맞춤")

    p = sub.add_parser("collapse", parents=[common], help="스케일링 collapse")
    p.add_argument("--input", required=True, help="sweep CSV")
    p.add_argument("--c", default="auto", help="지수 c 또는 auto")

    p = sub.add_parser("magic", parents=[common], help="MAGIC 결합 계산")
    p.add_argument("--ions", type=int, default=5)
    p.add_argument("--trap-freq-hz", type=float, default=130e3)
    p.add_argument("--gradient", type=float, default=19.0, help="자기장 기울기 [T/m]")

    p = sub.add_parser("fixtures", parents=[common], help="인쇄된 fixture 목록/내보내기")
    p.add_argument("--export", default=None, help="모델 JSON을 내보낼 디렉터리")
    p.add_argument("--corrected", action="store_true", help="cut6 인쇄 오류 보정본")
    return parser


def experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """기본값 < --config 파일 < 명령행"""
    noise_mode = args.noise
    overrides: Dict[str, Any] = {
        "problem": {"name": args.problem, "model_file": args.model_file, "penalty": args.penalty},
        "anneal": {
            "duration": args.duration,
            "n_steps": args.steps,
            "driver_strength": args.hx,
            "protocol": args.protocol,
            "pulse_pattern": args.pattern,
        },
        "noise": {
            "mode": noise_mode,
            "gamma_hz": args.gamma,
            "center_hz": args.center,
            "two_peak": False if args.single_peak else None,
            "correlated": False if args.uncorrelated else None,
            "energy_scale_hz": args.energy_scale,
            "amplitudes_hz": _floats(getattr(args, "amplitudes", None)),
        },
        "dd": {"pulse_counts": _ints(getattr(args, "pulse_counts", None))},
        "ensemble": {"n_realizations": getattr(args, "realizations", None), "master_seed": args.seed},
    }
    if args.model_file:
        overrides["problem"]["name"] = args.problem or ""
    config = resolve_config(args.config, overrides)
    name = config.problem.get("name")
    if name in FIXTURES and not config.problem.get("model_file"):
        config.apply_fixture_defaults(fixture_info(name))
    config.fill_environment()
    config.validate()
    return config


def cmd_build(args: argparse.Namespace) -> int:
    from scripts.build_model import ModelBuilder

    builder = ModelBuilder(env_output_dir())
    builder.run(
        args.problem,
        out=args.out,
        ancilla=not args.no_ancilla,
        penalty=args.penalty,
        bar_length=args.bar_length,
        pieces=args.pieces,
        demands=args.demands,
        bars=args.bars,
        aggregate=args.aggregate,
        frames=args.frames,
        tracks=args.tracks,
        detections=args.detections,
        weights=args.weights,
    )
    return 0


def cmd_anneal(args: argparse.Namespace) -> int:
    from scripts.run_anneal import AnnealRun

    config = experiment_config(args)
    out = args.out or str(Path(config.output["dir"]) / f"anneal_{config.problem.get('name') or 'model'}.json")
    record = AnnealRun(config).run(
        pulses=args.pulses,
        amplitude_hz=args.amplitude,
        record_trace=args.trace,
        out=out,
        trace_csv=args.trace_csv,
    )
    print(f"{record['outputs']['fidelity']:.6f}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    from scripts.run_sweep import SweepWorkflow

    config = experiment_config(args)
    workers = args.workers if args.workers is not None else env_workers()
    SweepWorkflow(config, workers=workers).run(out=args.out, resume=args.resume)
    return 0


def cmd_stability(args: argparse.Namespace) -> int:
    from scripts.run_stability import DEFAULT_SIGMAS, StabilityWorkflow

    workflow = StabilityWorkflow(args.problem, args.model_file, args.penalty)
    sigmas = _floats(args.sigmas) or list(DEFAULT_SIGMAS)
    seed = args.seed if args.seed is not None else env_seed()
    report = workflow.run(args.kind.replace("-", "_"), sigmas, args.samples, seed, args.fit_from, args.out)
    if not args.out:
        report["table"].to_csv(sys.stdout, index=False)
    return 0


def cmd_collapse(args: argparse.Namespace) -> int:
    from scripts.run_collapse import CollapseWorkflow

    c = args.c if args.c == "auto" else float(args.c)
    report = CollapseWorkflow(args.input).run(c, args.out)
    if not args.out:
        json.dump({k: v for k, v in report.items() if k != "config"}, sys.stdout, ensure_ascii=False, indent=2)
        sys.stdout.write("\n")
    return 0


def cmd_magic(args: argparse.Namespace) -> int:
    from scripts.compute_magic import MagicWorkflow

    report = MagicWorkflow(args.ions, args.trap_freq_hz, args.gradient).run(args.out)
    if not args.out:
        json.dump(report, sys.stdout, ensure_ascii=False, indent=2)
        sys.stdout.write("\n")
    return 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    listing = [fixture_info(name).to_dict() for name in list_fixtures()]
    if args.export:
        target = Path(args.export)
        for name in list_fixtures():
            corrected = args.corrected and name == "cut6"
            path = target / f"{name}{'_corrected' if corrected else ''}.json"
            save_model(printed_fixture(name, corrected=corrected), str(path), {"problem": name, "source": "printed fixture", "corrected": corrected})
            logger.info(f"[✓] fixture 저장: {path}")
    json.dump(listing, sys.stdout, ensure_ascii=False, indent=2)
    sys.stdout.write("\n")
    return 0


COMMANDS = {
    "build": cmd_build,
    "anneal": cmd_anneal,
    "sweep": cmd_sweep,
    "stability": cmd_stability,
    "collapse": cmd_collapse,
    "magic": cmd_magic,
    "fixtures": cmd_fixtures,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except AnnealError as exc:
        logger.error(f"[❌] {exc}")
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.exception(f"[❌] 예기치 못한 오류: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
