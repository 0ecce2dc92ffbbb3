"""
실험 설정 로딩

우선순위: 기본값 < 설정 파일(JSON) < 명령행 인자.
환경 기본값은 .env (python-dotenv)에서 읽는다:
    ANNEAL_WORKERS, ANNEAL_OUTPUT_DIR, ANNEAL_LOG_LEVEL, ANNEAL_SEED
"""

import copy
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from anneal.dynamics import AnnealConfig
from anneal.errors import ConfigError
from anneal.noise import NoiseSpectrum, lorentzian_spectrum

load_dotenv()

DEFAULT_OUTPUT_DIR = "data/results"
DEFAULT_SEED = 20240601

SECTIONS = ("problem", "anneal", "noise", "dd", "ensemble", "output")

DEFAULTS: Dict[str, Any] = {
    "problem": {"name": "mot5", "model_file": None, "penalty": None},
    "anneal": {
        "duration": None,
        "n_steps": 50000,
        "driver_strength": None,
        "ramp": "linear",
        "protocol": "couplings_only",
        "pulse_pattern": "block",
    },
    "noise": {
        "mode": "spectrum",
        "two_peak": True,
        "gamma_hz": 3.0,
        "center_hz": 50.0,
        "amplitudes_hz": [250.0, 500.0, 750.0, 1000.0],
        "correlated": True,
        "energy_scale_hz": None,
    },
    "dd": {"pulse_counts": [0, 50, 100, 150, 200, 250, 300, 350, 400, 450, 500]},
    "ensemble": {"n_realizations": 25, "master_seed": None},
    "output": {"dir": None, "name": None},
}


def env_workers() -> int:
    value = os.getenv("ANNEAL_WORKERS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise ConfigError("ANNEAL_WORKERS는 정수여야 합니다", {"ANNEAL_WORKERS": value}) from None
    return os.cpu_count() or 1


def env_output_dir() -> str:
    return os.getenv("ANNEAL_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR


def env_seed() -> int:
    value = os.getenv("ANNEAL_SEED")
    if value:
        try:
            return int(value)
        except ValueError:
            raise ConfigError("ANNEAL_SEED는 정수여야 합니다", {"ANNEAL_SEED": value}) from None
    return DEFAULT_SEED


def _deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        elif value is not None:
            merged[key] = value
    return merged


def load_config_file(path: str) -> Dict[str, Any]:
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"설정 파일이 없습니다: {path}")
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"설정 파일 JSON 오류: {path}", {"reason": str(exc)}) from exc
    if not isinstance(data, dict):
        raise ConfigError("설정 파일 최상위는 객체여야 합니다", {"path": path})
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise ConfigError("알 수 없는 설정 블록", {"unknown": sorted(unknown), "allowed": SECTIONS})
    return data


@dataclass
class ExperimentConfig:
    """해석이 끝난 실험 설정 (모든 출력 파일에 그대로 기록된다)"""

    problem: Dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULTS["problem"]))
    anneal: Dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULTS["anneal"]))
    noise: Dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULTS["noise"]))
    dd: Dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULTS["dd"]))
    ensemble: Dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULTS["ensemble"]))
    output: Dict[str, Any] = field(default_factory=lambda: copy.deepcopy(DEFAULTS["output"]))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        merged = _deep_merge(DEFAULTS, data)
        return cls(**{section: merged[section] for section in SECTIONS})

    def to_dict(self) -> Dict[str, Any]:
        return {section: copy.deepcopy(getattr(self, section)) for section in SECTIONS}

    def apply_fixture_defaults(self, info) -> "ExperimentConfig":
        """preset의 λ, h^x, duration, 에너지 스케일로 빈 값을 채운다"""
        if self.problem.get("penalty") is None:
            self.problem["penalty"] = info.penalty
        if self.anneal.get("duration") is None:
            self.anneal["duration"] = info.duration
        if self.anneal.get("driver_strength") is None:
            self.anneal["driver_strength"] = info.driver_strength
        if self.noise.get("energy_scale_hz") is None:
            self.noise["energy_scale_hz"] = info.energy_scale_hz
        return self

    def fill_environment(self) -> "ExperimentConfig":
        if self.ensemble.get("master_seed") is None:
            self.ensemble["master_seed"] = env_seed()
        if not self.output.get("dir"):
            self.output["dir"] = env_output_dir()
        return self

    def validate(self) -> None:
        if self.noise["mode"] not in ("spectrum", "static", "none"):
            raise ConfigError(f"지원하지 않는 노이즈 모드: {self.noise['mode']}")
        if any(a < 0 for a in self.noise["amplitudes_hz"]):
            raise ConfigError("노이즈 진폭은 0 이상이어야 합니다", {"amplitudes_hz": self.noise["amplitudes_hz"]})
        if any(int(p) < 0 for p in self.dd["pulse_counts"]):
            raise ConfigError("펄스 수는 0 이상이어야 합니다", {"pulse_counts": self.dd["pulse_counts"]})
        if int(self.ensemble["n_realizations"]) < 1:
            raise ConfigError("n_realizations는 1 이상이어야 합니다")
        if self.noise.get("energy_scale_hz") is not None and self.noise["energy_scale_hz"] <= 0:
            raise ConfigError("energy_scale_hz는 양수여야 합니다")
        model_file = self.problem.get("model_file")
        if model_file and not Path(model_file).exists():
            raise ConfigError(f"모델 파일이 없습니다: {model_file}")
        self.anneal_config()

    def anneal_config(self, pulse_count: int = 0) -> AnnealConfig:
        block = self.anneal
        if block.get("duration") is None or block.get("driver_strength") is None:
            raise ConfigError("duration과 driver_strength가 정해지지 않았습니다 (preset 또는 --duration/--hx)")
        return AnnealConfig(
            duration=float(block["duration"]),
            n_steps=int(block["n_steps"]),
            driver_strength=float(block["driver_strength"]),
            ramp=block.get("ramp", "linear"),
            protocol=block.get("protocol", "couplings_only"),
            pulse_count=int(pulse_count),
            pulse_pattern=block.get("pulse_pattern", "block"),
        )

    def spectrum(self) -> Optional[NoiseSpectrum]:
        if self.noise["mode"] != "spectrum":
            return None
        return lorentzian_spectrum(
            two_peak=bool(self.noise.get("two_peak", True)),
            gamma=float(self.noise.get("gamma_hz", 3.0)),
            center=float(self.noise.get("center_hz", 50.0)),
        )


def resolve_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """기본값 < 파일 < overrides 순으로 병합 (overrides의 None 값은 무시)"""
    data: Dict[str, Any] = {}
    if path:
        data = load_config_file(path)
    if overrides:
        data = _deep_merge(data, overrides)
    return ExperimentConfig.from_dict(data)
