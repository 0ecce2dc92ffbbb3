# 파일 저장, 로딩, 변환 등 파일 관련 유틸리티 함수 모음
"""
- IsingModel JSON (provenance 포함) 저장/로딩
- 설정이 첫 줄 주석(# config=<json>)으로 들어간 CSV 저장/로딩
- 실행 기록(run record) JSON
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import pandas as pd

from anneal.errors import ConfigError, OutputCollisionError
from anneal.ising import IsingModel

CONFIG_PREFIX = "# config="


def ensure_parent(path: str) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def save_json(data: Dict[str, Any], path: str) -> Path:
    target = ensure_parent(path)
    with open(target, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
    return target


def load_json(path: str) -> Dict[str, Any]:
    source = Path(path)
    if not source.exists():
        raise ConfigError(f"파일이 없습니다: {path}")
    with open(source, "r", encoding="utf-8") as f:
        return json.load(f)


def model_hash(model: IsingModel) -> str:
    """정렬된 키의 모델 JSON에 대한 sha256"""
    canonical = json.dumps(model.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_model(model: IsingModel, path: str, provenance: Optional[Dict[str, Any]] = None) -> Path:
    data = model.to_dict()
    if provenance is not None:
        data["provenance"] = provenance
    return save_json(data, path)


def load_model(path: str) -> Tuple[IsingModel, Dict[str, Any]]:
    """(모델, provenance) 반환"""
    data = load_json(path)
    provenance = data.pop("provenance", {})
    return IsingModel.from_dict(data), provenance


def check_output(path: str, resume: bool = False) -> bool:
    """출력 파일이 이미 있으면 resume일 때 True, 아니면 OutputCollisionError"""
    if Path(path).exists():
        if resume:
            return True
        raise OutputCollisionError(f"출력 파일이 이미 있습니다: {path} (--resume으로 이어 하기)", {"path": path})
    return False


def write_csv_with_config(frame: pd.DataFrame, path: str, config: Dict[str, Any]) -> Path:
    target = ensure_parent(path)
    header = CONFIG_PREFIX + json.dumps(config, ensure_ascii=False, sort_keys=True)
    with open(target, "w", encoding="utf-8", newline="") as f:
        f.write(header + "\n")
        frame.to_csv(f, index=False, float_format="%.10g", lineterminator="\n")
    return target


def read_csv_with_config(path: str) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    source = Path(path)
    if not source.exists():
        raise ConfigError(f"CSV 파일이 없습니다: {path}")
    with open(source, "r", encoding="utf-8") as f:
        first = f.readline()
        config: Dict[str, Any] = {}
        if first.startswith(CONFIG_PREFIX):
            config = json.loads(first[len(CONFIG_PREFIX):])
        else:
            f.seek(0)
        frame = pd.read_csv(f)
    return frame, config


def write_run_record(path: str, record: Dict[str, Any]) -> Path:
    return save_json(record, path)
