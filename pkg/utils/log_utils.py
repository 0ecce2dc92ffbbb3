"""
로깅 설정 유틸리티
진단 메시지는 모두 표준 에러로 보내고, 데이터는 파일/표준 출력으로만 내보낸다.
"""

import logging
import os
import sys
from typing import Optional

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_ROOT_LOGGER = "anneal_dd"


def get_logger(name: str) -> logging.Logger:
    """프로젝트 루트 로거 아래의 모듈 로거"""
    return logging.getLogger(f"{_ROOT_LOGGER}.{name}")


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """
    표준 에러 핸들러를 한 번만 붙인다.

    Args:
        level: 로그 레벨 이름 (None이면 ANNEAL_LOG_LEVEL 환경변수, 기본 INFO)
    """
    level_name = (level or os.getenv("ANNEAL_LOG_LEVEL") or "INFO").upper()
    root = logging.getLogger(_ROOT_LOGGER)
    root.setLevel(getattr(logging, level_name, logging.INFO))
    if not any(getattr(h, "_anneal_handler", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_LOG_FORMAT, datefmt="%H:%M:%S"))
        handler._anneal_handler = True  # type: ignore[attr-defined]
        root.addHandler(handler)
    root.propagate = False
    return root
