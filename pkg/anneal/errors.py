"""
어닐링 시뮬레이터 공통 예외 클래스
모든 예외는 AnnealError를 상속하며, 원인 파악용 details dict를 함께 가진다.
CLI(main.py)는 AnnealError를 종료 코드 2로 변환한다.
"""

from typing import Any, Dict, Optional


class AnnealError(Exception):
    """시뮬레이터 예외의 기본 클래스"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def __str__(self) -> str:
        if not self.details:
            return self.message
        detail_text = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"{self.message} ({detail_text})"


class DimensionMismatchError(AnnealError, ValueError):
    """행렬/벡터 차원이 서로 맞지 않음"""


class InvalidSpecError(AnnealError, ValueError):
    """문제 정의(MotSpec, CutStockSpec, 설정값 등)가 유효하지 않음"""


class SizeLimitError(AnnealError):
    """전수 탐색 등 크기 제한 초과"""


class UnknownFixtureError(AnnealError, KeyError):
    """등록되지 않은 fixture/preset 이름"""

    def __str__(self) -> str:
        return AnnealError.__str__(self)


class ConvergenceError(AnnealError, RuntimeError):
    """반복 솔버가 수렴하지 않음"""


class InsufficientDataError(AnnealError, ValueError):
    """분석에 필요한 데이터가 부족함"""


class FitError(AnnealError, RuntimeError):
    """곡선 피팅 실패"""


class ConfigError(AnnealError, ValueError):
    """실험 설정 검증 실패"""


class OutputCollisionError(AnnealError):
    """--resume 없이 기존 출력 파일을 덮어쓰려 함"""
