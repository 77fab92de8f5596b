# -*- coding: utf-8 -*-
"""
utils_common.py (공용 유틸)

- 환경 변수 / .env 로딩
- 태그 기반 로그 출력 ([ INFO ], [ WARN ], [DEBUG])
- 공용 예외 클래스
- 시드 고정 난수 생성기
"""

from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np
from dotenv import load_dotenv

# =============================
# 환경 변수 & .env 로딩
# =============================
_ENV_LOADED = False


def load_env() -> None:
    """여러 위치에서 .env 탐색하여 로드 (로컬 실행용)"""
    global _ENV_LOADED
    base = Path(__file__).resolve().parent
    for p in [base / ".env", base.parent / ".env", Path.cwd() / ".env"]:
        if p.exists():
            load_dotenv(p, override=False)
            _ENV_LOADED = True
            return
    load_dotenv(override=False)  # fallback
    _ENV_LOADED = True


def _ensure_env() -> None:
    if not _ENV_LOADED:
        load_env()


def get_env(name: str, default: str = "") -> str:
    _ensure_env()
    return os.getenv(name, default).strip()


def get_bool_env(name: str, default: bool = False) -> bool:
    v = get_env(name, "").lower()
    if v in ["1", "true", "yes", "y"]:
        return True
    if v in ["0", "false", "no", "n"]:
        return False
    return default


def get_int_env(name: str, default: int) -> int:
    v = get_env(name, "")
    if not v:
        return default
    try:
        return int(v)
    except ValueError:
        log("WARN", f"{name}={v!r} 는 정수가 아닙니다 → 기본값 {default} 사용")
        return default


def get_float_env(name: str, default: float) -> float:
    v = get_env(name, "")
    if not v:
        return default
    try:
        return float(v)
    except ValueError:
        log("WARN", f"{name}={v!r} 는 실수가 아닙니다 → 기본값 {default} 사용")
        return default


def worker_count() -> int:
    return max(1, get_int_env("HYPCOUNT_WORKERS", 1))


def critical_exponent() -> float:
    # 곡률 −1 곡면: δ = 1
    return get_float_env("HYPCOUNT_DELTA", 1.0)


def progress_enabled() -> bool:
    return get_bool_env("HYPCOUNT_PROGRESS", True)


def output_dir() -> Path:
    return Path(get_env("HYPCOUNT_OUTPUT_DIR", "out") or "out")


# =============================
# 로그
# =============================
_TAGS = {"INFO": "[ INFO ]", "WARN": "[ WARN ]", "DEBUG": "[DEBUG]", "ERROR": "[ERROR]"}


def log(level: str, msg: str, *, scope: Optional[str] = None) -> None:
    """stderr 로 한 줄 로그. DEBUG 는 HYPCOUNT_DEBUG=1 일 때만."""
    level = level.upper()
    if level == "DEBUG" and not get_bool_env("HYPCOUNT_DEBUG", False):
        return
    tag = _TAGS.get(level, f"[{level}]")
    if scope:
        tag = f"[{scope}]{tag}"
    print(f"{tag} {msg}", file=sys.stderr)


# =============================
# 예외
# =============================
class HypcountError(ValueError):
    """모든 라이브러리 오류의 베이스"""


class DomainError(HypcountError):
    """기하학적 전제 조건 위반 (일치하는 점, 축 위의 점, 비쌍곡 원소 등)"""


class GroupValidationError(HypcountError):
    pass


class ConfigError(HypcountError):
    pass


class FitError(HypcountError):
    pass


class EnumerationError(HypcountError):
    pass


# =============================
# 난수
# =============================
def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)
