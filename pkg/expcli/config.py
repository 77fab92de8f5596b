# -*- coding: utf-8 -*-
"""
expcli/config.py

ExperimentConfig: 실험 한 번의 모든 입력.
우선순위: CLI 플래그 > --config JSON > 환경 변수 기본값.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from utils_common import ConfigError, output_dir, worker_count

KINDS = (
    "count-orbit",
    "count-conj",
    "count-adjusted",
    "count-adjusted-pp",
    "fit-growth",
    "ratio-test",
    "sigma-quad",
    "check",
)
FIT_OF = ("orbit", "conj", "adjusted", "adjusted-pp")
RATIO_OF = ("adjusted", "adjusted-pp")
TARGETS = ("x", "gamma")

# fit-growth 기본 기대 기울기 (δ = 1)
EXPECTED_SLOPE = {"orbit": 1.0, "conj": 0.5, "adjusted": 1.0, "adjusted-pp": 1.0}


@dataclass
class ExperimentConfig:
    kind: str = "count-orbit"
    group: str = "bolza"                 # builtin 이름 또는 JSON 경로
    x: List[float] = field(default_factory=lambda: [0.0, 1.0])
    y: List[float] = field(default_factory=lambda: [0.0, 1.0])
    class_selector: str = "shortest"
    pair: str = "zero"
    pair_b: str = "zero"                 # ratio-test 의 분모 쌍
    candidate: Optional[str] = None
    t_min: float = 1.0
    t_max: float = 8.0
    t_step: float = 0.5
    t_grid: Optional[List[float]] = None  # 지정 시 t_min/t_max/t_step 무시
    word_cap: Optional[int] = None
    n_nodes: int = 64
    seed: int = 0
    output: Optional[str] = None
    fit_of: str = "orbit"
    series: Optional[str] = None         # fit-growth 입력 (CSV / JSON)
    expected_slope: Optional[float] = None
    fit_window: Optional[List[float]] = None
    ratio_of: str = "adjusted"
    ratio_tol: float = 0.15
    target: str = "x"
    scale: float = 1.0
    suite: str = "all"
    samples: int = 200
    cross_check: bool = False
    workers: Optional[int] = None

    # ---- 생성 / 검증 ---------------------------------------------------------
    @classmethod
    def from_dict(cls, rec: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(rec, dict):
            raise ConfigError(f"config 는 JSON 객체여야 합니다: {type(rec).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(rec) - known)
        if unknown:
            raise ConfigError(f"알 수 없는 config 키: {', '.join(unknown)}")
        cfg = cls(**{k: v for k, v in rec.items() if v is not None})
        cfg.validate()
        return cfg

    @classmethod
    def resolve(
        cls,
        cli: Optional[Dict[str, Any]] = None,
        config_path: Optional[Union[str, Path]] = None,
    ) -> "ExperimentConfig":
        """--config JSON 위에 CLI 값(None 제외)을 덮어씀"""
        rec: Dict[str, Any] = {}
        if config_path:
            p = Path(config_path)
            try:
                rec = json.loads(p.read_text(encoding="utf-8"))
            except FileNotFoundError:
                raise ConfigError(f"config 파일이 없습니다: {p}") from None
            except json.JSONDecodeError as e:
                raise ConfigError(f"config JSON 파싱 실패 ({p}): {e}") from e
            if not isinstance(rec, dict):
                raise ConfigError(f"config 는 JSON 객체여야 합니다: {p}")
        for k, v in (cli or {}).items():
            if v is not None:
                rec[k] = v
        return cls.from_dict(rec)

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind 는 {KINDS} 중 하나: {self.kind!r}")
        for name in ("x", "y"):
            self._point(name)
        for name in ("t_min", "t_max", "t_step", "ratio_tol", "scale"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{name} 는 유한한 실수여야 합니다: {v!r}")
        if self.t_grid is not None:
            if not isinstance(self.t_grid, list) or not self.t_grid:
                raise ConfigError("t_grid 는 비어 있지 않은 리스트여야 합니다")
            if any(isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t) or t < 0
                   for t in self.t_grid):
                raise ConfigError(f"t_grid 는 음이 아닌 유한한 실수여야 합니다: {self.t_grid!r}")
            if any(b <= a for a, b in zip(self.t_grid, self.t_grid[1:])):
                raise ConfigError("t_grid 는 순증가여야 합니다")
        elif self.t_min < 0 or self.t_step <= 0 or self.t_max < self.t_min:
            raise ConfigError(f"잘못된 T 범위: [{self.t_min}, {self.t_max}] step {self.t_step}")
        for name in ("n_nodes", "samples", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ConfigError(f"{name} 는 음이 아닌 정수여야 합니다: {v!r}")
        if self.n_nodes < 4:
            raise ConfigError(f"n_nodes 는 4 이상이어야 합니다: {self.n_nodes}")
        if self.word_cap is not None and (not isinstance(self.word_cap, int) or self.word_cap < 1):
            raise ConfigError(f"word_cap 은 양의 정수여야 합니다: {self.word_cap!r}")
        if self.workers is not None and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigError(f"workers 는 양의 정수여야 합니다: {self.workers!r}")
        if self.fit_of not in FIT_OF:
            raise ConfigError(f"fit_of 는 {FIT_OF} 중 하나: {self.fit_of!r}")
        if self.ratio_of not in RATIO_OF:
            raise ConfigError(f"ratio_of 는 {RATIO_OF} 중 하나: {self.ratio_of!r}")
        if self.target not in TARGETS:
            raise ConfigError(f"target 은 {TARGETS} 중 하나: {self.target!r}")
        if self.fit_window is not None and (len(self.fit_window) != 2 or self.fit_window[1] < self.fit_window[0]):
            raise ConfigError(f"fit_window 는 [lo, hi] 여야 합니다: {self.fit_window!r}")
        if self.scale <= 0:
            raise ConfigError(f"scale 은 양수여야 합니다: {self.scale}")

    def _point(self, name: str) -> None:
        v = getattr(self, name)
        ok = isinstance(v, (list, tuple)) and len(v) == 2 and all(
            isinstance(t, (int, float)) and not isinstance(t, bool) and math.isfinite(t) for t in v
        )
        if not ok or v[1] <= 0:
            raise ConfigError(f"{name} 는 [x, y] (y > 0) 여야 합니다: {v!r}")
        setattr(self, name, [float(v[0]), float(v[1])])

    # ---- 파생 값 -------------------------------------------------------------
    def grid(self) -> List[float]:
        if self.t_grid is not None:
            return [float(t) for t in self.t_grid]
        n = int(math.floor((self.t_max - self.t_min) / self.t_step + 1e-9))
        return [round(self.t_min + k * self.t_step, 12) for k in range(n + 1)]

    def expected(self, fit_of: Optional[str] = None) -> float:
        if self.expected_slope is not None:
            return float(self.expected_slope)
        return EXPECTED_SLOPE[fit_of or self.fit_of]

    def n_workers(self) -> int:
        return self.workers if self.workers is not None else worker_count()

    def out_dir(self) -> Path:
        return Path(self.output) if self.output else output_dir()

    def to_dict(self) -> dict:
        return asdict(self)
