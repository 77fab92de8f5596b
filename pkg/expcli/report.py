# -*- coding: utf-8 -*-
# expcli/report.py
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from counting.series import CountSeries
from utils_common import log


# ---- StepLog (파이프라인 단계 기록) -------------------------------------------
@dataclass
class StepLog:
    name: str
    ok: bool
    count: int | None = None
    error: str | None = None


def _jsonable(obj: Any) -> Any:
    """numpy / inf / nan 을 JSON 호환 값으로"""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


@dataclass
class Report:
    config: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    suites: List[Dict[str, Any]] = field(default_factory=list)
    certificates: List[Dict[str, Any]] = field(default_factory=list)
    steps: List[StepLog] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)
    exit_code: int = 0
    series: Dict[str, CountSeries] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.exit_code == 0

    def add_series(self, name: str, s: CountSeries) -> None:
        self.series[name] = s
        self.results[name] = s.to_dict()
        cert = s.params.get("certificate")
        if cert is not None:
            self.certificates.append({"series": name, **cert})
        if not s.all_complete:
            log("WARN", f"{name}: 열거가 모든 T 에서 완전하지 않습니다 (complete={s.complete.tolist()})")

    def to_dict(self, *, include_timing: bool = True) -> dict:
        d = {
            "config": self.config,
            "results": self.results,
            "suites": self.suites,
            "certificates": self.certificates,
            "steps": [
                {"name": s.name, "ok": s.ok, "count": s.count, "error": s.error} for s in self.steps
            ],
            "exit_code": self.exit_code,
        }
        if include_timing:
            d["timing"] = self.timing
        return _jsonable(d)

    def to_json(self, *, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing=include_timing), sort_keys=True, indent=2, ensure_ascii=False)

    def write(self, out_dir: Path, stem: str) -> List[Path]:
        """<stem>.json 과 시리즈별 <stem>_<name>.csv"""
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        p = out_dir / f"{stem}.json"
        p.write_text(self.to_json() + "\n", encoding="utf-8")
        paths.append(p)
        for name, s in sorted(self.series.items()):
            paths.append(s.to_csv(out_dir / f"{stem}_{name}.csv"))
        for p in paths:
            log("INFO", f"saved: {p}")
        return paths
