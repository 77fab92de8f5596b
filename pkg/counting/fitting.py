# -*- coding: utf-8 -*-
# counting/fitting.py
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from utils_common import FitError, log
from .series import CountSeries

MIN_COUNT = 30
MIN_POINTS = 4
SLOPE_TOL = 0.15


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    intercept: float
    sigma_hat: float
    window: Tuple[float, float]
    stderr: float
    n_points: int
    expected_slope: float
    deviation: float
    flagged: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def fit_growth(
    s: CountSeries,
    expected_slope: float = 1.0,
    *,
    window: Optional[Tuple[float, float]] = None,
    min_count: int = MIN_COUNT,
    tol: float = SLOPE_TOL,
) -> GrowthFit:
    """(T, log N) 최소제곱. 완전하고 N ≥ min_count 인 점만 사용."""
    T, N = s.T_grid, s.N
    mask = s.complete & (N >= min_count)
    if window is not None:
        mask &= (T >= window[0] - 1e-12) & (T <= window[1] + 1e-12)
    if mask.sum() < MIN_POINTS:
        raise FitError(f"사용 가능한 점이 {int(mask.sum())} 개뿐입니다 (최소 {MIN_POINTS}, N ≥ {min_count}, complete)")
    t, n = T[mask], N[mask].astype(float)
    if np.ptp(n) == 0:
        slope, intercept, stderr = 0.0, float(math.log(n[0])), 0.0
    else:
        res = stats.linregress(t, np.log(n))
        slope, intercept, stderr = float(res.slope), float(res.intercept), float(res.stderr)
    dev = abs(slope - expected_slope)
    fit = GrowthFit(
        slope=slope,
        intercept=intercept,
        sigma_hat=math.exp(intercept),
        window=(float(t[0]), float(t[-1])),
        stderr=stderr,
        n_points=int(mask.sum()),
        expected_slope=float(expected_slope),
        deviation=dev,
        flagged=bool(dev > tol),
    )
    log("INFO", f"slope={slope:.4f}±{stderr:.4f} (expected {expected_slope}) σ̂={fit.sigma_hat:.4g} over {fit.window}", scope="FIT")
    if fit.flagged:
        log("WARN", f"slope 편차 {dev:.3f} > {tol}", scope="FIT")
    return fit
