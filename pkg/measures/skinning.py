# -*- coding: utf-8 -*-
"""
measures/skinning.py

스키닝 측도 적분의 구적법 (곡률 −1, δ = 1 기본).

  σ_γ(F₁) = ∫_{∂¹[y₀, γ̂y₀)} e^{δF₁(v)} e^{−δβ(v⁺, π(v), o)} dθ_o(v⁺)
  σ_x(F₂) = ∫_{S(x)}        e^{δF₂(v)} e^{−δβ(v⁺, x, o)}    dθ_o(v⁺)

μ_o 는 o 에서 본 단위 스케일 각도 측도 (× scale). 확률 정규화는 하지 않는다:
비율 예측에서는 scale 이 약분된다.

- 파라미터 s (축 호 길이) / φ (x 에서의 방향각) 에 대한 주기 중점 규칙
- 야코비안 |dθ_o/ds| 는 중심차분 (h = 1e-5) + Richardson, 각도는 unwrap
- 오차 추정: n 과 n/2 노드 결과 비교
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from typing import Callable, Optional, Sequence

import numpy as np

from utils_common import DomainError, FitError, critical_exponent, log, worker_count
from hyp2core.points import HPoint, HBoundary, Isometry, UnitTangent
from hyp2core.geometry import (
    boundary_angle,
    boundary_from_angle,
    busemann,
    geodesic_frame,
    mobius_boundary,
    project_boundary,
    axis_coordinate,
    tangent,
    tangent_from_angle,
)
from fuchsian.conjugacy import ConjClass
from adjust.adjustment import AdjustmentPair, NormalVector, PointPair, normal_tangent
from counting.series import CountSeries

JAC_STEP = 1e-5
NORMALIZATION = "mu_o = angle measure at o, unit scale"
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SigmaEstimate:
    value: float
    quadrature_error: float
    n_nodes: int
    normalization: str = NORMALIZATION
    method: str = "midpoint"

    def to_dict(self) -> dict:
        return asdict(self)


def _frame_at(o: HPoint) -> Isometry:
    r = math.sqrt(o.y)
    return Isometry(1.0 / r, -o.x / r, 0.0, r)


def angle_at(o: HPoint, zeta: HBoundary) -> float:
    """o 에서 본 경계점의 각도"""
    return boundary_angle(mobius_boundary(_frame_at(o), zeta))


def boundary_at_angle(o: HPoint, theta: float) -> HBoundary:
    return mobius_boundary(_frame_at(o).inverse(), boundary_from_angle(theta))


def _wrap(d: float) -> float:
    return (d + math.pi) % TWO_PI - math.pi


def angle_jacobian(theta_of: Callable[[float], float], t: float, h: float = JAC_STEP) -> float:
    """|dθ/dt| : 중심차분 + Richardson (4D(h/2) − D(h))/3"""
    def D(step: float) -> float:
        return _wrap(theta_of(t + step) - theta_of(t - step)) / (2.0 * step)

    d1, d2 = D(h), D(h / 2.0)
    if not (math.isfinite(d1) and math.isfinite(d2)):
        raise DomainError(f"야코비안 계산 실패 (t={t}, h={h})")
    if d1 == 0.0 and d2 == 0.0:
        raise DomainError(f"야코비안 step underflow (t={t}, h={h})")
    return abs((4.0 * d2 - d1) / 3.0)


def _midpoint(fn: Callable[[float], float], a: float, length: float, n: int) -> float:
    h = length / n
    nodes = [a + (k + 0.5) * h for k in range(n)]
    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            vals = list(ex.map(fn, nodes))
    else:
        vals = [fn(s) for s in nodes]
    return math.fsum(vals) * h


def _estimate(fn: Callable[[float], float], a: float, length: float, n_nodes: int) -> SigmaEstimate:
    if n_nodes < 4:
        raise ValueError(f"n_nodes 는 4 이상이어야 합니다: {n_nodes}")
    n_nodes += n_nodes % 2
    fine = _midpoint(fn, a, length, n_nodes)
    coarse = _midpoint(fn, a, length, n_nodes // 2)
    err = max(abs(fine - coarse), 1e-10 * abs(fine))
    return SigmaEstimate(value=fine, quadrature_error=err, n_nodes=n_nodes)


# =============================
# σ_γ
# =============================
def sigma_gamma_quad(
    c: ConjClass,
    F1: Callable[[NormalVector], float],
    o: Optional[HPoint] = None,
    n_nodes: int = 64,
    *,
    scale: float = 1.0,
    delta: Optional[float] = None,
    offset: float = 0.0,
) -> SigmaEstimate:
    o = c.origin if o is None else o
    delta = critical_exponent() if delta is None else delta
    ell = c.root_length

    def integrand(s: float) -> float:
        total = 0.0
        for side in ("right", "left"):
            def theta(t: float) -> float:
                return angle_at(o, normal_tangent(NormalVector(c, t, side)).forward)

            u = normal_tangent(NormalVector(c, s, side))
            w = math.exp(-delta * busemann(u.forward, u.base, o)) * angle_jacobian(theta, s)
            f = F1(NormalVector(c, s, side).reduced())
            total += math.exp(delta * f) * w
        return scale * total

    est = _estimate(integrand, offset, ell, n_nodes)
    log("DEBUG", f"σ_γ = {est.value:.10g} ± {est.quadrature_error:.2e} (n={est.n_nodes})", scope="SIGMA")
    return est


# =============================
# σ_x
# =============================
def sigma_x_quad(
    x: HPoint,
    F2: Callable[[UnitTangent], float],
    o: Optional[HPoint] = None,
    n_nodes: int = 64,
    *,
    scale: float = 1.0,
    delta: Optional[float] = None,
) -> SigmaEstimate:
    o = HPoint(0.0, 1.0) if o is None else o
    delta = critical_exponent() if delta is None else delta

    def theta(phi: float) -> float:
        return angle_at(o, tangent_from_angle(x, phi).forward)

    def integrand(phi: float) -> float:
        u = tangent_from_angle(x, phi)
        w = math.exp(-delta * busemann(u.forward, x, o)) * angle_jacobian(theta, phi)
        return scale * math.exp(delta * F2(u)) * w

    est = _estimate(integrand, 0.0, TWO_PI, n_nodes)
    log("DEBUG", f"σ_x = {est.value:.10g} ± {est.quadrature_error:.2e} (n={est.n_nodes})", scope="SIGMA")
    return est


# =============================
# Monte-Carlo 오라클 (θ_o 균등 표본)
# =============================
def _mc(values: np.ndarray) -> SigmaEstimate:
    n = len(values)
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
    return SigmaEstimate(value=TWO_PI * mean, quadrature_error=TWO_PI * se, n_nodes=n, method="monte-carlo")


def sigma_x_mc(
    x: HPoint,
    F2: Callable[[UnitTangent], float],
    o: HPoint,
    n_samples: int,
    rng: np.random.Generator,
    *,
    delta: float = 1.0,
) -> SigmaEstimate:
    thetas = rng.uniform(0.0, TWO_PI, n_samples)
    vals = np.empty(n_samples)
    for i, th in enumerate(thetas):
        zeta = boundary_at_angle(o, float(th))
        u = tangent(x, zeta)
        vals[i] = math.exp(delta * F2(u) - delta * busemann(zeta, x, o))
    return _mc(vals)


def sigma_gamma_mc(
    c: ConjClass,
    F1: Callable[[NormalVector], float],
    o: HPoint,
    n_samples: int,
    rng: np.random.Generator,
    *,
    delta: float = 1.0,
) -> SigmaEstimate:
    """P_L(ζ) 의 축 좌표가 [0, ℓ̂) 인 ζ 만 기여"""
    A = geodesic_frame(c.axis)
    thetas = rng.uniform(0.0, TWO_PI, n_samples)
    vals = np.zeros(n_samples)
    for i, th in enumerate(thetas):
        zeta = boundary_at_angle(o, float(th))
        if c.axis.has_endpoint(zeta):
            continue
        foot = project_boundary(c.axis, zeta)
        s = axis_coordinate(c.axis, foot, c.anchor)
        if not (0.0 <= s < c.root_length):
            continue
        side = "right" if mobius_boundary(A, zeta).value > 0 else "left"
        v = NormalVector(c, s, side)
        vals[i] = math.exp(delta * F1(v) - delta * busemann(zeta, foot, o))
    return _mc(vals)


# =============================
# 비율 예측
# =============================
@dataclass(frozen=True)
class RatioPrediction:
    pairA: str
    pairB: str
    predicted_ratio: float
    empirical_ratio: float
    rel_dev: float
    low_confidence: bool
    predicted_error: float
    T_used: tuple = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["T_used"] = list(self.T_used)
        return d


def empirical_ratio(sA: CountSeries, sB: CountSeries, top: int = 3):
    """두 시리즈가 모두 complete 인 상위 top 개 T 에서 N_A/N_B 평균"""
    if not np.allclose(sA.T_grid, sB.T_grid):
        raise ValueError("두 시리즈의 T_grid 가 다릅니다")
    ok = sA.complete & sB.complete & (sB.N > 0)
    idx = np.nonzero(ok)[0][-top:]
    if len(idx) == 0:
        raise FitError("비율 계산에 사용할 complete 점이 없습니다")
    ratio = float(np.mean(sA.N[idx] / sB.N[idx]))
    low = bool(min(sA.N[idx].min(), sB.N[idx].min()) < 100)
    return ratio, low, tuple(float(t) for t in sA.T_grid[idx])


def _combine(num: Sequence[SigmaEstimate], den: Sequence[SigmaEstimate]):
    val = math.prod(e.value for e in num) / math.prod(e.value for e in den)
    rel = math.sqrt(sum((e.quadrature_error / e.value) ** 2 for e in (*num, *den)))
    return val, val * rel


def _finish(labelA, labelB, pred, pred_err, sA, sB) -> RatioPrediction:
    if sA is None or sB is None:
        emp, low, used = float("nan"), True, ()
    else:
        emp, low, used = empirical_ratio(sA, sB)
    rel = abs(emp / pred - 1.0) if math.isfinite(emp) else float("nan")
    if low:
        log("WARN", "경험적 비율의 표본 수가 100 미만입니다 (low confidence)", scope="RATIO")
    return RatioPrediction(labelA, labelB, pred, emp, rel, low, pred_err, used)


def predict_ratio(
    c: ConjClass,
    pairA: AdjustmentPair,
    pairB: AdjustmentPair,
    x: HPoint,
    o: Optional[HPoint] = None,
    *,
    seriesA: Optional[CountSeries] = None,
    seriesB: Optional[CountSeries] = None,
    n_nodes: int = 64,
    scale: float = 1.0,
    delta: Optional[float] = None,
) -> RatioPrediction:
    o = c.origin if o is None else o
    kw = dict(scale=scale, delta=delta)
    num = [sigma_gamma_quad(c, pairA.F1, o, n_nodes, **kw), sigma_x_quad(x, pairA.F2, o, n_nodes, **kw)]
    den = [sigma_gamma_quad(c, pairB.F1, o, n_nodes, **kw), sigma_x_quad(x, pairB.F2, o, n_nodes, **kw)]
    pred, err = _combine(num, den)
    return _finish(pairA.label, pairB.label, pred, err, seriesA, seriesB)


def predict_ratio_pp(
    pairA: PointPair,
    pairB: PointPair,
    x: HPoint,
    y: HPoint,
    o: Optional[HPoint] = None,
    *,
    seriesA: Optional[CountSeries] = None,
    seriesB: Optional[CountSeries] = None,
    n_nodes: int = 64,
    scale: float = 1.0,
    delta: Optional[float] = None,
) -> RatioPrediction:
    o = HPoint(0.0, 1.0) if o is None else o
    kw = dict(scale=scale, delta=delta)
    num = [sigma_x_quad(x, pairA.F1, o, n_nodes, **kw), sigma_x_quad(y, pairA.F2, o, n_nodes, **kw)]
    den = [sigma_x_quad(x, pairB.F1, o, n_nodes, **kw), sigma_x_quad(y, pairB.F2, o, n_nodes, **kw)]
    pred, err = _combine(num, den)
    return _finish(pairA.label, pairB.label, pred, err, seriesA, seriesB)
