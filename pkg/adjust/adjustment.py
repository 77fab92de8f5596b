# -*- coding: utf-8 -*-
"""
adjust/adjustment.py

축 L 의 단위 법다발 ∂¹L 위의 조정 함수 F₁, 점 x 의 단위원 S(x) 위의 F₂,
조정 높이 h(g) 와 잔차 진단.

  F₁(v) = β(v⁺, h, π(v)) + β(γv⁺, h, γπ(v)),  h = P_{(v⁺, γv⁺)}(o)
        = lim_t d(π(v_t), γπ(v_t)) − 2t
  F₂(v) = β(v⁺, y, x)
  h(g)  = d(gx, L) − F₁(v₁(g)) − F₂(g⁻¹ v₂(g))
  R(g)  = d(gx, γgy) − 2 d(gx, L) − F₁(v₁(g)) − F₂(g⁻¹ v₂(g))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from utils_common import DomainError, ConfigError
from hyp2core.points import HPoint, HBoundary, Geodesic, UnitTangent
from hyp2core.geometry import (
    apply,
    busemann,
    direction_angle,
    dist,
    flow,
    geodesic_frame,
    mobius_boundary,
    mobius_point,
    project,
    tangent,
)
from fuchsian.conjugacy import ConjClass, CosetRep
from fuchsian.elements import GroupElement

SIDES = ("right", "left")
ASYMPTOTIC_DEPTH = 2.0
BASE_ATOL = 1e-9


# =============================
# 법벡터
# =============================
@dataclass(frozen=True)
class NormalVector:
    conj: ConjClass
    axis_param: float
    side: str = "right"

    def __post_init__(self):
        if self.side not in SIDES:
            raise DomainError(f"side 는 {SIDES} 중 하나여야 합니다: {self.side!r}")

    def shifted(self, n: int = 1) -> "NormalVector":
        return replace(self, axis_param=self.axis_param + n * self.conj.root_length)

    def reduced(self) -> "NormalVector":
        ell = self.conj.root_length
        return replace(self, axis_param=self.axis_param - ell * math.floor(self.axis_param / ell))


def _anchor_log(c: ConjClass) -> float:
    return math.log(abs(mobius_point(geodesic_frame(c.axis), c.anchor).z))


def normal_tangent(v: NormalVector) -> UnitTangent:
    """축을 (0, ∞) 로 정규화: basepoint i·e^{s₀+s}, forward ±e^{s₀+s}"""
    A = geodesic_frame(v.conj.axis)
    Ainv = A.inverse()
    r = math.exp(_anchor_log(v.conj) + v.axis_param)
    base = mobius_point(Ainv, HPoint(0.0, r))
    fwd = mobius_boundary(Ainv, HBoundary.real(r if v.side == "right" else -r))
    return UnitTangent(base, fwd)


def normal_at(c: ConjClass, p: HPoint) -> NormalVector:
    """P_L(p) 에서 p 를 향하는 법벡터 v₁"""
    A = geodesic_frame(c.axis)
    w = mobius_point(A, p).z
    if abs(w.real) <= 1e-14 * abs(w):
        raise DomainError("점이 축 위에 있어 법벡터 방향이 정해지지 않습니다")
    s = math.log(abs(w)) - _anchor_log(c)
    return NormalVector(c, s, "right" if w.real > 0 else "left")


# =============================
# F₁ / F₂
# =============================
def eval_F1(v: NormalVector, o: Optional[HPoint] = None) -> float:
    c = v.conj
    o = c.origin if o is None else o
    gamma = c.gamma.mat
    u = normal_tangent(v)
    zeta = u.forward
    gzeta = apply(gamma, zeta)
    h, _ = project(Geodesic(zeta, gzeta), o)
    return busemann(zeta, h, u.base) + busemann(gzeta, h, apply(gamma, u.base))


def eval_F1_limit(v: NormalVector, t_max: float = 30.0) -> float:
    if t_max < 10.0:
        raise ValueError(f"t_max 는 10 이상이어야 합니다: {t_max}")
    p = flow(normal_tangent(v), t_max).base
    return dist(p, apply(v.conj.gamma.mat, p)) - 2.0 * t_max


def eval_F2(v: UnitTangent, x: HPoint, y: HPoint) -> float:
    if dist(v.base, x) > BASE_ATOL:
        raise DomainError(f"eval_F2: 접벡터의 basepoint {v.base} 가 x={x} 가 아닙니다")
    return busemann(v.forward, y, x)


# =============================
# 조정 쌍
# =============================
F1Fn = Callable[[NormalVector], float]
F2Fn = Callable[[UnitTangent], float]


@dataclass(frozen=True)
class AdjustmentPair:
    F1: F1Fn
    F2: F2Fn
    label1: str = "0"
    label2: str = "0"
    f1_bound: float = 0.0     # sup |F₁|
    f2_bound: float = 0.0     # sup |F₂|
    shift: Optional[float] = None  # 상수 쌍이면 c₁ + c₂

    @property
    def label(self) -> str:
        return f"({self.label1}, {self.label2})"


def zero_pair() -> AdjustmentPair:
    return AdjustmentPair(lambda v: 0.0, lambda u: 0.0, "0", "0", 0.0, 0.0, 0.0)


def constant_pair(c1: float, c2: float) -> AdjustmentPair:
    return AdjustmentPair(
        lambda v: c1, lambda u: c2, f"{c1:g}", f"{c2:g}", abs(c1), abs(c2), c1 + c2
    )


def _sample_normals(c: ConjClass, n: int = 16):
    for s in np.linspace(0.0, c.root_length, n, endpoint=False):
        for side in SIDES:
            yield NormalVector(c, float(s), side)


def neg_half_pair(c: ConjClass, x: HPoint, y: HPoint) -> AdjustmentPair:
    """(−F₁/2, −F₂/2): h(g) 가 d(gx, γgy)/2 에 근접"""
    bound1 = max(abs(eval_F1(v)) for v in _sample_normals(c)) / 2.0 + 1e-6
    return AdjustmentPair(
        lambda v: -0.5 * eval_F1(v),
        lambda u: -0.5 * eval_F2(u, x, y),
        "-F1/2",
        "-F2/2",
        bound1,
        dist(x, y) / 2.0,
    )


def cosine_pair(c: ConjClass, a1: float, a2: float) -> AdjustmentPair:
    """매끄러운 비상수 쌍: F₁ = a₁cos(2πs/ℓ̂), F₂ = a₂cos(방향각)"""
    ell = c.root_length
    return AdjustmentPair(
        lambda v: a1 * math.cos(2.0 * math.pi * v.axis_param / ell),
        lambda u: a2 * math.cos(direction_angle(u)),
        f"{a1:g}cos(2πs/ℓ)",
        f"{a2:g}cos(θ)",
        abs(a1),
        abs(a2),
    )


def parse_pair(selector: str, c: Optional[ConjClass], x: HPoint, y: HPoint) -> AdjustmentPair:
    """'zero' | 'const:c1,c2' | 'neg-half' | 'cosine:a1,a2'"""
    sel = (selector or "zero").strip()
    try:
        if sel == "zero":
            return zero_pair()
        if sel.startswith("const:"):
            c1, c2 = (float(t) for t in sel[6:].split(","))
            return constant_pair(c1, c2)
        if sel == "neg-half":
            if c is None:
                raise ConfigError("neg-half 쌍에는 켤레류가 필요합니다")
            return neg_half_pair(c, x, y)
        if sel.startswith("cosine:"):
            if c is None:
                raise ConfigError("cosine 쌍에는 켤레류가 필요합니다")
            a1, a2 = (float(t) for t in sel[7:].split(","))
            return cosine_pair(c, a1, a2)
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"잘못된 pair selector '{selector}': {e}") from e
    raise ConfigError(f"알 수 없는 pair selector: '{selector}'")


# =============================
# 조정 높이 / 잔차
# =============================
@dataclass(frozen=True)
class AdjustedHeight:
    g: CosetRep
    d_to_axis: float
    F1_val: float
    F2_val: float
    h: float


def _geometry(c: ConjClass, g: GroupElement, x: HPoint):
    gx = mobius_point(g.mat, x)
    foot, depth = project(c.axis, gx)
    if depth <= 1e-12:
        raise DomainError("g·x 가 축 위에 있습니다 (퇴화)")
    v1 = normal_at(c, gx)
    pulled = apply(g.mat.inverse(), tangent(gx, foot))
    return gx, depth, v1, pulled


def adjusted_height(c: ConjClass, pair: AdjustmentPair, g: CosetRep, x: HPoint) -> AdjustedHeight:
    _, depth, v1, pulled = _geometry(c, g.g, x)
    # 역변환 후 basepoint 를 정확히 x 로 맞춤 (반올림)
    pulled = UnitTangent(x, pulled.forward)
    f1 = float(pair.F1(v1))
    f2 = float(pair.F2(pulled))
    return AdjustedHeight(g=g, d_to_axis=depth, F1_val=f1, F2_val=f2, h=depth - f1 - f2)


def adjusted_height_on_axis(c: ConjClass, pair: AdjustmentPair, g: CosetRep, x: HPoint) -> AdjustedHeight:
    """
    g·x 가 축 위인 잉여류의 높이: 양쪽 한쪽 극한의 평균 (d = 0).
    오른쪽에서 다가오면 v₁ 은 right 법벡터, v₂ 는 left 법벡터 방향. 영 쌍이면 h = 0.
    """
    gx = mobius_point(g.g.mat, x)
    s = math.log(abs(mobius_point(geodesic_frame(c.axis), gx).z)) - _anchor_log(c)
    ginv = g.g.mat.inverse()
    f1 = f2 = 0.0
    for side, inward in (("right", "left"), ("left", "right")):
        f1 += float(pair.F1(NormalVector(c, s, side)))
        fwd = mobius_boundary(ginv, normal_tangent(NormalVector(c, s, inward)).forward)
        f2 += float(pair.F2(UnitTangent(x, fwd)))
    f1, f2 = 0.5 * f1, 0.5 * f2
    return AdjustedHeight(g=g, d_to_axis=0.0, F1_val=f1, F2_val=f2, h=-f1 - f2)


class Residual(NamedTuple):
    residual: float
    depth: float

    @property
    def asymptotic(self) -> bool:
        return self.depth >= ASYMPTOTIC_DEPTH


def reduction_residual(c: ConjClass, g: GroupElement, x: HPoint, y: HPoint) -> Residual:
    gx, depth, v1, pulled = _geometry(c, g, x)
    gy = mobius_point(g.mat, y)
    total = dist(gx, apply(c.gamma.mat, gy))
    r = total - 2.0 * depth - eval_F1(v1) - busemann(pulled.forward, y, x)
    return Residual(r, depth)


# =============================
# 외부 높이 후보
# =============================
@dataclass(frozen=True)
class HeightCandidate:
    name: str
    fn: Callable[[ConjClass, GroupElement, HPoint, HPoint], float]
    bound: Callable[[ConjClass, HPoint, HPoint], float] = field(default=lambda c, x, y: 0.0)

    def __call__(self, c: ConjClass, g: GroupElement, x: HPoint, y: HPoint) -> float:
        return self.fn(c, g, x, y)


def _conj_half(c: ConjClass, g: GroupElement, x: HPoint, y: HPoint) -> float:
    return 0.5 * dist(mobius_point(g.mat, x), apply(c.gamma.mat, mobius_point(g.mat, y)))


def _conj_half_bound(c: ConjClass, x: HPoint, y: HPoint) -> float:
    s = math.sinh(c.translation_length / 2.0)
    return max(abs(math.log(s)), abs(math.log(2.0 * s + 1.0))) + dist(x, y) / 2.0


CANDIDATES = {
    "conj-half": HeightCandidate("conj-half", _conj_half, _conj_half_bound),
}


def get_candidate(name: str) -> HeightCandidate:
    try:
        return CANDIDATES[name]
    except KeyError:
        raise ConfigError(f"알 수 없는 높이 후보: '{name}' (가능: {', '.join(CANDIDATES)})") from None


def candidate_residual(
    c: ConjClass, cand: HeightCandidate, pair: AdjustmentPair, g: CosetRep, x: HPoint, y: HPoint
) -> Residual:
    """후보 h 와 조정 높이(pair) 의 차이, 깊이와 함께"""
    ah = adjusted_height(c, pair, g, x)
    return Residual(cand(c, g.g, x, y) - ah.h, ah.d_to_axis)


# =============================
# 점-대-점 조정 높이
# =============================
@dataclass(frozen=True)
class PointPair:
    """F₁ on S(x), F₂ on S(y)"""
    F1: F2Fn
    F2: F2Fn
    label1: str = "0"
    label2: str = "0"
    f1_bound: float = 0.0
    f2_bound: float = 0.0

    @property
    def label(self) -> str:
        return f"({self.label1}, {self.label2})"


def zero_point_pair() -> PointPair:
    return PointPair(lambda u: 0.0, lambda u: 0.0)


def cosine_point_pair(a1: float, a2: float) -> PointPair:
    return PointPair(
        lambda u: a1 * math.cos(direction_angle(u)),
        lambda u: a2 * math.cos(direction_angle(u)),
        f"{a1:g}cos(θ)",
        f"{a2:g}cos(θ)",
        abs(a1),
        abs(a2),
    )


def parse_point_pair(selector: str) -> PointPair:
    sel = (selector or "zero").strip()
    if sel == "zero":
        return zero_point_pair()
    if sel.startswith("const:"):
        try:
            c1, c2 = (float(t) for t in sel[6:].split(","))
        except ValueError as e:
            raise ConfigError(f"잘못된 pair selector '{selector}': {e}") from e
        return PointPair(lambda u: c1, lambda u: c2, f"{c1:g}", f"{c2:g}", abs(c1), abs(c2))
    if sel.startswith("cosine:"):
        try:
            a1, a2 = (float(t) for t in sel[7:].split(","))
        except ValueError as e:
            raise ConfigError(f"잘못된 pair selector '{selector}': {e}") from e
        return cosine_point_pair(a1, a2)
    raise ConfigError(f"알 수 없는 point pair selector: '{selector}'")


@dataclass(frozen=True)
class PointHeight:
    g: GroupElement
    distance: float
    F1_val: float
    F2_val: float
    h: float


def adjusted_height_pp(pair: PointPair, g: GroupElement, x: HPoint, y: HPoint) -> PointHeight:
    gy = mobius_point(g.mat, y)
    d = dist(x, gy)
    if d <= 1e-12:
        f1 = f2 = 0.0
    else:
        v1 = tangent(x, gy)
        v2 = apply(g.mat.inverse(), tangent(gy, x))
        f1 = float(pair.F1(v1))
        f2 = float(pair.F2(UnitTangent(y, v2.forward)))
    return PointHeight(g=g, distance=d, F1_val=f1, F2_val=f2, h=d - f1 - f2)
