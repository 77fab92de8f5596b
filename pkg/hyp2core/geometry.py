# -*- coding: utf-8 -*-
"""
hyp2core/geometry.py

상반평면의 닫힌 형태(closed-form) 기하 계산.
모든 공식은 Möbius 정규화 한 번으로 자명한 경우(허수축, 원판 중심)로 환원된다.

규약
- 원점 o = i, 원판 차트 w = (z − i)/(z + i). 경계각 θ = arg w, ∞ ↔ θ = 0.
- busemann(ζ, p, q) = lim d(ζ_t, p) − d(ζ_t, q)
- visual_dist(x, ζ, η) = e^{−(ζ|η)_x}
"""

from __future__ import annotations

import cmath
import math
from typing import Tuple, Union

import numpy as np

from utils_common import DomainError
from .points import (
    HPoint,
    HBoundary,
    Geodesic,
    UnitTangent,
    Isometry,
    ORIGIN,
    INFINITY,
)

TWO_PI = 2.0 * math.pi
ZERO_TOL = 1e-12
Target = Union[HPoint, HBoundary]


# =============================
# Möbius 작용 (스칼라)
# =============================
def mobius_point(g: Isometry, p: HPoint) -> HPoint:
    z = p.z
    den = g.c * z + g.d
    w = (g.a * z + g.b) / den
    # Im(gz) = Im z / |cz + d|²
    return HPoint(w.real, p.y / abs(den) ** 2)


def mobius_boundary(g: Isometry, zeta: HBoundary) -> HBoundary:
    # round-off 크기의 c, cv + d 는 0 으로 본다 (∞ 를 큰 실수로 두지 않음)
    tol = ZERO_TOL * g.frobenius()
    if zeta.at_infinity:
        if abs(g.c) <= tol:
            return INFINITY
        return HBoundary.real(g.a / g.c)
    v = zeta.value
    den = g.c * v + g.d
    if abs(den) <= tol * (1.0 + abs(v)):
        return INFINITY
    return HBoundary.real((g.a * v + g.b) / den)


def apply(g: Isometry, obj):
    """점/경계점/접벡터/측지선/등거리변환에 g 를 작용"""
    if isinstance(obj, HPoint):
        return mobius_point(g, obj)
    if isinstance(obj, HBoundary):
        return mobius_boundary(g, obj)
    if isinstance(obj, UnitTangent):
        return UnitTangent(mobius_point(g, obj.base), mobius_boundary(g, obj.forward))
    if isinstance(obj, Geodesic):
        return Geodesic(mobius_boundary(g, obj.neg), mobius_boundary(g, obj.pos))
    if isinstance(obj, Isometry):
        return g @ obj
    raise TypeError(f"apply: 지원하지 않는 타입 {type(obj).__name__}")


# =============================
# 원판 차트 (중심 o = i)
# =============================
def to_disk(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def from_disk(w: complex) -> complex:
    return 1j * (1 + w) / (1 - w)


def boundary_angle(zeta: HBoundary) -> float:
    if zeta.at_infinity:
        return 0.0
    x = zeta.value
    return math.atan2(-2.0 * x, x * x - 1.0) % TWO_PI


def boundary_from_angle(theta: float) -> HBoundary:
    theta = theta % TWO_PI
    half = 0.5 * theta
    s = math.sin(half)
    if abs(s) < 1e-15:
        return INFINITY
    return HBoundary.real(-math.cos(half) / s)


def rotation(phi: float) -> Isometry:
    """i 를 고정하는 회전 (원판에서 각 2φ)"""
    c, s = math.cos(phi), math.sin(phi)
    return Isometry(c, s, -s, c)


def _to_frame_at(p: HPoint) -> Isometry:
    """p 를 i 로 보내는 변환 z ↦ (z − x)/y"""
    r = math.sqrt(p.y)
    return Isometry(1.0 / r, -p.x / r, 0.0, r)


def _disk_angle_of(zeta: HBoundary, frame: Isometry) -> float:
    return boundary_angle(mobius_boundary(frame, zeta))


# =============================
# 거리 / Busemann / visual distance
# =============================
def dist(p: HPoint, q: HPoint) -> float:
    return 2.0 * math.asinh(abs(p.z - q.z) / (2.0 * math.sqrt(p.y * q.y)))


def _horo_height(zeta: HBoundary, p: HPoint) -> float:
    if zeta.at_infinity:
        return p.y
    return p.y / abs(p.z - zeta.value) ** 2


def busemann(zeta: HBoundary, p: HPoint, q: HPoint) -> float:
    return math.log(_horo_height(zeta, q) / _horo_height(zeta, p))


def busemann_limit(zeta: HBoundary, p: HPoint, q: HPoint, t: float = 30.0) -> float:
    """정의식 그대로: ζ_t 를 [p, ζ) 위 거리 t 지점으로 잡은 절단 극한"""
    zt = flow(tangent(p, zeta), t).base
    return t - dist(zt, q)


def visual_dist(x: HPoint, zeta: HBoundary, eta: HBoundary) -> float:
    def w(b: HBoundary) -> complex:
        if b.at_infinity:
            return 1.0 + 0j
        return (b.value - x.z) / (b.value - x.z.conjugate())

    return 0.5 * abs(w(zeta) - w(eta))


def visual_dist_limit(x: HPoint, zeta: HBoundary, eta: HBoundary, t: float = 30.0) -> float:
    zt = flow(tangent(x, zeta), t).base
    et = flow(tangent(x, eta), t).base
    return math.exp(-0.5 * (2.0 * t - dist(zt, et)))


# =============================
# 측지선 정규화 / 사영
# =============================
def geodesic_frame(L: Geodesic) -> Isometry:
    """L.neg → 0, L.pos → ∞ 로 보내는 등거리 변환"""
    if L.pos.at_infinity:
        return Isometry(1.0, -L.neg.value, 0.0, 1.0)
    if L.neg.at_infinity:
        return Isometry(0.0, -1.0, 1.0, -L.pos.value)
    a, b = L.neg.value, L.pos.value
    if a > b:
        s = math.sqrt(a - b)
        return Isometry(1.0 / s, -a / s, 1.0 / s, -b / s)
    s = math.sqrt(b - a)
    return Isometry(-1.0 / s, a / s, 1.0 / s, -b / s)


def project(L: Geodesic, p: HPoint) -> Tuple[HPoint, float]:
    """P_L(p) 와 d(p, L)"""
    A = geodesic_frame(L)
    w = mobius_point(A, p).z
    foot = mobius_point(A.inverse(), HPoint(0.0, abs(w)))
    return foot, math.asinh(abs(w.real) / w.imag)


def project_boundary(L: Geodesic, zeta: HBoundary) -> HPoint:
    A = geodesic_frame(L)
    r = mobius_boundary(A, zeta)
    if r.at_infinity or abs(r.value) <= 1e-14:
        raise DomainError(f"경계점 {zeta} 이(가) 측지선의 끝점과 같습니다")
    return mobius_point(A.inverse(), HPoint(0.0, abs(r.value)))


def axis_coordinate(L: Geodesic, p: HPoint, anchor: HPoint) -> float:
    """anchor 기준, L.pos 방향으로 증가하는 P_L(p) 의 부호 있는 호 길이"""
    A = geodesic_frame(L)
    return math.log(abs(mobius_point(A, p).z)) - math.log(abs(mobius_point(A, anchor).z))


def point_on_geodesic(L: Geodesic, s: float, anchor: HPoint) -> HPoint:
    A = geodesic_frame(L)
    r = abs(mobius_point(A, anchor).z)
    return mobius_point(A.inverse(), HPoint(0.0, r * math.exp(s)))


def contains(L: Geodesic, p: HPoint, tol: float = 1e-10) -> bool:
    return project(L, p)[1] <= tol


# =============================
# 단위 접벡터 / 측지 흐름
# =============================
def tangent(p: HPoint, target: Target) -> UnitTangent:
    """P¹_p(target): p 에서 target(점 또는 경계점)을 향하는 단위 접벡터"""
    if isinstance(target, HBoundary):
        return UnitTangent(p, target)
    if dist(p, target) <= 1e-14:
        raise DomainError(f"tangent: 시작점과 목표점이 같습니다 {p}")
    M = _to_frame_at(p)
    w = to_disk(mobius_point(M, target).z)
    theta = cmath.phase(w) % TWO_PI
    return UnitTangent(p, mobius_boundary(M.inverse(), boundary_from_angle(theta)))


def direction_angle(u: UnitTangent) -> float:
    """u 의 방향각 (0 = ∞ 방향, 반시계)"""
    return _disk_angle_of(u.forward, _to_frame_at(u.base))


def tangent_from_angle(p: HPoint, theta: float) -> UnitTangent:
    M = _to_frame_at(p)
    return UnitTangent(p, mobius_boundary(M.inverse(), boundary_from_angle(theta)))


def backward(u: UnitTangent) -> HBoundary:
    return tangent_from_angle(u.base, direction_angle(u) + math.pi).forward


def geodesic_of(u: UnitTangent) -> Geodesic:
    return Geodesic(backward(u), u.forward)


def flow(u: UnitTangent, t: float) -> UnitTangent:
    if t == 0.0:
        return u
    L = geodesic_of(u)
    A = geodesic_frame(L)
    r = abs(mobius_point(A, u.base).z)
    base = mobius_point(A.inverse(), HPoint(0.0, r * math.exp(t)))
    return UnitTangent(base, u.forward)


def midpoint(p: HPoint, q: HPoint) -> HPoint:
    d = dist(p, q)
    if d <= 1e-14:
        return p
    return flow(tangent(p, q), 0.5 * d).base


def d_zero_infty(u: UnitTangent, v: UnitTangent, o: HPoint = ORIGIN) -> float:
    """max{d(πu, πv), d_o(u⁺, v⁺)}"""
    return max(dist(u.base, v.base), visual_dist(o, u.forward, v.forward))


# =============================
# numpy 배치 계산
# =============================
def mobius_many(mats: np.ndarray, z: complex) -> np.ndarray:
    """mats: (N, 2, 2) → 복소 배열 g·z"""
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    return (a * z + b) / (c * z + d)


def dist_many(p: HPoint, zs: np.ndarray) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    return 2.0 * np.arcsinh(np.abs(zs - p.z) / (2.0 * np.sqrt(p.y * zs.imag)))


def orbit_dist_many(mats: np.ndarray, x: HPoint, y: HPoint) -> np.ndarray:
    """d(x, g·y) for each g; Im(g·y) 는 y/|cy+d|² 로 계산"""
    c, d = mats[:, 1, 0], mats[:, 1, 1]
    den = c * y.z + d
    gz = (mats[:, 0, 0] * y.z + mats[:, 0, 1]) / den
    im = y.y / np.abs(den) ** 2
    return 2.0 * np.arcsinh(np.abs(gz - x.z) / (2.0 * np.sqrt(x.y * im)))
