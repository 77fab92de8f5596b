# -*- coding: utf-8 -*-
"""
hyp2core/points.py

상반평면(upper half-plane) 모델의 값 타입.
모든 타입은 불변(frozen) dataclass 이며 스레드 간 공유 가능.

- HPoint      : 내부 점 x + i·y (y > 0)
- HBoundary   : 경계점 (실수 또는 ∞). ∞ 는 큰 float 이 아니라 명시적 플래그.
- Geodesic    : 순서 있는 이상 끝점 쌍 (neg → pos)
- UnitTangent : (basepoint, forward endpoint)
- Isometry    : SL(2,R) / ±I, 부호 정규형
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils_common import DomainError

# ---- 허용 오차 -------------------------------------------------------------
DET_RTOL = 1e-9
SIGN_RTOL = 1e-12
BOUNDARY_RTOL = 1e-12


# =============================
# 점
# =============================
@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"HPoint 좌표가 유한하지 않습니다: ({self.x}, {self.y})")
        if self.y <= 0.0:
            raise DomainError(f"HPoint 높이는 양수여야 합니다: y={self.y}")

    @classmethod
    def from_complex(cls, z: complex) -> "HPoint":
        return cls(float(z.real), float(z.imag))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def __repr__(self) -> str:
        return f"HPoint({self.x:.12g}, {self.y:.12g})"


ORIGIN = HPoint(0.0, 1.0)


@dataclass(frozen=True)
class HBoundary:
    value: float = 0.0
    at_infinity: bool = False

    def __post_init__(self):
        if not self.at_infinity and not math.isfinite(self.value):
            raise DomainError("유한 경계점에 inf/nan 값은 허용되지 않습니다 (HBoundary.infinity() 사용)")
        if self.at_infinity and self.value != 0.0:
            object.__setattr__(self, "value", 0.0)

    @classmethod
    def infinity(cls) -> "HBoundary":
        return cls(0.0, True)

    @classmethod
    def real(cls, value: float) -> "HBoundary":
        return cls(float(value), False)

    @classmethod
    def from_angle(cls, theta: float) -> "HBoundary":
        """원판 차트(중심 o = i)의 각도 → 경계점. θ = 0 은 ∞."""
        from .geometry import boundary_from_angle
        return boundary_from_angle(theta)

    @property
    def angle(self) -> float:
        from .geometry import boundary_angle
        return boundary_angle(self)

    def same_as(self, other: "HBoundary", rtol: float = BOUNDARY_RTOL) -> bool:
        if self.at_infinity or other.at_infinity:
            return self.at_infinity and other.at_infinity
        return abs(self.value - other.value) <= rtol * max(1.0, abs(self.value), abs(other.value))

    def __repr__(self) -> str:
        return "HBoundary(∞)" if self.at_infinity else f"HBoundary({self.value:.12g})"


INFINITY = HBoundary.infinity()


# =============================
# 측지선 / 단위 접벡터
# =============================
@dataclass(frozen=True)
class Geodesic:
    neg: HBoundary
    pos: HBoundary

    def __post_init__(self):
        if self.neg.same_as(self.pos):
            raise DomainError(f"측지선의 두 끝점이 같습니다: {self.neg}")

    def reversed(self) -> "Geodesic":
        return Geodesic(self.pos, self.neg)

    def has_endpoint(self, zeta: HBoundary, rtol: float = 1e-10) -> bool:
        return zeta.same_as(self.neg, rtol) or zeta.same_as(self.pos, rtol)


@dataclass(frozen=True)
class UnitTangent:
    base: HPoint
    forward: HBoundary


# =============================
# 등거리 변환
# =============================
def _canonical_sign(a: float, b: float, c: float, d: float) -> Tuple[float, float, float, float]:
    norm = math.sqrt(a * a + b * b + c * c + d * d)
    for e in (a, b, c, d):
        if abs(e) > SIGN_RTOL * norm:
            if e < 0:
                return -a, -b, -c, -d
            break
    return a, b, c, d


@dataclass(frozen=True)
class Isometry:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = (float(v) for v in (self.a, self.b, self.c, self.d))
        if not all(math.isfinite(v) for v in (a, b, c, d)):
            raise DomainError("Isometry 성분이 유한하지 않습니다")
        det = a * d - b * c
        scale = max(1.0, abs(a * d), abs(b * c))
        if abs(det - 1.0) > DET_RTOL * scale:
            raise DomainError(f"행렬식이 1이 아닙니다: det={det!r}")
        a, b, c, d = _canonical_sign(a, b, c, d)
        for k, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, k, v)

    # ---- 생성자 -------------------------------------------------------------
    @classmethod
    def from_matrix(cls, m, *, normalize: bool = False) -> "Isometry":
        m = np.asarray(m, dtype=float).reshape(2, 2)
        a, b, c, d = float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1])
        if normalize:
            det = a * d - b * c
            if det <= 0:
                raise DomainError(f"정규화할 수 없는 행렬식: {det!r}")
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diag(cls, lam: float) -> "Isometry":
        return cls(lam, 0.0, 0.0, 1.0 / lam)

    # ---- 연산 ---------------------------------------------------------------
    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry.from_matrix(self.as_array() @ other.as_array(), normalize=True)

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def frobenius(self) -> float:
        return math.sqrt(self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2)

    def is_close(self, other: "Isometry", rtol: float = 1e-7) -> bool:
        p, q = self.as_array(), other.as_array()
        scale = max(np.linalg.norm(p), np.linalg.norm(q))
        return bool(min(np.linalg.norm(p - q), np.linalg.norm(p + q)) <= rtol * scale)

    def is_identity(self, rtol: float = 1e-9) -> bool:
        return self.is_close(Isometry.identity(), rtol)

    def is_hyperbolic(self, eps: float = 1e-9) -> bool:
        return abs(self.trace) > 2.0 + eps
