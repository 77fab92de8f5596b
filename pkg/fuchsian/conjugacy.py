# -*- coding: utf-8 -*-
"""
fuchsian/conjugacy.py

쌍곡 원소 γ 의 켤레류 데이터 (축, 이동 거리, 원시근) 와
⟨γ̂⟩-잉여류의 기본영역 정규화.

기본영역: 축 L 위 anchor y₀ = P_L(o) 기준, P_L(g·x) 의 축 좌표가 [0, ℓ(γ̂)) 인 g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils_common import DomainError, ConfigError, log
from hyp2core.points import HPoint, HBoundary, Geodesic, Isometry, ORIGIN, INFINITY
from hyp2core.geometry import (
    project,
    axis_coordinate,
    geodesic_frame,
    mobius_point,
    mobius_many,
)
from .groups import GroupSpec
from .elements import (
    GroupElement,
    word_product,
    multiply,
    inverse,
    power,
    require_hyperbolic,
    reduce_word,
)
from .enumerate import enumerate_ball

ROOT_K_MAX = 12
ROOT_WORD_CAP = 8
# 창 경계 [0, ℓ̂) 판정의 상대 허용오차
EDGE_TOL = 1e-12


@dataclass(frozen=True)
class ConjClass:
    gamma: GroupElement
    primitive_root: GroupElement
    power: int
    axis: Geodesic
    translation_length: float   # ℓ(γ)
    root_length: float          # ℓ(γ̂)
    origin: HPoint
    anchor: HPoint              # y₀ = P_L(o)

    def describe(self, G: GroupSpec) -> dict:
        return {
            "gamma": self.gamma.label(G),
            "primitive_root": self.primitive_root.label(G),
            "power": self.power,
            "translation_length": self.translation_length,
            "root_length": self.root_length,
            "axis": [_bval(self.axis.neg), _bval(self.axis.pos)],
        }


@dataclass(frozen=True)
class CosetRep:
    g: GroupElement
    axis_coordinate: float


def _bval(b: HBoundary):
    return "inf" if b.at_infinity else b.value


# =============================
# 고정점 / 이동 거리
# =============================
def translation_length(m: Isometry) -> float:
    return 2.0 * math.acosh(max(1.0, abs(m.trace) / 2.0))


def fixed_points(m: Isometry) -> Tuple[HBoundary, HBoundary]:
    """(repelling, attracting)"""
    a, b, c, d = m.a, m.b, m.c, m.d
    if abs(c) <= 1e-12 * m.frobenius():
        finite = HBoundary.real(b / (d - a))
        # z ↦ (a z + b)/d : |a| > |d| 이면 ∞ 가 끌어당김
        return (finite, INFINITY) if abs(a) > abs(d) else (INFINITY, finite)
    B = d - a
    disc = math.sqrt(max(0.0, (a + d) ** 2 - 4.0))
    q = -0.5 * (B + math.copysign(disc, B if B != 0 else 1.0))
    roots = [q / c, -b / q] if q != 0 else [(a - d) / (2 * c)] * 2
    z1, z2 = roots
    attracting_first = abs(c * z1 + d) > 1.0
    rep, att = (z2, z1) if attracting_first else (z1, z2)
    return HBoundary.real(rep), HBoundary.real(att)


def axis_of(m: Isometry) -> Geodesic:
    rep, att = fixed_points(m)
    return Geodesic(rep, att)


# =============================
# 켤레류
# =============================
def find_primitive_root(
    G: GroupSpec,
    gamma: GroupElement,
    anchor: HPoint,
    *,
    k_max: int = ROOT_K_MAX,
    word_cap: int = ROOT_WORD_CAP,
) -> Tuple[GroupElement, int]:
    """γ = r^k 인 r 을 anchor 주변 공 (반지름 ℓ/2) 에서 탐색, 가장 큰 k 선택"""
    ell = translation_length(gamma.mat)
    cap = 64 if G.can_prune else word_cap
    ball = enumerate_ball(G, anchor, anchor, ell / 2.0 + 1e-6, cap)
    best: Tuple[GroupElement, int] = (gamma, 1)
    for i in ball.indices():
        r_mat = Isometry.from_matrix(ball.mats[i], normalize=True)
        if not r_mat.is_hyperbolic():
            continue
        ell_r = translation_length(r_mat)
        # 축 위의 점은 정확히 ℓ_r 만큼 이동
        if abs(ball.dists[i] - ell_r) > 1e-6:
            continue
        k = int(round(ell / ell_r))
        if k < 2 or k > k_max or k <= best[1] or abs(k * ell_r - ell) > 1e-6:
            continue
        r = GroupElement(r_mat, ball.word(int(i)))
        if power(G, r, k).mat.is_close(gamma.mat, 1e-6):
            best = (r, k)
    return best


def conj_data(
    G: GroupSpec,
    g: GroupElement,
    *,
    origin: HPoint = ORIGIN,
    k_max: int = ROOT_K_MAX,
    word_cap: int = ROOT_WORD_CAP,
) -> ConjClass:
    require_hyperbolic(g)
    L = axis_of(g.mat)
    anchor, _ = project(L, origin)
    ell = translation_length(g.mat)
    root, k = find_primitive_root(G, g, anchor, k_max=k_max, word_cap=word_cap)
    ell_root = translation_length(root.mat)
    log("DEBUG", f"class {g.label(G)}: ℓ={ell:.9f} root={root.label(G)} k={k}", scope="CONJ")
    return ConjClass(
        gamma=g,
        primitive_root=root,
        power=k,
        axis=L,
        translation_length=ell,
        root_length=ell_root,
        origin=origin,
        anchor=anchor,
    )


# =============================
# 잉여류 정규화
# =============================
def _clamp_window(s, ell):
    return min(max(s, 0.0), math.nextafter(ell, 0.0))


def coset_canonicalize(G: GroupSpec, c: ConjClass, g: GroupElement, x: HPoint) -> CosetRep:
    ell = c.root_length
    s = axis_coordinate(c.axis, mobius_point(g.mat, x), c.anchor)
    n = -int(math.floor(s / ell + EDGE_TOL))
    rep = multiply(G, power(G, c.primitive_root, n), g) if n else g
    s = axis_coordinate(c.axis, mobius_point(rep.mat, x), c.anchor)
    # 반올림으로 창 밖이면 한 번 보정
    if s < -EDGE_TOL * ell:
        rep = multiply(G, c.primitive_root, rep)
    elif s >= ell * (1.0 - EDGE_TOL):
        rep = multiply(G, inverse(G, c.primitive_root), rep)
    else:
        return CosetRep(rep, _clamp_window(s, ell))
    s = axis_coordinate(c.axis, mobius_point(rep.mat, x), c.anchor)
    return CosetRep(rep, _clamp_window(s, ell))


def axis_coordinates_many(c: ConjClass, mats: np.ndarray, x: HPoint) -> np.ndarray:
    A = geodesic_frame(c.axis)
    gx = mobius_many(mats, x.z)
    w = (A.a * gx + A.b) / (A.c * gx + A.d)
    a0 = mobius_point(A, c.anchor).z
    return np.log(np.abs(w)) - math.log(abs(a0))


def depths_many(c: ConjClass, mats: np.ndarray, x: HPoint) -> np.ndarray:
    """d(g·x, L)"""
    A = geodesic_frame(c.axis)
    gx = mobius_many(mats, x.z)
    den = A.c * gx + A.d
    w = (A.a * gx + A.b) / den
    im = (x.y / np.abs(mats[:, 1, 0] * x.z + mats[:, 1, 1]) ** 2) / np.abs(den) ** 2
    return np.arcsinh(np.abs(w.real) / im)


def canonicalize_many(c: ConjClass, mats: np.ndarray, x: HPoint) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    배치 정규화: γ̂^n · g. 반환 (정규화 행렬, 축 좌표, n)
    """
    ell = c.root_length
    s = axis_coordinates_many(c, mats, x)
    n = -np.floor(s / ell + EDGE_TOL).astype(np.int64)
    root = c.primitive_root.mat.as_array()
    out = np.empty_like(mats)
    for k in np.unique(n):
        P = np.linalg.matrix_power(root if k >= 0 else np.linalg.inv(root), int(abs(k)))
        sel = n == k
        out[sel] = np.einsum("ij,njk->nik", P, mats[sel])
    s2 = axis_coordinates_many(c, out, x)
    fix_lo, fix_hi = s2 < -EDGE_TOL * ell, s2 >= ell * (1.0 - EDGE_TOL)
    if fix_lo.any():
        out[fix_lo] = np.einsum("ij,njk->nik", root, out[fix_lo])
        n[fix_lo] += 1
    if fix_hi.any():
        out[fix_hi] = np.einsum("ij,njk->nik", np.linalg.inv(root), out[fix_hi])
        n[fix_hi] -= 1
    if fix_lo.any() or fix_hi.any():
        s2 = axis_coordinates_many(c, out, x)
    return out, np.clip(s2, 0.0, math.nextafter(ell, 0.0)), n


def canonical_word(G: GroupSpec, c: ConjClass, word: Sequence[int], n: int) -> Tuple[int, ...]:
    """canonicalize_many 의 n 에 대응하는 γ̂^n · g 의 단어"""
    return reduce_word(G, power(G, c.primitive_root, int(n)).word + tuple(int(k) for k in word))


# =============================
# 클래스 선택자
# =============================
def shortest_hyperbolic(G: GroupSpec, max_len: int = 2) -> GroupElement:
    """길이 ≤ max_len 단어 중 이동 거리가 가장 짧은 쌍곡 원소 (shortlex 우선)"""
    best: Optional[Tuple[float, Tuple[int, ...]]] = None
    words: List[Tuple[int, ...]] = [()]
    for _ in range(max_len):
        words = [w + (k,) for w in words for k in range(G.n_letters) if not (w and G.inverse[w[-1]] == k)]
        for w in words:
            g = word_product(G, w)
            if not g.mat.is_hyperbolic():
                continue
            key = (round(translation_length(g.mat), 9), (len(w), w))
            if best is None or key < (round(best[0], 9), (len(best[1]), best[1])):
                best = (translation_length(g.mat), w)
    if best is None:
        raise DomainError(f"{G.name}: 길이 {max_len} 이하의 쌍곡 원소가 없습니다")
    return word_product(G, best[1])


def _cyclic_key(G: GroupSpec, w: Tuple[int, ...]) -> Optional[Tuple[int, ...]]:
    """순환 축약된 단어의 최소 회전. 순환 축약이 아니면 None"""
    if len(w) > 1 and G.inverse[w[-1]] == w[0]:
        return None
    return min(w[i:] + w[:i] for i in range(len(w)))


def are_conjugate(G: GroupSpec, g: GroupElement, h: GroupElement, *, word_cap: int = ROOT_WORD_CAP) -> bool:
    """
    h = f g f⁻¹ 인 f ∈ Γ 가 있는지.
    f 는 g 의 축을 h 의 축으로 보내므로 h 의 거듭제곱을 곱해 f·P(o) 를 h 축 위 P(o) 의 ℓ/2 이내로 옮길 수 있다.
    """
    ell = translation_length(h.mat)
    if abs(translation_length(g.mat) - ell) > 1e-9 * max(1.0, ell):
        return False
    p_g, _ = project(axis_of(g.mat), ORIGIN)
    p_h, _ = project(axis_of(h.mat), ORIGIN)
    cap = 64 if G.can_prune else word_cap
    ball = enumerate_ball(G, p_h, p_g, ell / 2.0 + 1e-6, cap)
    for i in ball.indices():
        f = Isometry.from_matrix(ball.mats[i], normalize=True)
        if (f @ g.mat @ f.inverse()).is_close(h.mat, 1e-6):
            return True
    return False


def shortest_classes(G: GroupSpec, count: int = 5, max_len: int = 3) -> List[GroupElement]:
    """
    짧은 단어 중 이동 거리가 짧은 쌍곡 켤레류 대표.
    같은 순환 단어(회전)는 건너뛰고, 이동 거리가 같은 후보끼리는 are_conjugate 로 한 번 더 거른다.
    """
    seen = set()
    found: List[Tuple[float, int, Tuple[int, ...]]] = []
    words: List[Tuple[int, ...]] = [()]
    for _ in range(max_len):
        words = [w + (k,) for w in words for k in range(G.n_letters) if not (w and G.inverse[w[-1]] == k)]
        for w in words:
            key = _cyclic_key(G, w)
            if key is None or key in seen:
                continue
            seen.add(key)
            g = word_product(G, w)
            if g.mat.is_hyperbolic():
                found.append((round(translation_length(g.mat), 9), len(w), w))
    found.sort()
    kept: List[Tuple[float, GroupElement]] = []
    for ell, _, w in found:
        g = word_product(G, w)
        if any(abs(ell - e) <= 1e-8 and are_conjugate(G, h, g) for e, h in kept):
            continue
        kept.append((ell, g))
        if len(kept) == count:
            break
    return [g for _, g in kept]


def select_class_element(G: GroupSpec, selector: str) -> GroupElement:
    """
    'shortest' | 'class:<k>' | 'gen:<k>' | 'word:<i,j,...>' | 'pow:<k>:<selector>'
    """
    sel = (selector or "shortest").strip()
    try:
        if sel == "shortest":
            return shortest_hyperbolic(G)
        if sel.startswith("class:"):
            k = int(sel[6:])
            classes = shortest_classes(G, k + 1)
            if k < 0 or k >= len(classes):
                raise ConfigError(f"class 인덱스 범위 밖: {k} (찾은 켤레류 {len(classes)} 개)")
            return classes[k]
        if sel.startswith("gen:"):
            k = int(sel[4:])
            if not (0 <= k < G.n_letters):
                raise ConfigError(f"생성원 인덱스 범위 밖: {k}")
            return word_product(G, (k,))
        if sel.startswith("word:"):
            word = [int(t) for t in sel[5:].split(",") if t.strip()]
            if any(not (0 <= k < G.n_letters) for k in word):
                raise ConfigError(f"단어에 알 수 없는 글자: {word}")
            return word_product(G, reduce_word(G, word))
        if sel.startswith("pow:"):
            _, k, rest = sel.split(":", 2)
            return power(G, select_class_element(G, rest), int(k))
    except ValueError as e:
        raise ConfigError(f"잘못된 class selector '{selector}': {e}") from e
    raise ConfigError(f"알 수 없는 class selector: '{selector}'")
