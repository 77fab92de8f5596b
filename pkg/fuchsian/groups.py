# -*- coding: utf-8 -*-
"""
fuchsian/groups.py

GroupSpec 정의, 내장 그룹(bolza / cyclic-demo / free2-demo), JSON 로딩·저장.

bolza 는 하드코딩하지 않고 정팔각형(내각 π/4)의 대변 짝짓기에서 생성한 뒤
(꼭짓점 순환 → 관계식, 오일러 특성수, 넓이, 쌍곡성, 이산성) 을 검증한다.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils_common import GroupValidationError, DomainError, ConfigError, log
from hyp2core.points import HPoint, Isometry, ORIGIN
from hyp2core.geometry import direction_angle, from_disk, to_disk, mobius_point, dist, rotation, tangent

RELATOR_ATOL = 1e-6
DISCRETE_EPS = 1e-3
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class GroupSpec:
    name: str
    letters: Tuple[Isometry, ...]       # 역원에 닫힌 알파벳
    inverse: Tuple[int, ...]            # inverse[i] = i 의 역원 글자
    labels: Tuple[str, ...]
    relators: Tuple[Tuple[int, ...], ...] = ()
    cocompact: bool = False
    center: Optional[HPoint] = None     # 기본 영역(타일)의 중심
    tile_radius: Optional[float] = None # 타일 외접 반지름
    meta: Dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def n_letters(self) -> int:
        return len(self.letters)

    def letter_array(self) -> np.ndarray:
        return np.stack([g.as_array() for g in self.letters])

    @property
    def can_prune(self) -> bool:
        return self.center is not None and self.tile_radius is not None


# =============================
# 검증
# =============================
def word_matrix(letters: Sequence[Isometry], word: Sequence[int]) -> np.ndarray:
    m = np.eye(2)
    for k in word:
        m = m @ letters[k].as_array()
    return m


def _is_pm_identity(m: np.ndarray, atol: float = RELATOR_ATOL) -> bool:
    eye = np.eye(2)
    return bool(min(np.abs(m - eye).max(), np.abs(m + eye).max()) <= atol)


def validate_group(G: GroupSpec) -> GroupSpec:
    if len(G.letters) != len(G.inverse) or len(G.letters) != len(G.labels):
        raise GroupValidationError("letters / inverse / labels 길이가 다릅니다")
    for i, g in enumerate(G.letters):
        j = G.inverse[i]
        if not (0 <= j < len(G.letters)) or G.inverse[j] != i:
            raise GroupValidationError(f"역원 테이블이 대칭이 아닙니다: {i} ↔ {j}")
        prod = g.as_array() @ G.letters[j].as_array()
        if not _is_pm_identity(prod, 1e-9 * max(1.0, g.frobenius() ** 2)):
            raise GroupValidationError(f"글자 {G.labels[i]} 의 역원이 {G.labels[j]} 가 아닙니다")
    for r in G.relators:
        if any(not (0 <= k < len(G.letters)) for k in r):
            raise GroupValidationError(f"관계식에 알 수 없는 글자: {list(r)}")
        if not _is_pm_identity(word_matrix(G.letters, r)):
            raise GroupValidationError(f"관계식 {format_word(G, r)} 의 곱이 ±I 가 아닙니다")
    return G


def format_word(G: GroupSpec, word: Sequence[int]) -> str:
    return " ".join(G.labels[k] for k in word) if len(word) else "e"


def check_discrete(G: GroupSpec, depth: int = 3, eps: float = DISCRETE_EPS) -> None:
    """길이 ≤ depth 인 단어 중 비자명 원소가 o 를 eps 미만으로 움직이면 실패"""
    mats = [np.eye(2)]
    frontier = [np.eye(2)]
    for _ in range(depth):
        nxt = []
        for m in frontier:
            for g in G.letters:
                nxt.append(m @ g.as_array())
        mats.extend(nxt)
        frontier = nxt
    o = G.center or ORIGIN
    for m in mats:
        if _is_pm_identity(m, 1e-8):
            continue
        g = Isometry.from_matrix(m, normalize=True)
        if dist(o, mobius_point(g, o)) < eps:
            raise GroupValidationError(f"{G.name}: 비자명 원소의 변위가 {eps} 미만 → 이산 그룹이 아닙니다")


# =============================
# 정팔각형 곡면군 (Bolza)
# =============================
def _vertex_cycle(
    letters: Sequence[Isometry],
    sides: Sequence[Tuple[int, int]],
    vertices: Sequence[complex],
    pairing: Sequence[int],
    start_v: int,
    start_s: int,
) -> Tuple[List[int], np.ndarray, List[int]]:
    """
    꼭짓점 순환. side s 를 짝지어진 변으로 보내는 원소는 letters[pairing[s]].
    반환: (관계식 단어, 누적 행렬, 거쳐 간 꼭짓점)
    """
    def match_vertex(z: complex) -> int:
        w = to_disk(z)
        for j, v in enumerate(vertices):
            if abs(to_disk(v) - w) < 1e-6:
                return j
        raise GroupValidationError("꼭짓점 상이 다른 꼭짓점과 일치하지 않습니다")

    v, s = start_v, start_s
    word: List[int] = []
    visited: List[int] = []
    M = np.eye(2)
    while True:
        k = pairing[s]
        g = letters[k]
        v_img = match_vertex(mobius_point(g, HPoint.from_complex(vertices[v])).z)
        s_img = next((i for i, sd in enumerate(sides) if i != s and _maps_side(g, sides[s], sd, vertices)), None)
        if s_img is None:
            raise GroupValidationError(f"변 {s} 의 상이 다각형의 변이 아닙니다")
        # 같은 꼭짓점의 다른 변
        s = next((i for i, sd in enumerate(sides) if i != s_img and v_img in sd), None)
        if s is None:
            raise GroupValidationError(f"꼭짓점 {v_img} 에 만나는 다른 변이 없습니다")
        v = v_img
        M = g.as_array() @ M
        word.insert(0, k)
        visited.append(v)
        if v == start_v and s == start_s:
            return word, M, visited
        if len(visited) > 4 * len(sides):
            raise GroupValidationError("꼭짓점 순환이 닫히지 않습니다")


def _maps_side(g: Isometry, src: Tuple[int, int], dst: Tuple[int, int], vertices: Sequence[complex]) -> bool:
    targets = [to_disk(vertices[j]) for j in dst]
    for j in src:
        w = to_disk(mobius_point(g, HPoint.from_complex(vertices[j])).z)
        if min(abs(w - t) for t in targets) > 1e-6:
            return False
    return True


def interior_angle(vertices: Sequence[complex], sides: Sequence[Tuple[int, int]], j: int) -> float:
    """꼭짓점 j 에서 만나는 두 변(측지선)의 사잇각"""
    p = HPoint.from_complex(vertices[j])
    nbrs = [sd[0] if sd[1] == j else sd[1] for sd in sides if j in sd]
    if len(nbrs) != 2:
        raise GroupValidationError(f"꼭짓점 {j} 에 만나는 변이 {len(nbrs)} 개입니다")
    a, b = (direction_angle(tangent(p, HPoint.from_complex(vertices[k]))) for k in nbrs)
    delta = abs(a - b) % (2 * math.pi)
    return min(delta, 2 * math.pi - delta)


def check_polygon(
    letters: Sequence[Isometry],
    inverse: Sequence[int],
    vertices: Sequence[complex],
    sides: Sequence[Tuple[int, int]],
) -> Tuple[Tuple[Tuple[int, ...], ...], Dict[str, float]]:
    """
    변 짝짓기 다각형 검증 (side k 는 letters[inverse[k]] 로 짝지어진 변에 간다).

    꼭짓점 순환마다 곱이 ±I 이고 내각 합이 2π 인지 확인한 뒤,
    가우스-보네 넓이 (n−2)π − Σ내각 와 V − E + F 로 센 오일러 특성수가 맞는지 본다.
    반환: (순환별 관계식, meta)
    """
    n = len(sides)
    pairing = [inverse[k] for k in range(n)]
    angles = [interior_angle(vertices, sides, j) for j in range(len(vertices))]

    relators: List[Tuple[int, ...]] = []
    seen: set = set()
    for j in range(len(vertices)):
        if j in seen:
            continue
        s = next(i for i, sd in enumerate(sides) if sd[0] == j)
        word, M, cycle = _vertex_cycle(letters, sides, vertices, pairing, j, s)
        if not _is_pm_identity(M):
            raise GroupValidationError(f"꼭짓점 {j} 순환의 곱이 ±I 가 아닙니다")
        total = sum(angles[v] for v in cycle)
        if abs(total - 2 * math.pi) > ANGLE_TOL:
            raise GroupValidationError(f"꼭짓점 {j} 순환의 내각 합 {total:.12f} ≠ 2π")
        seen.update(cycle)
        relators.append(tuple(word))

    area = (n - 2) * math.pi - sum(angles)
    euler = len(relators) - n // 2 + 1
    if area <= 0 or abs(area + 2 * math.pi * euler) > ANGLE_TOL:
        raise GroupValidationError(f"넓이 {area:.12f} 와 오일러 특성수 {euler} 가 맞지 않습니다")
    meta = {"area": area, "euler": float(euler), "vertex_cycles": float(len(relators)),
            "angle_sum": float(sum(angles))}
    return tuple(relators), meta


def regular_polygon(n: int = 8):
    """
    정 n 각형 대변 짝짓기 (내각 2π/n). 반환: (letters, inverse, vertices, sides, inradius, circumradius)
    """
    inradius = math.acosh(1.0 / math.tan(math.pi / n))          # cosh r = cot(π/n)
    circumradius = math.acosh(1.0 / math.tan(math.pi / n) ** 2)  # cosh R = cot²(π/n)

    shift = Isometry.diag(math.exp(inradius))                     # 허수축 방향 2r 평행이동
    letters: List[Isometry] = []
    for k in range(n):
        K = rotation(k * math.pi / n)
        letters.append(K @ shift @ K.inverse())
    inverse = tuple((k + n // 2) % n for k in range(n))

    # 꼭짓점: 원판 반지름 tanh(R/2), 각 (2j+1)π/n
    rho = math.tanh(circumradius / 2)
    vertices = [from_disk(rho * complex(math.cos((2 * j + 1) * math.pi / n), math.sin((2 * j + 1) * math.pi / n)))
                for j in range(n)]

    # 변: letters[k] 의 '반 이동' 으로 얻은 변 중점 방향을 기준으로 양 옆 꼭짓점 결정
    half = Isometry.diag(math.exp(inradius / 2))
    sides: List[Tuple[int, int]] = []
    for k in range(n):
        K = rotation(k * math.pi / n)
        mid = to_disk(mobius_point(K @ half @ K.inverse(), ORIGIN).z)
        phi = math.atan2(mid.imag, mid.real) % (2 * math.pi)
        j = int(round(phi / (2 * math.pi / n))) % n   # 중점 각 φ = 2πj/n, 양 옆 꼭짓점 V_{j-1}, V_j
        sides.append(((j - 1) % n, j))
    return letters, inverse, vertices, sides, inradius, circumradius


def build_bolza() -> GroupSpec:
    n = 8
    letters, inverse, vertices, sides, inradius, circumradius = regular_polygon(n)
    labels = tuple(f"g{k}" for k in range(n))

    relators, meta = check_polygon(letters, inverse, vertices, sides)
    if meta["euler"] != -2.0:
        raise GroupValidationError(f"bolza: 오일러 특성수 {meta['euler']} ≠ -2")
    if not all(g.is_hyperbolic() for g in letters):
        raise GroupValidationError("bolza: 쌍곡 원소가 아닌 생성원이 있습니다")

    G = GroupSpec(
        name="bolza",
        letters=tuple(letters),
        inverse=inverse,
        labels=labels,
        relators=relators,
        cocompact=True,
        center=ORIGIN,
        tile_radius=circumradius,
        meta={"inradius": inradius, "circumradius": circumradius, **meta},
    )
    validate_group(G)
    check_discrete(G)
    return G



# =============================
# 알파벳 구성
# =============================
def _alphabet(gens: Sequence[Isometry], names: Optional[Sequence[str]] = None):
    """생성원 목록 → 역원에 닫힌 알파벳 (이미 포함된 역원은 재사용)"""
    letters = list(gens)
    labels = list(names) if names else [chr(ord("a") + i) if i < 26 else f"x{i}" for i in range(len(gens))]
    inverse: List[Optional[int]] = [None] * len(letters)
    for i, g in enumerate(list(letters)):
        if inverse[i] is not None:
            continue
        inv = g.inverse()
        j = next((k for k, h in enumerate(letters) if k != i and h.is_close(inv, 1e-9)), None)
        if j is None:
            letters.append(inv)
            lab = labels[i]
            labels.append(lab.upper() if lab.islower() else f"{lab}^-1")
            inverse.append(i)
            j = len(letters) - 1
        inverse[i], inverse[j] = j, i
    return tuple(letters), tuple(int(k) for k in inverse), tuple(labels)


def make_group(
    name: str,
    gens: Sequence[Isometry],
    *,
    names: Optional[Sequence[str]] = None,
    relators: Sequence[Sequence[int]] = (),
    cocompact: bool = False,
    center: Optional[HPoint] = None,
    tile_radius: Optional[float] = None,
) -> GroupSpec:
    letters, inverse, labels = _alphabet(gens, names)
    G = GroupSpec(
        name=name,
        letters=letters,
        inverse=inverse,
        labels=labels,
        relators=tuple(tuple(int(k) for k in r) for r in relators),
        cocompact=cocompact,
        center=center,
        tile_radius=tile_radius,
    )
    return validate_group(G)


def build_cyclic_demo() -> GroupSpec:
    return make_group("cyclic-demo", [Isometry.diag(math.e)], names=["t"])


def build_free2_demo() -> GroupSpec:
    # 서로소인 isometric circle 을 갖는 Schottky 쌍
    a = Isometry(3.0, 4.0, 2.0, 3.0)
    b = Isometry(3.0, 1.0, 8.0, 3.0)
    return make_group("free2-demo", [a, b], names=["a", "b"])


BUILTINS = {
    "bolza": build_bolza,
    "cyclic-demo": build_cyclic_demo,
    "free2-demo": build_free2_demo,
}
_CACHE: Dict[str, GroupSpec] = {}


# =============================
# 로딩 / JSON
# =============================
def group_from_dict(rec: dict) -> GroupSpec:
    try:
        name = str(rec.get("name", "custom"))
        gens = []
        for row in rec["generators"]:
            if len(row) != 4:
                raise ConfigError(f"생성원은 4-tuple(행 우선) 이어야 합니다: {row}")
            try:
                gens.append(Isometry(*(float(v) for v in row)))
            except DomainError as e:
                raise GroupValidationError(f"생성원 {row}: {e}") from e
        center = rec.get("center")
        return make_group(
            name,
            gens,
            names=rec.get("labels"),
            relators=rec.get("relators", []) or [],
            cocompact=bool(rec.get("cocompact", False)),
            center=HPoint(*center) if center else None,
            tile_radius=rec.get("tile_radius"),
        )
    except KeyError as e:
        raise ConfigError(f"그룹 설정에 필수 키가 없습니다: {e}") from e


def group_to_dict(G: GroupSpec) -> dict:
    rec = {
        "name": G.name,
        "generators": [[g.a, g.b, g.c, g.d] for g in G.letters],
        "labels": list(G.labels),
        "relators": [list(r) for r in G.relators],
        "cocompact": G.cocompact,
    }
    if G.center is not None:
        rec["center"] = [G.center.x, G.center.y]
    if G.tile_radius is not None:
        rec["tile_radius"] = G.tile_radius
    return rec


def load_group(spec: Union[str, Path, dict]) -> GroupSpec:
    """내장 이름, JSON 경로, 또는 dict 레코드 → 검증된 GroupSpec"""
    if isinstance(spec, dict):
        return group_from_dict(spec)
    key = str(spec)
    if key in BUILTINS:
        if key not in _CACHE:
            _CACHE[key] = BUILTINS[key]()
            log("DEBUG", f"builtin group '{key}' 생성: {_CACHE[key].n_letters} letters", scope="GROUP")
        return _CACHE[key]
    if not Path(key).exists():
        raise ConfigError(f"알 수 없는 그룹: '{key}' (내장: {', '.join(BUILTINS)})")
    return group_from_json(key)


def group_to_json(G: GroupSpec, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(group_to_dict(G), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def group_from_json(path: Union[str, Path]) -> GroupSpec:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"그룹 JSON 파일이 없습니다: {path}")
    return group_from_dict(json.loads(path.read_text(encoding="utf-8")))
