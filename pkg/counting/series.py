# -*- coding: utf-8 -*-
"""
counting/series.py

세 가지 계수 실험 (+ 점-대-점 조정 계수).
각 실험은 T_max 에서 한 번만 열거하고, 거리/높이를 정렬해 모든 T 를 누적 개수로 얻는다.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from utils_common import DomainError, log, progress_enabled
from hyp2core.points import HPoint, Isometry
from hyp2core.geometry import dist, mobius_many, orbit_dist_many
from fuchsian.groups import GroupSpec
from fuchsian.elements import GroupElement, Word
from fuchsian.enumerate import BallEnumeration, MatrixIndex, enumerate_ball
from fuchsian.conjugacy import (
    ConjClass,
    CosetRep,
    axis_coordinates_many,
    canonical_word,
    canonicalize_many,
    depths_many,
)
from adjust.adjustment import (
    AdjustmentPair,
    HeightCandidate,
    PointPair,
    adjusted_height,
    adjusted_height_on_axis,
    adjusted_height_pp,
)

KINDS = ("orbit", "conj", "adjusted", "adjusted-pp")
WINDOW_EPS = 1e-9
# 이 깊이 이하의 g·x 는 축 위로 본다
ON_AXIS_DEPTH = 1e-10


@dataclass
class CountSeries:
    kind: str
    T_grid: np.ndarray
    N: np.ndarray
    complete: np.ndarray
    params: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"알 수 없는 series kind: {self.kind}")
        self.T_grid = np.asarray(self.T_grid, dtype=float)
        self.N = np.asarray(self.N, dtype=np.int64)
        self.complete = np.asarray(self.complete, dtype=bool)
        if not (len(self.T_grid) == len(self.N) == len(self.complete)):
            raise ValueError("T_grid / N / complete 길이가 다릅니다")
        if len(self.T_grid) > 1 and np.any(np.diff(self.T_grid) <= 0):
            raise ValueError("T_grid 는 증가해야 합니다")
        if len(self.N) > 1 and np.any(np.diff(self.N) < 0):
            raise ValueError("N 은 T 에 대해 비감소여야 합니다")

    def __len__(self) -> int:
        return len(self.T_grid)

    @property
    def all_complete(self) -> bool:
        return bool(self.complete.all())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"T": self.T_grid, "N": self.N, "complete": self.complete})

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.6f")
        return path

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "T": [round(float(t), 12) for t in self.T_grid],
            "N": [int(n) for n in self.N],
            "complete": [bool(c) for c in self.complete],
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, rec: dict) -> "CountSeries":
        return cls(rec["kind"], rec["T"], rec["N"], rec.get("complete", [True] * len(rec["T"])), rec.get("params", {}))

    @classmethod
    def from_frame(cls, df: pd.DataFrame, kind: str = "orbit", params: Optional[dict] = None) -> "CountSeries":
        complete = df["complete"].astype(bool) if "complete" in df else np.ones(len(df), dtype=bool)
        return cls(kind, df["T"].to_numpy(float), df["N"].to_numpy(np.int64), complete, params or {})


def make_grid(T_min: float, T_max: float, step: float = 0.5) -> np.ndarray:
    n = int(math.floor((T_max - T_min) / step + 1e-9)) + 1
    return T_min + step * np.arange(n)


def _grid(T_grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(sorted(float(t) for t in T_grid), dtype=float)
    if len(g) == 0:
        raise ValueError("T_grid 가 비어 있습니다")
    if g[0] < 0:
        raise ValueError("T 는 0 이상이어야 합니다")
    return g


def _cumulative(values: np.ndarray, T_grid: np.ndarray) -> np.ndarray:
    return np.searchsorted(np.sort(values), T_grid, side="right").astype(np.int64)


def _cap(G: GroupSpec, word_cap: Optional[int]) -> int:
    return int(word_cap) if word_cap else (64 if G.can_prune else 12)


# =============================
# Γ-궤도
# =============================
def count_orbit(
    G: GroupSpec, x: HPoint, y: HPoint, T_grid: Sequence[float], word_cap: Optional[int] = None, **kw
) -> CountSeries:
    grid = _grid(T_grid)
    ball = enumerate_ball(G, x, y, float(grid[-1]), _cap(G, word_cap), **kw)
    return CountSeries(
        "orbit",
        grid,
        ball.counts(grid),
        [ball.certified(t) for t in grid],
        {"group": G.name, "x": [x.x, x.y], "y": [y.x, y.y], "certificate": ball.certificate()},
    )


# =============================
# 켤레류 궤도 (⟨γ̂⟩-잉여류)
# =============================
def conj_radius(c: ConjClass, x: HPoint, y: HPoint, T: float) -> float:
    """canonical 대표 g 의 d(y₀, g·x) 상한"""
    s = math.sinh(c.translation_length / 2.0)
    ratio = math.sinh((T + dist(x, y)) / 2.0) / s
    d_max = math.acosh(max(1.0, ratio))
    return d_max + c.root_length + 1e-6


def _window_reps(
    G: GroupSpec, c: ConjClass, ball: BallEnumeration, x: HPoint, *, with_words: bool = False
) -> Tuple[np.ndarray, List[Word]]:
    """창 [0, ℓ̂) 근처의 원소를 정규화하고 행렬 중복 제거 → (대표 행렬 (K,2,2), 대표 단어)"""
    s = axis_coordinates_many(c, ball.mats, x)
    near = np.nonzero((s >= -WINDOW_EPS) & (s < c.root_length + WINDOW_EPS))[0]
    reps, _, n = canonicalize_many(c, ball.mats[near], x)
    rows = MatrixIndex().insert_many(reps, 0)
    if not with_words:
        return reps[rows], []
    return reps[rows], [canonical_word(G, c, ball.word(int(near[r])), int(n[r])) for r in rows]


def _conj_distances(c: ConjClass, reps: np.ndarray, x: HPoint, y: HPoint) -> np.ndarray:
    gamma = c.gamma.mat.as_array()
    gx = mobius_many(reps, x.z)
    gyg = np.einsum("ij,njk->nik", gamma, reps)
    den = gyg[:, 1, 0] * y.z + gyg[:, 1, 1]
    w = (gyg[:, 0, 0] * y.z + gyg[:, 0, 1]) / den
    im_w = y.y / np.abs(den) ** 2
    im_x = x.y / np.abs(reps[:, 1, 0] * x.z + reps[:, 1, 1]) ** 2
    return 2.0 * np.arcsinh(np.abs(gx - w) / (2.0 * np.sqrt(im_x * im_w)))


def count_conj(
    G: GroupSpec,
    c: ConjClass,
    x: HPoint,
    y: HPoint,
    T_grid: Sequence[float],
    word_cap: Optional[int] = None,
    *,
    cross_check: bool = False,
    **kw,
) -> CountSeries:
    grid = _grid(T_grid)
    radius = conj_radius(c, x, y, float(grid[-1]))
    ball = enumerate_ball(G, c.anchor, x, radius, _cap(G, word_cap), **kw)
    reps, _ = _window_reps(G, c, ball, x)
    d = _conj_distances(c, reps, x, y)
    N = _cumulative(d, grid)
    params = {
        "group": G.name,
        "class": c.describe(G),
        "x": [x.x, x.y],
        "y": [y.x, y.y],
        "radius": radius,
        "cosets_in_window": int(len(reps)),
        "certificate": ball.certificate(),
    }
    if cross_check:
        direct = direct_conj_counts(c, ball, x, y, grid)
        params["direct_N"] = [int(n) for n in direct]
        params["direct_equal"] = bool(np.array_equal(direct, N))
        if not params["direct_equal"]:
            log("WARN", f"coset/direct 불일치: {N.tolist()} vs {direct.tolist()}", scope="CONJ")
    complete = np.full(len(grid), ball.certified(radius))
    return CountSeries("conj", grid, N, complete, params)


def direct_conj_counts(c: ConjClass, ball: BallEnumeration, x: HPoint, y: HPoint, grid: np.ndarray) -> np.ndarray:
    """서로 다른 켤레 g⁻¹γg 의 y 궤도점 개수 (공 전체에서 행렬 중복 제거)"""
    gamma = c.gamma.mat.as_array()
    mats = ball.mats
    inv = np.stack([mats[:, 1, 1], -mats[:, 0, 1], -mats[:, 1, 0], mats[:, 0, 0]], axis=1).reshape(-1, 2, 2)
    conj = np.einsum("nij,jk,nkl->nil", inv, gamma, mats)
    d = orbit_dist_many(conj, x, y)
    keep = d <= grid[-1] + 1e-9
    conj, d = conj[keep], d[keep]
    rows = MatrixIndex().insert_many(conj, 0)
    return _cumulative(d[rows], grid)


# =============================
# 조정 계수
# =============================
def count_adjusted(
    G: GroupSpec,
    c: ConjClass,
    pair: Optional[AdjustmentPair],
    x: HPoint,
    T_grid: Sequence[float],
    word_cap: Optional[int] = None,
    *,
    candidate: Optional[HeightCandidate] = None,
    y: Optional[HPoint] = None,
    **kw,
) -> CountSeries:
    """
    B^h_γ(T) 의 크기. pair 가 주어지면 h = d(gx,L) − F₁ − F₂,
    candidate 가 주어지면 외부 높이 후보를 그대로 사용.
    """
    if (pair is None) == (candidate is None):
        raise ValueError("pair 와 candidate 중 정확히 하나를 지정해야 합니다")
    grid = _grid(T_grid)
    y = x if y is None else y
    T_max = float(grid[-1])
    slack = (pair.f1_bound + pair.f2_bound) if pair is not None else candidate.bound(c, x, y)
    depth_cut = T_max + slack + 1e-9
    radius = depth_cut + c.root_length + 1e-6
    ball = enumerate_ball(G, c.anchor, x, radius, _cap(G, word_cap), **kw)
    reps, words = _window_reps(G, c, ball, x, with_words=True)
    depths = depths_many(c, reps, x)
    keep = depths <= depth_cut
    reps, depths, words = reps[keep], depths[keep], [w for w, k in zip(words, keep) if k]
    s_all = axis_coordinates_many(c, reps, x)

    heights: List[float] = []
    on_axis = degenerate = 0
    rows = list(zip(reps, words, s_all, depths))
    for m, w, s, depth in tqdm(rows, desc="heights", disable=not progress_enabled(), leave=False):
        rep = CosetRep(GroupElement(Isometry.from_matrix(m, normalize=True), w), float(s))
        if candidate is not None:
            try:
                heights.append(candidate(c, rep.g, x, y))
            except DomainError:
                degenerate += 1
        elif depth <= ON_AXIS_DEPTH:
            # 축 위의 g·x: d = 0, 양쪽 극한 평균
            heights.append(adjusted_height_on_axis(c, pair, rep, x).h)
            on_axis += 1
        else:
            heights.append(adjusted_height(c, pair, rep, x).h)
    if on_axis:
        log("INFO", f"축 위의 g·x {on_axis} 개는 d = 0 의 양쪽 극한 평균으로 계수", scope="ADJ")
    if degenerate:
        log("WARN", f"후보 높이가 정의되지 않는 g·x {degenerate} 개는 계수에서 제외됨", scope="ADJ")
    N = _cumulative(np.asarray(heights, dtype=float), grid)
    params = {
        "group": G.name,
        "class": c.describe(G),
        "pair": pair.label if pair is not None else candidate.name,
        "x": [x.x, x.y],
        "radius": radius,
        "on_axis": on_axis,
        "degenerate": degenerate,
        "certificate": ball.certificate(),
    }
    return CountSeries("adjusted", grid, N, np.full(len(grid), ball.certified(radius)), params)


def count_adjusted_pp(
    G: GroupSpec,
    pair: PointPair,
    x: HPoint,
    y: HPoint,
    T_grid: Sequence[float],
    word_cap: Optional[int] = None,
    **kw,
) -> CountSeries:
    """h(g) = d(x, gy) − F₁(v₁) − F₂(v₂) ≤ T 인 g ∈ Γ 의 개수"""
    grid = _grid(T_grid)
    radius = float(grid[-1]) + pair.f1_bound + pair.f2_bound + 1e-9
    ball = enumerate_ball(G, x, y, radius, _cap(G, word_cap), **kw)
    idx = ball.indices(radius)
    heights = [
        adjusted_height_pp(pair, ball.element(int(i)), x, y).h
        for i in tqdm(idx, desc="heights", disable=not progress_enabled(), leave=False)
    ]
    N = _cumulative(np.asarray(heights, dtype=float), grid)
    params = {
        "group": G.name,
        "pair": pair.label,
        "x": [x.x, x.y],
        "y": [y.x, y.y],
        "certificate": ball.certificate(),
    }
    return CountSeries("adjusted-pp", grid, N, np.full(len(grid), ball.certified(radius)), params)
