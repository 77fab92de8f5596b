# -*- coding: utf-8 -*-
"""
fuchsian/enumerate.py

공 B_T(x) 안의 궤도 원소 열거 (BFS + 행렬 중복 제거).

- 프런티어를 numpy 배치로 확장 (einsum), 되돌아가는 글자는 건너뜀
- 중복 제거: 부호 정규화 + Frobenius 정규화 행렬을 1e-7 격자 버킷으로 (이웃 버킷 탐색)
- 가지치기: GroupSpec 에 center/tile_radius 가 있으면 d(x, g·y) > T + slack 인 접두어 제거
  slack = tile_radius + 2(d(x,c) + d(y,c)). 타일 인접 사슬의 모든 접두어가 이 안에 머문다.
  없으면 순수 word-cap 모드.
- 프런티어를 단어 사전순으로 유지 → 각 원소의 단어는 shortlex 최소 단어
- 완전성 인증: 프런티어 소진, 또는 cap−2, cap−1, cap 에서의 개수가 일치
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from utils_common import EnumerationError, log, worker_count, progress_enabled
from hyp2core.points import HPoint, Isometry
from hyp2core.geometry import dist, orbit_dist_many
from .groups import GroupSpec
from .elements import GroupElement

DEDUP_RTOL = 1e-7
EDGE_FRAC = 0.01
MAX_ELEMENTS = 5_000_000
CHUNK = 20_000


# =============================
# 행렬 인덱스
# =============================
def canonical_rows(mats: np.ndarray) -> np.ndarray:
    """(N,2,2) → (N,4) 부호 정규화 + Frobenius 정규화"""
    flat = mats.reshape(len(mats), 4)
    norm = np.linalg.norm(flat, axis=1)
    big = np.abs(flat) > 1e-12 * norm[:, None]
    first = np.argmax(big, axis=1)
    sign = np.sign(flat[np.arange(len(flat)), first])
    sign[sign == 0] = 1.0
    return flat * (sign / norm)[:, None]


class MatrixIndex:
    """정규화 행렬의 상대오차 rtol 격자 버킷 인덱스 (insert-if-absent)"""

    def __init__(self, rtol: float = DEDUP_RTOL):
        self.rtol = rtol
        self._table: Dict[Tuple[int, int, int, int], int] = {}

    def __len__(self) -> int:
        return len(self._table)

    def _keys(self, rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        scaled = rows / self.rtol
        keys = np.floor(scaled).astype(np.int64)
        frac = scaled - keys
        return keys, frac

    def _lookup(self, key: np.ndarray, frac: np.ndarray) -> Optional[int]:
        hit = self._table.get(tuple(int(k) for k in key))
        if hit is not None:
            return hit
        offsets = []
        for f in frac:
            if f < EDGE_FRAC:
                offsets.append((0, -1))
            elif f > 1.0 - EDGE_FRAC:
                offsets.append((0, 1))
            else:
                offsets.append((0,))
        for off in itertools.product(*offsets):
            if not any(off):
                continue
            hit = self._table.get(tuple(int(k + o) for k, o in zip(key, off)))
            if hit is not None:
                return hit
        return None

    def lookup(self, mats: np.ndarray) -> np.ndarray:
        """각 행렬의 id (없으면 -1)"""
        keys, frac = self._keys(canonical_rows(mats))
        out = np.full(len(mats), -1, dtype=np.int64)
        for i in range(len(mats)):
            hit = self._lookup(keys[i], frac[i])
            if hit is not None:
                out[i] = hit
        return out

    def insert_many(self, mats: np.ndarray, start_id: int) -> np.ndarray:
        """
        새 행렬이면 start_id 부터 순서대로 id 부여.
        반환: 새로 추가된 행의 인덱스 (입력 순서 유지)
        """
        if len(mats) == 0:
            return np.zeros(0, dtype=np.int64)
        keys, frac = self._keys(canonical_rows(mats))
        # 배치 내부의 정확히 같은 키는 첫 등장만
        _, first = np.unique(keys, axis=0, return_index=True)
        first.sort()
        new_rows: List[int] = []
        nid = start_id
        for i in first:
            if self._lookup(keys[i], frac[i]) is None:
                self._table[tuple(int(k) for k in keys[i])] = nid
                new_rows.append(int(i))
                nid += 1
        return np.asarray(new_rows, dtype=np.int64)


# =============================
# 결과
# =============================
@dataclass
class BallEnumeration:
    group: GroupSpec
    x: HPoint
    y: HPoint
    T: float
    word_cap: int
    pruned: bool
    mats: np.ndarray            # (N,2,2)
    dists: np.ndarray           # d(x, g·y)
    parents: np.ndarray
    letters: np.ndarray
    lengths: np.ndarray
    exhausted: bool
    cap_reached: bool = False
    _words: Dict[int, Tuple[int, ...]] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.mats)

    # ---- 단어 복원 -----------------------------------------------------------
    def word(self, i: int) -> Tuple[int, ...]:
        if i in self._words:
            return self._words[i]
        out: List[int] = []
        j = int(i)
        while self.parents[j] >= 0:
            out.append(int(self.letters[j]))
            j = int(self.parents[j])
        w = tuple(reversed(out))
        self._words[i] = w
        return w

    def element(self, i: int) -> GroupElement:
        return GroupElement(Isometry.from_matrix(self.mats[i], normalize=True), self.word(i))

    def indices(self, T: Optional[float] = None) -> np.ndarray:
        T = self.T if T is None else T
        return np.nonzero(self.dists <= T)[0]

    def elements(self, T: Optional[float] = None) -> List[GroupElement]:
        """d(x, g·y) ≤ T 인 원소, (단어 길이, 사전순) 정렬"""
        idx = self.indices(T)
        out = [self.element(int(i)) for i in idx]
        out.sort(key=lambda g: (len(g.word), g.word))
        return out

    # ---- 개수 / 인증 ---------------------------------------------------------
    def count(self, T: float, cap: Optional[int] = None) -> int:
        mask = self.dists <= T
        if cap is not None:
            mask &= self.lengths <= cap
        return int(mask.sum())

    def counts(self, T_grid: Sequence[float]) -> np.ndarray:
        srt = np.sort(self.dists)
        return np.searchsorted(srt, np.asarray(T_grid, dtype=float), side="right").astype(np.int64)

    def cap_counts(self, T: float) -> Dict[int, int]:
        caps = [c for c in (self.word_cap - 2, self.word_cap - 1, self.word_cap) if c >= 0]
        return {c: self.count(T, c) for c in caps}

    def certified(self, T: Optional[float] = None) -> bool:
        T = self.T if T is None else T
        if T > self.T + 1e-12:
            return False
        if self.exhausted:
            return True
        vals = list(self.cap_counts(T).values())
        return len(vals) == 3 and len(set(vals)) == 1

    @property
    def complete(self) -> bool:
        return self.certified(self.T)

    def certificate(self) -> dict:
        return {
            "mode": "pruned" if self.pruned else "word-cap",
            "exhausted": bool(self.exhausted),
            "cap_counts": {str(k): v for k, v in self.cap_counts(self.T).items()},
            "complete": bool(self.complete),
            "visited": int(len(self)),
        }


# =============================
# BFS
# =============================
def prune_slack(G: GroupSpec, x: HPoint, y: HPoint) -> float:
    c = G.center
    return float(G.tile_radius) + 2.0 * (dist(x, c) + dist(y, c)) + 1e-9


def _expand(frontier: np.ndarray, last: np.ndarray, L: np.ndarray, inv: np.ndarray,
            x: HPoint, y: HPoint):
    m, n = len(frontier), len(L)
    children = np.einsum("mij,njk->mnik", frontier, L).reshape(m * n, 2, 2)
    parent_pos = np.repeat(np.arange(m), n)
    letter = np.tile(np.arange(n), m)
    keep = letter != np.where(last >= 0, inv[np.maximum(last, 0)], -1)[parent_pos]
    children, parent_pos, letter = children[keep], parent_pos[keep], letter[keep]
    # 반올림 누적 방지: det = 1 로 재정규화
    det = children[:, 0, 0] * children[:, 1, 1] - children[:, 0, 1] * children[:, 1, 0]
    children = children / np.sqrt(det)[:, None, None]
    return children, parent_pos, letter, orbit_dist_many(children, x, y)


def enumerate_ball(
    G: GroupSpec,
    x: HPoint,
    y: HPoint,
    T: float,
    word_cap: int,
    *,
    prune: Optional[bool] = None,
    max_elements: int = MAX_ELEMENTS,
    workers: Optional[int] = None,
) -> BallEnumeration:
    if T < 0:
        raise ValueError(f"T 는 0 이상이어야 합니다: {T}")
    if word_cap < 1:
        raise ValueError(f"word_cap 은 1 이상이어야 합니다: {word_cap}")
    if prune is None:
        prune = G.can_prune
    if prune and not G.can_prune:
        raise ValueError(f"{G.name}: center/tile_radius 가 없어 가지치기를 할 수 없습니다")
    bound = T + prune_slack(G, x, y) if prune else np.inf
    workers = workers or worker_count()

    L = G.letter_array()
    inv = np.asarray(G.inverse, dtype=np.int64)
    index = MatrixIndex()
    eye = np.eye(2)[None]
    index.insert_many(eye, 0)

    mats = [eye]
    dists = [np.array([dist(x, y)])]
    parents = [np.array([-1])]
    letters = [np.array([-1])]
    lengths = [np.array([0])]
    total = 1

    frontier, f_ids, f_last = eye, np.array([0]), np.array([-1])
    depth = 0
    exhausted = False
    log("DEBUG", f"{G.name}: T={T:.3f} cap={word_cap} prune={prune} bound={bound:.3f} workers={workers}", scope="ENUM")

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        with tqdm(total=word_cap, desc=f"BFS {G.name}", disable=not progress_enabled(), leave=False) as pbar:
            while depth < word_cap:
                if len(frontier) == 0:
                    exhausted = True
                    break
                chunks = [slice(s, s + CHUNK) for s in range(0, len(frontier), CHUNK)]
                jobs = [(frontier[c], f_last[c], L, inv, x, y) for c in chunks]
                results = list(pool.map(lambda a: _expand(*a), jobs)) if pool else [_expand(*a) for a in jobs]

                new_m, new_ids, new_last, new_par, new_d = [], [], [], [], []
                for c, (ch, ppos, let, dd) in zip(chunks, results):
                    ok = dd <= bound
                    ch, ppos, let, dd = ch[ok], ppos[ok], let[ok], dd[ok]
                    rows = index.insert_many(ch, total)
                    if len(rows) == 0:
                        continue
                    ids = np.arange(total, total + len(rows))
                    total += len(rows)
                    new_m.append(ch[rows])
                    new_ids.append(ids)
                    new_last.append(let[rows])
                    new_par.append(f_ids[c][ppos[rows]])
                    new_d.append(dd[rows])
                if total > max_elements:
                    raise EnumerationError(f"{G.name}: 방문 원소가 {max_elements} 개를 넘었습니다 (T={T}, cap={word_cap})")

                depth += 1
                pbar.update(1)
                if not new_m:
                    frontier = np.zeros((0, 2, 2))
                    f_ids = f_last = np.zeros(0, dtype=np.int64)
                    continue
                frontier = np.concatenate(new_m)
                f_ids = np.concatenate(new_ids)
                f_last = np.concatenate(new_last)
                mats.append(frontier)
                dists.append(np.concatenate(new_d))
                parents.append(np.concatenate(new_par))
                letters.append(f_last)
                lengths.append(np.full(len(frontier), depth))
            else:
                exhausted = len(frontier) == 0
    finally:
        if pool:
            pool.shutdown()

    res = BallEnumeration(
        group=G, x=x, y=y, T=float(T), word_cap=int(word_cap), pruned=bool(prune),
        mats=np.concatenate(mats), dists=np.concatenate(dists),
        parents=np.concatenate(parents).astype(np.int64),
        letters=np.concatenate(letters).astype(np.int64),
        lengths=np.concatenate(lengths).astype(np.int64),
        exhausted=exhausted,
        cap_reached=not exhausted,
    )
    if not res.complete:
        log("WARN", f"{G.name}: 열거가 인증되지 않았습니다 (T={T}, cap={word_cap}, {res.cap_counts(T)})", scope="ENUM")
    log("DEBUG", f"{G.name}: visited={len(res)} in-ball={res.count(T)} depth={depth}", scope="ENUM")
    return res


def ball_elements(G: GroupSpec, x: HPoint, y: HPoint, T: float, word_cap: int, **kw) -> List[GroupElement]:
    return enumerate_ball(G, x, y, T, word_cap, **kw).elements(T)
