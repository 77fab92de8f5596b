# -*- coding: utf-8 -*-
# fuchsian/elements.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from utils_common import DomainError
from hyp2core.points import Isometry
from .groups import GroupSpec, word_matrix, format_word

WORD_RTOL = 1e-6

Word = Tuple[int, ...]


@dataclass(frozen=True)
class GroupElement:
    mat: Isometry
    word: Word = ()

    def __len__(self) -> int:
        return len(self.word)

    def label(self, G: GroupSpec) -> str:
        return format_word(G, self.word)


def identity_element() -> GroupElement:
    return GroupElement(Isometry.identity(), ())


def word_product(G: GroupSpec, word: Sequence[int]) -> GroupElement:
    word = tuple(int(k) for k in word)
    return GroupElement(Isometry.from_matrix(word_matrix(G.letters, word), normalize=True), word)


def reduce_word(G: GroupSpec, word: Sequence[int]) -> Word:
    """자유 소거 (x x⁻¹ 제거)"""
    out: list = []
    for k in word:
        if out and G.inverse[out[-1]] == k:
            out.pop()
        else:
            out.append(int(k))
    return tuple(out)


def multiply(G: GroupSpec, g: GroupElement, h: GroupElement) -> GroupElement:
    return GroupElement(g.mat @ h.mat, reduce_word(G, g.word + h.word))


def inverse(G: GroupSpec, g: GroupElement) -> GroupElement:
    return GroupElement(g.mat.inverse(), tuple(G.inverse[k] for k in reversed(g.word)))


def power(G: GroupSpec, g: GroupElement, n: int) -> GroupElement:
    if n == 0:
        return identity_element()
    base = g if n > 0 else inverse(G, g)
    out = base
    for _ in range(abs(n) - 1):
        out = multiply(G, out, base)
    return out


def word_matches(G: GroupSpec, g: GroupElement, rtol: float = WORD_RTOL) -> bool:
    """알파벳 곱(word) 과 mat 이 상대오차 rtol 이내로 일치하는지"""
    m = word_matrix(G.letters, g.word)
    p = g.mat.as_array()
    scale = max(np.linalg.norm(m), np.linalg.norm(p))
    return bool(min(np.linalg.norm(m - p), np.linalg.norm(m + p)) <= rtol * scale)


def require_hyperbolic(g: GroupElement, eps: float = 1e-9) -> None:
    if not g.mat.is_hyperbolic(eps):
        kind = "identity" if g.mat.is_identity() else ("parabolic" if abs(abs(g.mat.trace) - 2) <= eps else "elliptic")
        raise DomainError(f"쌍곡 원소가 아닙니다 ({kind}, |tr|={abs(g.mat.trace):.12g})")
