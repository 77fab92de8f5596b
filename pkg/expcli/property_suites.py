# -*- coding: utf-8 -*-
"""
expcli/property_suites.py

기하/조정 함수의 수치 성질 검사 모음.
각 suite 는 (rng, samples) → SuiteResult. 상수는 표본 최댓값으로 "적합"해서 보고한다.

  busemann            cocycle, 반대칭, |β| ≤ d, 절단 극한과 일치
  visual              대칭, 기준점 변경 e^{±d(x,y)}, 절단 극한과 일치
  projection          수선의 발, 직교성, 최근접성, 축에서 먼 점의 사영 수축
  holder              ζ ↦ P_L(ζ) 의 ½-Hölder 연속성 (d_o 기준)
  convergence         같은 점에서 출발한 두 측지선의 수렴
  busemann-distance   d(z,x) − d(z,y) → β(ζ,x,y) 의 지수 수렴
  regularity          β 의 점 변수 Lipschitz, ζ 변수 Hölder 기울기
  midpoint            [P_L ζ, γP_L ζ] 의 중점과 (ζ, γζ) 의 거리
  isometry            거리 보존, 동변성, 흐름 군 법칙
  adjust              F₁ vs 극한형, γ̂-불변성, |F₂| ≤ d(x,y)
  residual            R(g) 의 깊이에 대한 지수 감소
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from utils_common import ConfigError, DomainError, log
from hyp2core.points import HPoint, HBoundary, Geodesic, Isometry, ORIGIN
from hyp2core.geometry import (
    apply,
    busemann,
    busemann_limit,
    direction_angle,
    dist,
    flow,
    geodesic_frame,
    midpoint,
    mobius_point,
    point_on_geodesic,
    project,
    project_boundary,
    rotation,
    tangent,
    tangent_from_angle,
    visual_dist,
    visual_dist_limit,
)
from fuchsian.groups import load_group
from fuchsian.elements import word_product
from fuchsian.conjugacy import conj_data, coset_canonicalize, select_class_element
from adjust.adjustment import NormalVector, eval_F1, eval_F1_limit, eval_F2, reduction_residual

TWO_PI = 2.0 * math.pi
ORACLE_SAMPLES = 500
F1_ORACLE_SAMPLES = 200
CONTRACTION_MAX = 10.0
HOLDER_C_MAX = 100.0
HOLDER_SLOPE_MIN = 0.45
MIDPOINT_BOUND = 2.0
RESIDUAL_SLOPE_MAX = -0.4
RESIDUAL_DEEP_MAX = 1e-2


# =============================
# 결과 타입
# =============================
@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float          # 관측 최댓값 또는 적합 상수
    threshold: float
    worst: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": float(self.value),
            "threshold": float(self.threshold),
            "worst": self.worst,
        }


@dataclass
class SuiteResult:
    name: str
    samples: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "samples": self.samples,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _max_check(name: str, values: Sequence[float], threshold: float, cases: Sequence[dict]) -> CheckResult:
    """values 의 최댓값 ≤ threshold. worst 에 해당 표본 기록"""
    if len(values) == 0:
        return CheckResult(name, False, float("nan"), threshold, {"reason": "no samples"})
    arr = np.asarray(values, dtype=float)
    i = int(np.nanargmax(arr))
    v = float(arr[i])
    return CheckResult(name, bool(np.isfinite(v) and v <= threshold), v, threshold, cases[i])


def _slope_check(name: str, xs: Sequence[float], ys: Sequence[float], threshold: float, *, at_least: bool) -> CheckResult:
    """log-log (또는 x-log) 회귀 기울기 검사"""
    if len(xs) < 4:
        return CheckResult(name, False, float("nan"), threshold, {"reason": f"only {len(xs)} points"})
    res = stats.linregress(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
    slope = float(res.slope)
    ok = slope >= threshold if at_least else slope <= threshold
    return CheckResult(name, bool(ok), slope, threshold, {"n_points": len(xs), "stderr": float(res.stderr)})


# =============================
# 표본 생성
# =============================
def _pt(p: HPoint) -> List[float]:
    return [p.x, p.y]


def _bd(b: HBoundary):
    return "inf" if b.at_infinity else b.value


def random_point(rng: np.random.Generator, center: HPoint = ORIGIN, r_max: float = 5.0) -> HPoint:
    """center 중심 반지름 r_max 원판 안의 점 (방향 균등, 거리 균등)"""
    u = tangent_from_angle(center, float(rng.uniform(0.0, TWO_PI)))
    return flow(u, float(rng.uniform(0.0, r_max))).base


def random_near(rng: np.random.Generator, p: HPoint, r_min: float = 1e-3, r_max: float = 1.0) -> HPoint:
    u = tangent_from_angle(p, float(rng.uniform(0.0, TWO_PI)))
    return flow(u, float(rng.uniform(r_min, r_max))).base


def random_boundary(rng: np.random.Generator) -> HBoundary:
    return HBoundary.from_angle(float(rng.uniform(0.0, TWO_PI)))


def random_geodesic(rng: np.random.Generator, min_sep: float = 0.3) -> Geodesic:
    a = float(rng.uniform(0.0, TWO_PI))
    b = a + float(rng.uniform(min_sep, TWO_PI - min_sep))
    return Geodesic(HBoundary.from_angle(a), HBoundary.from_angle(b % TWO_PI))


def random_isometry(rng: np.random.Generator, t_max: float = 4.0) -> Isometry:
    """K(φ₁)·diag(e^{t/2})·K(φ₂)"""
    t = float(rng.uniform(0.0, t_max))
    return rotation(float(rng.uniform(0.0, math.pi))) @ Isometry.diag(math.exp(t / 2.0)) @ rotation(
        float(rng.uniform(0.0, math.pi))
    )


def point_at_depth(L: Geodesic, s: float, depth: float, side: int = 1) -> HPoint:
    """축 좌표 s (anchor = P_L(o)), 거리 depth 인 점. 정규화 좌표에서 |w| 고정, arg 로 깊이 조절"""
    A = geodesic_frame(L)
    anchor, _ = project(L, ORIGIN)
    r = abs(mobius_point(A, anchor).z) * math.exp(s)
    psi = math.atan(math.sinh(depth))
    w = HPoint(side * r * math.sin(psi), r * math.cos(psi))
    return mobius_point(A.inverse(), w)


# =============================
# suites
# =============================
def suite_busemann(rng: np.random.Generator, n: int) -> SuiteResult:
    anti, add, bound, oracle = [], [], [], []
    cases, o_cases = [], []
    for i in range(n):
        x, y, z = random_point(rng), random_point(rng), random_point(rng)
        zeta = random_boundary(rng)
        bxy = busemann(zeta, x, y)
        anti.append(abs(bxy + busemann(zeta, y, x)))
        add.append(abs(busemann(zeta, x, z) - bxy - busemann(zeta, y, z)))
        bound.append(abs(bxy) - dist(x, y))
        cases.append({"x": _pt(x), "y": _pt(y), "z": _pt(z), "zeta": _bd(zeta)})
        if i < ORACLE_SAMPLES:
            oracle.append(abs(bxy - busemann_limit(zeta, x, y, 30.0)))
            o_cases.append(cases[-1])
    return SuiteResult("busemann", n, [
        _max_check("antisymmetry", anti, 1e-9, cases),
        _max_check("cocycle", add, 1e-8, cases),
        _max_check("bounded-by-distance", bound, 1e-9, cases),
        _max_check("limit-oracle", oracle, 1e-6, o_cases),
    ])


def suite_visual(rng: np.random.Generator, n: int) -> SuiteResult:
    sym, diag, change, oracle = [], [], [], []
    cases, o_cases = [], []
    for i in range(n):
        x, y = random_point(rng, r_max=3.0), random_point(rng, r_max=3.0)
        zeta, eta = random_boundary(rng), random_boundary(rng)
        dx = visual_dist(x, zeta, eta)
        sym.append(abs(dx - visual_dist(x, eta, zeta)))
        diag.append(visual_dist(x, zeta, zeta))
        dy = visual_dist(y, zeta, eta)
        change.append(abs(math.log(dx / dy)) - dist(x, y) if dx > 0 and dy > 0 else 0.0)
        cases.append({"x": _pt(x), "y": _pt(y), "zeta": _bd(zeta), "eta": _bd(eta)})
        if i < ORACLE_SAMPLES:
            oracle.append(abs(dx - visual_dist_limit(x, zeta, eta, 30.0)))
            o_cases.append(cases[-1])
    return SuiteResult("visual", n, [
        _max_check("symmetry", sym, 1e-12, cases),
        _max_check("zero-on-diagonal", diag, 1e-12, cases),
        _max_check("basepoint-change", change, 1e-9, cases),
        _max_check("limit-oracle", oracle, 1e-6, o_cases),
    ])


def suite_projection(rng: np.random.Generator, n: int) -> SuiteResult:
    on_axis, ortho, nearest, ratio = [], [], [], []
    cases = []
    for _ in range(n):
        L = random_geodesic(rng)
        depth = float(rng.uniform(1.0, 10.0))
        x = point_at_depth(L, float(rng.uniform(-2.0, 2.0)), depth, int(rng.choice([-1, 1])))
        y = random_near(rng, x)
        fx, dx = project(L, x)
        fy, _ = project(L, y)
        on_axis.append(project(L, fx)[1])
        # 발에서 x 방향과 축 방향은 직교
        delta = direction_angle(tangent(fx, x)) - direction_angle(tangent(fx, L.pos))
        ortho.append(abs(math.cos(delta)))
        other = point_on_geodesic(L, float(rng.uniform(-3.0, 3.0)), project(L, ORIGIN)[0])
        nearest.append(dx - dist(x, other))
        ratio.append(dist(fx, fy) / (math.exp(-dx) * dist(x, y)))
        cases.append({"L": [_bd(L.neg), _bd(L.pos)], "x": _pt(x), "y": _pt(y), "depth": dx})
    return SuiteResult("projection", n, [
        _max_check("foot-on-axis", on_axis, 1e-9, cases),
        _max_check("orthogonal", ortho, 1e-8, cases),
        _max_check("nearest-point", nearest, 1e-9, cases),
        _max_check("contraction-constant", ratio, CONTRACTION_MAX, cases),
    ])


def suite_holder(rng: np.random.Generator, n: int) -> SuiteResult:
    log_do, log_dp, ratio, cases = [], [], [], []
    for _ in range(n):
        L = random_geodesic(rng)
        while True:
            theta = float(rng.uniform(0.0, TWO_PI))
            zeta = HBoundary.from_angle(theta)
            if min(visual_dist(ORIGIN, zeta, L.neg), visual_dist(ORIGIN, zeta, L.pos)) >= 0.2:
                break
        eps = 10.0 ** float(rng.uniform(-5.0, -1.3))
        eta = HBoundary.from_angle((theta + eps) % TWO_PI)
        d_o = visual_dist(ORIGIN, zeta, eta)
        dp = dist(project_boundary(L, zeta), project_boundary(L, eta))
        if d_o <= 0.0 or dp <= 1e-13:
            continue
        log_do.append(math.log(d_o))
        log_dp.append(math.log(dp))
        ratio.append(dp / math.sqrt(d_o))
        cases.append({"L": [_bd(L.neg), _bd(L.pos)], "zeta": _bd(zeta), "eta": _bd(eta)})
    return SuiteResult("holder", n, [
        _max_check("half-holder-constant", ratio, HOLDER_C_MAX, cases),
        _slope_check("holder-exponent", log_do, log_dp, HOLDER_SLOPE_MIN, at_least=True),
    ])


def suite_convergence(rng: np.random.Generator, n: int) -> SuiteResult:
    ratio, cases = [], []
    for _ in range(n):
        z = random_point(rng, r_max=3.0)
        R = float(rng.uniform(2.0, 12.0))
        d_target = float(rng.uniform(1e-3, 1.0))
        alpha = 2.0 * math.asin(min(1.0, math.sinh(d_target / 2.0) / math.sinh(R)))
        phi = float(rng.uniform(0.0, TWO_PI))
        u, v = tangent_from_angle(z, phi), tangent_from_angle(z, phi + alpha)
        x, y = flow(u, R).base, flow(v, R).base
        T = float(rng.uniform(0.0, R))
        xp, yp = flow(u, R - T).base, flow(v, R - T).base
        dxy = dist(x, y)
        if dxy <= 1e-12:
            continue
        ratio.append(dist(xp, yp) / (math.exp(-T) * dxy))
        cases.append({"z": _pt(z), "R": R, "T": T, "d": dxy})
    return SuiteResult("convergence", n, [_max_check("convergence-constant", ratio, CONTRACTION_MAX, cases)])


def suite_busemann_distance(rng: np.random.Generator, n: int) -> SuiteResult:
    ratio, cases = [], []
    for _ in range(n):
        x = random_point(rng, r_max=3.0)
        y = random_near(rng, x)
        zeta = random_boundary(rng)
        r = float(rng.uniform(0.5, 15.0))
        z = flow(tangent(x, zeta), r).base
        err = abs(busemann(zeta, x, y) - (dist(z, x) - dist(z, y)))
        ratio.append(err * math.exp(r))
        cases.append({"x": _pt(x), "y": _pt(y), "zeta": _bd(zeta), "r": r, "err": err})
    return SuiteResult("busemann-distance", n, [_max_check("approximation-constant", ratio, CONTRACTION_MAX, cases)])


def suite_regularity(rng: np.random.Generator, n: int) -> SuiteResult:
    lip, cases = [], []
    log_do, log_db = [], []
    for _ in range(n):
        x, x2, y = random_point(rng, r_max=3.0), random_point(rng, r_max=3.0), random_point(rng, r_max=3.0)
        theta = float(rng.uniform(0.0, TWO_PI))
        zeta = HBoundary.from_angle(theta)
        lip.append(abs(busemann(zeta, x, y) - busemann(zeta, x2, y)) - dist(x, x2))
        cases.append({"x": _pt(x), "x2": _pt(x2), "y": _pt(y), "zeta": _bd(zeta)})
        eps = 10.0 ** float(rng.uniform(-6.0, -1.0))
        eta = HBoundary.from_angle((theta + eps) % TWO_PI)
        db = abs(busemann(zeta, x, y) - busemann(eta, x, y))
        d_o = visual_dist(ORIGIN, zeta, eta)
        if db > 1e-13 and d_o > 0.0:
            log_do.append(math.log(d_o))
            log_db.append(math.log(db))
    return SuiteResult("regularity", n, [
        _max_check("point-lipschitz", lip, 1e-9, cases),
        _slope_check("zeta-holder-exponent", log_do, log_db, HOLDER_SLOPE_MIN, at_least=True),
    ])


def suite_midpoint(rng: np.random.Generator, n: int) -> SuiteResult:
    G = load_group("cyclic-demo")
    c = conj_data(G, select_class_element(G, "shortest"))
    gamma = c.gamma.mat
    dists, cases = [], []
    for _ in range(n):
        zeta = random_boundary(rng)
        if min(visual_dist(ORIGIN, zeta, c.axis.neg), visual_dist(ORIGIN, zeta, c.axis.pos)) < 1e-6:
            continue
        p = project_boundary(c.axis, zeta)
        m = midpoint(p, apply(gamma, p))
        _, d = project(Geodesic(zeta, apply(gamma, zeta)), m)
        dists.append(d)
        cases.append({"zeta": _bd(zeta), "midpoint": _pt(m)})
    return SuiteResult("midpoint", n, [_max_check("midpoint-distance", dists, MIDPOINT_BOUND, cases)])


def suite_isometry(rng: np.random.Generator, n: int) -> SuiteResult:
    d_err, eq_err, b_err, flow_err, comm_err, cases = [], [], [], [], [], []
    for _ in range(n):
        g = random_isometry(rng)
        x, y = random_point(rng, r_max=4.0), random_point(rng, r_max=4.0)
        gx, gy = mobius_point(g, x), mobius_point(g, y)
        d = dist(x, y)
        d_err.append(abs(dist(gx, gy) - d) / max(1.0, d))
        gu = apply(g, tangent(x, y))
        eq_err.append(visual_dist(gx, gu.forward, tangent(gx, gy).forward))
        zeta = random_boundary(rng)
        b_err.append(abs(busemann(apply(g, zeta), gx, gy) - busemann(zeta, x, y)))
        u = tangent_from_angle(x, float(rng.uniform(0.0, TWO_PI)))
        s, t = float(rng.uniform(-3.0, 3.0)), float(rng.uniform(-3.0, 3.0))
        flow_err.append(dist(flow(flow(u, s), t).base, flow(u, s + t).base))
        comm_err.append(dist(apply(g, flow(u, t)).base, flow(apply(g, u), t).base))
        cases.append({"g": [g.a, g.b, g.c, g.d], "x": _pt(x), "y": _pt(y), "s": s, "t": t})
    return SuiteResult("isometry", n, [
        _max_check("distance-preserved", d_err, 1e-9, cases),
        _max_check("tangent-equivariance", eq_err, 1e-8, cases),
        _max_check("busemann-equivariance", b_err, 1e-8, cases),
        _max_check("flow-group-law", flow_err, 1e-9, cases),
        _max_check("flow-commutes", comm_err, 1e-8, cases),
    ])


def _adjust_classes():
    out = []
    G = load_group("cyclic-demo")
    out.append(("cyclic-demo:shortest", conj_data(G, select_class_element(G, "shortest"))))
    B = load_group("bolza")
    for sel in ("shortest", "gen:1", "word:0,1"):
        out.append((f"bolza:{sel}", conj_data(B, select_class_element(B, sel))))
    return out


def suite_adjust(rng: np.random.Generator, n: int) -> SuiteResult:
    classes = _adjust_classes()
    oracle, inv, f2, cases, o_cases = [], [], [], [], []
    for i in range(n):
        label, c = classes[i % len(classes)]
        ell = c.root_length
        v = NormalVector(c, float(rng.uniform(0.0, ell)), str(rng.choice(["right", "left"])))
        f = eval_F1(v)
        k = int(rng.choice([-1, 1]))
        inv.append(abs(eval_F1(v.shifted(k)) - f))
        case = {"class": label, "axis_param": v.axis_param, "side": v.side, "shift": k}
        cases.append(case)
        if i < F1_ORACLE_SAMPLES:
            oracle.append(abs(f - eval_F1_limit(v, 30.0)))
            o_cases.append(case)
        x, y = random_point(rng, r_max=3.0), random_point(rng, r_max=3.0)
        u = tangent_from_angle(x, float(rng.uniform(0.0, TWO_PI)))
        f2.append(abs(eval_F2(u, x, y)) - dist(x, y))
    return SuiteResult("adjust", n, [
        _max_check("F1-limit-oracle", oracle, 1e-6, o_cases),
        _max_check("F1-root-invariance", inv, 1e-9, cases),
        _max_check("F2-bounded-by-distance", f2, 1e-9, cases),
    ])


def suite_residual(rng: np.random.Generator, n: int) -> SuiteResult:
    G = load_group("bolza")
    c = conj_data(G, select_class_element(G, "shortest"))
    x = flow(tangent_from_angle(ORIGIN, 0.7), 0.5).base
    y = flow(tangent_from_angle(ORIGIN, 2.9), 0.3).base
    depths, logs, deep, cases = [], [], [], []
    attempts = 0
    while len(depths) < n and attempts < 20 * n:
        attempts += 1
        k = int(rng.integers(2, 13))
        word = [int(rng.integers(G.n_letters))]
        while len(word) < k:
            nxt = int(rng.integers(G.n_letters))
            if nxt != G.inverse[word[-1]]:
                word.append(nxt)
        rep = coset_canonicalize(G, c, word_product(G, word), x)
        try:
            res = reduction_residual(c, rep.g, x, y)
        except DomainError:
            continue
        if not (3.0 <= res.depth <= 10.0):
            continue
        if abs(res.residual) < 1e-15:
            continue
        depths.append(res.depth)
        logs.append(math.log(abs(res.residual)))
        if res.depth >= 8.0:
            deep.append(abs(res.residual))
            cases.append({"word": word, "depth": res.depth, "residual": res.residual})
    checks = [_slope_check("decay-slope", depths, logs, RESIDUAL_SLOPE_MAX, at_least=False)]
    if deep:
        checks.append(_max_check("deep-residual", deep, RESIDUAL_DEEP_MAX, cases))
    else:
        checks.append(CheckResult("deep-residual", False, float("nan"), RESIDUAL_DEEP_MAX, {"reason": "no depth ≥ 8 samples"}))
    return SuiteResult("residual", n, checks)


SUITES: Dict[str, Callable[[np.random.Generator, int], SuiteResult]] = {
    "busemann": suite_busemann,
    "visual": suite_visual,
    "projection": suite_projection,
    "holder": suite_holder,
    "convergence": suite_convergence,
    "busemann-distance": suite_busemann_distance,
    "regularity": suite_regularity,
    "midpoint": suite_midpoint,
    "isometry": suite_isometry,
    "adjust": suite_adjust,
    "residual": suite_residual,
}


def suite_names() -> List[str]:
    return [*SUITES, "all"]


def run_suites(name: str, rng: np.random.Generator, samples: int) -> List[SuiteResult]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise ConfigError(f"알 수 없는 suite: '{name}' (가능: {', '.join(suite_names())})")
    out = []
    for s in names:
        res = SUITES[s](rng, samples)
        tag = "INFO" if res.passed else "WARN"
        log(tag, f"{s}: {'PASS' if res.passed else 'FAIL'} "
                 + ", ".join(f"{c.name}={c.value:.3g}" for c in res.checks), scope="CHECK")
        out.append(res)
    return out
