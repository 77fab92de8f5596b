# tests/test_geometry.py
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from utils_common import DomainError
from hyp2core.points import HPoint, HBoundary, Geodesic, Isometry, UnitTangent, ORIGIN, INFINITY
from hyp2core.geometry import (
    apply,
    axis_coordinate,
    boundary_angle,
    boundary_from_angle,
    busemann,
    busemann_limit,
    d_zero_infty,
    direction_angle,
    dist,
    dist_many,
    flow,
    geodesic_frame,
    midpoint,
    mobius_boundary,
    mobius_many,
    mobius_point,
    orbit_dist_many,
    point_on_geodesic,
    project,
    project_boundary,
    rotation,
    tangent,
    tangent_from_angle,
    visual_dist,
    visual_dist_limit,
)

points = st.builds(HPoint, st.floats(-5.0, 5.0), st.floats(0.05, 20.0))
angles = st.floats(0.0, 2.0 * math.pi, exclude_max=True)
boundaries = angles.map(HBoundary.from_angle)
# 극한 비교용: 유한 끝점은 크기가 적당한 값만
tame_boundaries = st.one_of(st.just(INFINITY), st.floats(0.01, 2.0 * math.pi - 0.01).map(HBoundary.from_angle))


def _cosh_dist(p, q):
    return math.acosh(1.0 + abs(p.z - q.z) ** 2 / (2.0 * p.y * q.y))


# ---- 점 / 경계 / 행렬 ----------------------------------------------------------
def test_hpoint_rejects_lower_half_plane():
    with pytest.raises(DomainError):
        HPoint(0.0, 0.0)
    with pytest.raises(DomainError):
        HPoint(float("nan"), 1.0)


def test_geodesic_rejects_equal_endpoints():
    with pytest.raises(DomainError):
        Geodesic(HBoundary.real(1.0), HBoundary.real(1.0))
    with pytest.raises(DomainError):
        Geodesic(INFINITY, HBoundary.infinity())


def test_isometry_canonical_sign_and_det():
    g = Isometry(-2.0, -1.0, -1.0, -1.0)
    assert (g.a, g.b, g.c, g.d) == (2.0, 1.0, 1.0, 1.0)
    assert Isometry(0.0, -1.0, 1.0, 0.0).b == 1.0
    with pytest.raises(DomainError):
        Isometry(2.0, 0.0, 0.0, 1.0)


def test_isometry_inverse_and_close():
    g = Isometry(2.0, 3.0, 1.0, 2.0)
    assert (g @ g.inverse()).is_identity()
    assert g.is_close(Isometry(-2.0, -3.0, -1.0, -2.0))
    assert g.is_hyperbolic()
    assert not Isometry(0.0, -1.0, 1.0, 0.0).is_hyperbolic()


@given(angles)
def test_boundary_angle_roundtrip(theta):
    zeta = boundary_from_angle(theta)
    back = boundary_angle(zeta)
    diff = (back - theta + math.pi) % (2 * math.pi) - math.pi
    assert abs(diff) <= 1e-9


def test_boundary_angle_landmarks():
    assert boundary_angle(INFINITY) == 0.0
    assert boundary_angle(HBoundary.real(0.0)) == pytest.approx(math.pi)
    assert boundary_from_angle(0.0).at_infinity
    assert HBoundary.from_angle(math.pi).value == pytest.approx(0.0, abs=1e-15)


# ---- 거리 -----------------------------------------------------------------------
@pytest.mark.parametrize(
    "p, q, expected",
    [
        (HPoint(0, 1), HPoint(0, math.e), 1.0),
        (HPoint(0, 1), HPoint(0, 2), math.log(2.0)),
        (HPoint(3, 2), HPoint(3, 2), 0.0),
    ],
)
def test_dist_examples(p, q, expected):
    assert dist(p, q) == pytest.approx(expected, abs=1e-12)


@given(points, points)
def test_dist_matches_cosh_formula_and_is_symmetric(p, q):
    d = dist(p, q)
    assert d >= 0.0
    assert d == pytest.approx(dist(q, p), rel=1e-12, abs=1e-12)
    assert d == pytest.approx(_cosh_dist(p, q), rel=1e-7, abs=1e-7)


def test_dist_many_matches_scalar(rng):
    p = HPoint(0.3, 0.7)
    zs = rng.uniform(-3, 3, 20) + 1j * rng.uniform(0.1, 4, 20)
    expected = [dist(p, HPoint.from_complex(z)) for z in zs]
    assert np.allclose(dist_many(p, zs), expected, rtol=1e-12)


def test_batch_mobius_matches_scalar():
    mats = np.array([[[2.0, 1.0], [1.0, 1.0]], [[1.0, 0.0], [3.0, 1.0]]])
    x, y = HPoint(0.1, 1.3), HPoint(-0.4, 0.6)
    for m, gz, d in zip(mats, mobius_many(mats, y.z), orbit_dist_many(mats, x, y)):
        g = Isometry.from_matrix(m)
        assert gz == pytest.approx(mobius_point(g, y).z)
        assert d == pytest.approx(dist(x, mobius_point(g, y)), rel=1e-12)


# ---- Busemann / visual ----------------------------------------------------------
def test_busemann_examples():
    i, two_i = HPoint(0, 1), HPoint(0, 2)
    assert busemann(INFINITY, i, two_i) == pytest.approx(math.log(2.0))
    assert busemann(HBoundary.real(0.0), i, two_i) == pytest.approx(-math.log(2.0))


@settings(max_examples=200, deadline=None)
@given(boundaries, points, points, points)
def test_busemann_cocycle(zeta, x, y, z):
    assert busemann(zeta, x, y) == pytest.approx(-busemann(zeta, y, x), abs=1e-9)
    assert busemann(zeta, x, z) == pytest.approx(busemann(zeta, x, y) + busemann(zeta, y, z), abs=1e-8)
    assert abs(busemann(zeta, x, y)) <= dist(x, y) + 1e-9


@settings(max_examples=100, deadline=None)
@given(tame_boundaries, points, points)
def test_busemann_matches_truncated_limit(zeta, x, y):
    assert busemann(zeta, x, y) == pytest.approx(busemann_limit(zeta, x, y, 30.0), abs=1e-6)


def test_visual_dist_examples():
    assert visual_dist(ORIGIN, HBoundary.real(0.0), INFINITY) == pytest.approx(1.0)
    assert visual_dist(ORIGIN, HBoundary.real(1.0), HBoundary.real(-1.0)) == pytest.approx(1.0)
    assert visual_dist(ORIGIN, HBoundary.real(1.0), INFINITY) == pytest.approx(math.sqrt(0.5))
    assert visual_dist(ORIGIN, INFINITY, INFINITY) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.builds(HPoint, st.floats(-2, 2), st.floats(0.2, 5.0)), tame_boundaries, tame_boundaries)
def test_visual_dist_matches_truncated_limit(x, zeta, eta):
    d = visual_dist(x, zeta, eta)
    assert 0.0 <= d <= 1.0 + 1e-12
    assert d == pytest.approx(visual_dist(x, eta, zeta), abs=1e-12)
    if d > 1e-4:
        assert d == pytest.approx(visual_dist_limit(x, zeta, eta, 30.0), abs=1e-6)


# ---- 측지선 / 사영 --------------------------------------------------------------
def test_geodesic_frame_sends_endpoints():
    L = Geodesic(HBoundary.real(2.0), HBoundary.real(-1.0))
    A = geodesic_frame(L)
    assert mobius_boundary(A, L.neg).value == pytest.approx(0.0, abs=1e-12)
    assert mobius_boundary(A, L.pos).at_infinity


def test_project_example():
    L = Geodesic(HBoundary.real(0.0), INFINITY)
    foot, d = project(L, HPoint(1.0, 1.0))
    assert foot.x == pytest.approx(0.0, abs=1e-12)
    assert foot.y == pytest.approx(math.sqrt(2.0))
    assert d == pytest.approx(math.asinh(1.0))


@settings(max_examples=50, deadline=None)
@given(st.builds(HPoint, st.floats(-3, 3), st.floats(0.1, 5.0)), st.floats(-4, 4), st.floats(0.3, 6.0))
def test_project_is_nearest_point(p, a, width):
    L = Geodesic(HBoundary.real(a), HBoundary.real(a + width))
    anchor, _ = project(L, ORIGIN)
    foot, d = project(L, p)
    res = minimize_scalar(
        lambda s: dist(p, point_on_geodesic(L, s, anchor)), bounds=(-30, 30), method="bounded",
        options={"xatol": 1e-10},
    )
    assert d == pytest.approx(res.fun, abs=1e-6)
    assert d == pytest.approx(dist(p, foot), abs=1e-9)


def test_project_boundary_rejects_endpoint():
    L = Geodesic(HBoundary.real(0.0), INFINITY)
    with pytest.raises(DomainError):
        project_boundary(L, INFINITY)
    assert project_boundary(L, HBoundary.real(-2.0)).y == pytest.approx(2.0)


def test_axis_coordinate_and_point_on_geodesic():
    L = Geodesic(HBoundary.real(0.0), INFINITY)
    assert axis_coordinate(L, HPoint(0.0, 3.0), ORIGIN) == pytest.approx(math.log(3.0))
    assert axis_coordinate(L, HPoint(5.0, 5.0), ORIGIN) == pytest.approx(0.5 * math.log(50.0))
    p = point_on_geodesic(L, -1.0, ORIGIN)
    assert p.y == pytest.approx(math.exp(-1.0))
    # 방향을 뒤집으면 부호도 뒤집힘
    assert axis_coordinate(L.reversed(), HPoint(0.0, 3.0), ORIGIN) == pytest.approx(-math.log(3.0))


# ---- 접벡터 / 흐름 --------------------------------------------------------------
def test_tangent_rejects_coincident_points():
    with pytest.raises(DomainError):
        tangent(ORIGIN, HPoint(0.0, 1.0))


def test_tangent_and_flow_along_imaginary_axis():
    u = tangent(ORIGIN, HPoint(0.0, 5.0))
    assert u.forward.at_infinity
    assert direction_angle(u) == pytest.approx(0.0, abs=1e-12)
    p = flow(u, 1.0).base
    assert (p.x, p.y) == pytest.approx((0.0, math.e))
    back = flow(u, -2.0).base
    assert back.y == pytest.approx(math.exp(-2.0))


@settings(max_examples=50, deadline=None)
@given(points, points)
def test_flow_reaches_target_point(p, q):
    d = dist(p, q)
    if d < 1e-6:
        return
    r = flow(tangent(p, q), d).base
    assert dist(r, q) <= 1e-7 * max(1.0, d)


@given(points, angles)
def test_tangent_from_angle_roundtrip(p, theta):
    u = tangent_from_angle(p, theta)
    back = direction_angle(u)
    diff = (back - theta + math.pi) % (2 * math.pi) - math.pi
    assert abs(diff) <= 1e-8


def test_midpoint_example():
    m = midpoint(ORIGIN, HPoint(0.0, math.e ** 2))
    assert (m.x, m.y) == pytest.approx((0.0, math.e))


@settings(max_examples=50, deadline=None)
@given(points, points)
def test_midpoint_is_equidistant(p, q):
    m = midpoint(p, q)
    assert dist(p, m) == pytest.approx(dist(q, m), abs=1e-8)
    assert dist(p, m) == pytest.approx(dist(p, q) / 2.0, abs=1e-8)


def test_d_zero_infty():
    u = UnitTangent(ORIGIN, INFINITY)
    v = UnitTangent(HPoint(0.0, 2.0), HBoundary.real(0.0))
    assert d_zero_infty(u, v) == pytest.approx(1.0)
    assert d_zero_infty(u, u) == 0.0


def test_apply_dispatch():
    g = Isometry.diag(2.0)
    assert apply(g, ORIGIN) == HPoint(0.0, 4.0)
    assert apply(g, HBoundary.real(1.0)).value == pytest.approx(4.0)
    assert apply(g, INFINITY).at_infinity
    L = apply(g, Geodesic(HBoundary.real(-1.0), HBoundary.real(1.0)))
    assert (L.neg.value, L.pos.value) == pytest.approx((-4.0, 4.0))
    with pytest.raises(TypeError):
        apply(g, 3.0)


def test_half_turn_rotations_on_boundary():
    # rotation(pi) 는 -I: ∞ 는 그대로
    assert apply(rotation(math.pi), INFINITY).at_infinity
    assert apply(rotation(math.pi), HBoundary.real(2.0)).value == pytest.approx(2.0)
    quarter = rotation(math.pi / 2.0)
    assert apply(quarter, INFINITY).value == pytest.approx(0.0, abs=1e-12)
    assert apply(quarter, HBoundary.real(0.0)).at_infinity
