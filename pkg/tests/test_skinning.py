# tests/test_skinning.py
import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import i0

from utils_common import FitError
from hyp2core.points import HPoint, ORIGIN
from hyp2core.geometry import direction_angle, tangent_from_angle
from fuchsian.conjugacy import conj_data, select_class_element
from adjust.adjustment import constant_pair, cosine_pair, parse_pair, parse_point_pair, zero_pair
from counting.fitting import fit_growth
from counting.series import CountSeries, count_adjusted, make_grid
from measures.skinning import (
    SigmaEstimate,
    angle_jacobian,
    empirical_ratio,
    predict_ratio,
    predict_ratio_pp,
    sigma_gamma_mc,
    sigma_gamma_quad,
    sigma_x_mc,
    sigma_x_quad,
)


@pytest.fixture(scope="module")
def cyc_class(cyclic):
    return conj_data(cyclic, select_class_element(cyclic, "shortest"))


@pytest.fixture(scope="module")
def bolza_class(bolza):
    return conj_data(bolza, select_class_element(bolza, "shortest"))


def _zero(_):
    return 0.0


# ---- 전체 질량 -------------------------------------------------------------------
@pytest.mark.parametrize("x", [ORIGIN, HPoint(0.3, 1.4), HPoint(-2.0, 0.5)])
def test_sigma_x_of_zero_is_full_circle(x):
    est = sigma_x_quad(x, _zero, ORIGIN, 64, delta=1.0)
    assert est.value == pytest.approx(2.0 * math.pi, rel=1e-6)
    assert est.n_nodes == 64


def test_sigma_gamma_of_zero_is_twice_root_length(cyc_class, bolza_class):
    est = sigma_gamma_quad(cyc_class, _zero, ORIGIN, 32, delta=1.0)
    assert est.value == pytest.approx(4.0, rel=1e-6)
    o = HPoint(0.2, 1.3)
    est = sigma_gamma_quad(bolza_class, _zero, o, 64, delta=1.0, offset=0.3)
    assert est.value == pytest.approx(2.0 * bolza_class.root_length, rel=1e-6)


def test_scale_multiplies_measure():
    base = sigma_x_quad(ORIGIN, _zero, ORIGIN, 16, delta=1.0)
    scaled = sigma_x_quad(ORIGIN, _zero, ORIGIN, 16, scale=3.0, delta=1.0)
    assert scaled.value == pytest.approx(3.0 * base.value)


def test_too_few_nodes():
    with pytest.raises(ValueError):
        sigma_x_quad(ORIGIN, _zero, ORIGIN, 3)


def test_angle_jacobian_of_identity():
    assert angle_jacobian(lambda t: t, 0.4) == pytest.approx(1.0, rel=1e-8)
    assert angle_jacobian(lambda t: -2.0 * t, 1.0) == pytest.approx(2.0, rel=1e-8)


def test_sigma_estimate_to_dict():
    d = SigmaEstimate(1.0, 1e-9, 8).to_dict()
    assert set(d) == {"value", "quadrature_error", "n_nodes", "normalization", "method"}


# ---- 비율 예측 -------------------------------------------------------------------
def test_cosine_ratio_is_bessel_product(cyc_class):
    a1, a2 = 0.7, 0.4
    pred = predict_ratio(cyc_class, cosine_pair(cyc_class, a1, a2), zero_pair(), ORIGIN, ORIGIN,
                         n_nodes=64, delta=1.0)
    assert pred.predicted_ratio == pytest.approx(i0(a1) * i0(a2), rel=1e-6)
    assert math.isnan(pred.empirical_ratio)
    assert pred.low_confidence


def test_cosine_point_pair_ratio_is_bessel_product():
    pred = predict_ratio_pp(parse_point_pair("cosine:0.5,1.2"), parse_point_pair("zero"), ORIGIN, ORIGIN,
                            n_nodes=64, delta=1.0)
    assert pred.predicted_ratio == pytest.approx(i0(0.5) * i0(1.2), rel=1e-6)


def test_constant_ratio_is_exponential(bolza_class):
    x = HPoint(0.1, 1.1)
    pred = predict_ratio(bolza_class, constant_pair(0.3, 0.2), zero_pair(), x, n_nodes=32, delta=1.0)
    assert pred.predicted_ratio == pytest.approx(math.exp(0.5), rel=1e-8)
    pp = predict_ratio_pp(parse_point_pair("const:-0.4,0.1"), parse_point_pair("zero"), x, x,
                          n_nodes=16, delta=1.0)
    assert pp.predicted_ratio == pytest.approx(math.exp(-0.3), rel=1e-8)


def test_ratio_does_not_depend_on_scale(cyc_class):
    pair = cosine_pair(cyc_class, 0.5, 0.5)
    x = HPoint(0.4, 0.8)
    r1 = predict_ratio(cyc_class, pair, zero_pair(), x, n_nodes=32, delta=1.0)
    r2 = predict_ratio(cyc_class, pair, zero_pair(), x, n_nodes=32, scale=7.0, delta=1.0)
    assert r2.predicted_ratio == pytest.approx(r1.predicted_ratio, rel=1e-10)


# ---- Monte-Carlo 오라클 ----------------------------------------------------------
def test_sigma_x_mc_agrees_with_quadrature(rng):
    x = HPoint(0.3, 1.4)
    F2 = parse_point_pair("cosine:0.5,0.5").F2
    q = sigma_x_quad(x, F2, ORIGIN, 64, delta=1.0)
    mc = sigma_x_mc(x, F2, ORIGIN, 4000, rng)
    assert mc.method == "monte-carlo"
    assert abs(mc.value - q.value) < 5.0 * mc.quadrature_error


def test_sigma_gamma_mc_agrees_with_quadrature(cyc_class, rng):
    F1 = cosine_pair(cyc_class, 0.6, 0.0).F1
    q = sigma_gamma_quad(cyc_class, F1, ORIGIN, 32, delta=1.0)
    mc = sigma_gamma_mc(cyc_class, F1, ORIGIN, 4000, rng)
    assert abs(mc.value - q.value) < 5.0 * mc.quadrature_error


# ---- 경험적 비율 -----------------------------------------------------------------
def _series(N, complete=None):
    T = np.arange(1.0, 1.0 + len(N))
    return CountSeries("adjusted", T, N, complete if complete is not None else [True] * len(N))


def test_empirical_ratio_uses_top_complete_points():
    sA = _series([10, 200, 400, 800, 1600], [True, True, True, True, False])
    sB = _series([5, 100, 100, 200, 400])
    ratio, low, used = empirical_ratio(sA, sB)
    assert ratio == pytest.approx((2.0 + 4.0 + 4.0) / 3.0)
    assert not low
    assert used == (2.0, 3.0, 4.0)
    _, low, _ = empirical_ratio(_series([10, 20]), _series([5, 10]))
    assert low


def test_empirical_ratio_errors():
    with pytest.raises(ValueError):
        empirical_ratio(_series([1, 2]), _series([1, 2, 3]))
    with pytest.raises(FitError):
        empirical_ratio(_series([1, 2], [False, False]), _series([1, 2]))


def test_prediction_with_series(cyc_class):
    sA = _series([300, 600, 1200])
    sB = _series([100, 200, 400])
    pred = predict_ratio(cyc_class, constant_pair(0.5, 0.5), zero_pair(), ORIGIN, ORIGIN,
                         seriesA=sA, seriesB=sB, n_nodes=16, delta=1.0)
    assert pred.empirical_ratio == pytest.approx(3.0)
    assert pred.rel_dev == pytest.approx(abs(3.0 / math.e - 1.0), rel=1e-6)
    assert pred.to_dict()["T_used"] == [1.0, 2.0, 3.0]


def test_sigma_x_matches_adaptive_quadrature():
    # x 에서 본 각도 측도로 바꾸면 가중치는 1
    x = HPoint(-0.6, 2.2)
    F2 = parse_point_pair("cosine:0.8,0.8").F2
    ref, _ = quad(lambda phi: math.exp(F2(tangent_from_angle(x, phi))), 0.0, 2.0 * math.pi, epsabs=1e-12)
    est = sigma_x_quad(x, F2, ORIGIN, 64, delta=1.0)
    assert est.value == pytest.approx(ref, rel=1e-6)
    assert ref == pytest.approx(2.0 * math.pi * i0(0.8), rel=1e-8)


# ---- 구적 오차 계약 ---------------------------------------------------------------
def test_node_doubling_error_bounds_true_error():
    x = HPoint(0.4, 0.7)
    F2 = parse_point_pair("cosine:0.9,0.9").F2
    ref = 2.0 * math.pi * i0(0.9)
    errors = []
    for n in (8, 16):
        est = sigma_x_quad(x, F2, ORIGIN, n, delta=1.0)
        assert abs(est.value - ref) <= est.quadrature_error + 1e-10
        errors.append(est.quadrature_error)
    assert errors[1] < errors[0]


# ---- 데스크 규모 (slow) ------------------------------------------------------------
def _random_F2(rng):
    a, phase = rng.uniform(-0.8, 0.8), rng.uniform(0.0, 2.0 * math.pi)
    k = int(rng.integers(1, 4))
    return lambda u: a * math.cos(k * direction_angle(u) + phase)


def _random_F1(rng, ell):
    a, b, phase = rng.uniform(-0.6, 0.6), rng.uniform(-0.4, 0.4), rng.uniform(0.0, 2.0 * math.pi)
    return lambda v: a * math.cos(2.0 * math.pi * v.axis_param / ell + phase) + (b if v.side == "right" else -b)


@pytest.mark.slow
def test_quadrature_agrees_with_monte_carlo_on_random_functions(bolza_class, rng):
    x = HPoint(-0.3, 1.2)
    z = []
    for _ in range(5):
        F2 = _random_F2(rng)
        q = sigma_x_quad(x, F2, ORIGIN, 64, delta=1.0)
        mc = sigma_x_mc(x, F2, ORIGIN, 4000, rng)
        z.append(abs(mc.value - q.value) / mc.quadrature_error)
    for _ in range(5):
        F1 = _random_F1(rng, bolza_class.root_length)
        q = sigma_gamma_quad(bolza_class, F1, ORIGIN, 64, delta=1.0)
        mc = sigma_gamma_mc(bolza_class, F1, ORIGIN, 4000, rng)
        z.append(abs(mc.value - q.value) / mc.quadrature_error)
    # 10 개 중 3 SE 밖은 많아야 하나
    assert sum(v > 3.0 for v in z) <= 1, z
    assert max(z) < 5.0, z


def _adjusted_ratio(bolza, c, selector):
    grid = make_grid(1.0, 8.0, 0.5)
    pair = parse_pair(selector, c, ORIGIN, ORIGIN)
    sA = count_adjusted(bolza, c, pair, ORIGIN, grid)
    sB = count_adjusted(bolza, c, zero_pair(), ORIGIN, grid)
    pred = predict_ratio(c, pair, zero_pair(), ORIGIN, seriesA=sA, seriesB=sB, n_nodes=64, delta=1.0)
    return pred, sB


@pytest.mark.slow
def test_bolza_cosine_ratio_matches_prediction(bolza, bolza_class):
    pred, sB = _adjusted_ratio(bolza, bolza_class, "cosine:0.5,0.5")
    assert not pred.low_confidence
    assert pred.rel_dev < 0.05, pred.to_dict()
    fit = fit_growth(sB, 1.0)
    assert abs(fit.slope - 1.0) < 0.05


@pytest.mark.slow
def test_bolza_neg_half_ratio_matches_prediction(bolza, bolza_class):
    pred, _ = _adjusted_ratio(bolza, bolza_class, "neg-half")
    assert pred.rel_dev < 0.1, pred.to_dict()
