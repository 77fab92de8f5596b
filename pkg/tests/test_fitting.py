# tests/test_fitting.py
import math

import numpy as np
import pytest

from utils_common import FitError
from counting.series import CountSeries, make_grid
from counting.fitting import fit_growth


def _exp_series(rate=0.5, scale=100.0, complete=None):
    T = make_grid(0.0, 8.0, 0.5)
    N = np.round(scale * np.exp(rate * T)).astype(int)
    if complete is None:
        complete = np.ones(len(T), dtype=bool)
    return CountSeries("orbit", T, N, complete)


def test_fit_recovers_rate_and_constant():
    fit = fit_growth(_exp_series(), 0.5)
    assert fit.slope == pytest.approx(0.5, abs=0.02)
    assert fit.sigma_hat == pytest.approx(100.0, rel=0.05)
    assert fit.n_points == 17
    assert not fit.flagged


def test_fit_flags_wrong_rate():
    fit = fit_growth(_exp_series(), 1.0)
    assert fit.flagged
    assert fit.deviation == pytest.approx(0.5, abs=0.02)


def test_window_restricts_points():
    fit = fit_growth(_exp_series(), 0.5, window=(2.0, 5.0))
    assert fit.n_points == 7
    assert fit.window == (2.0, 5.0)


def test_incomplete_points_are_skipped():
    complete = np.ones(17, dtype=bool)
    complete[-5:] = False
    fit = fit_growth(_exp_series(complete=complete), 0.5)
    assert fit.n_points == 12
    assert fit.window[1] == pytest.approx(5.5)


def test_constant_series():
    T = make_grid(1.0, 5.0, 1.0)
    s = CountSeries("conj", T, [50] * 5, [True] * 5)
    fit = fit_growth(s, 0.0)
    assert fit.slope == 0.0
    assert fit.sigma_hat == pytest.approx(50.0)
    assert fit.stderr == 0.0


def test_too_few_points():
    T = make_grid(1.0, 5.0, 1.0)
    s = CountSeries("orbit", T, [1, 3, 10, 29, 80], [True] * 5)
    with pytest.raises(FitError):
        fit_growth(s, 1.0)
    with pytest.raises(FitError):
        fit_growth(_exp_series(), 0.5, window=(7.0, 8.0))


def test_fit_to_dict():
    d = fit_growth(_exp_series(), 0.5).to_dict()
    assert isinstance(d["window"], list)
    assert math.isfinite(d["stderr"])
    assert set(d) >= {"slope", "intercept", "sigma_hat", "n_points", "flagged"}
