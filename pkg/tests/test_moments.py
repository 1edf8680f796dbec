"""Moment integrals: window additivity, the oscillatory decomposition bound,
parity annihilation, the report contract, and the two variance constants."""

import numpy as np
import pytest

from evlab import moments
from evlab.errors import RegionError


def test_report_contract():
    with pytest.raises(ValueError):
        moments.MomentReport(kind="nonsense", n=3, T=100.0, integral=0.0,
                             predicted=1.0, ratio=0.0, grid_step=0.1,
                             samples=10, err_estimate=0.0)
    with pytest.raises(ValueError):
        moments.MomentReport(kind="mean_value", n=3, T=100.0, integral=0.0,
                             predicted=1.0, ratio=0.0, grid_step=0.1,
                             samples=10, err_estimate=-1.0)


def test_window_additivity(even_form):
    T = 20.0
    full = moments.mean_value(even_form, 3, T)
    left = moments.mean_value(even_form, 3, T, t_range=(T, 1.5 * T))
    right = moments.mean_value(even_form, 3, T, t_range=(1.5 * T, 2.0 * T))
    whole = full.integral * T
    split = (left.integral + right.integral) * T
    tol = (full.err_estimate + left.err_estimate + right.err_estimate) * T + 1e-9
    assert abs(whole - split) <= max(tol, 1e-3 * abs(whole))


def test_decomposition_residual_within_bound(even_form):
    residual, bound = moments.decomposition_residual(even_form, 3, 50.0)
    assert residual <= bound


def test_parity_annihilation(odd_form):
    assert moments.mean_value(odd_form, 3, 100.0).integral == 0.0
    assert moments.weighted_variance(odd_form, 3, 100.0).integral == 0.0
    report, corr = moments.cross_variance(odd_form, odd_form, 3, 100.0)
    assert report.integral == 0.0 and corr == 0.0


def test_mean_value_window_guard(even_form):
    with pytest.raises(RegionError):
        moments.mean_value(even_form, 3, 5.0)


def test_second_moment_positive_real(even_form):
    rep = moments.second_moment(even_form, 50.0, t_range=(50.0, 58.0))
    assert rep.integral.imag == 0.0
    assert rep.integral.real > 0.0
    assert rep.err_estimate >= 0.0


def test_jutila_prediction_monotone(even_form):
    a = moments.jutila_prediction(even_form, 100.0, 0.0)
    b = moments.jutila_prediction(even_form, 200.0, 0.0)
    assert 0.0 < a < b


def test_variance_constants_identity(even_form):
    for n in (3, 4, 5):
        c_paper, c_recast = moments.variance_constants(even_form, n)
        assert abs(c_paper - c_recast) <= 1e-9 * abs(c_paper), n
    # quadratic in the normalization
    c2, _ = moments.variance_constants(even_form, 3, a_n=2.0 + 1.0j)
    c1, _ = moments.variance_constants(even_form, 3)
    assert abs(c2 - 5.0 * c1) <= 1e-12 * abs(c2)


def test_cross_variance_self_correlation(even_form):
    report, corr = moments.cross_variance(even_form, even_form, 3, 50.0,
                                          t_range=(50.0, 60.0))
    assert corr == pytest.approx(1.0)
    assert report.integral.real > 0.0
