"""The closed mu_{n,t} formulas: dual-path identity, the adjoint round-trip
for |mu|^2, parity annihilation, normalization linearity, and the Stirling
envelope of the Gamma quotient."""

import numpy as np
import pytest

from evlab import wimu
from evlab.errors import RegionError


def test_dual_path_spot(even_form):
    for n, t in ((3, 17.0), (4, 50.0), (5, 123.4), (3, 400.0)):
        a = wimu.mu_completed(even_form, n, t)
        b = wimu.mu_gamma_form(even_form, n, t)
        assert abs(a.value - b.value) <= 1e-9 * abs(b.value), (n, t)


def test_mu_squared_roundtrip_spot(even_form):
    for n, t in ((3, 61.7), (4, 19.0), (5, 210.0)):
        sq = wimu.mu_squared(even_form, n, t)
        ref = abs(wimu.mu_completed(even_form, n, t).value) ** 2
        assert abs(sq - ref) <= 1e-9 * sq, (n, t)


def test_parity_annihilation(odd_form):
    assert wimu.mu_completed(odd_form, 3, 50.0).value == 0.0
    assert wimu.mu_gamma_form(odd_form, 4, 50.0).value == 0.0
    assert wimu.mu_squared(odd_form, 5, 50.0) == 0.0
    vals, errs = wimu.mu_grid(odd_form, 3, np.array([50.0, 51.0]))
    assert np.all(vals == 0.0) and np.all(errs == 0.0)


def test_normalization_linearity(even_form):
    a_n = 2.0 - 3.0j
    base = wimu.mu_completed(even_form, 3, 50.0).value
    scaled = wimu.mu_completed(even_form, 3, 50.0, a_n=a_n).value
    assert abs(scaled - a_n * base) <= 1e-12 * abs(scaled)
    sq = wimu.mu_squared(even_form, 3, 50.0, a_n=a_n)
    assert abs(sq - abs(a_n) ** 2 * wimu.mu_squared(even_form, 3, 50.0)) <= 1e-12 * sq


def test_t_reflection_conjugates(even_form):
    a = wimu.mu_completed(even_form, 3, 50.0).value
    b = wimu.mu_completed(even_form, 3, -50.0).value
    assert abs(b - np.conj(a)) <= 1e-12 * abs(a)


def test_domain_guards(even_form):
    with pytest.raises(ValueError):
        wimu.mu_completed(even_form, 2, 50.0)
    with pytest.raises(RegionError):
        wimu.mu_completed(even_form, 3, 0.5)
    with pytest.raises(RegionError):
        wimu.mu_grid(even_form, 3, np.array([50.0, 1.0]))


def test_grid_matches_scalar(even_form):
    ts = np.array([11.0, 50.0, 120.0, 333.0])
    vals, errs = wimu.mu_grid(even_form, 3, ts)
    for i, t in enumerate(ts):
        single = wimu.mu_completed(even_form, 3, float(t))
        assert abs(vals[i] - single.value) <= 1e-10 * max(abs(single.value), 1e-12)


def test_gamma_factor_positive_and_enveloped(even_form):
    for n in (3, 4, 5):
        for t in (50.0, 100.0, 300.0):
            g = wimu.gamma_factor_sq(even_form, n, t)
            s = wimu.stirling_gamma_sq(n, t)
            assert g > 0 and s > 0
            assert abs(g / s - 1.0) <= 5.0 / t, (n, t)


def test_mu_no_pathological_growth(even_form):
    # Lindelof-consistency diagnostic: |mu| t^{(n-1)/2} should stay bounded
    # by a modest power of log t on the desk window
    ts = np.geomspace(10.0, 800.0, 25)
    vals, _ = wimu.mu_grid(even_form, 3, ts)
    scaled = np.abs(vals) * ts ** 1.0
    assert float(scaled.max()) <= 50.0
