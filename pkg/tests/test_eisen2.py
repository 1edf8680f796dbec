"""Upper-half-plane layer: reduction, Eisenstein/Maass evaluation against a
lattice-sum oracle, the Bessel moment against its Gamma closed form, and the
unfolded inner product computed two independent ways."""

import math

import numpy as np
import pytest

from evlab import eisen2, maass
from evlab.errors import DivergenceError, PoleError, RegionError


def _lattice_sum(s, z, n_max):
    total = 0.0 + 0.0j
    for c in range(-n_max, n_max + 1):
        for d in range(-n_max, n_max + 1):
            if math.gcd(c, d) != 1:
                continue
            total += z.y**s / abs(c * complex(z.x, z.y) + d) ** (2 * s)
    return 0.5 * total  # (c,d) and (-c,-d) give the same coset


# ----------------------------------------------------------------------
# reduction
# ----------------------------------------------------------------------

def test_reduce_lands_in_domain():
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = eisen2.UpperHalfPoint(float(rng.uniform(-8, 8)), float(rng.uniform(0.02, 5)))
        w = eisen2.reduce(z)
        assert abs(w.x) <= 0.5 + 1e-12
        assert w.x * w.x + w.y * w.y >= 1.0 - 1e-12


def test_reduce_idempotent():
    z = eisen2.reduce(eisen2.UpperHalfPoint(3.7, 0.11))
    w = eisen2.reduce(z)
    assert abs(w.x - z.x) <= 1e-14 and abs(w.y - z.y) <= 1e-14


def test_upper_half_point_requires_positive_y():
    with pytest.raises(ValueError):
        eisen2.UpperHalfPoint(0.0, -1.0)


# ----------------------------------------------------------------------
# Eisenstein series
# ----------------------------------------------------------------------

def test_eisenstein_matches_lattice_sum():
    z = eisen2.UpperHalfPoint(0.21, 1.13)
    s = 2.3 + 0.4j
    got = eisen2.eisenstein_value(s, z)
    # oracle truncation error shrinks like N^{1 - 2 Re s}
    d_small = abs(got - _lattice_sum(s, z, 60))
    d_large = abs(got - _lattice_sum(s, z, 150))
    assert d_large <= 1e-4 * abs(got)
    assert d_large < d_small


def test_eisenstein_modular_invariance():
    s = 1.8 - 2.0j
    z = eisen2.UpperHalfPoint(0.13, 0.72)
    base = eisen2.eisenstein_value(s, z)
    shift = eisen2.eisenstein_value(s, eisen2.UpperHalfPoint(z.x + 1.0, z.y))
    norm = z.x * z.x + z.y * z.y
    invert = eisen2.eisenstein_value(
        s, eisen2.UpperHalfPoint(-z.x / norm, z.y / norm)
    )
    assert abs(base - shift) <= 1e-9 * abs(base)
    assert abs(base - invert) <= 1e-9 * abs(base)


def test_eisenstein_pole_guard():
    with pytest.raises(PoleError):
        eisen2.eisenstein_value(1.0, eisen2.UpperHalfPoint(0.0, 1.0))


def test_maass_modular_invariance(even_form, odd_form):
    rng = np.random.default_rng(5)
    for form in (even_form, odd_form):
        for _ in range(3):
            x, y = float(rng.uniform(-2, 2)), float(rng.uniform(0.2, 1.5))
            z1 = eisen2.reduce(eisen2.UpperHalfPoint(x, y))
            norm = x * x + y * y
            z2 = eisen2.reduce(eisen2.UpperHalfPoint(-x / norm, y / norm))
            v1 = eisen2.maass_value(form, z1)
            v2 = eisen2.maass_value(form, z2)
            assert abs(v1 - v2) <= 1e-8 * max(1.0, abs(v1))


def test_odd_maass_vanishes_on_imaginary_axis(odd_form):
    v = eisen2.maass_value(odd_form, eisen2.UpperHalfPoint(0.0, 1.3))
    assert v == 0.0


# ----------------------------------------------------------------------
# Bessel moment
# ----------------------------------------------------------------------

def test_bessel_moment_closed_form_real_orders():
    a = eisen2.bessel_moment(0.0, 0.5, 2.0)
    b = eisen2.bessel_moment_closed(0.0, 0.5, 2.0)
    assert abs(a - b) <= 1e-8 * abs(b)


def test_bessel_moment_closed_form_spectral_order(even_form):
    mu = even_form.spectral_param
    for nu, s in ((0.5, 2.0), (-0.25 + 1.5j, 2.0), (0.1 - 3.0j, 2.5)):
        a = eisen2.bessel_moment(mu, nu, s)
        b = eisen2.bessel_moment_closed(mu, nu, s)
        assert abs(a - b) <= 1e-6 * abs(b), (nu, s)


def test_bessel_moment_divergence_guard():
    with pytest.raises(DivergenceError):
        eisen2.bessel_moment(0.0, 0.5, 0.5)


# ----------------------------------------------------------------------
# unfolded inner product
# ----------------------------------------------------------------------

def test_i_region_guards(even_form, odd_form):
    with pytest.raises(RegionError):
        eisen2.i_series(even_form, 3, 1.0, 1.2)
    with pytest.raises(RegionError):
        eisen2.i_series(odd_form, 3, 1.0, 2.0)
    with pytest.raises(RegionError):
        eisen2.i_closed(odd_form, 3, 1.0, 2.0)


def test_unfolding_identity_spot(even_form):
    # full (n, t, s) grid runs in the acceptance suite
    for n, t, s in ((3, 1.0, 2.0), (4, 0.5, 2.5), (5, 2.0, 2.0)):
        a = eisen2.i_series(even_form, n, t, s)
        b = eisen2.i_closed(even_form, n, t, s)
        assert abs(a - b) <= 1e-4 * abs(b), (n, t, s)


def test_i_series_conjugate_in_t(even_form):
    a = eisen2.i_series(even_form, 3, 1.0, 2.0)
    b = eisen2.i_series(even_form, 3, -1.0, 2.0)
    assert abs(a - np.conj(b)) <= 1e-10 * abs(a)


# ----------------------------------------------------------------------
# fundamental-domain quadrature
# ----------------------------------------------------------------------

def test_volume_with_cusp_tail():
    y_cap = 1.0e6
    vol, err, _ = eisen2.fundamental_domain_integral(
        lambda xs, ys: np.ones_like(xs), y_cap=y_cap
    )
    # the truncated cusp carries exactly 1/y_cap of measure
    assert abs(vol.real + 1.0 / y_cap - math.pi / 3.0) <= 1e-7
    assert abs(vol.imag) <= 1e-12


def test_quadrature_linearity():
    f = lambda xs, ys: np.exp(-ys) * (1.0 + xs * xs)
    g = lambda xs, ys: 1.0 / (1.0 + ys * ys)
    a, _, _ = eisen2.fundamental_domain_integral(f)
    b, _, _ = eisen2.fundamental_domain_integral(g)
    c, _, _ = eisen2.fundamental_domain_integral(lambda xs, ys: f(xs, ys) + 2.0 * g(xs, ys))
    assert abs(c - (a + 2.0 * b)) <= 1e-6 * abs(c)
