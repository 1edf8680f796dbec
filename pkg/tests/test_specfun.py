"""Special-function layer against independent oracles: the stdlib gamma on
the real axis, published zeta constants, Bessel closed forms and the
three-term recurrence across the series/integral branch switch."""

import math

import numpy as np
import pytest

from evlab import specfun
from evlab.errors import CeilingError, DivergenceError, PoleError

RNG = np.random.default_rng(7)


# ----------------------------------------------------------------------
# gamma
# ----------------------------------------------------------------------

def test_log_gamma_real_axis_matches_stdlib():
    for x in (0.1, 0.5, 1.0, 2.5, 7.3, 41.0, 171.0):
        got = specfun.log_gamma(x)
        ref = math.lgamma(x)
        assert abs(got.real - ref) <= 1e-12 * max(1.0, abs(ref))
        assert got.imag == 0.0


def test_gamma_recurrence_complex():
    for _ in range(20):
        z = complex(RNG.uniform(-3, 6), RNG.uniform(-20, 20))
        if min(abs(z - k) for k in range(-5, 1)) < 1e-2:
            continue
        lhs = specfun.gamma(z + 1.0)
        rhs = z * specfun.gamma(z)
        assert abs(lhs - rhs) <= 1e-11 * abs(rhs)


def test_gamma_reflection():
    for _ in range(20):
        z = complex(RNG.uniform(0.05, 0.95), RNG.uniform(-8, 8))
        lhs = specfun.gamma(z) * specfun.gamma(1.0 - z)
        rhs = math.pi / np.sin(math.pi * z)
        assert abs(lhs - rhs) <= 1e-11 * abs(rhs)


def test_gamma_duplication():
    # Gamma(2z) = 2^{2z-1} / sqrt(pi) Gamma(z) Gamma(z + 1/2)
    for z in (0.7 + 3.0j, 2.2 - 11.0j, 5.0 + 0.4j):
        lhs = specfun.log_gamma(2.0 * z)
        rhs = ((2.0 * z - 1.0) * math.log(2.0) - 0.5 * specfun.LOG_PI
               + specfun.log_gamma(z) + specfun.log_gamma(z + 0.5))
        assert abs(np.exp(lhs - rhs) - 1.0) <= 1e-12


def test_log_gamma_pole_raises():
    with pytest.raises(PoleError):
        specfun.log_gamma(0.0)
    with pytest.raises(PoleError):
        specfun.log_gamma(-3.0)


def test_log_gamma_vectorized_matches_scalar():
    zs = np.array([0.3 + 2.0j, 1.5 - 7.0j, 4.0 + 0.1j, -1.5 + 3.0j])
    batch = specfun.log_gamma(zs)
    for i, z in enumerate(zs):
        assert abs(batch[i] - specfun.log_gamma(complex(z))) <= 1e-13


# ----------------------------------------------------------------------
# zeta
# ----------------------------------------------------------------------

def test_zeta_published_values():
    assert abs(complex(specfun.riemann_zeta(2.0)) - math.pi**2 / 6) <= 1e-12
    assert abs(complex(specfun.riemann_zeta(4.0)) - math.pi**4 / 90) <= 1e-12
    # zeta(1/2), published to 16 digits
    assert abs(complex(specfun.riemann_zeta(0.5)) - (-1.4603545088095868)) <= 1e-12


def test_zeta_first_nontrivial_zero():
    # |zeta| has a simple zero at 1/2 + i * 14.134725141734693...
    rho = 0.5 + 14.134725141734693j
    assert abs(complex(specfun.riemann_zeta(rho))) <= 1e-10
    # and is decidedly nonzero a little away
    assert abs(complex(specfun.riemann_zeta(rho + 0.5j))) > 1e-2


def test_zeta_partial_sum_oracle():
    # at Re s = 3 the raw Dirichlet sum is an independent check
    s = 3.0 + 17.0j
    m = np.arange(1, 200001, dtype=float)
    ref = np.sum(np.exp(-s * np.log(m)))
    assert abs(complex(specfun.riemann_zeta(s)) - ref) <= 1e-10


def test_zeta_guards():
    with pytest.raises(PoleError):
        specfun.riemann_zeta(1.0)
    with pytest.raises(DivergenceError):
        specfun.riemann_zeta(-0.5)
    with pytest.raises(CeilingError):
        specfun.riemann_zeta(0.5 + 6000.0j)


def test_completed_zeta_reflection_strip():
    rng = np.random.default_rng(11)
    for _ in range(50):
        s = complex(rng.uniform(0.55, 0.95), rng.uniform(-40, 40))
        a = specfun.completed_zeta(s)
        b = specfun.completed_zeta(1.0 - s)
        assert abs(a - b) <= 1e-9 * abs(a)


def test_completed_zeta_pole_guard():
    for s in (0.0, 1.0):
        with pytest.raises(PoleError):
            specfun.completed_zeta(s)


# ----------------------------------------------------------------------
# K-Bessel
# ----------------------------------------------------------------------

def test_bessel_k_half_closed_form():
    for x in (0.3, 1.0, 4.7, 20.0):
        ref = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
        assert abs(specfun.bessel_k(0.5, x) - ref) <= 1e-10 * ref


def test_bessel_k_three_halves_closed_form():
    for x in (0.5, 2.0, 9.0):
        ref = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * (1.0 + 1.0 / x)
        assert abs(specfun.bessel_k(1.5, x) - ref) <= 1e-9 * ref


def test_bessel_recurrence_complex_order():
    # K_{v+1}(x) - K_{v-1}(x) = (2 v / x) K_v(x); exercises both branches
    for v, x in ((1j * 13.78, 3.0), (1j * 13.78, 30.0), (0.7 + 9.0j, 5.0),
                 (1j * 18.0, 12.0), (1.5 + 0.0j, 2.0)):
        km = specfun.bessel_k(v - 1.0, x)
        k0 = specfun.bessel_k(v, x)
        kp = specfun.bessel_k(v + 1.0, x)
        scale = max(abs(km), abs(k0), abs(kp))
        assert abs((kp - km) - (2.0 * v / x) * k0) <= 1e-9 * scale, (v, x)


def test_bessel_imaginary_order_real():
    for mu in (9.53, 13.78, 17.0):
        for x in (0.5, 3.0, 10.0, 25.0):
            v = specfun.bessel_k(1j * mu, x)
            assert abs(v.imag) <= 1e-12 * max(abs(v.real), 1e-300)


def test_bessel_symmetry_in_order():
    for x in (1.0, 6.0):
        a = specfun.bessel_k(1j * 11.0, x)
        b = specfun.bessel_k(-1j * 11.0, x)
        assert abs(a - b) <= 1e-12 * abs(a)


def test_bessel_grid_matches_scalar():
    mu = 13.779751351891
    xs = np.geomspace(0.2, 60.0, 40)
    grid = specfun.bessel_k_grid(1j * mu, xs)
    for i, x in enumerate(xs):
        single = specfun.bessel_k(1j * mu, float(x))
        assert abs(grid[i] - single) <= 1e-10 * max(abs(single), 1e-300)


def test_bessel_underflow_flag():
    val, underflowed = specfun.bessel_k_ex(0.5, 800.0)
    assert underflowed
    assert val == 0.0
