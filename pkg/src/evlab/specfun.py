"""Complex special functions: log-gamma, gamma, Riemann zeta in the critical
strip, the completed zeta Lambda(s), and K-Bessel functions of complex order.

Design notes
------------
* ``log_gamma`` uses a Stirling asymptotic series after recurrence-shifting
  the argument to Re(z) >= 10.  This is uniformly accurate for the large
  imaginary arguments the moment integrals need (|Im| up to a few thousand).
* ``riemann_zeta`` uses Euler-Maclaurin continuation with truncation
  N = max(64, 2*ceil|Im s|) and 8 Bernoulli correction terms.
* ``bessel_k`` integrates exp(-x cosh u) cosh(nu*u) by the trapezoid rule;
  the cosh substitution makes the integrand decay double-exponentially, so
  the trapezoid converges at spectral rate.  The step is refined until the
  requested tolerance is met.
* Long sums use compensated (Kahan) accumulation so 1e7-term sums do not
  lose the 1e-10 target to rounding.

All functions accept scalars or numpy arrays and are pure; they are safe to
call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CeilingError, DivergenceError, PoleError

__all__ = [
    "QuadratureSpec",
    "DEFAULT_SPEC",
    "log_gamma",
    "gamma",
    "riemann_zeta",
    "completed_zeta",
    "log_completed_zeta",
    "bessel_k",
    "bessel_k_ex",
]

LOG_2PI = math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)

# B_2, B_4, ..., B_30
_BERNOULLI = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
]

# Stirling coefficients B_{2k} / (2k (2k-1)), k = 1..12
_STIRLING = [_BERNOULLI[k - 1] / (2 * k * (2 * k - 1)) for k in range(1, 13)]

_SHIFT_THRESHOLD = 10.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget rules shared by all integrators."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_levels: int = 14
    series_cap: int = 10_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_levels < 1 or self.series_cap < 1:
            raise ValueError("max_levels and series_cap must be >= 1")


DEFAULT_SPEC = QuadratureSpec()


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.shape == ()


def log_gamma(z, spec: QuadratureSpec = DEFAULT_SPEC):
    """Principal-branch log Gamma(z), z not a nonpositive integer.

    Shifts the argument rightward via log Gamma(z) = log Gamma(z+1) - log z
    until the Stirling series applies.  Both steps preserve the principal
    branch off the negative real axis.
    """
    arr, scalar = _as_complex_array(z)
    w = arr.copy()

    nearest = np.round(w.real)
    on_pole = (
        (nearest <= 0)
        & (np.abs(w.real - nearest) < spec.abs_tol)
        & (np.abs(w.imag) < spec.abs_tol)
    )
    if np.any(on_pole):
        bad = w.flat[np.flatnonzero(on_pole.ravel())[0]]
        raise PoleError(f"log_gamma pole at z = {bad}")

    acc = np.zeros_like(w)
    # bounded loop: at most ~| min Re | + threshold iterations
    while True:
        mask = w.real < _SHIFT_THRESHOLD
        if not np.any(mask):
            break
        acc[mask] -= np.log(w[mask])
        w[mask] = w[mask] + 1.0

    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    power = inv
    for c in _STIRLING:
        series += c * power
        power = power * inv2
    out = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series + acc
    return complex(out) if scalar else out


def gamma(z, spec: QuadratureSpec = DEFAULT_SPEC):
    """Gamma(z) = exp(log_gamma(z))."""
    return np.exp(log_gamma(z, spec))


def riemann_zeta(s, spec: QuadratureSpec = DEFAULT_SPEC, im_ceiling: float = 5000.0):
    """zeta(s) for Re(s) > 0, s != 1, by Euler-Maclaurin continuation.

    The truncation length scales with |Im s|; rel error <= spec.rel_tol in
    the supported band |Im s| <= im_ceiling.
    """
    arr, scalar = _as_complex_array(s)
    if np.any(arr.real <= 0):
        raise DivergenceError("riemann_zeta requires Re(s) > 0")
    if np.any(np.abs(arr - 1.0) <= spec.abs_tol):
        raise PoleError("riemann_zeta pole at s = 1")
    max_im = float(np.max(np.abs(arr.imag))) if arr.size else 0.0
    if max_im > im_ceiling:
        raise CeilingError(f"|Im s| = {max_im} exceeds ceiling {im_ceiling}")

    n_trunc = max(64, 2 * math.ceil(max_im))
    flat = arr.ravel()
    total = np.zeros_like(flat)
    comp = np.zeros_like(flat)
    chunk = 8192
    for start in range(1, n_trunc, chunk):
        ks = np.arange(start, min(start + chunk, n_trunc), dtype=float)
        block = np.exp(-np.multiply.outer(flat, np.log(ks))).sum(axis=1)
        # Kahan step across chunks
        y = block - comp
        t = total + y
        comp = (t - total) - y
        total = t

    n = float(n_trunc)
    log_n = math.log(n)
    tail = np.exp((1.0 - flat) * log_n) / (flat - 1.0) + 0.5 * np.exp(-flat * log_n)
    poch = flat.copy()  # (s)_1
    for j in range(1, 9):
        tail += (
            _BERNOULLI[j - 1]
            / math.factorial(2 * j)
            * poch
            * np.exp(-(flat + 2 * j - 1) * log_n)
        )
        poch = poch * (flat + 2 * j - 1) * (flat + 2 * j)

    out = (total + tail).reshape(arr.shape)
    return complex(out) if scalar else out


def log_completed_zeta(s, spec: QuadratureSpec = DEFAULT_SPEC):
    """log Lambda(s) with Lambda(s) = pi^{-s/2} Gamma(s/2) zeta(s).

    Returned modulo 2*pi*i; exponentiate to recover Lambda.  Arguments with
    Re(s) < 1/2 are reflected through Lambda(s) = Lambda(1-s) so the zeta
    factor stays in its convergent-continuation region.
    """
    arr, scalar = _as_complex_array(s)
    if np.any(np.abs(arr) <= spec.abs_tol) or np.any(np.abs(arr - 1.0) <= spec.abs_tol):
        raise PoleError("completed zeta has poles at s = 0, 1")
    w = np.where(arr.real < 0.5, 1.0 - arr, arr)
    out = -0.5 * w * LOG_PI + log_gamma(w / 2.0, spec) + np.log(riemann_zeta(w, spec))
    return complex(out) if scalar else out


def completed_zeta(s, spec: QuadratureSpec = DEFAULT_SPEC):
    """Lambda(s) = pi^{-s/2} Gamma(s/2) zeta(s), s != 0, 1."""
    return np.exp(log_completed_zeta(s, spec))


def _use_series(order, x) -> bool:
    """Pick the ascending series over the cosh integral.

    The integral loses relative precision to cancellation by a factor
    ~ e^{pi |Im nu|/2 - x}; the series loses ~ e^{2x} once both I-terms are
    comparable.  For small |Im nu| the integral is near machine precision
    everywhere, so the series only pays off for strongly oscillatory orders
    at small argument; past x ~ pi |Im nu|/2 - 5 the integral has already
    recovered full precision, so the window closes there.
    """
    order = complex(order)
    mu = abs(order.imag)
    return (mu >= 8.0 and x <= _series_window(mu)
            and not _near_integer(order))


def _series_window(mu: float) -> float:
    return min(60.0, 1.6 * mu, max(math.pi * mu / 2.0 - 5.0, 6.0))


def _near_integer(z: complex, tol: float = 1e-6) -> bool:
    return abs(z.imag) < tol and abs(z.real - round(z.real)) < tol


def _bessel_i_series(order, x, terms=None):
    """I_order(x) by the ascending series, vectorized over x (array)."""
    x = np.asarray(x, dtype=float)
    q = x * x / 4.0
    if terms is None:
        terms = int(60 + 1.2 * float(x.max()))
    t0 = np.exp(order * np.log(x / 2.0) - log_gamma(order + 1.0))
    term = t0.astype(complex)
    total = term.copy()
    for k in range(1, terms):
        term = term * q / (k * (order + k))
        total += term
    return total


def _bessel_k_series(order, x):
    """K_order(x) = pi (I_{-order} - I_{order}) / (2 sin(pi order)).

    Accurate to near machine precision for small-to-moderate x, including
    purely imaginary order where the integral representation suffers
    e^{pi|Im order|/2} cancellation.  Requires order not near an integer.
    """
    order = complex(order)
    x = np.asarray(x, dtype=float)
    if order.real == 0.0 and order.imag != 0.0:
        # K_{i mu}(x) = -pi Im(I_{i mu}(x)) / sinh(pi mu), manifestly real
        mu = order.imag
        i_val = _bessel_i_series(order, x)
        return (-math.pi * np.imag(i_val) / math.sinh(math.pi * mu)).astype(complex)
    i_plus = _bessel_i_series(order, x)
    i_minus = _bessel_i_series(-order, x)
    return math.pi * (i_minus - i_plus) / (2.0 * np.sin(math.pi * order))


def _kbessel_integrand_params(order, x):
    """Truncation point for the cosh integral, from the decay target."""
    target = 50.0  # e^{-50} below double rounding relative to the peak
    re_nu = abs(order.real)
    u = math.acosh(1.0 + (target + 10.0) / x) if x < target else math.acosh((x + target) / x)
    # account for cosh(Re nu * u) growth; a couple of fixed-point passes
    for _ in range(4):
        u = math.acosh((x + target + re_nu * u) / x)
    return u


def _bessel_k_single(order, x, spec):
    u_max = _kbessel_integrand_params(order, x)
    freq = abs(order.imag)
    h = min(0.5, 2.0 * math.pi / (8.0 * (freq + math.sqrt(x) + 4.0)))
    prev = None
    for _ in range(spec.max_levels):
        m = int(u_max / h) + 1
        u = np.arange(m + 1) * (u_max / m)
        fx = np.exp(-x * np.cosh(u)) * np.cosh(order * u)
        fx[0] *= 0.5
        fx[-1] *= 0.5
        val = (u_max / m) * np.sum(fx)
        if prev is not None and abs(val - prev) <= spec.rel_tol * abs(val) + spec.abs_tol:
            return val
        prev = val
        h *= 0.5
    return prev


def bessel_k_ex(order, x, spec: QuadratureSpec = DEFAULT_SPEC, order_ceiling: float = 200.0):
    """K_order(x) together with an underflow flag.

    Integrates exp(-x cosh u) cosh(order*u) by the trapezoid rule with
    adaptive step halving.  Returns (value, underflowed); underflowed means
    the result is below double range and an exact zero was substituted.
    """
    order = complex(order)
    x = float(x)
    if x < 1e-8:
        raise DivergenceError("bessel_k requires x >= 1e-8")
    if abs(order) > order_ceiling:
        raise CeilingError(f"|order| = {abs(order)} exceeds ceiling {order_ceiling}")
    if x > 700.0 + abs(order.imag) * math.pi / 2.0:
        return 0.0 + 0.0j, True
    if _use_series(order, x):
        val = complex(_bessel_k_series(order, np.array([x]))[0])
    else:
        val = _bessel_k_single(order, x, spec)
    # real for real or purely imaginary order (and real x)
    if order.imag == 0.0 or order.real == 0.0:
        val = complex(val.real, 0.0)
    return val, False


def bessel_k(order, x, spec: QuadratureSpec = DEFAULT_SPEC, order_ceiling: float = 200.0):
    """K_order(x) for x > 0; real-valued when order is real or purely imaginary."""
    val, _ = bessel_k_ex(order, x, spec, order_ceiling)
    return val


def bessel_k_grid(order, xs, spec: QuadratureSpec = DEFAULT_SPEC):
    """Vectorized K_order over an array of positive x (shared order).

    Uses one trapezoid grid sized for the smallest x; entries above the
    underflow threshold come back as exact zeros.
    """
    order = complex(order)
    xs = np.asarray(xs, dtype=float)
    out = np.zeros(xs.shape, dtype=complex)
    thresh = 700.0 + abs(order.imag) * math.pi / 2.0
    live = (xs <= thresh) & (xs >= 1e-8)
    if not np.any(live):
        return out
    if abs(order.imag) >= 8.0 and not _near_integer(order):
        small = live & (xs <= _series_window(abs(order.imag)))
        if np.any(small):
            out[small] = _bessel_k_series(order, xs[small])
            live = live & ~small
    if not np.any(live):
        if order.imag == 0.0 or order.real == 0.0:
            out = out.real.astype(complex)
        return out
    xl = xs[live]
    x_min = float(xl.min())
    u_max = _kbessel_integrand_params(order, x_min)
    freq = abs(order.imag)
    h = min(0.5, 2.0 * math.pi / (8.0 * (freq + math.sqrt(x_min) + 4.0)))
    prev = None
    for _ in range(spec.max_levels):
        m = int(u_max / h) + 1
        u = np.arange(m + 1) * (u_max / m)
        weights = np.ones(m + 1)
        weights[0] = weights[-1] = 0.5
        kern = np.cosh(order * u) * weights
        vals = (u_max / m) * np.exp(-np.multiply.outer(xl, np.cosh(u))) @ kern
        if prev is not None:
            err = np.max(np.abs(vals - prev) / (np.abs(vals) + spec.abs_tol))
            if err <= spec.rel_tol:
                prev = vals
                break
        prev = vals
        h *= 0.5
    if order.imag == 0.0 or order.real == 0.0:
        prev = prev.real.astype(complex)
    out[live] = prev
    return out
