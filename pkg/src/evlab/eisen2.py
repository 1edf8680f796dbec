"""GL(2) geometric layer: fundamental-domain reduction, Eisenstein and
Maass-form evaluation from Fourier expansions, the unfolded series computed
two independent ways, and brute-force quadrature of triple products.

The central identity implemented twice:

    I(s, phi) = int_X phi(z) E(z, s1) E(z, s) dmu(z),   s1 = 1 - n/4 + i n t/2

unfolds to a coefficient sum against a K-Bessel y-moment (``i_series``) and
in closed form to a Gamma-quartet times L-values over completed zetas
(``i_closed``).  The two share no code beyond the coefficient data, so their
agreement is the working check on the whole normalization chain.

Scale note: for the shipped forms the Gamma-quartet is ~e^{-2 pi t_phi}
small while every individual factor is O(1) after the e^{pi t_phi / 2}
normalization of rho(1); all assemblies go through log space, and the
numeric Bessel moment relies on the near-machine relative accuracy of the
series branch of :func:`evlab.specfun.bessel_k`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import specfun
from .errors import (
    BudgetExceededError,
    DivergenceError,
    PoleError,
    RegionError,
)
from .lfun import l_dirichlet, taper
from .maass import MaassForm, hecke_lambda, hecke_lambda_range, rho1_squared

__all__ = [
    "UpperHalfPoint",
    "TripleProductResult",
    "reduce",
    "eisenstein_value",
    "maass_value",
    "bessel_moment",
    "bessel_moment_closed",
    "i_series",
    "i_closed",
    "triple_product",
    "fundamental_domain_integral",
]

Y_CAP_DEFAULT = 12.0


@dataclass(frozen=True)
class UpperHalfPoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("y must be positive")


@dataclass(frozen=True)
class TripleProductResult:
    value: complex
    quadrature_err: float
    points_used: int

    def __post_init__(self):
        if self.quadrature_err < 0:
            raise ValueError("quadrature_err must be nonnegative")


def reduce(z: UpperHalfPoint) -> UpperHalfPoint:
    """SL2(Z) reduction to |x| <= 1/2, x^2 + y^2 >= 1 (Gauss algorithm)."""
    x, y = z.x, z.y
    for _ in range(10_000):
        x -= round(x)
        norm = x * x + y * y
        if norm >= 1.0 - 1e-15:
            break
        x, y = -x / norm, y / norm
    return UpperHalfPoint(x=x, y=y)


# ----------------------------------------------------------------------
# Fourier-expansion evaluators
# ----------------------------------------------------------------------

def _sigma_powers(nu: complex, m_max: int) -> np.ndarray:
    """sigma_nu(m) for m = 1..m_max (index 0 unused)."""
    sig = np.zeros(m_max + 1, dtype=complex)
    for d in range(1, m_max + 1):
        sig[d::d] += np.exp(nu * math.log(d)) if d > 1 else 1.0
    return sig


def eisenstein_value(s: complex, z: UpperHalfPoint, m_max: int = 40) -> complex:
    """E(z, s) from its Fourier expansion.

    E = y^s + (Lambda(2s-1)/Lambda(2s)) y^{1-s}
        + (4/Lambda(2s)) sum_m m^{s-1/2} sigma_{1-2s}(m) sqrt(y)
          K_{s-1/2}(2 pi m y) cos(2 pi m x)

    The expansion converges for every y > 0; the advertised contract is a
    reduced z (y >= sqrt(3)/2), where m_max ~ 40 is far beyond the Bessel
    decay.
    """
    s = complex(s)
    if abs(s - 1.0) < 1e-8:
        raise PoleError("E(z, s) has its pole at s = 1")
    y, x = z.y, z.x
    log_l2s = specfun.log_completed_zeta(2.0 * s)
    const = np.exp(specfun.log_completed_zeta(2.0 * s - 1.0) - log_l2s)
    out = np.exp(s * math.log(y)) + const * np.exp((1.0 - s) * math.log(y))

    ms = np.arange(1, m_max + 1, dtype=float)
    sig = _sigma_powers(1.0 - 2.0 * s, m_max)[1:]
    kvals = specfun.bessel_k_grid(s - 0.5, 2.0 * math.pi * ms * y)
    terms = (
        np.exp((s - 0.5) * np.log(ms))
        * sig
        * math.sqrt(y)
        * kvals
        * np.cos(2.0 * math.pi * ms * x)
    )
    return complex(out + 4.0 * np.exp(-log_l2s) * np.sum(terms))


def maass_value(form: MaassForm, z: UpperHalfPoint, m_max: int = 40) -> float:
    """phi(z) from the Fourier expansion with rho(1) = +sqrt(rho1_squared).

    phi = sqrt(y) sum_m rho(1) lambda(m) K_{i t}(2 pi m y) * 2 trig(2 pi m x)
    with trig = cos for even forms, sin for odd.
    """
    t = form.spectral_param
    y, x = z.y, z.x
    rho1 = math.sqrt(rho1_squared(form))
    ms = np.arange(1, m_max + 1, dtype=float)
    lam, known = hecke_lambda_range(form, m_max)
    if not np.all(known[1:]):
        missing = int(np.flatnonzero(~known[1:])[0] + 1)
        hecke_lambda(form, missing)  # raises with the precise index
    trig = np.cos if form.is_even else np.sin
    kvals = specfun.bessel_k_grid(1j * t, 2.0 * math.pi * ms * y).real
    total = np.sum(lam[1:] * kvals * 2.0 * trig(2.0 * math.pi * ms * x))
    return float(rho1 * math.sqrt(y) * total)


class _KernelSpline:
    """Cubic spline of K_order(x) (optionally scaled) on [x_lo, x_hi].

    Quadrature over the fundamental domain hits the same Bessel kernel at
    millions of arguments >= 2 pi sqrt(3)/2; a dense spline makes that a
    table lookup.  Beyond x_hi the kernel is treated as exactly zero (the
    range is chosen so the scaled kernel is below 1e-12 there).
    """

    def __init__(self, order: complex, x_lo: float, x_hi: float, scale: float = 1.0):
        n = int((x_hi - x_lo) / 0.002) + 2
        xs = np.linspace(x_lo, x_hi, n)
        vals = specfun.bessel_k_grid(order, xs) * scale
        self.x_lo, self.x_hi = x_lo, x_hi
        self._re = CubicSpline(xs, vals.real)
        self._im = CubicSpline(xs, vals.imag) if np.any(vals.imag != 0.0) else None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.x_lo) & (x <= self.x_hi)
        xc = np.clip(x, self.x_lo, self.x_hi)
        out = self._re(xc).astype(complex)
        if self._im is not None:
            out = out + 1j * self._im(xc)
        out[~inside] = 0.0
        return out


def _maass_grid(form: MaassForm, xs, ys, kernel: _KernelSpline, lam: np.ndarray):
    t = form.spectral_param
    trig = np.cos if form.is_even else np.sin
    total = np.zeros(xs.shape)
    m_max = lam.size - 1
    for m in range(1, m_max + 1):
        arg = 2.0 * math.pi * m * ys
        total += lam[m] * kernel(arg).real * 2.0 * trig(2.0 * math.pi * m * xs)
    return np.sqrt(ys) * total


def _eisen_grid(s: complex, xs, ys, kernel: _KernelSpline, m_max: int):
    log_l2s = specfun.log_completed_zeta(2.0 * s)
    const = np.exp(specfun.log_completed_zeta(2.0 * s - 1.0) - log_l2s)
    out = np.exp(s * np.log(ys)) + const * np.exp((1.0 - s) * np.log(ys))
    sig = _sigma_powers(1.0 - 2.0 * s, m_max)
    pref = 4.0 * np.exp(-log_l2s)
    acc = np.zeros(xs.shape, dtype=complex)
    for m in range(1, m_max + 1):
        arg = 2.0 * math.pi * m * ys
        acc += (
            np.exp((s - 0.5) * math.log(m))
            * sig[m]
            * kernel(arg)
            * np.cos(2.0 * math.pi * m * xs)
        )
    return out + pref * np.sqrt(ys) * acc


# ----------------------------------------------------------------------
# Bessel y-moment, numeric and closed
# ----------------------------------------------------------------------

def bessel_moment(mu: float, nu: complex, s: complex,
                  spec: specfun.QuadratureSpec = specfun.DEFAULT_SPEC,
                  rel_target: float = 1e-8) -> complex:
    """int_0^inf K_{i mu}(2 pi y) K_nu(2 pi y) y^s dy/y by quadrature.

    Substituting y = e^u makes the integrand decay exponentially on both
    ends (rate Re(s) - |Re nu| on the left, double-exponentially on the
    right), so the trapezoid rule converges spectrally.  The result can be
    exponentially smaller than the integrand peak (oscillation of K_{i mu}),
    which is why the kernel itself must be accurate in relative terms.
    """
    nu = complex(nu)
    s = complex(s)
    margin = s.real - abs(nu.real)
    if margin <= 0.05:
        raise DivergenceError(
            f"bessel_moment needs Re(s) > |Re(nu)|, got margin {margin:.3f}"
        )
    u_hi = math.log((60.0 + 1.6 * (abs(mu) + abs(nu.imag))) / (2.0 * math.pi))
    u_lo = min(-40.0 / margin, -4.0)
    freq = abs(mu) + abs(nu.imag) + abs(s.imag) + 5.0
    h = 2.0 * math.pi / (10.0 * freq)

    prev = None
    val = 0.0 + 0.0j
    for _ in range(spec.max_levels):
        n = int((u_hi - u_lo) / h) + 1
        u = u_lo + np.arange(n + 1) * ((u_hi - u_lo) / n)
        x = 2.0 * math.pi * np.exp(u)
        f = (
            specfun.bessel_k_grid(1j * mu, x)
            * specfun.bessel_k_grid(nu, x)
            * np.exp(s * u)
        )
        f[0] *= 0.5
        f[-1] *= 0.5
        val = complex(((u_hi - u_lo) / n) * np.sum(f))
        if prev is not None and abs(val - prev) <= rel_target * abs(val):
            return val
        prev = val
        h *= 0.5
    return val


def bessel_moment_closed(mu: float, nu: complex, s: complex) -> complex:
    """Gamma-product closed form of :func:`bessel_moment`.

    With alpha = i mu and c = 2 pi:

        (2^{s-3} / (c^s Gamma(s))) Gamma((s+alpha+nu)/2) Gamma((s-alpha+nu)/2)
                                   Gamma((s+alpha-nu)/2) Gamma((s-alpha-nu)/2)

    validated against the quadrature path before anything downstream trusts
    it (the identity suite runs both).
    """
    nu = complex(nu)
    s = complex(s)
    if s.real - abs(nu.real) <= 0.05:
        raise DivergenceError("bessel_moment_closed outside convergence region")
    a = 1j * mu
    log_val = (
        (s - 3.0) * math.log(2.0)
        - s * specfun.LOG_2PI
        - specfun.log_gamma(s)
        + specfun.log_gamma((s + a + nu) / 2.0)
        + specfun.log_gamma((s - a + nu) / 2.0)
        + specfun.log_gamma((s + a - nu) / 2.0)
        + specfun.log_gamma((s - a - nu) / 2.0)
    )
    return complex(np.exp(log_val))


# ----------------------------------------------------------------------
# the unfolded series, two ways
# ----------------------------------------------------------------------

def _require_even(form: MaassForm, what: str):
    if not form.is_even:
        raise RegionError(f"{what} is defined for even forms only; the odd case "
                          "vanishes through the x-integral, not term by term")


def _check_i_region(n: int, s: complex):
    if n < 3:
        raise RegionError("n >= 3 required")
    if s.real < 1.6:
        raise RegionError("Re(s) >= 1.6 required for absolute convergence")
    if s.real + 0.5 - n / 4.0 < 1.2:
        raise RegionError(
            f"shifted L-argument Re = {s.real + 0.5 - n / 4.0:.2f} leaves the "
            "series-evaluable region; raise Re(s) or lower n"
        )


def i_series(form: MaassForm, n: int, t: float, s: complex, m_max: int = 30000) -> complex:
    """I(s, phi) as the unfolded coefficient sum times the Bessel moment.

    I = (4 rho(1) / Lambda(2 - n/2 + i n t))
        * sum_m lambda(m) sigma_{n/2-1-int}(m) m^{-s+1/2-n/4+int/2}
        * int K_{i t_phi}(2 pi y) K_beta(2 pi y) y^s dy/y,
    beta = 1/2 - n/4 + i n t / 2.

    The y-moment is independent of m, so it is computed once (numerically;
    the closed-form path lives in i_closed).  The m-sum uses the same taper
    and the same default cutoff as l_dirichlet: coefficient truncation and
    unknown-coefficient skips then line up term by term with the L-factors
    inside i_closed and cancel to first order in the comparison.
    """
    s = complex(s)
    _require_even(form, "i_series")
    _check_i_region(n, s)
    t_phi = form.spectral_param
    beta = 0.5 - n / 4.0 + 1j * n * t / 2.0
    moment = bessel_moment(t_phi, beta, s)

    lam, known = hecke_lambda_range(form, m_max)
    ms = np.arange(1, m_max + 1, dtype=float)
    sig = _sigma_powers(n / 2.0 - 1.0 - 1j * n * t, m_max)[1:]
    expo = -s + 0.5 - n / 4.0 + 1j * n * t / 2.0
    weights = taper(ms, m_max) * np.exp(expo * np.log(ms))
    coeff_sum = complex(np.sum(np.where(known[1:], lam[1:], 0.0) * sig * weights))

    rho1 = math.sqrt(rho1_squared(form))
    lam_denom = np.exp(specfun.log_completed_zeta(2.0 - n / 2.0 + 1j * n * t))
    # prefactor 4: each cosine expansion carries a 2, the x-integral a 1/2;
    # confirmed against brute-force fundamental-domain quadrature
    return complex(4.0 * rho1 / lam_denom * coeff_sum * moment)


def i_closed(form: MaassForm, n: int, t: float, s: complex) -> complex:
    """I(s, phi) in closed form.

    I = (rho(1) / (2 pi^{2s})) * Gamma-quartet * L(w) L(w - nu)
        / (Lambda(2 - n/2 + i n t) Lambda(2s)),
    w = s - 1/2 + n/4 - i n t/2, nu = n/2 - 1 - i n t; the quartet is
    Gamma at (w - nu)/2 +- i t_phi/2 and w/2 +- i t_phi/2.

    Both L-factors are evaluated by the same tapered coefficient sum that
    i_series uses, so coefficient-data limitations cancel between the two
    paths to first order.
    """
    s = complex(s)
    _require_even(form, "i_closed")
    _check_i_region(n, s)
    t_phi = form.spectral_param
    w = s - 0.5 + n / 4.0 - 1j * n * t / 2.0
    w_shift = s + 0.5 - n / 4.0 + 1j * n * t / 2.0  # = w - nu

    l1 = l_dirichlet(form, w)
    l2 = l_dirichlet(form, w_shift)
    rho1 = math.sqrt(rho1_squared(form))

    log_val = (
        math.log(rho1 / 2.0)
        - 2.0 * s * specfun.LOG_PI
        + specfun.log_gamma(w_shift / 2.0 + 1j * t_phi / 2.0)
        + specfun.log_gamma(w_shift / 2.0 - 1j * t_phi / 2.0)
        + specfun.log_gamma(w / 2.0 + 1j * t_phi / 2.0)
        + specfun.log_gamma(w / 2.0 - 1j * t_phi / 2.0)
        + np.log(l1.value)
        + np.log(l2.value)
        - specfun.log_completed_zeta(2.0 - n / 2.0 + 1j * n * t)
        - specfun.log_completed_zeta(2.0 * s)
    )
    return complex(np.exp(log_val))


# ----------------------------------------------------------------------
# brute-force quadrature over the fundamental domain
# ----------------------------------------------------------------------

def fundamental_domain_integral(func, y_cap: float = Y_CAP_DEFAULT,
                                base: int = 24, max_levels: int = 8,
                                rel_tol: float = 1e-7, abs_tol: float = 1e-8):
    """int over the (truncated) fundamental domain of func(x, y) dx dy / y^2.

    The y-column over each x is mapped to [0, 1] by y = c(x) (y_cap/c(x))^u
    with c(x) = sqrt(1 - x^2), which absorbs both the curved lower boundary
    and the 1/y^2 measure into a smooth integrand on a rectangle; composite
    Simpson is then refined with Richardson error control.

    Returns (value, err, points_used); raises BudgetExceededError with the
    partial result attached if the tolerance is not reached.
    """
    prev = None
    val = 0.0 + 0.0j
    err = math.inf
    points = 0
    for level in range(max_levels):
        n = base * 2**level
        xs1 = np.linspace(-0.5, 0.5, n + 1)
        us1 = np.linspace(0.0, 1.0, n + 1)
        x2, u2 = np.meshgrid(xs1, us1, indexing="ij")
        c = np.sqrt(1.0 - x2 * x2)
        ratio = y_cap / c
        y2 = c * ratio**u2
        f = np.asarray(func(x2, y2), dtype=complex)
        g = f * np.log(ratio) / y2  # (dy/du) / y^2 = log(ratio) / y

        wx = _simpson_weights(n) * (1.0 / n)
        wu = _simpson_weights(n) * (1.0 / n)
        val = complex(wx @ g @ wu)
        points += (n + 1) ** 2
        if prev is not None:
            err = abs(val - prev)
            if err <= max(rel_tol * abs(val), abs_tol):
                return val, err, points
        prev = val
    raise BudgetExceededError(
        f"fundamental-domain quadrature stalled at err ~ {err:.2e}",
        partial=TripleProductResult(value=val, quadrature_err=err, points_used=points),
    )


def _simpson_weights(n: int) -> np.ndarray:
    if n % 2 != 0:
        raise ValueError("Simpson rule needs an even panel count")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def triple_product(form: MaassForm, s1: complex, s2: complex,
                   spec: specfun.QuadratureSpec = specfun.DEFAULT_SPEC,
                   y_cap: float = Y_CAP_DEFAULT,
                   rel_tol: float = 1e-6, abs_tol: float = 1e-8) -> TripleProductResult:
    """Brute-force int phi(z) E(z, s1) E(z, s2) dmu over the truncated domain.

    The cusp form's e^{-2 pi y} decay bounds the discarded y > y_cap tail.
    Error is the Richardson difference of the last two refinement levels.
    """
    s1 = complex(s1)
    s2 = complex(s2)
    t = form.spectral_param
    x_lo = 2.0 * math.pi * math.sqrt(3.0) / 2.0 - 1e-9
    x_hi = t + 50.0
    k_phi = _KernelSpline(1j * t, x_lo, x_hi, scale=math.exp(math.pi * t / 2.0))
    k_e1 = _KernelSpline(s1 - 0.5, x_lo, max(50.0, abs(s1.imag) * 1.6 + 50.0))
    k_e2 = _KernelSpline(s2 - 0.5, x_lo, max(50.0, abs(s2.imag) * 1.6 + 50.0))
    m_max = int(x_hi / (2.0 * math.pi * math.sqrt(3.0) / 2.0)) + 1
    lam, known = hecke_lambda_range(form, m_max)
    if not np.all(known[1:]):
        hecke_lambda(form, int(np.flatnonzero(~known[1:])[0] + 1))
    rho1_scaled = math.sqrt(rho1_squared(form)) * math.exp(-math.pi * t / 2.0)

    def integrand(xs, ys):
        phi = rho1_scaled * _maass_grid(form, xs, ys, k_phi, lam)
        e1 = _eisen_grid(s1, xs, ys, k_e1, m_max=10)
        e2 = _eisen_grid(s2, xs, ys, k_e2, m_max=10)
        return phi * e1 * e2

    val, err, pts = fundamental_domain_integral(
        integrand, y_cap=y_cap, rel_tol=rel_tol, abs_tol=abs_tol
    )
    # cuspidal tail beyond y_cap: |phi| <~ e^{-2 pi y}, E ~ y^{max Re s}
    tail = math.exp(-2.0 * math.pi * y_cap) * y_cap ** (
        max(s1.real, 1 - s1.real) + max(s2.real, 1 - s2.real)
    )
    return TripleProductResult(value=val, quadrature_err=err + tail, points_used=pts)
