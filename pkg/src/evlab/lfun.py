"""Evaluation of L(s, phi) and its completed and adjoint companions.

Methods, by region:

* ``l_dirichlet``     -- smoothed coefficient sum, Re(s) >= 1.2
* ``l_afe``           -- two-sum approximate functional equation on the
                         critical line, fast enough for t-grid scans
* ``afe_smoothed``    -- independent smoothed-weight AFE; slower, works
                         anywhere in the strip, used as a cross-check oracle
* ``completed_l``     -- Lambda(s, phi), picking a method automatically
* ``completed_adjoint_l`` -- Lambda(s, ad phi) for Re(s) >= 1

The two AFE implementations are deliberately different formula families.
``l_afe`` uses plateau weights W^{+-}(q), q = tau/(2 pi m), defined by the
contour integral (1/2 pi i) int q^s exp(s^2 +- i pi s/2) ds/s; these depend
on a single variable, so they are tabulated once on a log-q grid and spline
interpolated, which is what makes vectorized moment scans cheap.  The
reflected-sum prefactor is the exact archimedean ratio gamma(1-s)/gamma(s)
rather than its Stirling approximation; at desk-scale heights the Stirling
phase error is several orders above the cross-check tolerances, and the
exact ratio costs two log-gamma calls.

``afe_smoothed`` instead pushes the exact gamma-factor ratio through the
contour, V_s(y) = (1/2 pi i) int exp(u^2) (gamma(s+u)/gamma(s)) y^{-u} du/u,
so its only error sources are quadrature and coefficient truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import PoleError, RegionError
from .maass import MaassForm, adjoint_l_at_1, hecke_lambda_range

__all__ = [
    "LValue",
    "l_dirichlet",
    "l_afe",
    "l_afe_grid",
    "afe_weight",
    "afe_smoothed",
    "completed_l",
    "completed_adjoint_l",
    "log_gamma_factor",
    "log_root_ratio",
]

_KS = 7.0 / 64.0
# truncation-error constant charged per the O(T^{-1/2+eps}) remainder
_AFE_TAIL_CONST = 10.0
_AFE_EPS = 0.1


@dataclass(frozen=True)
class LValue:
    value: complex
    err_estimate: float
    method: str  # dirichlet_series | afe_paper | afe_smoothed | functional_equation

    def __post_init__(self):
        if self.err_estimate < 0:
            raise ValueError("err_estimate must be nonnegative")


# ----------------------------------------------------------------------
# archimedean factors
# ----------------------------------------------------------------------

def _parity_shift(form: MaassForm) -> float:
    # gamma factors are Gamma((s + delta +- i t)/2) with delta = 0 (even), 1 (odd)
    return 0.0 if form.is_even else 1.0


def log_gamma_factor(form: MaassForm, s):
    """log of gamma(s) = pi^{-s} Gamma((s+d+it)/2) Gamma((s+d-it)/2)."""
    s = np.asarray(s, dtype=complex)
    d = _parity_shift(form)
    t = form.spectral_param
    out = (
        -s * specfun.LOG_PI
        + specfun.log_gamma((s + d + 1j * t) / 2.0)
        + specfun.log_gamma((s + d - 1j * t) / 2.0)
    )
    return complex(out) if out.shape == () else out


def log_root_ratio(form: MaassForm, s):
    """log of gamma(1-s)/gamma(s), the exact reflected-sum prefactor."""
    return log_gamma_factor(form, 1.0 - np.asarray(s, dtype=complex)) - log_gamma_factor(
        form, s
    )


def _root_sign(form: MaassForm) -> float:
    # Lambda(s) = eps Lambda(1-s); +1 for even forms, -1 for odd (delta = 1)
    return 1.0 if form.is_even else -1.0


# ----------------------------------------------------------------------
# coefficient plumbing
# ----------------------------------------------------------------------

def _coeff_range(form: MaassForm, m_max: int):
    """Cached (lam, known) arrays; grows monotonically per form."""
    cache = getattr(form, "_coeff_range_cache", None)
    if cache is None or cache[0] < m_max:
        lam, known = hecke_lambda_range(form, m_max)
        object.__setattr__(form, "_coeff_range_cache", (m_max, lam, known))
        cache = (m_max, lam, known)
    return cache[1][: m_max + 1], cache[2][: m_max + 1]


def _divisor_counts(m_max: int):
    d = np.zeros(m_max + 1)
    for k in range(1, m_max + 1):
        d[k::k] += 1.0
    return d


# ----------------------------------------------------------------------
# Dirichlet series region
# ----------------------------------------------------------------------

def taper(m, m_max):
    """Smooth truncation profile: ~1 through m_max/2, ~0 past m_max.

    An analytic taper makes the truncation error of a Dirichlet sum decay
    superpolynomially in m_max (Mellin shift far left of the abscissa),
    instead of the M^{-(sigma-1)}-type error of a sharp cutoff.
    """
    return np.exp(-((np.asarray(m, dtype=float) / (0.72 * m_max)) ** 24))


def l_dirichlet(form: MaassForm, s: complex, m_max: int = 30000) -> LValue:
    """L(s, phi) by smoothly tapered coefficient summation, Re(s) >= 1.2.

    Terms whose factorization needs a prime beyond the stored range are
    skipped and charged to err_estimate via the |lambda(m)| <= d(m) m^{7/64}
    envelope; the taper makes the truncation tail negligible against that.
    """
    s = complex(s)
    if s.real < 1.2:
        raise RegionError(f"l_dirichlet requires Re(s) >= 1.2, got {s.real}")
    lam, known = _coeff_range(form, m_max)
    m = np.arange(1, m_max + 1, dtype=float)
    weights = taper(m, m_max) * np.exp(-s * np.log(m))
    mask = known[1:]
    value = complex(np.sum(lam[1:][mask] * weights[mask]))

    envelope = _divisor_counts(m_max)[1:] * m ** (_KS - s.real)
    skipped = float(np.sum(envelope[~mask] * np.abs(weights[~mask]) * m[~mask] ** s.real))
    # residual taper distortion, estimated by halving the window
    half_w = taper(m, m_max // 2) * np.exp(-s * np.log(m))
    half = complex(np.sum(lam[1:][mask] * half_w[mask]))
    return LValue(
        value=value,
        err_estimate=skipped + 2.0 * abs(value - half),
        method="dirichlet_series",
    )


# ----------------------------------------------------------------------
# plateau weights W^{+-}
# ----------------------------------------------------------------------

_WEIGHT_LOGQ_LO = -12.0
_WEIGHT_LOGQ_HI = 10.0
_WEIGHT_TABLE_STEP = 0.002
_weight_table_cache = None


def _weight_contour(logq, height=9.0, step=0.005, c=1.0):
    """W^-(q) on an array of log q by trapezoid over the line Re(s) = c."""
    logq = np.asarray(logq, dtype=float)
    n = int(2 * height / step)
    v = -height + np.arange(n + 1) * (2 * height / n)
    sline = c + 1j * v
    kern = np.exp(sline * sline - 1j * math.pi * sline / 2.0) / sline
    kern[0] *= 0.5
    kern[-1] *= 0.5
    kern *= (2 * height / n) / (2.0 * math.pi)
    return np.exp(np.multiply.outer(logq, sline)) @ kern


def _weight_table():
    # dense table + linear interpolation: at step 0.002 the interpolation
    # error ~ |W''| h^2 / 8 ~ 5e-7, far under the AFE's own accuracy, and
    # evaluation is an order of magnitude faster than a spline call on the
    # moment-integral grids
    global _weight_table_cache
    if _weight_table_cache is None:
        grid = np.arange(_WEIGHT_LOGQ_LO, _WEIGHT_LOGQ_HI + 1e-9, _WEIGHT_TABLE_STEP)
        vals = _weight_contour(grid)
        _weight_table_cache = (grid, np.ascontiguousarray(vals.real),
                               np.ascontiguousarray(vals.imag))
    return _weight_table_cache


def weight_minus(logq):
    """Tabulated W^-(q) as a function of log q (vectorized)."""
    logq = np.asarray(logq, dtype=float)
    grid, tab_re, tab_im = _weight_table()
    # uniform table: direct index arithmetic beats np.interp's search and
    # avoids the large complex temporaries on moment-integral grids
    pos = (logq - _WEIGHT_LOGQ_LO) * (1.0 / _WEIGHT_TABLE_STEP)
    np.clip(pos, 0.0, float(grid.size - 1), out=pos)
    base = pos.astype(np.intp)
    np.minimum(base, grid.size - 2, out=base)
    frac = pos - base
    out = np.empty(logq.shape, dtype=complex)
    out.real = tab_re[base] * (1.0 - frac) + tab_re[base + 1] * frac
    out.imag = tab_im[base] * (1.0 - frac) + tab_im[base + 1] * frac
    out[logq > _WEIGHT_LOGQ_HI] = 1.0
    out[logq < _WEIGHT_LOGQ_LO] = 0.0
    return out


def afe_weight(t: float, m: int, sign: int, n: int = 3, height: float = 9.0,
               step: float = 0.005) -> complex:
    """W_t^{+-}(m) by direct contour quadrature (reference-grade, unsplined).

    sign = +1 or -1 selects W^+ or W^-.  The contour is the vertical line
    Re(s) = 1 truncated where exp(s^2) has decayed below double rounding;
    the step is far inside the trapezoid's spectral-accuracy regime.
    """
    if t < 2:
        raise RegionError("afe_weight requires t >= 2")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    logq = math.log(n * t / (2.0 * math.pi * m))
    val = complex(_weight_contour(np.array([logq]), height=height, step=step)[0])
    return val.conjugate() if sign == 1 else val


# ----------------------------------------------------------------------
# two-sum AFE on the critical line
# ----------------------------------------------------------------------

def _afe_m_cut(tau: float, m_cap: int | None) -> int:
    # carry the sum until the plateau weight is ~5e-3 (log q ~ -4.6)
    cut = int(math.ceil(tau / (2.0 * math.pi) * math.exp(4.6))) + 8
    if m_cap is not None:
        cut = min(cut, m_cap)
    return cut


def _phase_block(tb: np.ndarray, log_m: np.ndarray) -> np.ndarray:
    """m^{i tau} for a block of taus against a log-m row.

    Uniformly spaced blocks (the moment-integral case) are built from one
    exponential row and a running product; the multiplicative drift after r
    rows is ~ r * eps, far below the AFE's accuracy floor.
    """
    if tb.size >= 3:
        d = np.diff(tb)
        if np.all(np.abs(d - d[0]) <= 1e-9 * max(abs(float(d[0])), 1e-12)):
            out = np.empty((tb.size, log_m.size), dtype=complex)
            out[0] = np.exp(1j * tb[0] * log_m)
            stepv = np.exp(1j * d[0] * log_m)
            for k in range(1, tb.size):
                np.multiply(out[k - 1], stepv, out=out[k])
            return out
    return np.exp(1j * np.multiply.outer(tb, log_m))


def l_afe_grid(form: MaassForm, taus, m_cap: int | None = 40000):
    """L(1/2 - i tau, phi) for an array of tau >= 2, vectorized.

    Returns (values, err_estimates).  This is the throughput path for the
    moment integrals: weights come from the spline table, the reflected-sum
    prefactor from vectorized log-gamma.
    """
    taus = np.asarray(taus, dtype=float)
    if np.any(taus < 2.0):
        raise RegionError("l_afe requires |Im s| >= 2")
    m_cut = _afe_m_cut(float(taus.max()), m_cap)
    lam, known = _coeff_range(form, m_cut)
    m = np.arange(1, m_cut + 1, dtype=float)
    log_m = np.log(m)
    coeff = np.where(known[1:], lam[1:], 0.0) / np.sqrt(m)
    env_unknown = np.where(known[1:], 0.0, _divisor_counts(m_cut)[1:] * m ** (_KS - 0.5))

    s0 = 0.5 - 1j * taus
    log_x = log_root_ratio(form, s0)
    x_ratio = np.exp(log_x) * _root_sign(form)

    values = np.zeros(taus.shape, dtype=complex)
    errs = np.zeros(taus.shape)
    chunk = max(1, int(3.0e7 / m_cut))
    for lo in range(0, taus.size, chunk):
        tb = taus.flat[lo : lo + chunk]
        m_hi = _afe_m_cut(float(tb.max()), m_cap)
        phase = _phase_block(tb, log_m[:m_hi])  # m^{i tau}
        logq = np.log(tb)[:, None] - (specfun.LOG_2PI + log_m[:m_hi])[None, :]
        w = weight_minus(logq)
        # truncate each row at its own tau's cutoff so batched evaluation
        # agrees with the scalar path exactly
        w = np.where(logq >= -4.6 - 1e-12, w, 0.0)
        first = (phase * w) @ coeff[:m_hi]
        # real coefficients: the W^+ sum is the conjugate of the W^- sum
        second = np.conj(first)
        values.flat[lo : lo + chunk] = first + x_ratio.flat[lo : lo + chunk] * second
        # unknown-coefficient charge, weighted by the local plateau value
        errs.flat[lo : lo + chunk] = 2.0 * (np.abs(w) @ env_unknown[:m_hi])
    errs += _AFE_TAIL_CONST * taus ** (-0.5 + _AFE_EPS)
    return values, errs


def l_afe(form: MaassForm, s: complex, t_scale: float | None = None,
          m_cap: int | None = 40000) -> LValue:
    """L(s, phi) near the critical line via the two-sum AFE.

    ``s`` must satisfy |Im s| >= 2; points in the upper half-plane are
    computed by conjugation (real coefficients).  ``t_scale`` is accepted
    for interface compatibility; the effective scale is |Im s| itself.
    """
    s = complex(s)
    tau = -s.imag
    if abs(tau) < 2.0:
        raise RegionError(f"l_afe requires |Im s| >= 2, got {abs(tau)}")
    conjugated = tau < 0
    vals, errs = l_afe_grid(form, np.array([abs(tau)]), m_cap=m_cap)
    value = complex(vals[0])
    if conjugated:
        value = value.conjugate()
    return LValue(value=value, err_estimate=float(errs[0]), method="afe_paper")


# ----------------------------------------------------------------------
# smoothed AFE (independent oracle)
# ----------------------------------------------------------------------

def _smoothed_weights(form: MaassForm, s: complex, y, c=1.5, height=7.5, step=0.01):
    """V_s(y) = (1/2 pi i) int exp(u^2) (gamma(s+u)/gamma(s)) y^{-u} du/u."""
    n = int(2 * height / step)
    v = -height + np.arange(n + 1) * (2 * height / n)
    u = c + 1j * v
    log_ratio = log_gamma_factor(form, s + u) - log_gamma_factor(form, s)
    kern = np.exp(u * u + log_ratio) / u
    kern[0] *= 0.5
    kern[-1] *= 0.5
    kern *= (2 * height / n) / (2.0 * math.pi)
    return np.exp(-np.multiply.outer(np.log(y), u)) @ kern


def afe_smoothed(form: MaassForm, s: complex, m_cap: int | None = 60000) -> LValue:
    """L(s, phi) by the exact smoothed AFE; valid throughout the strip.

    L(s) = sum lam(m) m^{-s} V_s(m) + eps X(s) sum lam(m) m^{s-1} V_{1-s}(m)
    with X(s) = gamma(1-s)/gamma(s).  Exact in the weights; the error is
    coefficient truncation, estimated by comparing against the half-length
    sum plus the divisor envelope over skipped (unknown) coefficients.

    The contour offset is raised with |Re s - 1/2| so that both Dirichlet
    expansions under the integral stay absolutely convergent.
    """
    s = complex(s)
    t = form.spectral_param
    c = max(1.5, 1.7 - s.real, 0.7 + s.real)
    # effective conductor scale sets where the weights start to decay; the
    # power-law window y^{-c} before the exp(u^2) saddle takes over means
    # the sum must run to ~scale*e^{2c} and beyond
    scale = math.sqrt(abs(s + 1j * t) * abs(s - 1j * t)) / (2.0 * math.pi) + 2.0
    m_cut = int(math.ceil(scale * math.exp(2.0 * c + 2.6))) + 40
    if m_cap is not None:
        m_cut = min(m_cut, m_cap)
    lam, known = _coeff_range(form, m_cut)
    m = np.arange(1, m_cut + 1, dtype=float)
    coeff = np.where(known[1:], lam[1:], 0.0)
    env = np.where(known[1:], 0.0, _divisor_counts(m_cut)[1:] * m**_KS)

    height = 7.0 + 0.4 * c * c
    v_direct = _smoothed_weights(form, s, m, c=c, height=height)
    v_reflect = _smoothed_weights(form, 1.0 - s, m, c=c, height=height)
    x_ratio = _root_sign(form) * np.exp(log_root_ratio(form, s))

    td = coeff * np.exp(-s * np.log(m)) * v_direct
    tr = x_ratio * coeff * np.exp((s - 1.0) * np.log(m)) * v_reflect
    value = complex(np.sum(td) + np.sum(tr))

    err = float(
        np.sum(env * np.abs(v_direct) * m ** (-s.real))
        + abs(x_ratio) * np.sum(env * np.abs(v_reflect) * m ** (s.real - 1.0))
    )
    # truncation: coherent plus random-walk size of the top block, which
    # bounds the (decaying, oscillating) continuation beyond m_cut
    top = slice(int(0.7 * m_cut), None)
    block = td[top] + tr[top]
    err += float(abs(np.sum(block)) + math.sqrt(np.sum(np.abs(block) ** 2)))
    return LValue(value=value, err_estimate=err, method="afe_smoothed")


# ----------------------------------------------------------------------
# completed L-functions
# ----------------------------------------------------------------------

def _near_gamma_pole(form: MaassForm, s: complex) -> bool:
    d = _parity_shift(form)
    t = form.spectral_param
    for sgn in (1.0, -1.0):
        w = (s + d + sgn * 1j * t) / 2.0
        k = round(w.real)
        if k <= 0 and abs(w.real - k) < 0.05 and abs(w.imag) < 0.05:
            return True
    return False


def completed_l(form: MaassForm, s: complex) -> LValue:
    """Lambda(s, phi) = gamma(s) L(s, phi), with automatic method choice.

    Re(s) <= -0.2 reflects through Lambda(s) = eps Lambda(1-s); the wide
    middle band uses the smoothed AFE (exact weights, so it is the most
    accurate evaluator at moderate height); far right uses the series.
    """
    s = complex(s)
    if _near_gamma_pole(form, s):
        raise PoleError(f"gamma factor pole near s = {s}")
    if s.real <= -0.2:
        inner = completed_l(form, 1.0 - s)
        return LValue(
            value=_root_sign(form) * inner.value,
            err_estimate=inner.err_estimate,
            method="functional_equation",
        )
    if s.real >= 1.5 or _near_gamma_pole(form, 1.0 - s):
        lv = l_dirichlet(form, s)
    else:
        lv = afe_smoothed(form, s)
    g = np.exp(log_gamma_factor(form, s))
    return LValue(value=complex(g * lv.value), err_estimate=abs(g) * lv.err_estimate,
                  method=lv.method)


def completed_adjoint_l(form: MaassForm, s: complex) -> LValue:
    """Lambda(s, ad phi) = pi^{-3s/2} G(s/2) G(s/2+it) G(s/2-it) L(s, ad phi).

    Only Re(s) >= 1 is supported (s = 1 is the value the closed formulas
    need).  At s = 1 the gamma pair collapses to pi/cosh(pi t) exactly,
    which avoids forming the enormous intermediate factors.
    """
    s = complex(s)
    if s.real < 1.0:
        raise RegionError("completed_adjoint_l requires Re(s) >= 1")
    t = form.spectral_param
    if s == 1.0:
        adj = adjoint_l_at_1(form)
        ch = math.cosh(math.pi * t)
        return LValue(value=adj.value / ch, err_estimate=adj.err_estimate / ch,
                      method="dirichlet_series")
    adj = _adjoint_series(form, s)
    log_g = (
        -1.5 * s * specfun.LOG_PI
        + specfun.log_gamma(s / 2.0)
        + specfun.log_gamma(s / 2.0 + 1j * t)
        + specfun.log_gamma(s / 2.0 - 1j * t)
    )
    g = np.exp(log_g)
    return LValue(value=complex(g * adj.value), err_estimate=abs(g) * adj.err_estimate,
                  method="dirichlet_series")


def _adjoint_series(form: MaassForm, s: complex) -> LValue:
    """L(s, ad phi) = zeta(2s) sum lambda(n^2) n^{-s}, smoothed, Re(s) >= 1."""
    from .maass import hecke_lambda

    x = form.p_max / 18.4
    n_max = form.p_max
    ns = np.arange(1, n_max + 1, dtype=float)
    lam_sq = np.array([hecke_lambda(form, k * k) for k in range(1, n_max + 1)])
    smooth = np.exp(-ns / x)
    zeta2s = specfun.riemann_zeta(2.0 * s)
    value = zeta2s * np.sum(lam_sq * np.exp(-s * np.log(ns)) * smooth)
    half = zeta2s * np.sum(lam_sq * np.exp(-s * np.log(ns)) * np.exp(-2.0 * ns / x))
    err = abs(value - half) + abs(zeta2s) * 6.0 * math.exp(-n_max / x)
    return LValue(value=complex(value), err_estimate=float(err),
                  method="dirichlet_series")
