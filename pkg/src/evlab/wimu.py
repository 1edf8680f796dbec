"""The central closed formulas: mu_{n,t} assembled two independent ways,
its square with |rho(1)|^2 traded for the adjoint L-value, and the exact
gamma-factor quotient with its Stirling-scale approximant.

mu_{n,t} is the inner product of the squared degenerate Eisenstein series
against the phi-incomplete Eisenstein series, per unit a_n:

    mu = (a_n rho(1) / 4) Lambda(1/2 - int) Lambda((3-n)/2) / |Lambda(n/2 + int)|^2

(completed path) which, unfolding the completed L-functions into raw Gamma
and Dirichlet factors, equals

    mu = (a_n rho(1) / (4 pi^{2 - n/2 - int}))
         |Gamma((3-n)/4 + i t_phi/2)|^2
         Gamma(1/4 + i(t_phi - nt)/2) Gamma(1/4 - i(t_phi + nt)/2)
         L(1/2 - int) L((3-n)/2) / |Lambda(n/2 + int)|^2

(gamma path).  Both assemblies run in log space: individual factors span
e^{+-pi n t / 4} while the product stays polynomial in t.  The two paths
share the L-values but split the archimedean bookkeeping differently
(completed zeta vs. zeta times explicit Gamma), so their agreement checks
the exponent algebra, not the arithmetic inputs.

a_n is an opaque user-supplied normalization (default 1); everything
downstream is either linear or quadratic in it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import RegionError
from .lfun import (
    LValue,
    completed_l,
    l_afe,
    l_afe_grid,
    log_gamma_factor,
)
from .maass import MaassForm, adjoint_l_at_1, completed_adjoint_at_1, rho1_squared

__all__ = [
    "MuEvaluation",
    "mu_completed",
    "mu_gamma_form",
    "mu_squared",
    "gamma_factor_sq",
    "stirling_gamma_sq",
    "mu_grid",
]


@dataclass(frozen=True)
class MuEvaluation:
    n: int
    t: float
    a_n: complex
    value: complex
    gamma_factor: complex
    l_central: complex
    l_special: complex
    zeta_denom: complex
    err_estimate: float

    def __post_init__(self):
        if self.err_estimate < 0:
            raise ValueError("err_estimate must be nonnegative")


def _check_domain(n: int, t: float):
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n}")
    if abs(t) < 2.0:
        raise RegionError(f"|t| >= 2 required (AFE validity), got {t}")


def _zero_eval(n: int, t: float, a_n: complex) -> MuEvaluation:
    return MuEvaluation(n=n, t=t, a_n=a_n, value=0.0, gamma_factor=0.0,
                        l_central=0.0, l_special=0.0, zeta_denom=0.0,
                        err_estimate=0.0)


def _special_lambda(form: MaassForm, n: int) -> LValue:
    """Lambda((3-n)/2, phi); reflection/smoothed-AFE handled by completed_l.

    Cached on the form: the special value is hit once per (form, n) but
    re-read at every grid point of the moment integrals.
    """
    cache = getattr(form, "_special_lambda_cache", None)
    if cache is None:
        cache = {}
        object.__setattr__(form, "_special_lambda_cache", cache)
    if n not in cache:
        cache[n] = completed_l(form, (3.0 - n) / 2.0)
    return cache[n]


def _rho1_with_err(form: MaassForm):
    adj = adjoint_l_at_1(form)
    rho1 = math.sqrt(rho1_squared(form))
    rel = 0.5 * adj.err_estimate / adj.value
    return rho1, rel


def _central_lvalue(form: MaassForm, n: int, t: float) -> LValue:
    return l_afe(form, 0.5 - 1j * n * t)


def _shared_rel_err(lc: LValue, ls: LValue, rho1_rel: float) -> float:
    rel = rho1_rel
    if lc.value != 0:
        rel += lc.err_estimate / abs(lc.value)
    if ls.value != 0:
        rel += ls.err_estimate / abs(ls.value)
    return rel


def mu_completed(form: MaassForm, n: int, t: float, a_n: complex = 1.0) -> MuEvaluation:
    """mu_{n,t} from completed L-functions (the compact closed form)."""
    _check_domain(n, t)
    a_n = complex(a_n)
    if not form.is_even:
        return _zero_eval(n, t, a_n)
    t_phi = form.spectral_param
    s0 = 0.5 - 1j * n * t
    lc = _central_lvalue(form, n, t)
    lam_s = _special_lambda(form, n)
    rho1, rho1_rel = _rho1_with_err(form)

    log_lam_central = log_gamma_factor(form, s0) + np.log(complex(lc.value))
    log_den = 2.0 * specfun.log_completed_zeta(n / 2.0 + 1j * n * t).real
    log_mu = log_lam_central + np.log(complex(lam_s.value)) - log_den
    value = a_n * (rho1 / 4.0) * np.exp(log_mu)

    g_special = np.exp(log_gamma_factor(form, (3.0 - n) / 2.0))
    rel = _shared_rel_err(lc, lam_s, rho1_rel)
    zeta_denom = np.exp(specfun.log_completed_zeta(n / 2.0 + 1j * n * t))
    return MuEvaluation(
        n=n, t=t, a_n=a_n, value=complex(value),
        gamma_factor=complex(_gamma_factor(form, n, t)),
        l_central=complex(lc.value),
        l_special=complex(lam_s.value / g_special),
        zeta_denom=complex(zeta_denom),
        err_estimate=abs(value) * rel,
    )


def _gamma_factor(form: MaassForm, n: int, t: float) -> complex:
    t_phi = form.spectral_param
    log_g = (
        specfun.log_gamma(0.25 + 0.5j * (t_phi - n * t))
        + specfun.log_gamma(0.25 - 0.5j * (t_phi + n * t))
        - 2.0 * specfun.log_gamma(n / 4.0 + 0.5j * n * t).real
    )
    return complex(np.exp(log_g))


def mu_gamma_form(form: MaassForm, n: int, t: float, a_n: complex = 1.0) -> MuEvaluation:
    """mu_{n,t} from raw Gamma factors and finite L-values.

    Same L inputs as mu_completed; the archimedean part is assembled from
    explicit Gamma quotients and zeta(n/2 + int), so agreement between the
    two paths certifies the exponent and pi-power algebra.
    """
    _check_domain(n, t)
    a_n = complex(a_n)
    if not form.is_even:
        return _zero_eval(n, t, a_n)
    t_phi = form.spectral_param
    lc = _central_lvalue(form, n, t)
    lam_s = _special_lambda(form, n)
    g_special = np.exp(log_gamma_factor(form, (3.0 - n) / 2.0))
    l_special = complex(lam_s.value / g_special)
    rho1, rho1_rel = _rho1_with_err(form)

    zeta_den = complex(specfun.riemann_zeta(n / 2.0 + 1j * n * t))
    # pi^{n/2 - 2 + int} from the prefactor, pi^{+n/2} from |Lambda|^2 -> |zeta|^2
    log_arch = (
        (n - 2.0 + 1j * n * t) * specfun.LOG_PI
        + 2.0 * specfun.log_gamma((3.0 - n) / 4.0 + 0.5j * t_phi).real
        + specfun.log_gamma(0.25 + 0.5j * (t_phi - n * t))
        + specfun.log_gamma(0.25 - 0.5j * (t_phi + n * t))
        - 2.0 * specfun.log_gamma(n / 4.0 + 0.5j * n * t).real
    )
    value = (
        a_n * (rho1 / 4.0) * np.exp(log_arch)
        * lc.value * l_special / abs(zeta_den) ** 2
    )
    rel = _shared_rel_err(lc, lam_s, rho1_rel)
    return MuEvaluation(
        n=n, t=t, a_n=a_n, value=complex(value),
        gamma_factor=complex(_gamma_factor(form, n, t)),
        l_central=complex(lc.value),
        l_special=l_special,
        zeta_denom=zeta_den,
        err_estimate=abs(value) * rel,
    )


def mu_squared(form: MaassForm, n: int, t: float, a_n: complex = 1.0) -> float:
    """|mu_{n,t}|^2 with |rho(1)|^2 = 8 / Lambda(1, ad phi) substituted:

    |mu|^2 = (|a_n|^2 / 2) |Lambda(1/2 - int)|^2 Lambda((3-n)/2)^2
             / (|Lambda(n/2 + int)|^4 Lambda(1, ad phi))
    """
    _check_domain(n, t)
    if not form.is_even:
        return 0.0
    s0 = 0.5 - 1j * n * t
    lc = _central_lvalue(form, n, t)
    lam_s = _special_lambda(form, n)
    adj_completed = completed_adjoint_at_1(form)

    log_lam_central = log_gamma_factor(form, s0) + np.log(complex(lc.value))
    log_val = (
        2.0 * log_lam_central.real
        + 2.0 * np.log(complex(lam_s.value))
        - 4.0 * specfun.log_completed_zeta(n / 2.0 + 1j * n * t).real
        - math.log(adj_completed)
    )
    return float(abs(a_n) ** 2 / 2.0 * np.exp(log_val).real)


def gamma_factor_sq(form: MaassForm, n: int, t: float) -> float:
    """|G_{n,phi}(t)|^2 as an exact Gamma-modulus quotient."""
    if t <= 0:
        raise RegionError("gamma_factor_sq requires t > 0")
    t_phi = form.spectral_param
    log_val = (
        2.0 * specfun.log_gamma(0.25 + 0.5j * (t_phi - n * t)).real
        + 2.0 * specfun.log_gamma(0.25 - 0.5j * (t_phi + n * t)).real
        - 4.0 * specfun.log_gamma(n / 4.0 + 0.5j * n * t).real
    )
    return float(np.exp(log_val))


def stirling_gamma_sq(n: int, t: float) -> float:
    """Leading Stirling approximant (2/(nt))^{n-1} of gamma_factor_sq."""
    if t <= 0:
        raise RegionError("stirling_gamma_sq requires t > 0")
    return float((2.0 / (n * t)) ** (n - 1))


def mu_grid(form: MaassForm, n: int, ts, a_n: complex = 1.0, m_cap: int | None = 40000):
    """Vectorized mu_{n,t} over a t-array (completed-path assembly).

    Returns (values, err_estimates).  This is the throughput path for the
    moment integrals; it matches mu_completed pointwise by construction.
    """
    ts = np.asarray(ts, dtype=float)
    if np.any(np.abs(ts) < 2.0):
        raise RegionError("mu_grid requires |t| >= 2 everywhere")
    if not form.is_even:
        return np.zeros(ts.shape, dtype=complex), np.zeros(ts.shape)
    a_n = complex(a_n)
    taus = n * ts
    neg = taus < 0
    lvals, lerrs = l_afe_grid(form, np.abs(taus), m_cap=m_cap)
    lvals = np.where(neg, np.conj(lvals), lvals)

    lam_s = _special_lambda(form, n)
    rho1, rho1_rel = _rho1_with_err(form)
    s0 = 0.5 - 1j * taus
    log_mu = (
        log_gamma_factor(form, s0)
        + np.log(lvals)
        + np.log(complex(lam_s.value))
        - 2.0 * specfun.log_completed_zeta(n / 2.0 + 1j * taus).real
    )
    values = a_n * (rho1 / 4.0) * np.exp(log_mu)
    rel = rho1_rel + lam_s.err_estimate / abs(lam_s.value) + lerrs / np.maximum(
        np.abs(lvals), 1e-300
    )
    return values, np.abs(values) * rel
