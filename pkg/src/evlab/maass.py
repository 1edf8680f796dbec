"""Hecke-Maass cusp form data model and ingestion.

A form is described by a small line-oriented text file::

    # comment
    R 13.779751351890
    parity even
    pmax 1000
    a 2 1.549304477941
    a 3 0.246899772453
    ...

``R`` is the spectral parameter t_phi, ``a n v`` stores the normalized
Hecke eigenvalue lambda(n).  Primes up to ``pmax`` are required; composite
entries are optional and act as corruption detectors: the loader checks
them against the Hecke recursion at 1e-9.

Two desk-scale data files (the first even and first odd forms on SL2(Z),
with lambda(p) for p <= 1000) ship with the package; they were produced by
the stand-alone automorphy-enforcement solver in ``scripts/`` and are
validated again on every load.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, NamedTuple

import numpy as np

from .errors import (
    InsufficientCoefficientsError,
    InvariantViolationError,
    MaassFileError,
    MissingPrimeError,
)

__all__ = [
    "MaassForm",
    "load_maass_form",
    "shipped_form_path",
    "hecke_lambda",
    "hecke_lambda_range",
    "adjoint_l_at_1",
    "rho1_squared",
    "primes_up_to",
]

KIM_SARNAK_EXP = 7.0 / 64.0
COMPOSITE_RESIDUAL_TOL = 1e-9
# e^{-18.4} ~ 1e-8: smoothing cutoff factor for the adjoint series
_ADJOINT_CUTOFF = 18.4


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(n)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


class AdjointValue(NamedTuple):
    value: float
    err_estimate: float
    x_used: float


@dataclass
class MaassForm:
    """An SL2(Z) Hecke-Maass cusp form at desk scale.

    ``hecke_at_primes`` maps p -> lambda(p) for every prime p <= p_max
    (possibly a few beyond).  ``file_composites`` keeps any composite
    entries found in the data file; they are consulted as a fallback when
    an index cannot be built from the stored primes.
    """

    spectral_param: float
    parity: str  # "even" | "odd"
    p_max: int
    hecke_at_primes: Dict[int, float]
    file_composites: Dict[int, float] = field(default_factory=dict)
    label: str = ""
    _rho1_sq: float | None = field(default=None, repr=False)
    _lambda_memo: Dict[int, float] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.spectral_param <= 0:
            raise InvariantViolationError("spectral parameter must be positive")
        if self.parity not in ("even", "odd"):
            raise InvariantViolationError(f"bad parity {self.parity!r}")
        if self.p_max < 97:
            raise InvariantViolationError("p_max must be >= 97")
        self._lambda_memo[1] = 1.0

    @property
    def is_even(self) -> bool:
        return self.parity == "even"

    @property
    def rho1_sq(self) -> float:
        if self._rho1_sq is None:
            self._rho1_sq = rho1_squared(self)
        return self._rho1_sq


def _kim_sarnak_bound(p: int) -> float:
    return p**KIM_SARNAK_EXP + p ** (-KIM_SARNAK_EXP) + 0.01


def load_maass_form(path) -> MaassForm:
    """Parse and validate a Maass-form data file.

    Raises MaassFileError naming the offending line on parse problems,
    MissingPrimeError if a prime <= pmax is absent, and
    InvariantViolationError on eigenvalue-bound or recursion failures.
    """
    spectral = None
    parity = None
    p_max = None
    coeffs: Dict[int, float] = {}

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            key = parts[0]
            try:
                if key == "R":
                    if spectral is not None:
                        raise MaassFileError(f"line {lineno}: duplicate R line")
                    spectral = float(parts[1])
                elif key == "parity":
                    if parity is not None:
                        raise MaassFileError(f"line {lineno}: duplicate parity line")
                    parity = parts[1]
                    if parity not in ("even", "odd"):
                        raise MaassFileError(
                            f"line {lineno}: parity must be even|odd, got {parity!r}"
                        )
                elif key == "pmax":
                    if p_max is not None:
                        raise MaassFileError(f"line {lineno}: duplicate pmax line")
                    p_max = int(parts[1])
                elif key == "a":
                    n = int(parts[1])
                    if n < 1:
                        raise MaassFileError(f"line {lineno}: index must be >= 1")
                    coeffs[n] = float(parts[2])
                else:
                    raise MaassFileError(f"line {lineno}: unknown directive {key!r}")
            except (IndexError, ValueError) as exc:
                raise MaassFileError(f"line {lineno}: cannot parse {line!r}") from exc

    if spectral is None or parity is None or p_max is None:
        missing = [
            name
            for name, val in (("R", spectral), ("parity", parity), ("pmax", p_max))
            if val is None
        ]
        raise MaassFileError(f"missing required line(s): {', '.join(missing)}")

    primes = primes_up_to(p_max)
    hecke = {}
    for p in primes:
        if p not in coeffs:
            raise MissingPrimeError(f"lambda({p}) missing but pmax = {p_max}")
        hecke[p] = coeffs[p]
    # keep any extra primes beyond pmax too
    composites = {}
    for n, v in coeffs.items():
        if n in hecke or n == 1:
            continue
        if _is_prime(n):
            hecke[n] = v
        else:
            composites[n] = v

    for p, v in hecke.items():
        if abs(v) > _kim_sarnak_bound(p):
            raise InvariantViolationError(
                f"lambda({p}) = {v} violates the eigenvalue bound {_kim_sarnak_bound(p):.4f}"
            )

    form = MaassForm(
        spectral_param=spectral,
        parity=parity,
        p_max=p_max,
        hecke_at_primes=hecke,
        file_composites=composites,
        label=str(path),
    )

    # corruption detector: file composites must match the Hecke recursion
    for n, v in composites.items():
        try:
            expected = hecke_lambda(form, n)
        except InsufficientCoefficientsError:
            continue  # composite with a large prime factor: fallback data
        if abs(v - expected) > COMPOSITE_RESIDUAL_TOL * max(1.0, abs(expected)):
            raise InvariantViolationError(
                f"composite lambda({n}) = {v} disagrees with the Hecke recursion "
                f"value {expected!r}"
            )
    return form


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def shipped_form_path(kind: str):
    """Path to a bundled data file; kind is 'even' or 'odd'."""
    name = {"even": "maass_even_13p7797.txt", "odd": "maass_odd_9p5336.txt"}[kind]
    return resources.files("evlab.data").joinpath(name)


def _lambda_prime_power(form: MaassForm, p: int, k: int) -> float:
    """lambda(p^k) by the recursion lambda(p^{k+1}) = lambda(p)lambda(p^k) - lambda(p^{k-1})."""
    key = p**k
    memo = form._lambda_memo
    if key in memo:
        return memo[key]
    lp = form.hecke_at_primes[p]
    prev2, prev1 = 1.0, lp
    memo[p] = lp
    for j in range(2, k + 1):
        cur = lp * prev1 - prev2
        memo[p**j] = cur
        prev2, prev1 = prev1, cur
    return memo[key]


def hecke_lambda(form: MaassForm, m: int) -> float:
    """lambda(m) by multiplicativity across coprime prime powers."""
    if m < 1:
        raise ValueError("index must be positive")
    memo = form._lambda_memo
    if m in memo:
        return memo[m]
    val = 1.0
    rest = m
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            k = 0
            while rest % p == 0:
                rest //= p
                k += 1
            if p not in form.hecke_at_primes:
                return _composite_fallback(form, m)
            val *= _lambda_prime_power(form, p, k)
        p += 1 if p == 2 else 2
    if rest > 1:
        if rest not in form.hecke_at_primes:
            return _composite_fallback(form, m)
        val *= form.hecke_at_primes[rest]
    memo[m] = val
    return val


def _composite_fallback(form: MaassForm, m: int) -> float:
    if m in form.file_composites:
        return form.file_composites[m]
    raise InsufficientCoefficientsError(
        f"lambda({m}) needs a prime factor beyond p_max = {form.p_max}",
        missing=m,
    )


def hecke_lambda_range(form: MaassForm, m_max: int):
    """(lam, known) arrays for indices 0..m_max; lam[m] = lambda(m) where known.

    Built with a smallest-prime-factor sieve, so the whole range costs
    O(m_max log log m_max).  Entries whose factorization needs a prime
    beyond the stored set are flagged known=False (lam set to 0) unless the
    data file supplies the composite directly.
    """
    spf = np.zeros(m_max + 1, dtype=np.int64)
    for p in range(2, m_max + 1):
        if spf[p] == 0:
            spf[p :: p][spf[p::p] == 0] = p
        if p * p > m_max:
            break
    spf[spf == 0] = np.arange(m_max + 1)[spf == 0]

    lam = np.zeros(m_max + 1)
    known = np.zeros(m_max + 1, dtype=bool)
    if m_max >= 1:
        lam[1] = 1.0
        known[1] = True
    for m in range(2, m_max + 1):
        p = int(spf[m])
        rest = m
        k = 0
        while rest % p == 0:
            rest //= p
            k += 1
        if p in form.hecke_at_primes and known[rest]:
            lam[m] = _lambda_prime_power(form, p, k) * lam[rest]
            known[m] = True
        elif m in form.file_composites:
            lam[m] = form.file_composites[m]
            known[m] = True
    return lam, known


def adjoint_l_at_1(form: MaassForm, x_smooth: float | None = None) -> AdjointValue:
    """L(1, ad phi) = zeta(2) * sum lambda(n^2)/n, smoothed by exp(-n/X).

    X defaults to the largest value the stored coefficient range supports.
    The error estimate combines the X -> X/2 convergence difference with an
    explicit bound on the discarded tail.
    """
    if x_smooth is None:
        x_smooth = form.p_max / _ADJOINT_CUTOFF
    n_max = math.ceil(x_smooth * _ADJOINT_CUTOFF)
    if n_max > form.p_max:
        raise InsufficientCoefficientsError(
            f"smoothing X = {x_smooth} needs lambda(n^2) out to n = {n_max}, "
            f"beyond p_max = {form.p_max}",
            required_pmax=n_max,
        )

    zeta2 = math.pi**2 / 6.0

    def smoothed(x):
        total = 0.0
        comp = 0.0
        for n in range(1, n_max + 1):
            term = hecke_lambda(form, n * n) / n * math.exp(-n / x)
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
        return zeta2 * total

    value = smoothed(x_smooth)
    half = smoothed(x_smooth / 2.0)
    # tail: |lambda(n^2)| <= d(n^2) n^{7/32}; crude constant envelope
    tail = zeta2 * 6.0 * math.exp(-n_max / x_smooth)
    return AdjointValue(value=value, err_estimate=abs(value - half) + tail, x_used=x_smooth)


def rho1_squared(form: MaassForm) -> float:
    """|rho(1)|^2 = 8 / Lambda(1, ad phi).

    Lambda(1, ad phi) = pi^{-3/2} Gamma(1/2) Gamma(1/2 + i t) Gamma(1/2 - i t)
    * L(1, ad phi); the gamma pair collapses to pi / cosh(pi t), so the
    completed value is L(1, ad phi) / cosh(pi t) exactly.  Using the closed
    form keeps the product finite for large spectral parameter.
    """
    if form._rho1_sq is not None:
        return form._rho1_sq
    adj = adjoint_l_at_1(form)
    lam_completed = adj.value / math.cosh(math.pi * form.spectral_param)
    val = 8.0 / lam_completed
    form._rho1_sq = val
    return val


def completed_adjoint_at_1(form: MaassForm) -> float:
    """Lambda(1, ad phi) via the cosh closed form (see rho1_squared)."""
    return adjoint_l_at_1(form).value / math.cosh(math.pi * form.spectral_param)
