"""Acceptance gate: ten criteria, one printed pass/fail line each.

Exact identities are asserted at their stated tolerances; asymptotic claims
are checked as trend/constant statements on desk-scale windows (T <= 800).
Each criterion enforces its runtime budget.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from evlab import eisen2, maass, moments, specfun, wimu

EVEN = str(maass.shipped_form_path("even"))
ODD = str(maass.shipped_form_path("odd"))


def _report(num: int, label: str, ok: bool, detail: str = ""):
    verdict = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {num} [{label}]: {verdict}{suffix}")
    assert ok, f"criterion {num} ({label}){suffix}"


def test_criterion_1_special_functions():
    t0 = time.monotonic()
    rng = np.random.default_rng(101)
    ok = True
    # Gamma recurrence and reflection
    for _ in range(25):
        z = complex(rng.uniform(0.1, 4.0), rng.uniform(-15, 15))
        ok &= abs(specfun.gamma(z + 1) - z * specfun.gamma(z)) <= 1e-10 * abs(
            specfun.gamma(z + 1))
        w = complex(rng.uniform(0.05, 0.95), rng.uniform(-6, 6))
        refl = specfun.gamma(w) * specfun.gamma(1 - w)
        ok &= abs(refl - math.pi / np.sin(math.pi * w)) <= 1e-10 * abs(refl)
    # completed zeta reflection at 50 strip points, residual <= 1e-9
    worst_fe = 0.0
    for _ in range(50):
        s = complex(rng.uniform(0.55, 0.95), rng.uniform(-40, 40))
        a = specfun.completed_zeta(s)
        worst_fe = max(worst_fe, abs(a - specfun.completed_zeta(1 - s)) / abs(a))
    ok &= worst_fe <= 1e-9
    # K_{1/2} closed form to 1e-10
    for x in (0.5, 2.0, 10.0, 40.0):
        ref = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
        ok &= abs(specfun.bessel_k(0.5, x) - ref) <= 1e-10 * ref
    # K_{i mu} realness <= 1e-12
    for mu in (9.53, 13.78):
        for x in (0.5, 5.0, 15.0, 30.0):
            v = specfun.bessel_k(1j * mu, x)
            ok &= abs(v.imag) <= 1e-12 * max(abs(v.real), 1e-300)
    elapsed = time.monotonic() - t0
    ok &= elapsed < 10.0
    _report(1, "special functions", bool(ok),
            f"worst FE residual {worst_fe:.2e}, {elapsed:.1f}s")


def test_criterion_2_unfolding_identity(even_form):
    t0 = time.monotonic()
    worst = 0.0
    for n in (3, 4, 5):
        for t in (0.5, 1.0, 2.0):
            for s in (2.0, 2.5):
                a = eisen2.i_series(even_form, n, t, s)
                b = eisen2.i_closed(even_form, n, t, s)
                worst = max(worst, abs(a - b) / abs(b))
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-4 and elapsed < 120.0
    _report(2, "unfolding identity", ok, f"worst rel {worst:.2e}, {elapsed:.1f}s")


def test_criterion_3_triple_product(even_form, odd_form):
    t0 = time.monotonic()
    y_cap = 1.0e7
    vol, _, _ = eisen2.fundamental_domain_integral(
        lambda xs, ys: np.ones_like(xs), y_cap=y_cap)
    vol_err = abs(vol.real - math.pi / 3.0)
    n, t, s = 3, 1.0, 2.0
    s1 = 1.0 - n / 4.0 + 0.5j * n * t
    tp = eisen2.triple_product(even_form, s1, s)
    closed = eisen2.i_closed(even_form, n, t, s)
    diff = abs(tp.value - closed)
    bar = tp.quadrature_err + 1e-8 * abs(closed)
    tp_odd = eisen2.triple_product(odd_form, s1, s)
    elapsed = time.monotonic() - t0
    ok = vol_err <= 1e-6 and diff <= bar and abs(tp_odd.value) <= 1e-6 \
        and elapsed < 600.0
    _report(3, "brute-force triple product", bool(ok),
            f"vol err {vol_err:.1e}, |triple-closed| {diff:.1e} vs bar {bar:.1e}, "
            f"odd {abs(tp_odd.value):.1e}, {elapsed:.0f}s")


def test_criterion_4_dual_path_mu(even_form):
    t0 = time.monotonic()
    rng = np.random.default_rng(404)
    worst_dual = worst_sq = 0.0
    for _ in range(100):
        n = int(rng.integers(3, 6))
        t = float(rng.uniform(2.5, 300.0))
        a = wimu.mu_completed(even_form, n, t)
        b = wimu.mu_gamma_form(even_form, n, t)
        worst_dual = max(worst_dual, abs(a.value - b.value) / abs(b.value))
        sq = wimu.mu_squared(even_form, n, t)
        worst_sq = max(worst_sq, abs(sq - abs(a.value) ** 2) / sq)
    elapsed = time.monotonic() - t0
    ok = worst_dual <= 1e-9 and worst_sq <= 1e-9 and elapsed < 60.0
    _report(4, "dual-path mu identity", ok,
            f"dual {worst_dual:.1e}, squared {worst_sq:.1e}, {elapsed:.1f}s")


def test_criterion_5_stirling_envelope(even_form):
    t0 = time.monotonic()
    ok = True
    worst = 0.0
    for n in (3, 4, 5):
        for t in np.linspace(50.0, 500.0, 46):
            e = abs(wimu.gamma_factor_sq(even_form, n, float(t))
                    / wimu.stirling_gamma_sq(n, float(t)) - 1.0)
            worst = max(worst, e * t / 5.0)
            ok &= e <= 5.0 / t
        # monotone error trend across a dyadic grid
        errs = [abs(wimu.gamma_factor_sq(even_form, n, t)
                    / wimu.stirling_gamma_sq(n, t) - 1.0)
                for t in (50.0, 100.0, 200.0, 400.0)]
        ok &= all(b < a for a, b in zip(errs, errs[1:]))
    elapsed = time.monotonic() - t0
    ok &= elapsed < 60.0
    _report(5, "stirling envelope", bool(ok),
            f"worst envelope fraction {worst:.2f}, {elapsed:.1f}s")


def test_criterion_6_jutila_constant(even_form):
    t0 = time.monotonic()
    a_fit, b_fit, a_pred, _ = moments.jutila_fit(even_form)
    rel = abs(a_fit / a_pred - 1.0)
    elapsed = time.monotonic() - t0
    ok = rel <= 0.15 and elapsed < 1800.0
    _report(6, "jutila constant", ok,
            f"fit/predicted - 1 = {rel:.3f}, B_fit {b_fit:.2f}, {elapsed:.0f}s")


def test_criterion_7_mean_value_trend(even_form):
    t0 = time.monotonic()
    ts = np.array([50.0, 100.0, 200.0, 400.0])
    mags = np.array([abs(moments.mean_value(even_form, 3, T).integral)
                     for T in ts])
    x = np.log(ts)
    y = np.log(mags)
    design = np.column_stack([x, np.ones_like(x)])
    coef, res, *_ = np.linalg.lstsq(design, y, rcond=None)
    slope = float(coef[0])
    resid = y - design @ coef
    stderr = math.sqrt(float(resid @ resid) / 2.0 / float(((x - x.mean()) ** 2).sum()))
    elapsed = time.monotonic() - t0
    ok = slope <= -0.85 and elapsed < 1800.0
    _report(7, "mean-value decay trend", ok,
            f"slope {slope:.3f} +- {stderr:.3f} (stretch target -1.09), {elapsed:.0f}s")


def test_criterion_8_weighted_variance(even_form):
    t0 = time.monotonic()
    c_paper, c_recast = moments.variance_constants(even_form, 3)
    const_ok = abs(c_paper - c_recast) <= 1e-9 * abs(c_paper)
    ratios = {T: complex(moments.weighted_variance(even_form, 3, T).ratio).real
              for T in (100.0, 400.0, 800.0)}
    elapsed = time.monotonic() - t0
    ok = (const_ok and 0.6 <= ratios[400.0] <= 1.5
          and abs(ratios[800.0] - 1.0) < abs(ratios[100.0] - 1.0)
          and elapsed < 1800.0)
    _report(8, "weighted variance vs constant", bool(ok),
            "ratios " + ", ".join(f"T={int(T)}: {r:.3f}" for T, r in ratios.items())
            + f", {elapsed:.0f}s")


def test_criterion_9_parity_annihilation(odd_form):
    zeros = [
        wimu.mu_completed(odd_form, 3, 50.0).value,
        wimu.mu_gamma_form(odd_form, 4, 50.0).value,
        wimu.mu_squared(odd_form, 5, 50.0),
        complex(wimu.mu_grid(odd_form, 3, np.array([50.0]))[0][0]),
        moments.mean_value(odd_form, 3, 100.0).integral,
        moments.osc_first_moment(odd_form, 3, 100.0).integral,
        moments.weighted_variance(odd_form, 3, 100.0).integral,
        moments.cross_variance(odd_form, odd_form, 3, 100.0)[0].integral,
    ]
    ok = all(z == 0.0 for z in zeros)
    _report(9, "parity annihilation", ok, f"{len(zeros)} entry points exactly zero")


def test_criterion_10_determinism(tmp_path):
    def run(args):
        proc = subprocess.run([sys.executable, "-m", "evlab.cli", *args],
                              capture_output=True, check=True)
        return proc.stdout

    verify_a = run(["verify", "--form", EVEN, "--form", ODD])
    verify_b = run(["verify", "--form", EVEN, "--form", ODD])
    scan_args = ["scan-mu", "--form", EVEN, "--n", "3", "--tmin", "50",
                 "--tmax", "80", "--grid-step", "0.5"]
    scan_a = run(scan_args)
    scan_b = run(scan_args)
    ok = verify_a == verify_b and scan_a == scan_b and b"FAIL" not in verify_a
    _report(10, "determinism", ok,
            f"verify {len(verify_a)} bytes, scan-mu {len(scan_a)} bytes")
