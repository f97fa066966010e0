"""Acceptance criteria A1-A10.  Each test carries an ``acceptance`` marker and
the session summary prints one PASS/FAIL line per criterion."""

import contextlib
import io
import itertools
import json
import math
import time

import numpy as np
import pytest

from cylou.cli import run_check, run_simulate
from cylou.config import parse_config
from cylou.criteria import Overall, full_report, heat_verdict, jump_term_numeric
from cylou.diagnostics import (analytic_cf, default_probes, empirical_cf,
                               skew_convolution_residual, stationarity_residual)
from cylou.noise import (CanonicalStable, DiagonalGaussian, DiagonalSeries, RngState, SymmetricStable,
                         levy_integral_logplus, levy_integral_sq_trunc)
from cylou.simulate import (SimConfig, canonical_increment, exact_step_stable, simulate_ensemble,
                            stable_step_scale)
from cylou.spectral import weyl_eigenvalues

A5_CONFIG = {
    "model": {"power_log": {"coef": 1.0, "power": 2.0, "n_modes": 10}},
    "noise": {"variant": "diagonal_series", "coord": {"family": "stable", "alpha": 1.5, "sigma": 1.0}},
    "sim": {"n_paths": 100_000, "t_final": 10.0, "dt": 10.0, "record_times": [10.0]},
    "seed": 20240611,
}


def quiet(fn, *args):
    with contextlib.redirect_stdout(io.StringIO()):
        return fn(*args)


@pytest.mark.acceptance("A1", "split identity, 27 (alpha, sigma, lambda) combinations, rel <= 1e-6, < 5 s")
def test_a1_split_identity():
    start = time.perf_counter()
    worst = 0.0
    for a, s, lam in itertools.product((0.5, 1.0, 1.5), (0.2, 1.0, 5.0), (0.5, 1.0, 4.0)):
        spec = SymmetricStable(a, s)
        closed = levy_integral_sq_trunc(spec) / (2 * lam) + levy_integral_logplus(spec) / lam
        numeric = jump_term_numeric(spec, lam)
        worst = max(worst, abs(numeric - closed) / closed)
    elapsed = time.perf_counter() - start
    print(f"A1 worst relative error {worst:.2e} in {elapsed:.2f} s")
    assert worst <= 1e-6
    assert elapsed < 5.0


@pytest.mark.acceptance("A2", "heat law: check verdicts match alpha*d < 4 on the 5x4 grid, < 10 s")
def test_a2_heat_grid(tmp_path):
    start = time.perf_counter()
    mismatches = []
    for a, d in itertools.product((0.5, 1.0, 1.3, 1.5, 1.9), (1, 2, 3, 4)):
        cfg = parse_config({"model": {"weyl": {"d": d, "c": 1.0, "n_modes": 64}},
                            "noise": {"variant": "canonical_stable", "alpha": a}})
        out = tmp_path / f"r_{a}_{d}.json"
        code = quiet(run_check, cfg, out)
        expected = 0 if a * d < 4 else 3
        overall = json.loads(out.read_text())["overall"]
        if code != expected or (overall == "StationaryExists") != heat_verdict(a, d):
            mismatches.append((a, d, code, overall))
    elapsed = time.perf_counter() - start
    print(f"A2 mismatches {mismatches} in {elapsed:.2f} s")
    assert not mismatches
    assert elapsed < 10.0


@pytest.mark.acceptance("A3", "series criterion: lambda=k^2 exists, lambda=k does not, < 5 s")
def test_a3_series_equivalence():
    start = time.perf_counter()
    for alpha in (0.5, 1.0, 1.5):
        noise = DiagonalSeries((SymmetricStable(alpha, 1.0),) * 32)
        assert full_report(weyl_eigenvalues(1, 1.0, 32), noise).overall is Overall.STATIONARY_EXISTS
        assert full_report(weyl_eigenvalues(2, 1.0, 32), noise).overall is Overall.NO_STATIONARY
    assert time.perf_counter() - start < 5.0


@pytest.mark.acceptance("A4", "skew-convolution and stationarity residuals <= 3e-6, 100 probes x 3 families, < 30 s")
def test_a4_identities():
    tol = 1e-6
    n = 10
    model = weyl_eigenvalues(1, 1.0, n)
    families = {
        "canonical": CanonicalStable(1.0),
        "diag_stable": DiagonalSeries((SymmetricStable(1.5, 1.0),) * n),
        "gaussian": DiagonalGaussian((1.0,) * n),
    }
    gen = np.random.Generator(np.random.Philox(key=4))
    start = time.perf_counter()
    worst = {}
    for name, noise in families.items():
        w = 0.0
        for _ in range(100):
            v = gen.standard_normal(n) * gen.uniform(0.2, 2.0)
            s, t = gen.uniform(0.0, 3.0, size=2)
            w = max(w, skew_convolution_residual(model, noise, v, s, t, tol),
                    stationarity_residual(model, noise, v, t, tol))
        worst[name] = w
    elapsed = time.perf_counter() - start
    print(f"A4 worst residuals {worst} in {elapsed:.2f} s")
    assert max(worst.values()) <= 3 * tol
    assert elapsed < 30.0


@pytest.mark.acceptance("A5", "Monte-Carlo stationarity, 20 default probes within 0.02, < 60 s")
def test_a5_monte_carlo_stationarity(a5_instance):
    model, noise = a5_instance
    start = time.perf_counter()
    cfg = SimConfig(100_000, 10.0, 10.0, [10.0], RngState(20240611, 0))
    ens = simulate_ensemble(model, noise, cfg)
    diffs = [abs(empirical_cf(ens, 10.0, v).value - analytic_cf(model, noise, v).value)
             for v in default_probes(model.n_modes)]
    elapsed = time.perf_counter() - start
    print(f"A5 max |empirical - limit| {max(diffs):.4f} in {elapsed:.2f} s")
    assert max(diffs) <= 0.02
    assert elapsed < 60.0


@pytest.mark.acceptance("A6", "exact stable step law at theta in {0.5, 1, 2} within 0.02")
def test_a6_exact_step():
    lam, alpha, sigma, dt = 2.0, 1.5, 1.0, 0.3
    y = exact_step_stable(np.zeros(100_000), lam, alpha, sigma, dt, RngState(6))
    scale = float(stable_step_scale(lam, alpha, sigma, dt))
    assert scale == pytest.approx(sigma * ((1 - math.exp(-alpha * lam * dt)) / (alpha * lam)) ** (1 / alpha))
    for th in (0.5, 1.0, 2.0):
        emp = np.mean(np.exp(1j * th * y))
        assert abs(emp - math.exp(-(scale * th) ** alpha)) <= 0.02


@pytest.mark.acceptance("A7", "canonical stable increment CF at 5 probes within 0.02, equal-norm pair agrees")
def test_a7_canonical_increment():
    alpha, dt = 1.5, 0.5
    x = canonical_increment((100_000, 4), alpha, dt, RngState(7))
    probes = np.array([[1.0, 0, 0, 0], [0, 0.6, 0.8, 0], [0.5, -0.5, 0.5, 0.5],
                       [2.0, 0, 0, 0], [0.3, 0.1, -0.2, 0.4]])
    emp = [np.mean(np.exp(1j * x @ u)) for u in probes]
    for u, e in zip(probes, emp):
        assert abs(e - math.exp(-dt * np.linalg.norm(u) ** alpha)) <= 0.02
    # probes 0, 1 and 2 all have unit norm
    assert abs(emp[0] - emp[1]) <= 0.02 and abs(emp[1] - emp[2]) <= 0.02


@pytest.mark.acceptance("A8", "Mehler invariance on the A5 instance, M=1e5, t=1, within 0.03")
def test_a8_mehler_invariance(a5_instance, a5_ensemble):
    model, noise = a5_instance
    w = default_probes(model.n_modes)[6]  # a random unit direction
    assert np.linalg.norm(w) == pytest.approx(1.0)
    # X ~ nu (the A5 ensemble); P_1 f(X) sampled by evolving every X for one time unit
    cfg = SimConfig(100_000, 1.0, 1.0, [1.0], RngState(20240611, 8), y0=a5_ensemble)
    evolved = simulate_ensemble(model, noise, cfg).states[-1]
    lhs = np.mean(np.cos(evolved @ w))
    rhs_mc = np.mean(np.cos(a5_ensemble.states[-1] @ w))
    rhs = analytic_cf(model, noise, w).value.real
    print(f"A8 E[P_1 f] {lhs:.4f}, E[f] analytic {rhs:.4f}, empirical {rhs_mc:.4f}")
    assert abs(lhs - rhs) <= 0.03
    assert abs(lhs - rhs_mc) <= 0.03


@pytest.mark.acceptance("A9", "Gaussian trace = pi^2/12 within 1e-6, limit CF closed form within 1e-8")
def test_a9_gaussian():
    n = 20
    model = weyl_eigenvalues(1, 1.0, n)
    noise = DiagonalGaussian((1.0,) * n)
    rep = full_report(model, noise)
    assert rep.overall is Overall.STATIONARY_EXISTS
    assert abs(rep["TraceB"].value - math.pi**2 / 12) <= 1e-6
    gen = np.random.Generator(np.random.Philox(key=9))
    k = np.arange(1, n + 1)
    for _ in range(10):
        v = gen.standard_normal(n)
        probe = analytic_cf(model, noise, v, tol=1e-10)
        closed = math.exp(-np.sum(v**2 / (4 * k**2)))
        assert abs(probe.value - closed) <= 1e-8


@pytest.mark.acceptance("A10", "A5 stats file byte-identical across repeats and 1/2/8 workers")
def test_a10_determinism(tmp_path, monkeypatch):
    blobs = []
    for i, workers in enumerate((1, 2, 8, 2)):
        monkeypatch.setenv("SIM_WORKERS", str(workers))
        out = tmp_path / f"stats_{i}.csv"
        assert quiet(run_simulate, parse_config(A5_CONFIG), out) == 0
        blobs.append(out.read_bytes())
    assert all(b == blobs[0] for b in blobs[1:])
