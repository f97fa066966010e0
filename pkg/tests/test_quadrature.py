import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cylou.quadrature import (PowerLogSeries, QuadratureBudgetError, Verdict, decide_series,
                              integrate_decaying)


def test_exponential():
    r = integrate_decaying(lambda s: math.exp(-s), 1.0, 1.0, 1e-8)
    assert abs(r.value - 1.0) <= 1e-8
    assert r.err_bound <= 1e-8


def test_zero_integrand():
    r = integrate_decaying(lambda s: 0.0, 1.0, 0.0, 1e-8)
    assert r.value == 0.0 and r.err_bound <= 1e-8


def test_kinked_split_integrand():
    # int_0^inf (e^{-2s} c^2 ^ 1) ds with c = e; the kink sits at s = 1
    c = math.e
    tol = 1e-8
    r = integrate_decaying(lambda s: min(math.exp(-2 * s) * c * c, 1.0), 2.0, c * c, tol)
    assert r.value == pytest.approx(math.log(c) + 0.5, abs=tol)


def test_finite_upper_limit():
    r = integrate_decaying(lambda s: math.exp(-s), 1.0, 1.0, 1e-10, upper=2.0)
    assert r.value == pytest.approx(1 - math.exp(-2), abs=1e-10)


def test_budget_error_carries_result():
    with pytest.raises(QuadratureBudgetError) as info:
        integrate_decaying(lambda s: math.sin(1e4 * s) * math.exp(-s), 1.0, 1.0, 1e-12, max_evals=500)
    assert info.value.result.evaluations >= 500


@pytest.mark.parametrize("kwargs", [dict(decay_rate=0.0), dict(bound_const=-1.0), dict(tol=0.0)])
def test_argument_errors(kwargs):
    args = dict(f=lambda s: 0.0, decay_rate=1.0, bound_const=1.0, tol=1e-8)
    args.update(kwargs)
    with pytest.raises(ValueError):
        integrate_decaying(**args)


@given(st.floats(0.2, 5.0), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_linearity(rate, a, b):
    f = lambda s: math.exp(-rate * s)
    g = lambda s: math.exp(-2 * rate * s) * math.cos(s)
    tol = 1e-9
    lhs = integrate_decaying(lambda s: a * f(s) + b * g(s), rate, abs(a) + abs(b), tol).value
    rhs = (a * integrate_decaying(f, rate, 1.0, tol).value
           + b * integrate_decaying(g, 2 * rate, 1.0, tol).value)
    assert lhs == pytest.approx(rhs, abs=5 * tol)


def test_basel_holds():
    d = decide_series(lambda k: 1.0 / k**2, lambda m: 1.0 / m, lambda m: 1.0 / (m + 1), tol=1e-8)
    assert d.verdict is Verdict.HOLDS
    assert d.estimate == pytest.approx(math.pi**2 / 6, abs=1e-8)


def test_harmonic_fails():
    d = decide_series(lambda k: 1.0 / k, tail_minorant=lambda m: math.inf)
    assert d.verdict is Verdict.FAILS


def test_no_tail_info_inconclusive():
    d = decide_series(lambda k: 1.0 / ((k + 1) * math.log(k + 1) ** 2))
    assert d.verdict is Verdict.INCONCLUSIVE


def test_negative_terms_rejected():
    with pytest.raises(ValueError):
        decide_series(lambda k: -1.0 / k**2, lambda m: 1.0 / m)


@given(st.floats(1.05, 4.0), st.floats(0.0, 3.0), st.integers(6, 20))
def test_monotone_decision(s, q, log_budget):
    # a larger budget may only turn Inconclusive into a definite verdict
    ser = PowerLogSeries(1.0, s, q)
    small = decide_series(ser.term, ser.upper, ser.lower, tol=1e-9, max_terms=2**log_budget)
    large = decide_series(ser.term, ser.upper, ser.lower, tol=1e-9, max_terms=2**(log_budget + 4))
    if small.verdict is not Verdict.INCONCLUSIVE:
        assert large.verdict is small.verdict
    assert Verdict.FAILS not in (small.verdict, large.verdict)


@given(st.floats(0.2, 1.0), st.floats(0.0, 1.0))
def test_divergent_powerlog_fails(s, q):
    ser = PowerLogSeries(1.0, s, q)
    assert decide_series(ser.term, ser.upper, ser.lower).verdict is Verdict.FAILS


@given(st.floats(1.1, 3.0), st.floats(0.0, 2.5), st.integers(2, 400))
def test_powerlog_bounds_bracket_tail(s, q, m):
    ser = PowerLogSeries(2.0, s, q)
    # compare with a long explicit partial tail plus the upper bound beyond it
    import numpy as np
    ks = np.arange(m + 1, 50 * m + 1)
    explicit = float(np.sum(ser.term(ks)))
    assert ser.lower(m) <= explicit + ser.upper(50 * m) * (1 + 1e-9)
    assert explicit <= ser.upper(m) * (1 + 1e-9)
