import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cylou.spectral import PowerLog, SpectralModel, Weyl, hs_norm_sq, semigroup_apply, weyl_eigenvalues

lam_lists = st.lists(st.floats(0.01, 100.0), min_size=1, max_size=12).map(sorted)
times = st.floats(0.0, 20.0)


def test_identity_at_zero():
    m = SpectralModel((1.0, 2.0, 5.0))
    v = np.array([0.3, -2.0, 7.0])
    assert np.array_equal(semigroup_apply(m, v, 0.0), v)


def test_decay_at_log2():
    m = SpectralModel((1.0, 2.0))
    np.testing.assert_allclose(semigroup_apply(m, [1.0, 1.0], math.log(2)), [0.5, 0.25], rtol=1e-15)


def test_zero_vector():
    m = SpectralModel((3.0, 4.0))
    assert np.all(semigroup_apply(m, [0.0, 0.0], 2.5) == 0)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        semigroup_apply(SpectralModel((1.0,)), [1.0], -0.1)


def test_too_long_vector_rejected():
    with pytest.raises(ValueError):
        semigroup_apply(SpectralModel((1.0,)), [1.0, 2.0], 1.0)


@pytest.mark.parametrize("lams", [(), (0.0, 1.0), (-1.0,), (2.0, 1.0), (1.0, math.inf)])
def test_invalid_spectra(lams):
    with pytest.raises(ValueError):
        SpectralModel(lams)


def test_growth_law_must_match():
    with pytest.raises(ValueError):
        SpectralModel((1.0, 4.0, 10.0), growth_law=PowerLog(1.0, 2.0))


def test_weyl_examples():
    assert weyl_eigenvalues(2, 1.0, 3).lambdas == (1.0, 2.0, 3.0)
    assert weyl_eigenvalues(1, 1.0, 3).lambdas[2] == 9.0
    assert weyl_eigenvalues(4, 2.0, 1).lambdas[0] == 2.0
    law = Weyl(3, 0.5)
    assert law.power == pytest.approx(2 / 3) and law.coef == 0.5


@pytest.mark.parametrize("d,c", [(0, 1.0), (1.5, 1.0), (1, 0.0), (1, -2.0)])
def test_weyl_domain(d, c):
    with pytest.raises(ValueError):
        Weyl(d, c)


def test_hs_examples():
    assert hs_norm_sq(SpectralModel((1.0,)), math.log(2)) == pytest.approx(0.25, rel=1e-15)
    assert hs_norm_sq(SpectralModel((1.0, 1.0)), 1.0) == pytest.approx(2 * math.exp(-2), rel=1e-15)
    with pytest.raises(ValueError):
        hs_norm_sq(SpectralModel((1.0,)), 0.0)


@given(lam_lists, st.floats(0.01, 50.0))
def test_hs_termwise_bound(lams, s):
    m = SpectralModel(tuple(lams))
    assert hs_norm_sq(m, s) <= m.n_modes * math.exp(-2 * m.lambda_1 * s) * (1 + 1e-12)


@given(lam_lists, times, times, st.integers(0, 2**32 - 1))
def test_semigroup_law(lams, s, t, seed):
    m = SpectralModel(tuple(lams))
    v = np.random.default_rng(seed).standard_normal(m.n_modes)
    lhs = semigroup_apply(m, v, s + t)
    rhs = semigroup_apply(m, semigroup_apply(m, v, s), t)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-300)


@given(lam_lists, times, st.integers(0, 2**32 - 1))
def test_contraction(lams, t, seed):
    m = SpectralModel(tuple(lams))
    v = np.random.default_rng(seed).standard_normal(m.n_modes)
    out = semigroup_apply(m, v, t)
    assert np.linalg.norm(out) <= math.exp(-m.lambda_1 * t) * np.linalg.norm(v) * (1 + 1e-12)


@given(st.integers(1, 6), st.floats(0.1, 10.0), st.integers(1, 200))
def test_weyl_monotone(d, c, n):
    lams = weyl_eigenvalues(d, c, n).lambda_array
    assert np.all(np.diff(lams) >= 0)
    assert lams[0] == pytest.approx(c)


def test_lambda_array_read_only():
    m = SpectralModel((1.0, 2.0))
    with pytest.raises(ValueError):
        m.lambda_array[0] = 5.0
