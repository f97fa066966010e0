"""Characteristic-function probes tying ensembles to the analytic laws.

The law nu_t of the stochastic convolution has CF
``phi_t(v) = exp(int_0^t Psi(T(s) v) ds)``; for symmetric noise this is real and
lies in (0, 1].  Quadrature errors on the exponent are pushed through exp
explicitly: an exponent error Delta gives a CF error of at most
``exp(I) * (exp(Delta) - 1)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .criteria import CriteriaReport, Overall, full_report
from .noise import (CanonicalStable, DiagonalGaussian, DiagonalSeries, NoiseSpec,
                    SymmetricStable, symbol)
from .quadrature import integrate_decaying
from .simulate import Ensemble
from .spectral import SpectralModel, semigroup_apply

CF_TOL = 1e-6


class DivergenceError(ValueError):
    """The limiting CF was requested for a model without a stationary measure."""


class StationarityStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class CfProbe:
    v: tuple
    t: float  # math.inf for the limit law
    value: complex
    err_bound: float
    source: str  # "Quadrature" or "Empirical(M)"


@functools.lru_cache(maxsize=64)
def _report(model: SpectralModel, noise: NoiseSpec) -> CriteriaReport:
    return full_report(model, noise)


def _require_not_divergent(model, noise, report: Optional[CriteriaReport], exc=DivergenceError):
    report = report if report is not None else _report(model, noise)
    if report.overall is Overall.NO_STATIONARY:
        raise exc("no stationary measure: nu_t does not converge as t -> inf")
    return report


def _envelope(model: SpectralModel, noise: NoiseSpec, v: np.ndarray) -> Tuple[float, float]:
    """``(decay, bound)`` with ``|Psi(T(s) v)| <= bound * exp(-decay * s)``."""
    lam = model.lambda_array[: v.size]
    if isinstance(noise, CanonicalStable):
        nz = np.nonzero(v)[0]
        return noise.alpha * lam[nz].min(), float(np.linalg.norm(v)) ** noise.alpha
    rates, bounds = [], []
    if isinstance(noise, DiagonalGaussian):
        for k, q in enumerate(noise.q):
            rates.append(2.0 * lam[k])
            bounds.append(0.5 * q * v[k] ** 2)
    elif isinstance(noise, DiagonalSeries):
        for k, c in enumerate(noise.coords):
            if isinstance(c, SymmetricStable):
                rates.append(c.alpha * lam[k])
                bounds.append(c.sigma**c.alpha * abs(v[k]) ** c.alpha)
            else:
                # 1 - cos x <= x^2 / 2
                rates.append(2.0 * lam[k])
                bounds.append(0.5 * c.rate * float(c.probs @ c.sizes**2) * v[k] ** 2)
    else:
        raise TypeError(f"unknown noise spec {noise!r}")
    active = [r for r, b in zip(rates, bounds) if b > 0]
    return (min(active) if active else lam[0]), float(sum(bounds))


def _exponent(model, noise, v: np.ndarray, t: float, tol: float):
    if not np.any(v):
        return 0.0, 0.0
    decay, bound = _envelope(model, noise, v)
    if bound == 0.0:
        return 0.0, 0.0
    res = integrate_decaying(lambda s: symbol(noise, semigroup_apply(model, v, s)),
                             decay, bound, tol, upper=t)
    return res.value, res.err_bound


def _check_probe(model: SpectralModel, noise: NoiseSpec, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("probe must be a single coefficient vector")
    if v.size != model.n_modes:
        raise ValueError(f"probe has {v.size} coordinates, model has {model.n_modes} modes")
    return v


def analytic_cf(model: SpectralModel, noise: NoiseSpec, v, t: float = math.inf,
                tol: float = CF_TOL, report: Optional[CriteriaReport] = None) -> CfProbe:
    """CF of nu_t at ``v`` by quadrature of the symbol along the semigroup orbit."""
    v = _check_probe(model, noise, v)
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if math.isinf(t):
        _require_not_divergent(model, noise, report)
    expo, err = _exponent(model, noise, v, t, tol)
    value = math.exp(expo)
    return CfProbe(tuple(v), t, complex(value, 0.0), value * math.expm1(err), "Quadrature")


def empirical_cf(ensemble: Ensemble, record_time: float, v) -> CfProbe:
    """Sample mean of ``exp(i <Y, v>)``; error bar ``4 / sqrt(M)``."""
    y = ensemble.at(record_time)
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return CfProbe(tuple(v), record_time, 1 + 0j, 0.0, f"Empirical({y.shape[0]})")
    phase = y[:, : v.size] @ v
    value = complex(np.mean(np.cos(phase)), np.mean(np.sin(phase)))
    return CfProbe(tuple(v), record_time, value, 4.0 / math.sqrt(y.shape[0]),
                   f"Empirical({y.shape[0]})")


def skew_convolution_residual(model: SpectralModel, noise: NoiseSpec, v, s: float, t: float,
                              tol: float = CF_TOL) -> float:
    """``|phi_{t+s}(v) - phi_s(T(t) v) phi_t(v)|``."""
    if s < 0 or t < 0:
        raise ValueError("s and t must be nonnegative")
    v = _check_probe(model, noise, v)
    whole = analytic_cf(model, noise, v, t + s, tol).value
    shifted = analytic_cf(model, noise, semigroup_apply(model, v, t), s, tol).value
    head = analytic_cf(model, noise, v, t, tol).value
    return abs(whole - shifted * head)


def stationarity_residual(model: SpectralModel, noise: NoiseSpec, v, t: float,
                          tol: float = CF_TOL, report: Optional[CriteriaReport] = None) -> float:
    """``|phi_inf(v) - phi_inf(T(t) v) phi_t(v)|``."""
    report = _require_not_divergent(model, noise, report, StationarityStateError)
    v = _check_probe(model, noise, v)
    limit = analytic_cf(model, noise, v, math.inf, tol, report).value
    moved = analytic_cf(model, noise, semigroup_apply(model, v, t), math.inf, tol, report).value
    head = analytic_cf(model, noise, v, t, tol).value
    return abs(limit - moved * head)


def convergence_curve(model: SpectralModel, noise: NoiseSpec, v, t_grid,
                      tol: float = CF_TOL,
                      report: Optional[CriteriaReport] = None) -> List[Tuple[float, float]]:
    """``[(t, |phi_t(v) - phi_inf(v)|) for t in t_grid]``."""
    report = _require_not_divergent(model, noise, report, StationarityStateError)
    limit = analytic_cf(model, noise, v, math.inf, tol, report).value
    return [(float(t), abs(analytic_cf(model, noise, v, float(t), tol).value - limit))
            for t in t_grid]


def default_probes(n_modes: int, seed: int = 0) -> np.ndarray:
    """First five basis directions plus five seeded random unit directions at norms 0.5, 1, 2."""
    basis = np.eye(n_modes)[: min(5, n_modes)]
    gen = np.random.Generator(np.random.Philox(key=seed))
    dirs = gen.standard_normal((5, n_modes))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    scaled = [r * dirs[i] for i in range(5) for r in (0.5, 1.0, 2.0)]
    return np.vstack([basis, np.array(scaled)])
