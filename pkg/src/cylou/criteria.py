"""Stationarity conditions for the diagonal Ornstein-Uhlenbeck model.

Every diagonal semigroup here satisfies ``||T(t)|| <= exp(-lambda_1 t)``, so it is
exponentially stable and the convergence conditions on the law of the
stochastic convolution are necessary as well as sufficient; the stationary
measure, when it exists, is unique.

Series conditions are decided over the untruncated spectrum: stored modes are
summed exactly and the remainder is bounded with the eigenvalue growth law and
the coefficient tail laws (``PowerTail`` / ``SeriesTail``).  Without a growth
law such tails are Inconclusive unless the coefficients vanish beyond the
truncation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate as _scipy_integrate

from .noise import (CanonicalStable, CompoundPoissonSymmetric, DiagonalGaussian,
                    DiagonalSeries, NoiseSpec, SymmetricStable, levy_integral_logplus,
                    levy_integral_sq_trunc)
from .quadrature import (PowerLogSeries, SeriesDecision, Verdict, decide_series,
                         integrate_decaying)
from .spectral import PowerTail, SpectralModel, Weyl

DEFAULT_TOL = 1e-8

CONDITION_ORDER = ("TraceB", "JumpC", "JumpD", "LogI", "LogII", "HSalpha",
                   "ReciprocalSum", "DriftIII", "GaussIV", "JumpV", "HeatLaw")

EXP_STABLE_NOTE = ("diagonal semigroup satisfies ||T(t)|| <= exp(-lambda_1 t); it is "
                   "exponentially stable, so the convergence conditions are necessary and "
                   "sufficient and the stationary measure is unique")


class Overall(str, enum.Enum):
    STATIONARY_EXISTS = "StationaryExists"
    NO_STATIONARY = "NoStationary"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CriterionResult:
    condition_id: str
    verdict: Verdict
    value: Optional[float]
    detail: str = ""
    tail_bound: Optional[float] = None
    bound: Optional[float] = None

    def to_dict(self) -> dict:
        return {"condition_id": self.condition_id, "verdict": self.verdict.value,
                "value": self.value, "detail": self.detail,
                "tail_bound": self.tail_bound, "bound": self.bound}

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionResult":
        return cls(d["condition_id"], Verdict(d["verdict"]), d.get("value"), d.get("detail", ""),
                   d.get("tail_bound"), d.get("bound"))


@dataclass(frozen=True)
class CriteriaReport:
    results: Tuple[CriterionResult, ...]
    overall: Overall
    notes: str = ""

    def __getitem__(self, condition_id: str) -> CriterionResult:
        for r in self.results:
            if r.condition_id == condition_id:
                return r
        raise KeyError(condition_id)

    def __contains__(self, condition_id) -> bool:
        return any(r.condition_id == condition_id for r in self.results)

    def to_dict(self) -> dict:
        return {"conditions": [r.to_dict() for r in self.results],
                "overall": self.overall.value, "notes": self.notes}

    @classmethod
    def from_dict(cls, d: dict) -> "CriteriaReport":
        return cls(tuple(CriterionResult.from_dict(c) for c in d["conditions"]),
                   Overall(d["overall"]), d.get("notes", ""))


# --------------------------------------------------------------------------
# series over the untruncated spectrum
# --------------------------------------------------------------------------

def _ratio_series(model: SpectralModel, numerators, tail: Optional[PowerTail],
                  tol: float) -> SeriesDecision:
    """Decide ``sum_k x_k / lambda_k`` with ``x_k = numerators[k-1]`` on stored modes."""
    stored = np.abs(np.asarray(numerators, dtype=float))
    n = model.n_modes
    if tail is None:
        tail = PowerTail(float(stored[-1]), 0.0)
    stored_terms = stored / model.lambda_array

    law = model.growth_law
    coef = abs(tail.coef)
    if coef == 0.0:
        series = PowerLogSeries(0.0, 1.0)
    elif law is None:
        return decide_series(lambda k: stored_terms[np.asarray(k) - 1], tol=tol, start=n)
    else:
        series = PowerLogSeries(coef / law.coef, law.power - tail.power, law.log_power)

    def term(k):
        k = np.asarray(k)
        out = np.empty(k.shape, dtype=float)
        inside = k <= n
        out[inside] = stored_terms[k[inside] - 1]
        out[~inside] = series.term(k[~inside])
        return out

    return decide_series(term, series.upper, series.lower, tol=tol, start=n)


def _from_decision(condition_id: str, dec: SeriesDecision, detail: str) -> CriterionResult:
    if dec.verdict is Verdict.HOLDS:
        return CriterionResult(condition_id, dec.verdict, dec.estimate, detail, dec.tail_bound)
    if dec.verdict is Verdict.FAILS:
        return CriterionResult(condition_id, dec.verdict, None, f"{detail}; {dec.note}")
    return CriterionResult(condition_id, dec.verdict, None,
                           f"{detail}; {dec.note}; partial sum over {dec.terms_used} terms "
                           f"= {dec.partial_sum:.10g}")


def _tail_result(condition_id: str, dec: SeriesDecision, detail: str) -> CriterionResult:
    # limsup-type condition: the certified remainder must vanish
    if dec.verdict is Verdict.HOLDS:
        remainder = dec.estimate - dec.partial_sum + dec.tail_bound
        return CriterionResult(condition_id, Verdict.HOLDS, remainder,
                               f"{detail}; remainder beyond term {dec.terms_used} "
                               f"is at most {remainder:.3g} and tends to 0")
    return _from_decision(condition_id, dec, detail)


def reciprocal_sum(model: SpectralModel, tol: float = DEFAULT_TOL) -> CriterionResult:
    dec = _ratio_series(model, np.ones(model.n_modes), PowerTail(1.0, 0.0), tol)
    return _from_decision("ReciprocalSum", dec, "sum 1/lambda_k")


def trace_condition(model: SpectralModel, tol: float = DEFAULT_TOL) -> CriterionResult:
    """Gaussian trace condition; in the diagonal case the time integral equals sum q_k/(2 lambda_k)."""
    if model.q_diag is None:
        return CriterionResult("TraceB", Verdict.INCONCLUSIVE, None,
                               "no Gaussian covariance given (q_diag absent)")
    tail = model.q_tail
    dec = _ratio_series(model, 0.5 * np.asarray(model.q_diag),
                        None if tail is None else PowerTail(0.5 * tail.coef, tail.power), tol)
    return _from_decision("TraceB", dec, "int_0^inf tr[T(s) Q T(s)] ds = sum q_k/(2 lambda_k)")


def gaussian_remark_condition(model: SpectralModel, tol: float = DEFAULT_TOL) -> CriterionResult:
    if model.q_diag is None:
        return CriterionResult("GaussIV", Verdict.INCONCLUSIVE, None, "q_diag absent")
    dec = _ratio_series(model, model.q_diag, model.q_tail, tol)
    return _from_decision("GaussIV", dec, "sum <Q e_k, e_k>/lambda_k")


def drift_condition(model: SpectralModel, tol: float = DEFAULT_TOL) -> CriterionResult:
    """Sufficient drift condition ``sum |a(e_k)| / lambda_k < inf``."""
    if model.a_diag is None:
        return CriterionResult("DriftIII", Verdict.HOLDS, 0.0, "symmetric noise: c_t ≡ 0")
    dec = _ratio_series(model, model.a_diag, model.a_tail, tol)
    return _from_decision("DriftIII", dec, "sum |a(e_k)|/lambda_k")


# --------------------------------------------------------------------------
# jump conditions for diagonal series noise
# --------------------------------------------------------------------------

def _coord_numerators(noise: DiagonalSeries, kind: str):
    def num(spec):
        if kind == "jump":
            return 0.5 * levy_integral_sq_trunc(spec) + levy_integral_logplus(spec)
        if kind == "log":
            return levy_integral_logplus(spec)
        return levy_integral_sq_trunc(spec)

    stored = np.array([num(c) for c in noise.coords])
    tail = noise.effective_tail
    template = tail.template
    if isinstance(template, SymmetricStable):
        # numerators scale like sigma_k**alpha
        unit = SymmetricStable(template.alpha, template.sigma)
        tail_law = PowerTail(num(unit), template.alpha * tail.scale_power)
    else:
        tail_law = PowerTail(num(template), 0.0)
    return stored, tail_law


def _check_series_dims(model: SpectralModel, noise: DiagonalSeries):
    if noise.n_modes != model.n_modes:
        raise ValueError(f"noise has {noise.n_modes} coordinates, model has {model.n_modes} modes")


def jump_terms(model: SpectralModel, noise: DiagonalSeries) -> np.ndarray:
    """Per-mode ``J_k = int(beta^2 ^ 1) mu_k / (2 lambda_k) + int log+|beta| mu_k / lambda_k``."""
    _check_series_dims(model, noise)
    stored, _ = _coord_numerators(noise, "jump")
    return stored / model.lambda_array


def jump_conditions_diagonal(model: SpectralModel, noise: DiagonalSeries,
                             tol: float = DEFAULT_TOL) -> Tuple[CriterionResult, CriterionResult]:
    """Jump conditions for axis-supported Levy measures, reduced to ``sum_k J_k``."""
    _check_series_dims(model, noise)
    stored, tail = _coord_numerators(noise, "jump")
    dec = _ratio_series(model, stored, tail, tol)
    c = _from_decision("JumpC", dec, "sup_n int_0^inf int (sum_k<=n <u,T(s)e_k>^2 ^ 1) mu(du) ds "
                                     "= sum_k J_k")
    d = _tail_result("JumpD", dec, "limsup_m sup_n>=m sum_{k=m..n} J_k = 0")
    return c, d


def log_conditions(model: SpectralModel, noise: DiagonalSeries, tol: float = DEFAULT_TOL,
                   reciprocal: Optional[CriterionResult] = None
                   ) -> Tuple[CriterionResult, CriterionResult]:
    """Logarithmic moment conditions, reduced to ``sum_k int log+|beta| mu_k / lambda_k``."""
    _check_series_dims(model, noise)
    if reciprocal is None:
        reciprocal = reciprocal_sum(model, tol)
    stored, tail = _coord_numerators(noise, "log")
    dec = _ratio_series(model, stored, tail, tol)
    detail = "sum_k (1/lambda_k) int log+|beta| mu_k(d beta)"
    if reciprocal.verdict is not Verdict.HOLDS:
        detail += "; sum 1/lambda_k not certified finite: sufficient only together with drift, Gaussian and jump summability"
    return _from_decision("LogI", dec, detail), _tail_result("LogII", dec, detail)


def jump_remark_condition(model: SpectralModel, noise: DiagonalSeries,
                          tol: float = DEFAULT_TOL) -> CriterionResult:
    _check_series_dims(model, noise)
    stored, tail = _coord_numerators(noise, "sq")
    dec = _ratio_series(model, stored, tail, tol)
    return _from_decision("JumpV", dec, "sum_k (1/lambda_k) int (beta^2 ^ 1) mu_k(d beta)")


def jump_integrand_numeric(spec, lam: float):
    """``s -> int (exp(-2 lam s) beta^2 ^ 1) mu(d beta)`` by quadrature over beta.

    Independent of the closed forms; used to cross-check ``jump_terms``.
    """
    if isinstance(spec, CompoundPoissonSymmetric):
        b2, p = spec.sizes**2, spec.probs

        def inner(s):
            return spec.rate * float(p @ np.minimum(np.exp(-2.0 * lam * s) * b2, 1.0))
        return inner

    a, sig = spec.alpha, spec.sigma

    def inner(s):
        c = math.exp(-lam * s)
        kink = 1.0 / c
        # both half-lines together: density sigma^a |beta|^(-1-a) on beta > 0,
        # split at the kink and integrated in y = |log(beta / kink)|
        def below(y):
            # c^2 beta^(1-a) d beta with beta = kink * exp(-y)
            return math.exp(2.0 * math.log(c) + (2.0 - a) * (math.log(kink) - y))

        def above(y):
            # beta^(-1-a) d beta with beta = kink * exp(y)
            return math.exp(-a * (math.log(kink) + y))

        small, _ = _scipy_integrate.quad(below, 0.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        large, _ = _scipy_integrate.quad(above, 0.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
        return sig**a * (small + large)
    return inner


def jump_term_numeric(spec, lam: float, rtol: float = 1e-8) -> float:
    """``int_0^inf int (exp(-2 lam s) beta^2 ^ 1) mu(d beta) ds`` by nested quadrature.

    ``rtol`` is relative to the envelope integral ``bound / decay``.
    """
    if isinstance(spec, CompoundPoissonSymmetric):
        decay = 2.0 * lam
        bound = spec.rate * float(spec.probs @ spec.sizes**2)
    else:
        decay = spec.alpha * lam
        bound = levy_integral_sq_trunc(spec)
    if bound == 0:
        return 0.0
    f = jump_integrand_numeric(spec, lam)
    return integrate_decaying(f, decay, bound, rtol * bound / decay).value


# --------------------------------------------------------------------------
# canonical stable noise
# --------------------------------------------------------------------------

def heat_verdict(alpha: float, d: int) -> bool:
    """Stationary solution of the stable heat equation exists iff ``alpha * d < 4``."""
    if not 0 < alpha < 2:
        raise ValueError(f"stable index must lie in (0, 2), got {alpha}")
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    return alpha * d < 4


def stable_hs_condition(model: SpectralModel, alpha: float, tol: float = DEFAULT_TOL,
                        reciprocal: Optional[CriterionResult] = None) -> CriterionResult:
    """``int_0^inf ||T(s)||_HS^alpha ds < inf``.

    The value is the integral over the stored modes.  The verdict on the
    untruncated spectrum comes from the behaviour near s = 0: with
    ``lambda_k ~ k**p`` the squared HS norm grows like ``s**(-1/p)``, so the
    integrand is integrable iff ``alpha < 2 p`` (``alpha d < 4`` under Weyl).
    """
    if not 0 < alpha < 2:
        raise ValueError(f"stable index must lie in (0, 2), got {alpha}")
    lam = model.lambda_array
    n = model.n_modes

    gaps = lam - lam[0]

    def integrand(s):
        # factor out exp(-2 lambda_1 s) so large s does not hit subnormals
        log_hs = -2.0 * lam[0] * s + math.log(float(np.sum(np.exp(-2.0 * gaps * s))))
        return math.exp(0.5 * alpha * log_hs)

    value = integrate_decaying(integrand, alpha * model.lambda_1, n ** (0.5 * alpha), tol).value

    if reciprocal is None:
        reciprocal = reciprocal_sum(model, tol)
    bound = None
    bound_txt = ""
    if reciprocal.verdict is Verdict.HOLDS:
        bound = (((2.0 - alpha) / (alpha * model.lambda_1)) ** ((2.0 - alpha) / 2.0)
                 * reciprocal.value ** (alpha / 2.0))
        bound_txt = f"; Cauchy-Schwarz bound {bound:.6g} certifies finiteness"

    law = model.growth_law
    if law is None:
        if bound is not None:
            return CriterionResult("HSalpha", Verdict.HOLDS, value,
                                   "no growth law; finite by sum 1/lambda_k" + bound_txt,
                                   bound=bound)
        return CriterionResult("HSalpha", Verdict.INCONCLUSIVE, value,
                               "no growth law: behaviour of ||T(s)||_HS^alpha near s=0 unknown "
                               f"(value is the {n}-mode integral)")
    if isinstance(law, Weyl):
        ok = heat_verdict(alpha, law.d)
        verdict = Verdict.HOLDS if ok else Verdict.FAILS
        detail = (f"Weyl d={law.d}: integrand ~ s^(-{alpha * law.d / 4:g}) near 0, "
                  f"alpha*d = {alpha * law.d:g} {'<' if ok else '>='} 4")
    else:
        expo = alpha / (2.0 * law.power)
        if expo < 1:
            verdict, cmp = Verdict.HOLDS, "<"
        elif expo > 1 or law.log_power == 0:
            verdict, cmp = Verdict.FAILS, ">="
        else:
            verdict, cmp = Verdict.INCONCLUSIVE, "=="
        detail = f"power law p={law.power:g}: integrand ~ s^(-{expo:g}) near 0, exponent {cmp} 1"
    if verdict is Verdict.FAILS:
        return CriterionResult("HSalpha", verdict, None,
                               detail + f"; {n}-mode truncation integrates to {value:.6g}")
    return CriterionResult("HSalpha", verdict, value if verdict is Verdict.HOLDS else None,
                           detail + f"; value is the {n}-mode integral" + bound_txt, bound=bound)


# --------------------------------------------------------------------------
# aggregation
# --------------------------------------------------------------------------

def _combine_trace(a: CriterionResult, b: CriterionResult) -> CriterionResult:
    verdicts = {a.verdict, b.verdict}
    if Verdict.FAILS in verdicts:
        return CriterionResult("TraceB", Verdict.FAILS, None, f"{a.detail} | {b.detail}")
    if verdicts == {Verdict.HOLDS}:
        return CriterionResult("TraceB", Verdict.HOLDS, a.value + b.value,
                               "model covariance plus noise covariance",
                               (a.tail_bound or 0.0) + (b.tail_bound or 0.0))
    return CriterionResult("TraceB", Verdict.INCONCLUSIVE, None, f"{a.detail} | {b.detail}")


def _drift_trivial(model: SpectralModel) -> bool:
    if model.a_diag is None:
        return True
    tail_zero = model.a_tail.coef == 0 if model.a_tail is not None else model.a_diag[-1] == 0
    return tail_zero and not any(model.a_diag)


def full_report(model: SpectralModel, noise: NoiseSpec, tol: float = DEFAULT_TOL) -> CriteriaReport:
    """Run every applicable condition and aggregate an overall verdict."""
    results: List[CriterionResult] = []
    necessary: List[CriterionResult] = []
    notes = [EXP_STABLE_NOTE]
    recip = reciprocal_sum(model, tol)

    # Gaussian part: model covariance and/or DiagonalGaussian noise
    trace = None
    if isinstance(noise, DiagonalGaussian):
        if noise.n_modes != model.n_modes:
            raise ValueError(f"noise has {noise.n_modes} coordinates, model has {model.n_modes} modes")
        gauss_model = model.with_(q_diag=noise.q, q_tail=noise.tail)
        trace = trace_condition(gauss_model, tol)
        gauss_iv = gaussian_remark_condition(gauss_model, tol)
        if model.q_diag is not None:
            trace = _combine_trace(trace, trace_condition(model, tol))
        results.append(gauss_iv)
    elif model.q_diag is not None:
        trace = trace_condition(model, tol)
        results.append(gaussian_remark_condition(model, tol))
    if trace is None:
        trace = CriterionResult("TraceB", Verdict.HOLDS, 0.0, "no Gaussian component")
    results.append(trace)
    necessary.append(trace)

    if isinstance(noise, DiagonalSeries):
        jc, jd = jump_conditions_diagonal(model, noise, tol)
        li, lii = log_conditions(model, noise, tol, reciprocal=recip)
        results += [jc, jd, li, lii, jump_remark_condition(model, noise, tol)]
        necessary += [jc, jd]
    elif isinstance(noise, CanonicalStable):
        hs = stable_hs_condition(model, noise.alpha, tol, reciprocal=recip)
        results.append(hs)
        necessary.append(hs)
        if isinstance(model.growth_law, Weyl):
            ok = heat_verdict(noise.alpha, model.growth_law.d)
            results.append(CriterionResult(
                "HeatLaw", Verdict.HOLDS if ok else Verdict.FAILS,
                noise.alpha * model.growth_law.d, "alpha * d < 4"))
    elif not isinstance(noise, DiagonalGaussian):
        raise TypeError(f"unknown noise spec {noise!r}")

    results.append(recip)

    drift = drift_condition(model, tol)
    results.append(drift)
    if _drift_trivial(model):
        drift_ok = True
        notes.append("symmetric noise without drift: c_t ≡ 0, so the drift limit exists")
    else:
        drift_ok = drift.verdict is Verdict.HOLDS
        notes.append("drift decided by sum |a(e_k)|/lambda_k, a sufficient condition only")

    if any(r.verdict is Verdict.FAILS for r in necessary):
        overall = Overall.NO_STATIONARY
    elif drift_ok and all(r.verdict is Verdict.HOLDS for r in necessary):
        overall = Overall.STATIONARY_EXISTS
    else:
        overall = Overall.INCONCLUSIVE

    order = {cid: i for i, cid in enumerate(CONDITION_ORDER)}
    results.sort(key=lambda r: order[r.condition_id])
    return CriteriaReport(tuple(results), overall, "; ".join(notes))
