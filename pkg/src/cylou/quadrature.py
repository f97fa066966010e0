"""Integration on [0, inf) with analytic tail bounds, and series verdicts.

Every integrand handled here is dominated by ``bound_const * exp(-decay_rate * s)``,
so the truncation point is computed from the tolerance instead of guessed.
Series are only declared divergent on a closed-form divergent minorant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import mpmath
import numpy as np


class Verdict(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class QuadResult:
    value: float
    err_bound: float
    evaluations: int


class QuadratureBudgetError(RuntimeError):
    """Raised when the evaluation budget runs out; ``result`` holds the best estimate."""

    def __init__(self, message, result: QuadResult):
        super().__init__(message)
        self.result = result


def _simpson(fa, fm, fb, width):
    return width * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float,
                     max_evals: int = 200_000, panels: int = 16, max_depth: int = 48):
    """Adaptive Simpson on [a, b]; returns ``(value, err_estimate, evaluations, converged)``."""
    if b <= a:
        return 0.0, 0.0, 0, True
    edges = np.linspace(a, b, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    fe = [float(f(x)) for x in edges]
    fmid = [float(f(x)) for x in mids]
    evals = len(fe) + len(fmid)
    stack = []
    for i in range(panels):
        lo, hi = float(edges[i]), float(edges[i + 1])
        whole = _simpson(fe[i], fmid[i], fe[i + 1], hi - lo)
        stack.append((lo, hi, fe[i], fmid[i], fe[i + 1], whole, tol * (hi - lo) / (b - a), 0))

    total = 0.0
    err = 0.0
    converged = True
    while stack:
        lo, hi, flo, fm, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = float(f(lm)), float(f(rm))
        evals += 2
        left = _simpson(flo, flm, fm, mid - lo)
        right = _simpson(fm, frm, fhi, hi - mid)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps or depth >= max_depth:
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
            if depth >= max_depth and abs(delta) > 15.0 * eps:
                converged = False
            continue
        if evals >= max_evals:
            # budget gone: accept what we have and flag it
            total += left + right + delta / 15.0
            err += abs(delta) / 15.0
            converged = False
            continue
        stack.append((mid, hi, fm, frm, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, flm, fm, left, 0.5 * eps, depth + 1))
    return total, err, evals, converged


def tail_cutoff(decay_rate: float, bound_const: float, tail_tol: float) -> float:
    """Smallest S with ``bound_const * exp(-decay_rate * S) / decay_rate <= tail_tol``."""
    if bound_const <= 0:
        return 0.0
    return max(0.0, math.log(bound_const / (tail_tol * decay_rate)) / decay_rate)


def integrate_decaying(f: Callable[[float], float], decay_rate: float, bound_const: float,
                       tol: float, upper: float = math.inf, max_evals: int = 200_000) -> QuadResult:
    """Integrate ``f`` over ``[0, upper]`` given ``|f(s)| <= bound_const * exp(-decay_rate * s)``.

    Half of ``tol`` is spent on the analytic tail beyond the cutoff, half on
    adaptive Simpson below it.  ``err_bound`` adds the Simpson error estimate
    and the tail bound.
    """
    if not decay_rate > 0:
        raise ValueError(f"decay rate must be positive, got {decay_rate}")
    if bound_const < 0:
        raise ValueError(f"bound constant must be nonnegative, got {bound_const}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if upper < 0:
        raise ValueError(f"upper limit must be nonnegative, got {upper}")

    s_cut = tail_cutoff(decay_rate, bound_const, 0.5 * tol)
    if s_cut >= upper:
        s_max, tail, quad_tol = upper, 0.0, tol
    else:
        s_max = s_cut
        tail = bound_const * math.exp(-decay_rate * s_max) / decay_rate
        quad_tol = 0.5 * tol
    if s_max == 0.0:
        return QuadResult(0.0, tail, 0)
    value, err, evals, converged = adaptive_simpson(f, 0.0, s_max, quad_tol, max_evals=max_evals)
    result = QuadResult(value, err + tail, evals)
    if not converged or result.err_bound > tol:
        raise QuadratureBudgetError(
            f"tolerance {tol:g} not reached after {evals} evaluations "
            f"(err_bound {result.err_bound:g})", result)
    return result


# --------------------------------------------------------------------------
# series
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesDecision:
    verdict: Verdict
    partial_sum: float
    tail_bound: Optional[float]
    terms_used: int
    estimate: Optional[float] = None
    note: str = ""


class PowerLogSeries:
    """Terms ``coef * k**(-s) * (1 + log k)**(-q)`` with integral-test tail bounds.

    ``upper(m)`` bounds ``sum_{k>m}`` from above and ``lower(m)`` from below;
    ``lower`` is infinite exactly when the series diverges.
    """

    def __init__(self, coef: float, s: float, q: float = 0.0):
        if coef < 0 or q < 0:
            raise ValueError("coef and log exponent must be nonnegative")
        self.coef, self.s, self.q = float(coef), float(s), float(q)

    @property
    def converges(self) -> bool:
        if self.coef == 0:
            return True
        return self.s > 1 or (self.s == 1 and self.q > 1)

    def term(self, k):
        k = np.asarray(k, dtype=float)
        return self.coef * k ** (-self.s) * (1.0 + np.log(k)) ** (-self.q)

    def _integral_from(self, x: float) -> float:
        if self.coef == 0:
            return 0.0
        if not self.converges:
            return math.inf
        s, q = self.s, self.q
        y0 = 1.0 + math.log(x)
        if q == 0:
            return self.coef * x ** (1.0 - s) / (s - 1.0)
        if s == 1:
            return self.coef * y0 ** (1.0 - q) / (q - 1.0)
        gamma = mpmath.gammainc(1.0 - q, a=(s - 1.0) * y0)
        return float(self.coef * mpmath.e ** (s - 1.0) * (s - 1.0) ** (q - 1.0) * gamma)

    def upper(self, m: int) -> float:
        return self._integral_from(float(m))

    def lower(self, m: int) -> float:
        if self.coef == 0:
            return 0.0
        if not self.converges:
            return math.inf
        return self._integral_from(float(m) + 1.0)


def _eval_terms(term, ks: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(term(ks), dtype=float)
    except TypeError:
        out = None  # scalar-only term
    if out is None or out.shape != ks.shape:
        out = np.array([float(term(int(k))) for k in ks])
    return out


def decide_series(term: Callable, tail_majorant: Optional[Callable[[int], float]] = None,
                  tail_minorant: Optional[Callable[[int], float]] = None, tol: float = 1e-8,
                  start: int = 64, max_terms: int = 10**7) -> SeriesDecision:
    """Decide whether ``sum_{k>=1} term(k)`` is finite.

    ``tail_majorant(m)`` / ``tail_minorant(m)`` are closed-form upper / lower
    bounds on ``sum_{k>m} term(k)``; a minorant returning ``inf`` witnesses
    divergence.  ``term`` is called with arrays of 1-based indices when it
    accepts them.

    Holds once the gap between the tail bounds is within ``tol``; the reported
    estimate is the partial sum plus the midpoint of the bounds.  Without any
    tail information the verdict is Inconclusive.
    """
    if start < 1:
        raise ValueError("start must be at least 1")
    n = int(start)
    ks = np.arange(1, n + 1)
    terms = _eval_terms(term, ks)
    if np.any(terms < 0):
        raise ValueError("series terms must be nonnegative")
    partial = float(math.fsum(terms))

    if tail_minorant is not None and math.isinf(tail_minorant(n)):
        return SeriesDecision(Verdict.FAILS, partial, None, n,
                              note="divergent minorant certifies an infinite tail")
    if tail_majorant is None:
        return SeriesDecision(Verdict.INCONCLUSIVE, partial, None, n,
                              note="no closed-form tail bound available")

    while True:
        hi = float(tail_majorant(n))
        lo = float(tail_minorant(n)) if tail_minorant is not None else 0.0
        lo = max(0.0, min(lo, hi))
        half = 0.5 * (hi - lo)
        if not math.isfinite(hi):
            return SeriesDecision(Verdict.INCONCLUSIVE, partial, None, n,
                                  note="majorant is not finite")
        if half <= tol:
            return SeriesDecision(Verdict.HOLDS, partial, half, n, partial + 0.5 * (hi + lo))
        if 2 * n > max_terms:
            return SeriesDecision(Verdict.INCONCLUSIVE, partial, half, n, partial + 0.5 * (hi + lo),
                                  note=f"tail gap {half:g} above tolerance at term budget {max_terms}")
        chunk = _eval_terms(term, np.arange(n + 1, 2 * n + 1))
        if np.any(chunk < 0):
            raise ValueError("series terms must be nonnegative")
        partial += float(math.fsum(chunk))
        n *= 2
