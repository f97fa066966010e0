"""Diagonal semigroups generated by a self-adjoint operator with spectrum (-lambda_k).

Eigenvalues are 1-based in the mathematics (lambda_1 <= lambda_2 <= ...) and
0-based in storage: ``model.lambdas[k - 1]`` is lambda_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class PowerLog:
    """Eigenvalue growth law ``lambda_k = coef * k**power * (1 + log k)**log_power``.

    Used for certified tail bounds on series over the untruncated spectrum.
    """

    coef: float
    power: float
    log_power: float = 0.0

    def __post_init__(self):
        if not self.coef > 0:
            raise ValueError(f"growth law coefficient must be positive, got {self.coef}")
        if not self.power > 0:
            raise ValueError(f"growth law power must be positive, got {self.power}")
        if self.log_power < 0:
            raise ValueError(f"growth law log_power must be >= 0, got {self.log_power}")

    def eigenvalue(self, k):
        k = np.asarray(k, dtype=float)
        return self.coef * k**self.power * (1.0 + np.log(k)) ** self.log_power


@dataclass(frozen=True)
class Weyl(PowerLog):
    """Weyl's law for the Dirichlet Laplacian on a ``d``-dimensional domain: ``c * k**(2/d)``."""

    coef: float = field(init=False)
    power: float = field(init=False)
    log_power: float = field(init=False, default=0.0)
    d: int = 1
    c: float = 1.0

    def __init__(self, d: int, c: float = 1.0):
        if int(d) != d or d < 1:
            raise ValueError(f"dimension must be a positive integer, got {d}")
        if not c > 0:
            raise ValueError(f"Weyl constant must be positive, got {c}")
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "coef", float(c))
        object.__setattr__(self, "power", 2.0 / int(d))
        object.__setattr__(self, "log_power", 0.0)

    def eigenvalue(self, k):
        k = np.asarray(k, dtype=float)
        return self.c * k ** (2.0 / self.d)


@dataclass(frozen=True)
class PowerTail:
    """Coefficient sequence beyond the truncation: ``x_k = coef * k**power`` for k > N."""

    coef: float
    power: float = 0.0

    def __call__(self, k):
        return self.coef * np.asarray(k, dtype=float) ** self.power


def _as_tuple(values, name):
    if values is None:
        return None
    out = tuple(float(x) for x in np.ravel(np.asarray(values, dtype=float)))
    if not all(math.isfinite(x) for x in out):
        raise ValueError(f"{name} must contain finite values only")
    return out


@dataclass(frozen=True)
class SpectralModel:
    """Truncated spectrum of ``-A`` with optional Gaussian covariance and drift.

    Parameters
    ----------
    lambdas : sequence of float
        Positive, nondecreasing eigenvalues lambda_1..lambda_N.
    growth_law : PowerLog or Weyl, optional
        Closed-form law for the untruncated spectrum.  Stored eigenvalues must
        match it.  Without it every tail question is Inconclusive.
    q_diag, a_diag : sequence of float, optional
        ``<Q e_k, e_k>`` and ``a(e_k)`` on the stored modes.
    q_tail, a_tail : PowerTail, optional
        Extension of ``q_diag`` / ``a_diag`` beyond the truncation.  When
        omitted the last stored entry is repeated.
    """

    lambdas: tuple
    growth_law: Optional[PowerLog] = None
    q_diag: Optional[tuple] = None
    a_diag: Optional[tuple] = None
    q_tail: Optional[PowerTail] = None
    a_tail: Optional[PowerTail] = None

    def __post_init__(self):
        lambdas = _as_tuple(self.lambdas, "lambdas")
        if not lambdas:
            raise ValueError("lambdas must be nonempty")
        if min(lambdas) <= 0:
            raise ValueError("lambdas must be strictly positive")
        if any(b < a for a, b in zip(lambdas, lambdas[1:])):
            raise ValueError("lambdas must be nondecreasing")
        object.__setattr__(self, "lambdas", lambdas)
        for name in ("q_diag", "a_diag"):
            vals = _as_tuple(getattr(self, name), name)
            if vals is not None and len(vals) != len(lambdas):
                raise ValueError(f"{name} has length {len(vals)}, expected {len(lambdas)}")
            object.__setattr__(self, name, vals)
        if self.q_diag is not None and min(self.q_diag) < 0:
            raise ValueError("q_diag must be nonnegative")
        if self.growth_law is not None:
            expected = self.growth_law.eigenvalue(np.arange(1, len(lambdas) + 1))
            if not np.allclose(lambdas, expected, rtol=1e-12, atol=0.0):
                raise ValueError("stored lambdas do not follow the declared growth law")

    @property
    def n_modes(self) -> int:
        return len(self.lambdas)

    @cached_property
    def lambda_array(self) -> np.ndarray:
        arr = np.array(self.lambdas)
        arr.setflags(write=False)
        return arr

    @property
    def lambda_1(self) -> float:
        return self.lambdas[0]

    def with_(self, **changes) -> "SpectralModel":
        from dataclasses import replace

        return replace(self, **changes)


CoeffVector = Union[Sequence[float], np.ndarray]


def _check_vector(model: SpectralModel, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1] > model.n_modes:
        raise ValueError(f"vector has {v.shape[-1]} coordinates, model has {model.n_modes} modes")
    if not np.all(np.isfinite(v)):
        raise ValueError("coefficient vector must be finite")
    return v


def semigroup_apply(model: SpectralModel, v: CoeffVector, t: float) -> np.ndarray:
    """Return the coefficients of ``T(t) v``, i.e. ``exp(-lambda_k t) * v_k``.

    ``v`` may be a single coefficient vector or a stack of them (last axis = modes).
    Shorter vectors act on the leading modes.
    """
    if t < 0:
        raise ValueError(f"semigroup time must be nonnegative, got {t}")
    v = _check_vector(model, v)
    n = v.shape[-1]
    return np.exp(-model.lambda_array[:n] * t) * v


def weyl_eigenvalues(d: int, c: float, n: int) -> SpectralModel:
    """Spectral model with ``lambda_k = c * k**(2/d)`` for k = 1..n."""
    if int(n) != n or n < 1:
        raise ValueError(f"number of modes must be a positive integer, got {n}")
    law = Weyl(d, c)
    return SpectralModel(tuple(law.eigenvalue(np.arange(1, int(n) + 1))), growth_law=law)


def hs_norm_sq(model: SpectralModel, s: float) -> float:
    """Squared Hilbert-Schmidt norm of ``T(s)`` over the stored modes."""
    if not s > 0:
        raise ValueError(f"Hilbert-Schmidt norm needs s > 0, got {s}")
    return float(np.sum(np.exp(-2.0 * model.lambda_array * s)))
