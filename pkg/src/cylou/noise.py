"""Driving noise families: symbols, Levy-measure integrals and exact variates.

Two normalisations meet here and are kept separate on purpose:

* ``symbol_1d`` / the samplers use the characteristic-function scale, so a
  ``SymmetricStable(alpha, sigma)`` coordinate satisfies
  ``E exp(i theta X_t) = exp(-t sigma**alpha |theta|**alpha)``.
* The Levy-measure integrals (``levy_integral_sq_trunc``, ``levy_integral_logplus``)
  use the density ``0.5 * sigma**alpha * |beta|**(-1 - alpha)``, the image of
  ``0.5 |beta|**(-1-alpha) d beta`` under ``beta -> sigma * beta``.

The two differ by a positive alpha-dependent constant, which never changes a
finiteness verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .spectral import PowerTail


# --------------------------------------------------------------------------
# random number streams
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RngState:
    """Seed plus stream id for a counter-based (Philox) generator.

    The same ``(seed, stream)`` pair always yields the same variates.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= int(self.stream) < 2**64:
            raise ValueError("stream must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        key = int(self.seed) | (int(self.stream) << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream: int) -> "RngState":
        return RngState(self.seed, stream)


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngState):
        return rng.generator()
    raise TypeError(f"expected RngState or numpy Generator, got {type(rng).__name__}")


# --------------------------------------------------------------------------
# one-dimensional coordinates
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetricStable:
    alpha: float
    sigma: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ValueError(f"stable index must lie in (0, 2), got {self.alpha}")
        if not self.sigma > 0:
            raise ValueError(f"stable scale must be positive, got {self.sigma}")

    def levy_density(self, beta):
        beta = np.abs(np.asarray(beta, dtype=float))
        return 0.5 * self.sigma**self.alpha * beta ** (-1.0 - self.alpha)


@dataclass(frozen=True)
class CompoundPoissonSymmetric:
    """Jumps of size +-b_i with probability p_i / 2 each, arriving at ``rate``.

    ``rate = 0`` is admitted and describes the null process.
    """

    rate: float
    jumps: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"jump rate must be nonnegative, got {self.rate}")
        jumps = tuple((float(b), float(p)) for b, p in self.jumps)
        if not jumps:
            raise ValueError("compound Poisson spec needs at least one jump size")
        if any(b <= 0 for b, _ in jumps):
            raise ValueError("jump magnitudes must be positive")
        if any(p < 0 for _, p in jumps):
            raise ValueError("jump probabilities must be nonnegative")
        if abs(sum(p for _, p in jumps) - 1.0) > 1e-12:
            raise ValueError("jump probabilities must sum to 1")
        object.__setattr__(self, "jumps", jumps)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([b for b, _ in self.jumps])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.jumps])


OneDimLevySpec = Union[SymmetricStable, CompoundPoissonSymmetric]


def symbol_1d(spec: OneDimLevySpec, theta):
    """Characteristic exponent of one symmetric coordinate (real and <= 0)."""
    theta = np.asarray(theta, dtype=float)
    if isinstance(spec, SymmetricStable):
        out = -(spec.sigma**spec.alpha) * np.abs(theta) ** spec.alpha
    elif isinstance(spec, CompoundPoissonSymmetric):
        out = spec.rate * (np.cos(np.multiply.outer(theta, spec.sizes)) - 1.0) @ spec.probs
    else:
        raise TypeError(f"unknown coordinate spec {spec!r}")
    return out if out.ndim else float(out)


def levy_integral_sq_trunc(spec: OneDimLevySpec) -> float:
    """``int (beta**2 ^ 1) mu(d beta)`` for the coordinate's Levy measure."""
    if isinstance(spec, SymmetricStable):
        a = spec.alpha
        return spec.sigma**a * (1.0 / (2.0 - a) + 1.0 / a)
    if isinstance(spec, CompoundPoissonSymmetric):
        return float(spec.rate * np.dot(spec.probs, np.minimum(spec.sizes**2, 1.0)))
    raise TypeError(f"unknown coordinate spec {spec!r}")


def levy_integral_logplus(spec: OneDimLevySpec) -> float:
    """``int log+ |beta| mu(d beta)``."""
    if isinstance(spec, SymmetricStable):
        return spec.sigma**spec.alpha / spec.alpha**2
    if isinstance(spec, CompoundPoissonSymmetric):
        return float(spec.rate * np.dot(spec.probs, np.log(np.maximum(spec.sizes, 1.0))))
    raise TypeError(f"unknown coordinate spec {spec!r}")


# --------------------------------------------------------------------------
# cylindrical noise
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalStable:
    """Rotation invariant cylindrical noise with symbol ``-||u||**alpha``."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ValueError(f"stable index must lie in (0, 2), got {self.alpha}")


@dataclass(frozen=True)
class SeriesTail:
    """Coordinates beyond the truncation.

    Coordinate k > N is ``template``; for a stable template its scale is
    ``template.sigma * k**scale_power``.
    """

    template: OneDimLevySpec
    scale_power: float = 0.0

    def __post_init__(self):
        if isinstance(self.template, CompoundPoissonSymmetric) and self.scale_power != 0:
            raise ValueError("compound Poisson tails cannot carry a scale power")


@dataclass(frozen=True)
class DiagonalSeries:
    """Independent symmetric coordinates ``L(t)u = sum_k <e_k, u> l_k(t)``."""

    coords: Tuple[OneDimLevySpec, ...]
    tail: Optional[SeriesTail] = None

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("diagonal series needs at least one coordinate")
        for c in coords:
            if not isinstance(c, (SymmetricStable, CompoundPoissonSymmetric)):
                raise TypeError(f"unsupported coordinate {c!r}")
        object.__setattr__(self, "coords", coords)

    @property
    def n_modes(self) -> int:
        return len(self.coords)

    @property
    def effective_tail(self) -> SeriesTail:
        return self.tail if self.tail is not None else SeriesTail(self.coords[-1])

    def tail_coord(self, k: int) -> OneDimLevySpec:
        tail = self.effective_tail
        spec = tail.template
        if isinstance(spec, SymmetricStable) and tail.scale_power:
            return SymmetricStable(spec.alpha, spec.sigma * k**tail.scale_power)
        return spec


@dataclass(frozen=True)
class DiagonalGaussian:
    """Cylindrical Brownian motion with diagonal covariance ``q_k``."""

    q: Tuple[float, ...]
    tail: Optional[PowerTail] = None

    def __post_init__(self):
        q = tuple(float(x) for x in self.q)
        if not q:
            raise ValueError("Gaussian covariance needs at least one entry")
        if any(not math.isfinite(x) or x < 0 for x in q):
            raise ValueError("Gaussian covariance entries must be finite and nonnegative")
        object.__setattr__(self, "q", q)

    @property
    def n_modes(self) -> int:
        return len(self.q)


NoiseSpec = Union[CanonicalStable, DiagonalSeries, DiagonalGaussian]


def symbol(noise: NoiseSpec, u):
    """Cylindrical symbol Psi(u); ``u`` may be a stack of vectors (last axis = modes)."""
    u = np.asarray(u, dtype=float)
    if isinstance(noise, CanonicalStable):
        out = -np.sum(u * u, axis=-1) ** (noise.alpha / 2.0)
    elif isinstance(noise, DiagonalSeries):
        if u.shape[-1] != noise.n_modes:
            raise ValueError(f"vector has {u.shape[-1]} coordinates, noise has {noise.n_modes}")
        out = sum(symbol_1d(c, u[..., k]) for k, c in enumerate(noise.coords))
        out = np.asarray(out, dtype=float)
    elif isinstance(noise, DiagonalGaussian):
        if u.shape[-1] != noise.n_modes:
            raise ValueError(f"vector has {u.shape[-1]} coordinates, noise has {noise.n_modes}")
        out = -0.5 * (u * u) @ np.asarray(noise.q)
    else:
        raise TypeError(f"unknown noise spec {noise!r}")
    out = np.asarray(out, dtype=float)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# variates
# --------------------------------------------------------------------------

def sample_stable(alpha: float, scale: float, rng, size=None):
    """Symmetric alpha-stable variates with CF ``exp(-scale**alpha |theta|**alpha)``.

    Chambers-Mallows-Stuck construction.
    """
    if not 0 < alpha < 2:
        raise ValueError(f"stable index must lie in (0, 2), got {alpha}")
    if not np.all(np.asarray(scale) > 0):
        raise ValueError("stable scale must be positive")
    gen = as_generator(rng)
    v = gen.uniform(-0.5 * math.pi, 0.5 * math.pi, size=size)
    w = gen.standard_exponential(size=size)
    if alpha == 1.0:
        x = np.tan(v)
    else:
        x = (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
             * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))
    return scale * x


def sample_subordinator(alpha_half: float, dt: float, rng, size=None):
    """Positive stable increments with Laplace transform ``exp(-dt * theta**alpha_half)``.

    Kanter's representation.
    """
    b = alpha_half
    if not 0 < b < 1:
        raise ValueError(f"subordinator index must lie in (0, 1), got {b}")
    if not dt > 0:
        raise ValueError(f"time increment must be positive, got {dt}")
    gen = as_generator(rng)
    u = gen.uniform(0.0, math.pi, size=size)
    e = gen.standard_exponential(size=size)
    s = (np.sin(b * u) / np.sin(u) ** (1.0 / b)) * (np.sin((1.0 - b) * u) / e) ** ((1.0 - b) / b)
    # u == 0 has probability zero but uniform() can return it
    s = dt ** (1.0 / b) * np.where(u > 0, s, np.finfo(float).tiny)
    return s if size is not None else float(s)
