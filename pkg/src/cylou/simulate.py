"""Monte-Carlo ensembles of the truncated mild solution.

The stochastic convolution ``int_0^t T(t-s) dL(s)`` is generated as the time-t
state of a step recursion started at zero.  For Levy integrands it has the
same law as ``int_0^t T(s) dL(s)``, the object whose law the criteria and the
characteristic-function oracles describe.

Paths are split into fixed-size blocks and block ``b`` draws from the Philox
stream derived from ``(seed, stream, b)``.  The block layout does not depend on
the worker count, so serial and threaded runs agree bit for bit.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .noise import (CanonicalStable, CompoundPoissonSymmetric, DiagonalGaussian, DiagonalSeries,
                    NoiseSpec, RngState, SymmetricStable, as_generator, sample_stable,
                    sample_subordinator)
from .spectral import SpectralModel, semigroup_apply

BLOCK_SIZE = 4096
DEFAULT_MAX_BYTES = 2 * 1024**3


class SimulationBudgetError(RuntimeError):
    pass


def default_workers() -> int:
    env = os.environ.get("SIM_WORKERS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("SIM_WORKERS must be a positive integer")
        return n
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# single steps
# --------------------------------------------------------------------------

def stable_step_scale(lam, alpha, sigma, dt):
    """Scale of ``int_0^dt exp(-lam s) dl(s)`` for a stable coordinate: sigma*((1-e^{-a lam dt})/(a lam))^{1/a}."""
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    return np.asarray(sigma) * (-np.expm1(-alpha * lam * dt) / (alpha * lam)) ** (1.0 / alpha)


def exact_step_stable(y, lam, alpha, sigma, dt, rng):
    """Exact-in-law update ``exp(-lam dt) y + S`` for one stable coordinate (vectorised over y)."""
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    y = np.asarray(y, dtype=float)
    scale = stable_step_scale(lam, alpha, sigma, dt)
    size = y.shape if y.ndim else None
    return math.exp(-lam * dt) * y + sample_stable(alpha, float(scale), rng, size=size)


def _cp_increment(spec: CompoundPoissonSymmetric, dt: float, gen: np.random.Generator, size: int):
    counts = gen.poisson(spec.rate * dt, size=size)
    total = int(counts.sum())
    out = np.zeros(size)
    if total == 0:
        return out
    mags = spec.sizes[gen.choice(len(spec.jumps), size=total, p=spec.probs)]
    signs = np.where(gen.random(total) < 0.5, -1.0, 1.0)
    owner = np.repeat(np.arange(size), counts)
    np.add.at(out, owner, mags * signs)
    return out


def euler_step_cp(y, model: SpectralModel, noise: DiagonalSeries, dt: float, rng):
    """Decay then add an exact compound-Poisson increment (weak error O(dt)).

    ``y`` has shape (paths, modes).  Only compound-Poisson coordinates are
    stepped here; stable coordinates are left to ``exact_step_stable``.
    """
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    gen = as_generator(rng)
    y = np.asarray(y, dtype=float)
    out = semigroup_apply(model, y, dt)
    for k, spec in enumerate(noise.coords):
        if isinstance(spec, CompoundPoissonSymmetric) and spec.rate > 0:
            out[:, k] += _cp_increment(spec, dt, gen, y.shape[0])
    return out


def subordinated_step_canonical(y, model: SpectralModel, alpha: float, dt: float, rng):
    """Frozen-semigroup step for canonical stable noise.

    The increment is ``sqrt(2 S) G`` with one subordinator value S per path
    shared by all modes, so its CF is ``exp(-dt ||u||**alpha)``.
    """
    if not 0 < alpha < 2:
        raise ValueError(f"stable index must lie in (0, 2), got {alpha}")
    gen = as_generator(rng)
    y = np.asarray(y, dtype=float)
    return semigroup_apply(model, y, dt) + canonical_increment(y.shape, alpha, dt, gen)


def canonical_increment(shape, alpha: float, dt: float, rng) -> np.ndarray:
    gen = as_generator(rng)
    paths, modes = shape
    s = sample_subordinator(alpha / 2.0, dt, gen, size=paths)
    g = gen.standard_normal((paths, modes))
    return np.sqrt(2.0 * s)[:, None] * g


def _gaussian_step(y, model: SpectralModel, q: np.ndarray, dt: float, gen):
    lam = model.lambda_array
    sd = np.sqrt(q * -np.expm1(-2.0 * lam * dt) / (2.0 * lam))
    return semigroup_apply(model, y, dt) + sd * gen.standard_normal(y.shape)


# --------------------------------------------------------------------------
# ensembles
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    """Ensemble settings.

    ``y0`` is None (start at zero), a coefficient vector (start at that point)
    or an ``Ensemble`` whose final recorded states are reused (resampled with
    replacement when its path count differs).
    """

    n_paths: int
    t_final: float
    dt: float
    record_times: Sequence[float]
    rng: RngState
    y0: object = None
    workers: Optional[int] = None
    max_bytes: int = DEFAULT_MAX_BYTES

    def __post_init__(self):
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise ValueError("n_paths must be a positive integer")
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if not 0 < self.dt <= self.t_final:
            raise ValueError("dt must satisfy 0 < dt <= t_final")
        times = tuple(float(t) for t in self.record_times)
        if not times:
            raise ValueError("record_times must be nonempty")
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("record_times must be sorted")
        if times[0] < 0 or times[-1] > self.t_final:
            raise ValueError("record_times must lie in [0, t_final]")
        object.__setattr__(self, "record_times", times)


@dataclass(frozen=True, eq=False)
class Ensemble:
    states: np.ndarray  # (record time, path, mode)
    record_times: tuple
    scheme: str
    config: SimConfig = field(repr=False)

    @property
    def n_paths(self) -> int:
        return self.states.shape[1]

    def at(self, t: float) -> np.ndarray:
        try:
            i = self.record_times.index(float(t))
        except ValueError:
            raise ValueError(f"time {t} is not a recorded time {self.record_times}") from None
        return self.states[i]


def scheme_for(noise: NoiseSpec) -> str:
    if isinstance(noise, CanonicalStable):
        return "SubordinatedCanonical"
    if isinstance(noise, DiagonalGaussian):
        return "ExactGaussian"
    if isinstance(noise, DiagonalSeries):
        if all(isinstance(c, SymmetricStable) for c in noise.coords):
            return "ExactStable"
        return "EulerCP"
    raise TypeError(f"unknown noise spec {noise!r}")


def _initial_states(model: SpectralModel, config: SimConfig) -> np.ndarray:
    m, n = config.n_paths, model.n_modes
    y0 = config.y0
    if y0 is None:
        return np.zeros((m, n))
    if isinstance(y0, Ensemble):
        src = y0.states[-1]
        if src.shape[1] != n:
            raise ValueError("initial ensemble has the wrong number of modes")
        if src.shape[0] == m:
            return src.copy()
        gen = RngState(config.rng.seed, config.rng.stream << 32).generator()
        return src[gen.integers(0, src.shape[0], size=m)]
    y0 = np.asarray(y0, dtype=float)
    if y0.shape == (n,):
        return np.broadcast_to(y0, (m, n)).copy()
    if y0.shape == (m, n):
        return y0.copy()
    raise ValueError(f"initial state has shape {y0.shape}, expected ({n},) or ({m}, {n})")


def _advance(y, model: SpectralModel, noise: NoiseSpec, scheme: str, interval: float,
             dt: float, gen: np.random.Generator):
    if interval <= 0:
        return y
    if scheme == "ExactStable":
        lam = model.lambda_array
        alpha = np.array([c.alpha for c in noise.coords])
        sigma = np.array([c.sigma for c in noise.coords])
        scale = stable_step_scale(lam, alpha, sigma, interval)
        out = semigroup_apply(model, y, interval)
        for k in range(model.n_modes):
            out[:, k] += sample_stable(alpha[k], scale[k], gen, size=y.shape[0])
        return out
    if scheme == "ExactGaussian":
        return _gaussian_step(y, model, np.asarray(noise.q), interval, gen)

    n_steps = max(1, math.ceil(interval / dt - 1e-12))
    h = interval / n_steps
    if scheme == "SubordinatedCanonical":
        for _ in range(n_steps):
            y = subordinated_step_canonical(y, model, noise.alpha, h, gen)
        return y
    # EulerCP, possibly with exactly stepped stable coordinates mixed in
    stable_idx = [k for k, c in enumerate(noise.coords) if isinstance(c, SymmetricStable)]
    for _ in range(n_steps):
        y_new = euler_step_cp(y, model, noise, h, gen)
        for k in stable_idx:
            c = noise.coords[k]
            scale = float(stable_step_scale(model.lambdas[k], c.alpha, c.sigma, h))
            y_new[:, k] += sample_stable(c.alpha, scale, gen, size=y.shape[0])
        y = y_new
    return y


def simulate_ensemble(model: SpectralModel, noise: NoiseSpec, config: SimConfig) -> Ensemble:
    """Sample the truncated mild solution at ``config.record_times``.

    Exact schemes take one step per record interval; Euler and subordinated
    schemes take ``ceil(interval / dt)`` equal steps.
    """
    if isinstance(noise, (DiagonalSeries, DiagonalGaussian)) and noise.n_modes != model.n_modes:
        raise ValueError(f"noise has {noise.n_modes} coordinates, model has {model.n_modes} modes")
    scheme = scheme_for(noise)
    times = config.record_times
    m, n = config.n_paths, model.n_modes
    nbytes = len(times) * m * n * 8
    if nbytes > config.max_bytes:
        raise SimulationBudgetError(f"ensemble needs {nbytes} bytes, budget is {config.max_bytes}")

    y0 = _initial_states(model, config)
    states = np.empty((len(times), m, n))
    n_blocks = math.ceil(m / BLOCK_SIZE)

    def run_block(b: int):
        lo, hi = b * BLOCK_SIZE, min((b + 1) * BLOCK_SIZE, m)
        gen = RngState(config.rng.seed, (config.rng.stream << 32) + b + 1).generator()
        y = y0[lo:hi]
        prev = 0.0
        for i, t in enumerate(times):
            y = _advance(y, model, noise, scheme, t - prev, config.dt, gen)
            states[i, lo:hi] = y
            prev = t

    workers = config.workers or default_workers()
    if workers == 1 or n_blocks == 1:
        for b in range(n_blocks):
            run_block(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_block, range(n_blocks)))
    return Ensemble(states, times, scheme, config)


@dataclass(frozen=True)
class MehlerEstimate:
    value: float
    std_error: float


def mehler_apply(model: SpectralModel, noise: NoiseSpec, f: Callable, v, t: float,
                 n_paths: int, rng: RngState, f_bound: float = 1.0, dt: Optional[float] = None,
                 workers: Optional[int] = None) -> MehlerEstimate:
    """Monte-Carlo estimate of ``P_t f(v) = E f(T(t) v + H)`` with ``H ~ nu_t``.

    ``f`` receives an array of shape (paths, modes) and returns one value per
    row; ``f_bound`` is ``sup |f|`` and sets the reported standard error.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    v = np.asarray(v, dtype=float)
    if t == 0:
        return MehlerEstimate(float(np.asarray(f(v[None, :])).ravel()[0]), 0.0)
    cfg = SimConfig(n_paths, t, dt if dt is not None else min(0.01, t), [t], rng,
                    workers=workers)
    h = simulate_ensemble(model, noise, cfg).states[-1]
    x = semigroup_apply(model, v, t) + h
    vals = np.asarray(f(x), dtype=float)
    if vals.shape != (n_paths,):
        vals = np.array([float(f(row)) for row in x])
    return MehlerEstimate(float(vals.mean()), f_bound / math.sqrt(n_paths))
