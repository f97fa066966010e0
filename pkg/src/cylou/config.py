"""JSON run configuration.

Schema (all sections but ``model`` and ``noise`` optional)::

    {
      "model": {"eigenvalues": [..]}                        # explicit spectrum, no growth law
             | {"weyl": {"d": 1, "c": 1.0, "n_modes": 10}}
             | {"power_log": {"coef": 1, "power": 2, "log_power": 0, "n_modes": 10}},
        + optional "q_diag", "a_diag" (lists) and "q_tail", "a_tail" ({"coef", "power"})
      "noise": {"variant": "canonical_stable", "alpha": 1.5}
             | {"variant": "diagonal_series", "coords": [<coord>, ..] | "coord": <coord>,
                "tail": {"template": <coord>, "scale_power": 0}}
             | {"variant": "diagonal_gaussian", "q": [..] | number, "tail": {"coef", "power"}},
        <coord> = {"family": "stable", "alpha": a, "sigma": s}
                | {"family": "compound_poisson", "rate": r, "jumps": [[b, p], ..]}
      "sim": {"n_paths": M, "t_final": T, "dt": h, "record_times": [..],
              "y0": "zero" | [..], "dump_final": false},
      "probes": "default" | [[..], ..],
      "tolerances": {"criteria": 1e-8, "cf": 1e-6, "residual": 3e-6, "empirical": 0.02},
      "compare": {"t_grid": [..], "s": 1.0},
      "seed": 0, "stream": 0
    }
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .noise import (CanonicalStable, CompoundPoissonSymmetric, DiagonalGaussian, DiagonalSeries,
                    RngState, SeriesTail, SymmetricStable)
from .simulate import SimConfig
from .spectral import PowerLog, PowerTail, SpectralModel, Weyl

DEFAULT_TOLERANCES = {"criteria": 1e-8, "cf": 1e-6, "residual": 3e-6, "empirical": None}


class ConfigError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass
class RunConfig:
    model: SpectralModel
    noise: Any
    sim: Optional[SimConfig]
    probes: np.ndarray
    tolerances: dict
    seed: int
    compare: dict
    dump_final: bool = False
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)


def config_hash(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _get(d: dict, key: str, where: str, required: bool = True, default=None):
    if not isinstance(d, dict):
        raise ConfigError(where, "expected an object")
    if key not in d:
        if required:
            raise ConfigError(f"{where}.{key}" if where else key, "missing field")
        return default
    return d[key]


def _num(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(where, f"expected a number, got {x!r}")
    return float(x)


def _num_list(x, where: str) -> list:
    if not isinstance(x, list):
        raise ConfigError(where, "expected a list of numbers")
    return [_num(v, f"{where}[{i}]") for i, v in enumerate(x)]


def _tail(d, where: str) -> Optional[PowerTail]:
    if d is None:
        return None
    return PowerTail(_num(_get(d, "coef", where), f"{where}.coef"),
                     _num(d.get("power", 0.0), f"{where}.power"))


def _wrap(where: str, build):
    try:
        return build()
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(where, str(exc)) from None


def parse_model(d: dict, where: str = "model") -> SpectralModel:
    extras = dict(
        q_diag=_num_list(d["q_diag"], f"{where}.q_diag") if "q_diag" in d else None,
        a_diag=_num_list(d["a_diag"], f"{where}.a_diag") if "a_diag" in d else None,
        q_tail=_tail(d.get("q_tail"), f"{where}.q_tail"),
        a_tail=_tail(d.get("a_tail"), f"{where}.a_tail"),
    )
    kinds = [k for k in ("eigenvalues", "weyl", "power_log") if k in d]
    if len(kinds) != 1:
        raise ConfigError(where, "give exactly one of 'eigenvalues', 'weyl', 'power_log'")
    kind = kinds[0]
    w = f"{where}.{kind}"
    if kind == "eigenvalues":
        lambdas = _num_list(d[kind], w)
        return _wrap(where, lambda: SpectralModel(tuple(lambdas), **extras))
    spec = d[kind]
    n = _get(spec, "n_modes", w)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"{w}.n_modes", "expected a positive integer")
    if kind == "weyl":
        dim = _get(spec, "d", w)
        if isinstance(dim, bool) or not isinstance(dim, int):
            raise ConfigError(f"{w}.d", "expected a positive integer")
        law = _wrap(w, lambda: Weyl(dim, _num(spec.get("c", 1.0), f"{w}.c")))
    else:
        law = _wrap(w, lambda: PowerLog(_num(_get(spec, "coef", w), f"{w}.coef"),
                                        _num(_get(spec, "power", w), f"{w}.power"),
                                        _num(spec.get("log_power", 0.0), f"{w}.log_power")))
    lambdas = tuple(float(x) for x in law.eigenvalue(np.arange(1, n + 1)))
    return _wrap(where, lambda: SpectralModel(lambdas, growth_law=law, **extras))


def parse_coord(d: dict, where: str):
    family = _get(d, "family", where)
    if family == "stable":
        return _wrap(where, lambda: SymmetricStable(_num(_get(d, "alpha", where), f"{where}.alpha"),
                                                    _num(d.get("sigma", 1.0), f"{where}.sigma")))
    if family == "compound_poisson":
        jumps = _get(d, "jumps", where)
        if not isinstance(jumps, list):
            raise ConfigError(f"{where}.jumps", "expected a list of [size, probability] pairs")
        pairs = []
        for i, j in enumerate(jumps):
            if not isinstance(j, list) or len(j) != 2:
                raise ConfigError(f"{where}.jumps[{i}]", "expected [size, probability]")
            pairs.append((_num(j[0], f"{where}.jumps[{i}][0]"), _num(j[1], f"{where}.jumps[{i}][1]")))
        rate = _num(_get(d, "rate", where), f"{where}.rate")
        return _wrap(where, lambda: CompoundPoissonSymmetric(rate, tuple(pairs)))
    raise ConfigError(f"{where}.family", f"unknown family {family!r}")


def parse_noise(d: dict, n_modes: int, where: str = "noise"):
    variant = _get(d, "variant", where)
    if variant == "canonical_stable":
        return _wrap(where, lambda: CanonicalStable(_num(_get(d, "alpha", where), f"{where}.alpha")))
    if variant == "diagonal_series":
        if "coords" in d:
            if not isinstance(d["coords"], list):
                raise ConfigError(f"{where}.coords", "expected a list")
            coords = [parse_coord(c, f"{where}.coords[{i}]") for i, c in enumerate(d["coords"])]
        else:
            coords = [parse_coord(_get(d, "coord", where), f"{where}.coord")] * n_modes
        if len(coords) != n_modes:
            raise ConfigError(f"{where}.coords", f"has {len(coords)} entries, model has {n_modes} modes")
        tail = None
        if "tail" in d:
            t = d["tail"]
            template = parse_coord(_get(t, "template", f"{where}.tail"), f"{where}.tail.template")
            tail = _wrap(f"{where}.tail", lambda: SeriesTail(
                template, _num(t.get("scale_power", 0.0), f"{where}.tail.scale_power")))
        return DiagonalSeries(tuple(coords), tail)
    if variant == "diagonal_gaussian":
        q = _get(d, "q", where)
        q = [_num(q, f"{where}.q")] * n_modes if not isinstance(q, list) else _num_list(q, f"{where}.q")
        if len(q) != n_modes:
            raise ConfigError(f"{where}.q", f"has {len(q)} entries, model has {n_modes} modes")
        return _wrap(where, lambda: DiagonalGaussian(tuple(q), _tail(d.get("tail"), f"{where}.tail")))
    raise ConfigError(f"{where}.variant", f"unknown variant {variant!r}")


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("", "top level must be a JSON object")
    model = parse_model(_get(raw, "model", ""))
    noise = parse_noise(_get(raw, "noise", ""), model.n_modes)
    seed = raw.get("seed", 0)
    stream = raw.get("stream", 0)
    for key, val in (("seed", seed), ("stream", stream)):
        if isinstance(val, bool) or not isinstance(val, int) or not 0 <= val < 2**64:
            raise ConfigError(key, "expected a 64-bit unsigned integer")

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, val in (raw.get("tolerances") or {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"tolerances.{key}", "unknown tolerance")
        tolerances[key] = None if val is None else _num(val, f"tolerances.{key}")

    sim = None
    dump_final = False
    if "sim" in raw:
        s = raw["sim"]
        w = "sim"
        n_paths = _get(s, "n_paths", w)
        if isinstance(n_paths, bool) or not isinstance(n_paths, int):
            raise ConfigError("sim.n_paths", "expected a positive integer")
        t_final = _num(_get(s, "t_final", w), "sim.t_final")
        record = _num_list(s.get("record_times", [t_final]), "sim.record_times")
        y0 = s.get("y0", "zero")
        if y0 == "zero":
            y0 = None
        else:
            y0 = np.array(_num_list(y0, "sim.y0"))
            if y0.shape != (model.n_modes,):
                raise ConfigError("sim.y0", f"expected {model.n_modes} entries")
        dump_final = bool(s.get("dump_final", False))
        sim = _wrap(w, lambda: SimConfig(n_paths, t_final, _num(s.get("dt", min(0.01, t_final)), "sim.dt"),
                                         record, RngState(seed, stream), y0))

    probes_raw = raw.get("probes", "default")
    if probes_raw == "default":
        from .diagnostics import default_probes
        probes = default_probes(model.n_modes, seed)
    else:
        if not isinstance(probes_raw, list) or not probes_raw:
            raise ConfigError("probes", "expected \"default\" or a list of vectors")
        probes = np.array([_num_list(p, f"probes[{i}]") for i, p in enumerate(probes_raw)])
        if probes.ndim != 2 or probes.shape[1] != model.n_modes:
            raise ConfigError("probes", f"every probe needs {model.n_modes} entries")

    compare = raw.get("compare") or {}
    t_grid = _num_list(compare.get("t_grid", [0.0, 0.5, 1.0, 2.0, 5.0, 10.0]), "compare.t_grid")
    s_shift = _num(compare.get("s", 1.0), "compare.s")
    if s_shift < 0 or any(t < 0 for t in t_grid):
        raise ConfigError("compare", "times must be nonnegative")

    return RunConfig(model, noise, sim, probes, tolerances, seed,
                     {"t_grid": t_grid, "s": s_shift}, dump_final, raw)


def load_config(path) -> RunConfig:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    return parse_config(raw)
