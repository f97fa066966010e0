"""Command line entry point.

Exit codes: 0 success / StationaryExists, 1 usage or config error,
3 NoStationary, 4 Inconclusive, 5 diagnostic check failed.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import ConfigError, RunConfig, load_config, parse_config
from .criteria import CriteriaReport, Overall, full_report
from .diagnostics import (DivergenceError, StationarityStateError, analytic_cf, empirical_cf,
                          skew_convolution_residual)
from .quadrature import QuadratureBudgetError
from .simulate import simulate_ensemble
from .spectral import semigroup_apply

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_STATIONARY = 3
EXIT_INCONCLUSIVE = 4
EXIT_DIAGNOSTIC = 5

_OVERALL_EXIT = {
    Overall.STATIONARY_EXISTS: EXIT_OK,
    Overall.NO_STATIONARY: EXIT_NO_STATIONARY,
    Overall.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return repr(float(x))


def _provenance(cfg: RunConfig) -> dict:
    return {"config_sha256": cfg.config_hash, "seed": cfg.seed}


def _csv_header(cfg: RunConfig, extra: Sequence[str] = ()) -> list:
    lines = [f"# config_sha256={cfg.config_hash}", f"# seed={cfg.seed}"]
    return lines + [f"# {e}" for e in extra]


def _write_lines(path, lines) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    for key in ("criteria", "cf", "residual", "empirical"):
        val = getattr(args, f"{key}_tol", None)
        if val is not None:
            cfg.tolerances[key] = val
    return cfg


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def run_check(cfg: RunConfig, out) -> int:
    report = full_report(cfg.model, cfg.noise, cfg.tolerances["criteria"])
    doc = {"provenance": _provenance(cfg), **report.to_dict()}
    Path(out).write_text(json.dumps(doc, indent=2) + "\n")
    print(f"overall: {report.overall.value}")
    for r in report.results:
        print(f"  {r.condition_id:<14} {r.verdict.value:<13} {r.detail}")
    return _OVERALL_EXIT[report.overall]


def cmd_check(config_path, out="report.json") -> int:
    return run_check(load_config(config_path), out)


def run_simulate(cfg: RunConfig, out) -> int:
    if cfg.sim is None:
        raise ConfigError("sim", "the simulate command needs a 'sim' section")
    model, noise = cfg.model, cfg.noise
    ens = simulate_ensemble(model, noise, cfg.sim)
    m = ens.n_paths
    emp_tol = cfg.tolerances["empirical"]
    y0 = cfg.sim.y0
    lines = _csv_header(cfg, [f"scheme={ens.scheme}", f"n_paths={m}"])
    lines.append("t,mode,mean,variance," + ",".join(f"q{int(q * 100):02d}" for q in QUANTILES)
                 + ",cf_empirical_re,cf_empirical_im,cf_analytic_re,cf_analytic_im,cf_abs_err,cf_tol,cf_pass")
    all_pass = True
    eye = np.eye(model.n_modes)
    for t in ens.record_times:
        y = ens.at(t)
        means = y.mean(axis=0)
        variances = y.var(axis=0)
        quants = np.quantile(y, QUANTILES, axis=0)
        shift = np.zeros(model.n_modes) if y0 is None else semigroup_apply(model, y0, t)
        for k in range(model.n_modes):
            emp = empirical_cf(ens, t, eye[k])
            ana = analytic_cf(model, noise, eye[k], t, cfg.tolerances["cf"])
            expected = ana.value * complex(math.cos(shift[k]), math.sin(shift[k]))
            err = abs(emp.value - expected)
            tol = (emp.err_bound if emp_tol is None else emp_tol) + ana.err_bound
            ok = err <= tol
            all_pass &= ok
            row = [_fmt(t), str(k + 1), _fmt(means[k]), _fmt(variances[k])]
            row += [_fmt(q) for q in quants[:, k]]
            row += [_fmt(emp.value.real), _fmt(emp.value.imag), _fmt(expected.real), _fmt(expected.imag),
                    _fmt(err), _fmt(tol), "1" if ok else "0"]
            lines.append(",".join(row))
    _write_lines(out, lines)
    if cfg.dump_final:
        buf = io.StringIO()
        np.savetxt(buf, ens.states[-1], delimiter=",", fmt="%.17g")
        dump = _csv_header(cfg, [f"final states at t={_fmt(ens.record_times[-1])}"])
        dump.append(",".join(f"y{k + 1}" for k in range(model.n_modes)))
        _write_lines(Path(str(out) + ".final.csv"), dump + buf.getvalue().splitlines())
    print(f"simulated {m} paths ({ens.scheme}); CF check {'passed' if all_pass else 'FAILED'}")
    return EXIT_OK if all_pass else EXIT_DIAGNOSTIC


def cmd_simulate(config_path, out="stats.csv") -> int:
    return run_simulate(load_config(config_path), out)


def run_compare(cfg: RunConfig, out) -> int:
    model, noise = cfg.model, cfg.noise
    report = full_report(model, noise, cfg.tolerances["criteria"])
    if report.overall is Overall.NO_STATIONARY:
        print("no stationary measure: limit probes are undefined", file=sys.stderr)
        return EXIT_NO_STATIONARY
    if report.overall is Overall.INCONCLUSIVE:
        print("warning: criteria inconclusive; limit CF refers to the truncated model", file=sys.stderr)
    cf_tol, res_tol = cfg.tolerances["cf"], cfg.tolerances["residual"]
    s = cfg.compare["s"]
    lines = _csv_header(cfg, [f"s={_fmt(s)}", f"residual_tol={_fmt(res_tol)}"])
    lines.append("t,probe_id,curve,skew_residual,stationarity_residual")
    worst = 0.0
    for pid, v in enumerate(cfg.probes):
        limit = analytic_cf(model, noise, v, math.inf, cf_tol, report).value
        for t in cfg.compare["t_grid"]:
            head = analytic_cf(model, noise, v, t, cf_tol).value
            moved = analytic_cf(model, noise, semigroup_apply(model, v, t), math.inf, cf_tol, report).value
            curve = abs(head - limit)
            stat = abs(limit - moved * head)
            skew = skew_convolution_residual(model, noise, v, s, t, cf_tol)
            worst = max(worst, stat, skew)
            lines.append(",".join([_fmt(t), str(pid), _fmt(curve), _fmt(skew), _fmt(stat)]))
    _write_lines(out, lines)
    ok = worst <= res_tol
    print(f"{len(cfg.probes)} probes; worst residual {worst:.3g} (tolerance {res_tol:g})")
    return EXIT_OK if ok else EXIT_DIAGNOSTIC


def cmd_compare(config_path, out="curves.csv") -> int:
    return run_compare(load_config(config_path), out)


def heat_config(alpha: float, dim: int, n_modes: int = 64) -> dict:
    return {"model": {"weyl": {"d": dim, "c": 1.0, "n_modes": n_modes}},
            "noise": {"variant": "canonical_stable", "alpha": alpha}}


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cylou", description="Stationary measures of Levy-driven OU processes.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def tol_flags(sp):
        sp.add_argument("--criteria-tol", type=float, help="series/integral tolerance (default 1e-8)")
        sp.add_argument("--cf-tol", type=float, help="CF quadrature tolerance (default 1e-6)")
        sp.add_argument("--residual-tol", type=float, help="compare residual tolerance (default 3e-6)")
        sp.add_argument("--empirical-tol", type=float, help="Monte-Carlo CF tolerance (default 4/sqrt(M))")

    for name, default, helptext in (("check", "report.json", "decide existence of a stationary measure"),
                                    ("simulate", "stats.csv", "simulate an ensemble and write statistics"),
                                    ("compare", "curves.csv", "convergence curve and identity residuals")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("config", help="JSON run configuration")
        sp.add_argument("--out", default=default, help=f"output file (default {default})")
        tol_flags(sp)

    demo = sub.add_parser("demo", help="built-in examples")
    demo_sub = demo.add_subparsers(dest="demo", parser_class=_Parser)
    heat = demo_sub.add_parser("heat", help="heat equation with canonical stable noise")
    heat.add_argument("--alpha", type=float, required=True)
    heat.add_argument("--dim", type=int, required=True)
    heat.add_argument("--modes", type=int, default=64)
    heat.add_argument("--out", default="heat_report.json")
    tol_flags(heat)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None or (args.command == "demo" and args.demo is None):
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "demo":
            cfg = parse_config(heat_config(args.alpha, args.dim, args.modes))
        else:
            cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args)
        if args.command in ("check", "demo"):
            return run_check(cfg, args.out)
        if args.command == "simulate":
            return run_simulate(cfg, args.out)
        return run_compare(cfg, args.out)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, StationarityStateError, QuadratureBudgetError) as exc:
        print(f"diagnostic failure: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
