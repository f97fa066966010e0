"""Stationary measures of OU processes driven by cylindrical Levy noise."""

from .criteria import CriteriaReport, CriterionResult, Overall, full_report
from .diagnostics import (analytic_cf, convergence_curve, default_probes, empirical_cf,
                          skew_convolution_residual, stationarity_residual)
from .noise import (CanonicalStable, CompoundPoissonSymmetric, DiagonalGaussian, DiagonalSeries,
                    RngState, SeriesTail, SymmetricStable, symbol)
from .quadrature import Verdict, decide_series, integrate_decaying
from .simulate import Ensemble, SimConfig, mehler_apply, simulate_ensemble
from .spectral import PowerLog, PowerTail, SpectralModel, Weyl, semigroup_apply, weyl_eigenvalues

__version__ = "0.1.0"

__all__ = [
    "CanonicalStable", "CompoundPoissonSymmetric", "CriteriaReport", "CriterionResult",
    "DiagonalGaussian", "DiagonalSeries", "Ensemble", "Overall", "PowerLog", "PowerTail",
    "RngState", "SeriesTail", "SimConfig", "SpectralModel", "SymmetricStable", "Verdict", "Weyl",
    "analytic_cf", "convergence_curve", "decide_series", "default_probes", "empirical_cf",
    "full_report", "integrate_decaying", "mehler_apply", "semigroup_apply", "simulate_ensemble",
    "skew_convolution_residual", "stationarity_residual", "symbol", "weyl_eigenvalues",
]
