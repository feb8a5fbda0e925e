"""Eigenvalues of one-dimensional anharmonic oscillators with compact
perturbations: a direct spectral solver, the asymptotic eigenvalue laws it
validates, and the interior-solution machinery behind them.

The public surface is re-exported here; the implementation lives in:

- :mod:`anharmonic.specfun`     low-level special-function kernels
- :mod:`anharmonic.potential`   potential terms, perturbations, exact integrals
- :mod:`anharmonic.eigensolve`  certified finite-difference eigensolver
- :mod:`anharmonic.asymptotics` eigenvalue expansions, quantization, counting
- :mod:`anharmonic.volterra`    interior solutions and their decay functionals
- :mod:`anharmonic.scenarios`   end-to-end verification scenarios
- :mod:`anharmonic.cli`         command-line interface
- :mod:`anharmonic.figures`     optional PNG rendering for CLI output
"""
from __future__ import annotations

from .errors import (
    ConfigError,
    IllConditionedError,
    MissedIndexError,
    NoRootError,
    NonContractionError,
    NonMonotoneError,
    NumericalFailure,
    TruncationMarginError,
)
from .potential import (
    PlainSum,
    PotentialSpec,
    Quartic,
    SampledTable,
    ShiftedPower,
    Step,
    TruncatedWeierstrass,
    WindowedCosine,
    Zero,
    action_Q,
    cos_transform,
    dump_spec,
    load_spec,
    mean_integral,
    spec_from_dict,
    spec_to_dict,
)
from .eigensolve import (
    BoundaryProblem,
    Spectrum,
    SpectrumEntry,
    boundary_angle,
    classify_angle,
    design_problem,
    solve_range,
    spectrum_from_csv,
    spectrum_from_json,
    spectrum_to_csv,
    spectrum_to_json,
    sturm_count,
)
from .asymptotics import (
    ExpansionConstants,
    ExpansionReport,
    constants,
    counting_asymptotic,
    d2_asymptotic,
    eigenvalue_expansion,
    expansion_report,
    halfline_expansion,
    heat_trace_leading,
    heat_trace_sum,
    heat_trace_tail,
    power_law_slope,
    quantization_solve,
    quartic_Q_coefficients,
    quartic_action_sum,
    thm2_residual,
)
from .volterra import (
    InteriorSolution,
    KFunctionals,
    RateFit,
    dual_path_gap,
    k_functionals,
    lemma_rate_check,
    solve_interior,
)
from .scenarios import CriterionResult, run_criteria, run_criterion

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ConfigError",
    "IllConditionedError",
    "MissedIndexError",
    "NoRootError",
    "NonContractionError",
    "NonMonotoneError",
    "NumericalFailure",
    "TruncationMarginError",
    # potential
    "PlainSum",
    "PotentialSpec",
    "Quartic",
    "SampledTable",
    "ShiftedPower",
    "Step",
    "TruncatedWeierstrass",
    "WindowedCosine",
    "Zero",
    "action_Q",
    "cos_transform",
    "dump_spec",
    "load_spec",
    "mean_integral",
    "spec_from_dict",
    "spec_to_dict",
    # eigensolve
    "BoundaryProblem",
    "Spectrum",
    "SpectrumEntry",
    "boundary_angle",
    "classify_angle",
    "design_problem",
    "solve_range",
    "spectrum_from_csv",
    "spectrum_from_json",
    "spectrum_to_csv",
    "spectrum_to_json",
    "sturm_count",
    # asymptotics
    "ExpansionConstants",
    "ExpansionReport",
    "constants",
    "counting_asymptotic",
    "d2_asymptotic",
    "eigenvalue_expansion",
    "expansion_report",
    "halfline_expansion",
    "heat_trace_leading",
    "heat_trace_sum",
    "heat_trace_tail",
    "power_law_slope",
    "quantization_solve",
    "quartic_Q_coefficients",
    "quartic_action_sum",
    "thm2_residual",
    # volterra
    "InteriorSolution",
    "KFunctionals",
    "RateFit",
    "dual_path_gap",
    "k_functionals",
    "lemma_rate_check",
    "solve_interior",
    # scenarios
    "CriterionResult",
    "run_criteria",
    "run_criterion",
]
