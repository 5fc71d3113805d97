"""Spectra of U*L products through an arctangent phase equation."""
from .analysis import SensitivityRow, radius_lower_bound, sensitivity
from .charpoly import Polynomial, charpoly_p, charpoly_r, eval_conjugate_form, eval_sub_quarter
from .errors import PhaseSpecError
from .params import Classification, ParameterSet, StructuredMatrix, build_jn, validate_params
from .phase import PhaseQuery, PhaseSolution, solve_all_positive, solve_branch, solve_sub_quarter
from .spectrum import Eigenvalue, Method, SpectrumReport, solve_spectrum

__all__ = [
    "Classification", "Eigenvalue", "Method", "ParameterSet", "PhaseQuery", "PhaseSolution",
    "PhaseSpecError", "Polynomial", "SensitivityRow", "SpectrumReport", "StructuredMatrix",
    "build_jn", "charpoly_p", "charpoly_r", "eval_conjugate_form", "eval_sub_quarter",
    "radius_lower_bound", "sensitivity", "solve_all_positive", "solve_branch",
    "solve_spectrum", "solve_sub_quarter", "validate_params",
]
