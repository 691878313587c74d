"""Titchmarsh-Weyl M-matrices of fourth-order Sturm-Liouville problems and HELP inequality checks."""

from .problem import Problem, CoefficientSet, load_problem, bundled_problem, parse_problem
from .odeint import IntegratorSettings
from .riccati import BoundaryCondition, DIRICHLET, NEUMANN, compute_psi, m_from_psi
from .taylor import adaptive_taylor, TaylorStatus
from .laurent import laurent_from_taylor, Branch
from .spectral import (evaluate_m, locate_pole, locate_poles, residue_report, numerical_rank,
                       bennewitz_check, help_verdict, sector_scan, HelpOutcome)

__all__ = [
    "Problem", "CoefficientSet", "load_problem", "bundled_problem", "parse_problem",
    "IntegratorSettings", "BoundaryCondition", "DIRICHLET", "NEUMANN", "compute_psi", "m_from_psi",
    "adaptive_taylor", "TaylorStatus", "laurent_from_taylor", "Branch", "evaluate_m",
    "locate_pole", "locate_poles", "residue_report", "numerical_rank", "bennewitz_check",
    "help_verdict", "sector_scan", "HelpOutcome",
]
__version__ = "0.1.0"
