"""Fourth-order active flux finite volume solver for parabolic equations."""
from .limiter import PositivityError, PositivityLimiter, pp_time_step_bound
from .mesh import (
    AFState1D,
    AFState2D,
    FarField,
    Grid1D,
    Grid2D,
    Periodic,
    project_initial,
)
from .operators import SchemeVariant
from .problems import (
    PROBLEM_IDS,
    ConvergenceTable,
    ErrorNorms,
    barenblatt,
    convergence_study,
    error_norms,
    get_problem,
    run_problem,
)
from .semidiscrete import ConstMatrix, ConstScalar, FieldMatrix, PmePower, rhs, rhs_1d, rhs_2d
from .stability import (
    assemble_g_1d,
    assemble_g_2d,
    eigen_diagnostics_1d,
    max_cfl_1d,
    stability_region_2d,
)
from .timestepping import AdvanceResult, InstabilityError, RkScheme, StepControl, advance, stable_dt

__all__ = [
    "AFState1D", "AFState2D", "AdvanceResult", "ConstMatrix", "ConstScalar", "ConvergenceTable",
    "ErrorNorms", "FarField", "FieldMatrix", "Grid1D", "Grid2D", "InstabilityError", "PROBLEM_IDS",
    "Periodic", "PmePower", "PositivityError", "PositivityLimiter", "RkScheme", "SchemeVariant",
    "StepControl", "advance", "assemble_g_1d", "assemble_g_2d", "barenblatt", "convergence_study",
    "eigen_diagnostics_1d", "error_norms", "get_problem", "max_cfl_1d", "pp_time_step_bound",
    "project_initial", "rhs", "rhs_1d", "rhs_2d", "run_problem", "stability_region_2d", "stable_dt",
]
