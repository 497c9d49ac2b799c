"""Stochastic observability and constructability Gramians of discrete-time linear systems."""

from .deterministic import (
    constructability_matrix,
    deterministic_gramian,
    observability_matrix,
    unobservability_measures,
)
from .direct import (
    cons_fim_direct,
    cons_fim_no_process_noise,
    fim_linear_gaussian,
    meas_cov_m_form,
    meas_cov_theorem1,
    obs_fim_direct,
    obs_fim_no_process_noise,
)
from .duality import DualSystemMap, dual_lti, dual_ltv
from .info import RecursionTrace, SymmetricInfoMatrix
from .model_io import load_system, write_sweep_csv
from .recursive import (
    cons_recursion,
    cons_recursion_no_noise,
    obs_recursion_dual,
    obs_recursion_lti,
    obs_recursion_no_noise,
)
from .riccati import riccati_residual, solve_dare_fixed_point
from .system import (
    TimeInvariantLinearSystem,
    TimeVaryingLinearSystem,
    lift_lti,
    state_transition,
    validate,
)
from .trajectory import assemble_trajectory_fim, corner_check, intermediate_state_info

__version__ = "0.1.0"
