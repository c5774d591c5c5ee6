"""Fractional Halanay inequalities, Mittag-Leffler stability and delay-system simulation."""

__version__ = "0.1.0"

from .errors import (
    CompatibilityError,
    ConfigError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    HalanayError,
    InfeasibleError,
    MeshError,
)
from .halanay import (
    DecayEnvelope,
    Feasibility,
    HalanayParams,
    build_envelope,
    char_fn,
    check_feasibility,
    gamma_constants,
    lambda0,
    solve_lambda_star,
)
from .history import HistoryFunction, LiftedHistory
from .linear import (
    Coefficients,
    CoupledLinearSystem,
    StabilityReport,
    analyze,
    check_compatibility,
    compatible_linear_psi,
    extract_coeffs,
    extract_coeffs_exact,
    is_compatible,
    lift_system,
)
from .mittag_leffler import MLQuery, fractional_order, ml, ml_decay, ml_deriv
from .neutral import (
    ContractivityParams,
    DissipativityParams,
    NfdeReport,
    comparison_map,
    contractivity_analyze,
    dissipativity_analyze,
    h_scalar,
    history_bound,
    norm2_sq,
)
from .posrep import abs_part, delta, gamma_metzler, is_metzler, neg_part, pi_mat, pi_vec, pos_part
from .simulate import (
    EnvelopeReport,
    MeshConfig,
    NeutralSystem,
    Trajectory,
    check_envelope,
    commensurate_dt,
    decay_rate_fit,
    fractional_pece,
    simulate_coupled,
    simulate_halanay_comparison,
    simulate_neutral,
)
