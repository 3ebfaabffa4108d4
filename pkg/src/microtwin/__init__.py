"""Atomistic energies of 1D crystal deformations under two-body potentials,
their second-order continuum expansions, and the optimal microtwin profile
problem, with certified series tails throughout."""

from .deformation import (
    DiscreteProfile,
    MicrotwinConfig,
    PiecewiseDeformation,
    eval_deformation,
    microtwin_lattice,
    sample_to_lattice,
)
from .discretization import (
    ExpansionParams,
    FitDiagnostics,
    LatticeWindow,
    fit_expansion_params,
    lattice_window,
    make_epsilon_sequence,
    split_params,
    symmetric_params,
    validate_params,
)
from .energy import DiscreteConfiguration, atomistic_energy, energy_difference
from .errors import (
    AmbiguousSideError,
    BracketingError,
    BracketWarning,
    ConvergenceError,
    DivergenceError,
    DomainError,
    InsufficientDataError,
    MicrotwinError,
    NoLimitError,
    UnsupportedOrderError,
)
from .expansion import (
    ExpansionCoefficients,
    cross_interface_decay,
    jump_curvature,
    jump_term,
    jump_threshold_closed_form,
    jump_threshold_root,
    k_terms,
    one_jump_coefficients,
    smooth_coefficients,
)
from .potential import (
    MAX_ORDER,
    DecayEnvelope,
    LennardJones,
    Potential,
    envelope_bound,
    eval_potential,
    potential_from_config,
    scan_envelope_constants,
)
from .profile import (
    ELASTIC_MINIMIZER,
    ProfileChain,
    QmPoint,
    critical_a,
    f_m,
    f_m_gradient,
    f_m_hessian,
    g_function,
    hessian_at_qm,
    minimize_f_m,
    optimal_m,
    q_m,
)
from .series import (
    EnvelopedFunction,
    SumResult,
    WeightedSpaceParams,
    apply_T0,
    double_sum,
    double_sum_jump,
    inverse_power_series,
    invert_T0,
    invert_T0_neumann,
    mobius,
    offset_sum,
    single_sum,
    t0_transform,
    weighted_norm,
    zeta,
    zeta_inverse,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousSideError",
    "BracketWarning",
    "BracketingError",
    "ConvergenceError",
    "DecayEnvelope",
    "DiscreteConfiguration",
    "DiscreteProfile",
    "DivergenceError",
    "DomainError",
    "ELASTIC_MINIMIZER",
    "EnvelopedFunction",
    "ExpansionCoefficients",
    "ExpansionParams",
    "FitDiagnostics",
    "InsufficientDataError",
    "LatticeWindow",
    "LennardJones",
    "MAX_ORDER",
    "MicrotwinConfig",
    "MicrotwinError",
    "NoLimitError",
    "PiecewiseDeformation",
    "Potential",
    "ProfileChain",
    "QmPoint",
    "SumResult",
    "UnsupportedOrderError",
    "WeightedSpaceParams",
    "apply_T0",
    "atomistic_energy",
    "critical_a",
    "cross_interface_decay",
    "double_sum",
    "double_sum_jump",
    "energy_difference",
    "envelope_bound",
    "eval_deformation",
    "eval_potential",
    "f_m",
    "f_m_gradient",
    "f_m_hessian",
    "fit_expansion_params",
    "g_function",
    "hessian_at_qm",
    "inverse_power_series",
    "invert_T0",
    "invert_T0_neumann",
    "jump_curvature",
    "jump_term",
    "jump_threshold_closed_form",
    "jump_threshold_root",
    "k_terms",
    "lattice_window",
    "make_epsilon_sequence",
    "microtwin_lattice",
    "minimize_f_m",
    "mobius",
    "offset_sum",
    "one_jump_coefficients",
    "optimal_m",
    "potential_from_config",
    "q_m",
    "sample_to_lattice",
    "scan_envelope_constants",
    "single_sum",
    "smooth_coefficients",
    "split_params",
    "symmetric_params",
    "t0_transform",
    "validate_params",
    "weighted_norm",
    "zeta",
    "zeta_inverse",
]
