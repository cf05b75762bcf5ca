"""Viscosity solutions of convex Hamilton-Jacobi equations, the admissible
velocity of particles trapped inside their shocks, and the coalescing flow
this velocity generates, with viscous and stochastic regularizations for
cross-validation."""

from .admissible import (
    AdmissibilityCheck,
    AdmissibleSolution,
    admissible_velocity,
    check_admissibility,
    classify_shock,
    effective_hamiltonian,
    lhat,
    min_enclosing_ball,
)
from .errors import (
    CertificationFailure,
    ConfigError,
    NumericalFailure,
    ShockflowError,
)
from .fixtures import InitialCondition, make_fixture
from .hopf_lax import ValueResult, minimizer_set, solve_profile, solve_value
from .legendre import (
    HamiltonianModel,
    LagrangianView,
    bregman_divergence,
    lagrangian_of,
    momentum_of_velocity,
    velocity_of_momentum,
    young_gap,
)
from .flow import (
    ParticleTrajectory,
    detect_coalescence,
    forward_velocity,
    integrate_flow,
    shock_surplus_rate,
)
from .stochastic import (
    RegularizationReport,
    SdeEnsemble,
    SelfConsistentSolution,
    compare_regularizations,
    self_consistent_velocity,
    simulate_sde,
)
from .superdiff import (
    LimitMomentumSet,
    is_shock,
    limit_data,
    superdifferential,
    superdifferential_vertices,
)
from .viscous import (
    GridField,
    anomaly_along,
    anomaly_plateau,
    gradient_limit_check,
    integrate_regularized_flow,
    solve_viscous,
    stable_step,
)

__all__ = [
    "AdmissibilityCheck",
    "AdmissibleSolution",
    "CertificationFailure",
    "ConfigError",
    "GridField",
    "HamiltonianModel",
    "InitialCondition",
    "LagrangianView",
    "LimitMomentumSet",
    "NumericalFailure",
    "ParticleTrajectory",
    "RegularizationReport",
    "SdeEnsemble",
    "SelfConsistentSolution",
    "ShockflowError",
    "ValueResult",
    "admissible_velocity",
    "anomaly_along",
    "anomaly_plateau",
    "bregman_divergence",
    "check_admissibility",
    "classify_shock",
    "compare_regularizations",
    "detect_coalescence",
    "effective_hamiltonian",
    "forward_velocity",
    "gradient_limit_check",
    "integrate_flow",
    "integrate_regularized_flow",
    "is_shock",
    "lagrangian_of",
    "lhat",
    "limit_data",
    "make_fixture",
    "min_enclosing_ball",
    "minimizer_set",
    "momentum_of_velocity",
    "self_consistent_velocity",
    "shock_surplus_rate",
    "simulate_sde",
    "solve_profile",
    "solve_value",
    "solve_viscous",
    "stable_step",
    "superdifferential",
    "superdifferential_vertices",
    "velocity_of_momentum",
    "young_gap",
]

__version__ = "0.1.0"
