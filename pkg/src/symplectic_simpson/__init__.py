"""Variational symplectic integrators for the harmonic oscillator.

Two schemes are provided: the classical midpoint (Newmark) scheme, second
order and exactly energy-conserving, and a fourth-order explicit scheme
obtained from quadratic elements and Simpson's quadrature, which conserves a
modified quadratic energy.
"""

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    NotSymplecticError,
    SingularEliminationError,
    SingularJacobianError,
    StabilityWarning,
    StabilityWindowError,
    UnsupportedFormError,
)
from .oscillator import (
    OscillatorConfig,
    PhaseState,
    Propagator,
    StabilityVerdict,
    conserved_quadratic_form,
    energy_discrete_simpson,
    energy_exact,
    exact_flow,
    newmark_propagator,
    simpson_propagator,
    stability_analysis,
)
from .analysis import (
    ConvergenceReport,
    ExperimentSpec,
    Scheme,
    TrajectoryRecord,
    convergence_study,
    estimate_orders,
    max_norm_errors,
    run_trajectory,
    symplecticity_audit,
    truncation_error_probe,
)

__version__ = "0.1.0"
