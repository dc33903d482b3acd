"""Numerical geometric mechanics on a single coordinate chart.

Mechanical systems ``(M, T2, alpha)``, their Newton equation, the relativistic
criterion ``alpha_dot = 0``, durations along lifted curves and the
twin-paradox example built on top of them.
"""

from .dynamics import (
    SecondOrderEq,
    VectorField,
    energy_drift,
    geodesic_equation,
    hamiltonian,
    hj_residual,
    integrate,
    intermediate_integral_residual,
    newton_equation,
    newton_residual,
)
from .errors import (
    ClockStalls,
    DegenerateMetric,
    DivisionByZero,
    DomainError,
    EvalError,
    LightlikeVelocity,
    ParseError,
    RelmechError,
    ScenarioError,
    StepSizeUnderflow,
    VelocityNotAllowed,
    ZeroSectionOrLightlike,
)
from .forces import (
    ForceForm,
    ScalarField,
    TwoForm,
    alpha_dot,
    conservative_force,
    custom_force,
    is_contact,
    lorentz_force,
    raise_index,
    relativistic_correction,
    zero_force,
)
from .geometry import (
    MetricField,
    TangentPoint,
    christoffel,
    kinetic_energy,
    length_element_rate,
    liouville_components,
    metric_inverse,
    theta_dot,
)
from .paradox import ParadoxReport, appendix_constants, gamma_c, gamma_doubleprime, gamma_prime, k_c, paradox_report
from .timeflow import (
    CanonicalTheta,
    CoordinateClock,
    PushforwardReport,
    SmoothMap,
    duration,
    duration_invariance_check,
    is_strictly_relativistic,
    proper_time,
    pushforward_trajectory,
)
from .trajectory import Trajectory

__version__ = "0.1.0"
