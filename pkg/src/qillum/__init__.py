"""Quantum illumination simulator.

Hypothesis states for unentangled and entangled single-photon illumination
of a weakly reflecting target in thermal noise, single-shot and asymptotic
error bounds, and Monte Carlo photon-counting detection and imaging.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    CapacityError,
    DegenerateModelError,
    DomainError,
    EigenSolverError,
    QIError,
    StructuralError,
    UnboundedTrialsError,
)
from .hilbert import (
    DensityMatrix,
    HermitianOperator,
    Spectrum,
    dm_power,
    eig_hermitian,
    positive_part_projector,
    tensor,
    trace_distance,
)
from .scenarios import (
    HypothesisPair,
    Kind,
    ScenarioParams,
    SignalSpec,
    approximation_gap,
    ebits,
    entangled_pair,
    exact_thermal,
    thermal_b,
    unentangled_pair,
)
from .discrimination import (
    ChernoffResult,
    HelstromResult,
    RegimeLabel,
    TrialOutcomeModel,
    analytic_q_entangled,
    analytic_q_unentangled,
    chernoff_numeric,
    classical_chernoff_bernoulli,
    conditional_probs,
    helstrom,
    q_of_s,
    regime,
    trials_needed,
)
