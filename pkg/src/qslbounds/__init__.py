"""Quantum speed limits and bounds on the rate of information production.

Numerical toolkit for trace-distance quantum speed limits, entropy
continuity bounds (finite-dimensional, energy-constrained, and marginal
Shannon variants), and their validation against the exactly solvable
damped Jaynes-Cummings model.
"""

from . import errors
from .distances import (
    ContinuityCoefficients,
    FannesReport,
    check_fannes,
    fannes_rhs,
    second_moment,
    shannon_continuity_rhs,
    trace_distance,
    wasserstein_p,
    winter_rhs,
    winter_rhs_spectrum,
)
from .dynamics import (
    AmplitudeSolution,
    DampedJCParams,
    Generator,
    Trajectory,
    evolve,
    excited_state,
    first_amplitude_zero,
    ground_state,
    jc_analytic_amplitude,
    jc_decay_rate_closed_form,
    jc_embedded_generator,
    jc_generator,
    jc_numerical_amplitude,
    jc_rates,
    jc_trajectory,
    unitary_generator,
)
from .entropy import (
    MarginalDistribution,
    ThermalState,
    boltzmann_entropy,
    gibbs_entropy,
    gibbs_state,
    marginal,
    oscillator_gibbs_solve,
    shannon_information,
    truncated_oscillator_hamiltonian,
    von_neumann_entropy,
)
from .matcore import (
    DensityOperator,
    EigenDecomposition,
    eig_hermitian,
    matrix_abs,
    maximally_mixed,
    pure_state,
    random_density_operator,
    random_unitary,
    trace_norm,
)
from .rates import (
    BoundReport,
    MarginalSpeedSummary,
    SpeedSummary,
    bekenstein_bound,
    bound_canonical,
    bound_micro,
    bound_shannon,
    entropy_change,
    info_rate_exact,
    marginal_speed_summary,
    pendry_bound,
    speed_summary,
)

__version__ = "0.1.0"
