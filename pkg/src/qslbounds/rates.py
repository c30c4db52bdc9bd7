"""Quantum-speed-limit times, exact information rates, and the upper bounds.

All time averages are trapezoid sums on the trajectory's own grid, so grid
refinement tightens the speed quantities and the convergence diagnostics
together. Rates are reported in bits per unit time: entropies enter in
nats and are divided by ln 2 here and nowhere else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distances import ContinuityCoefficients, trace_distance, wasserstein_p
from .dynamics import Trajectory
from .entropy import (
    boltzmann_entropy,
    gibbs_entropy,
    gibbs_state,
    marginal,
    shannon_information,
    von_neumann_entropy,
)
from .errors import EmptyTrajectory, InvalidState

LN2 = math.log(2.0)

# Flags attached to summaries and sweep rows.
FLAG_STATIONARY = "STATIONARY"
FLAG_AMPLITUDE_GUARD = "AMPLITUDE_GUARD"
FLAG_NONCONVERGED = "NONCONVERGED"

_ZERO = 1e-14


@dataclass(frozen=True)
class SpeedSummary:
    """ell, the time-averaged speed Lambda_tau, and tau_qsl = 2 ell / Lambda_tau."""

    ell: float
    lambda_tau: float
    tau_qsl: float
    tau: float
    flags: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class MarginalSpeedSummary:
    """Same quantities in the eigenbasis of an observable: tau = W1 / Lambda."""

    w1: float
    lambda_x_tau: float
    tau_qsl_x: float
    tau: float
    flags: frozenset = field(default_factory=frozenset)


def _require_rates(traj: Trajectory):
    if len(traj) < 2:
        raise EmptyTrajectory(f"trajectory has {len(traj)} grid points")
    if len(traj.rates) != len(traj.times):
        raise EmptyTrajectory("trajectory rates not populated on the grid")


def _rate_stack(traj: Trajectory) -> np.ndarray:
    stack = np.stack(traj.rates)
    return 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2)))


def _batched_eigvalsh(stack: np.ndarray) -> np.ndarray:
    if stack.shape[-1] == 2:
        half_tr = 0.5 * (stack[:, 0, 0].real + stack[:, 1, 1].real)
        det = stack[:, 0, 0].real * stack[:, 1, 1].real - (stack[:, 0, 1] * stack[:, 1, 0]).real
        s = np.sqrt(np.clip(half_tr * half_tr - det, 0.0, None))
        return np.stack([half_tr - s, half_tr + s], axis=1)
    return np.linalg.eigvalsh(stack)


def speed_summary(traj: Trajectory) -> SpeedSummary:
    """Integrated speed of a trajectory: Lambda = (1/tau) int ||rho'||_1 dt.

    A stationary trajectory (ell = Lambda = 0) reports the degenerate
    tau_qsl = tau with a STATIONARY flag instead of a 0/0.
    """
    _require_rates(traj)
    norms = np.sum(np.abs(_batched_eigvalsh(_rate_stack(traj))), axis=1)
    lam = float(np.trapezoid(norms, traj.times)) / traj.tau
    ell = trace_distance(traj.final, traj.initial)
    if lam < _ZERO and ell < _ZERO:
        return SpeedSummary(
            ell=ell, lambda_tau=lam, tau_qsl=traj.tau, tau=traj.tau,
            flags=frozenset({FLAG_STATIONARY}),
        )
    return SpeedSummary(ell=ell, lambda_tau=lam, tau_qsl=2.0 * ell / lam, tau=traj.tau)


def marginal_speed_summary(traj: Trajectory, basis: np.ndarray, basis_id: str | None = None) -> MarginalSpeedSummary:
    """Speed of the marginal distribution in the given eigenbasis.

    ||rho'(x)||_1 = sum_x |<x|rho'|x>| and tau^X_qsl = W1 / Lambda^X (no
    factor 2: the marginal inequality chain carries none).
    """
    _require_rates(traj)
    u = np.asarray(basis, dtype=complex)
    p0 = marginal(traj.initial, u, basis_id)
    p1 = marginal(traj.final, u, basis_id)
    w1 = wasserstein_p(p0, p1, 1)
    diag = np.einsum("ji,njk,ki->ni", u.conj(), np.stack(traj.rates), u).real
    norms = np.sum(np.abs(diag), axis=1)
    lam = float(np.trapezoid(norms, traj.times)) / traj.tau
    if lam < _ZERO and w1 < _ZERO:
        return MarginalSpeedSummary(
            w1=w1, lambda_x_tau=lam, tau_qsl_x=traj.tau, tau=traj.tau,
            flags=frozenset({FLAG_STATIONARY}),
        )
    return MarginalSpeedSummary(w1=w1, lambda_x_tau=lam, tau_qsl_x=w1 / lam, tau=traj.tau)


def entropy_change(traj: Trajectory) -> float:
    """H(rho_tau) - H(rho_0) in nats."""
    return von_neumann_entropy(traj.final) - von_neumann_entropy(traj.initial)


def info_rate_exact(traj: Trajectory, ss: SpeedSummary) -> float:
    """|Delta H| / (tau_qsl ln 2) in bits per unit time.

    Stationary dynamics report rate 0, as do closed loops whose endpoints
    coincide to better than 1e-9 in trace distance: there the ratio is a
    0/0 whose numerical value is pure roundoff.
    """
    if FLAG_STATIONARY in ss.flags or ss.ell < 1e-9:
        return 0.0
    return abs(entropy_change(traj)) / (ss.tau_qsl * LN2)


def bound_micro(ss: SpeedSummary, dim: int, include_additive: bool = False, k_b: float = 1.0) -> float:
    """Finite-dimensional rate bound (ln d / ln 2) Lambda_tau in bits/time.

    ``include_additive`` adds the 1/(e tau_qsl ln 2) term carried over
    from the additive constant of the entropy continuity bound; it is not
    negligible for small systems and is reported separately for that
    reason. Written via k_B so the microcanonical-entropy form
    S_B Lambda / (k_B ln 2) is the identical expression.
    """
    if dim < 2:
        raise InvalidState(f"dim must be >= 2, got {dim}")
    out = boltzmann_entropy(dim, k_b) * ss.lambda_tau / (k_b * LN2)
    if include_additive:
        out += 1.0 / (math.e * ss.tau_qsl * LN2)
    return out


def bound_canonical(ss: SpeedSummary, hamiltonian: np.ndarray, energy: float, k_b: float = 1.0) -> float:
    """Energy-constrained rate bound S_G(E) Lambda_tau / (k_B ln 2)."""
    ts = gibbs_state(hamiltonian, energy)
    return gibbs_entropy(ts, k_b) * ss.lambda_tau / (k_b * LN2)


def bound_shannon(mss: MarginalSpeedSummary, coeffs: ContinuityCoefficients) -> float:
    """Marginal-information rate bound alpha Lambda^X_tau / ln 2."""
    return coeffs.alpha * mss.lambda_x_tau / LN2


def bekenstein_bound(energy: float, hbar: float = 1.0) -> float:
    """pi E / (hbar ln 2) in bits per unit time."""
    if energy < 0:
        raise InvalidState(f"energy must be nonnegative, got {energy!r}")
    return math.pi * energy / (hbar * LN2)


def pendry_bound(power: float, hbar: float = 1.0) -> float:
    """sqrt(pi Edot / (3 hbar)) / ln 2 in bits per unit time."""
    if power < 0:
        raise InvalidState(f"power must be nonnegative, got {power!r}")
    return math.sqrt(math.pi * power / (3.0 * hbar)) / LN2


@dataclass(frozen=True)
class BoundReport:
    """One sweep point: the exact information rate plus every applicable bound.

    NaN values with a nonempty ``flags`` tuple mark sweep points whose
    trajectory could not be produced by the requested method; they are
    reported, never fabricated.
    """

    gamma0: float
    lam: float
    omega0: float
    tau: float
    ell: float
    lambda_tau: float
    tau_qsl: float
    delta_h_nats: float
    info_rate_exact: float
    bound_micro: float
    bound_micro_with_additive: float
    flags: tuple = ()
    bound_canonical: float | None = None
    bound_shannon: float | None = None
