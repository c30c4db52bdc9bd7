"""Entropies and constrained-energy Gibbs states.

Entropies are computed in nats with the convention 0*ln(0) = 0; the
conversion to bits happens only in the rates module. Natural units
(hbar = k_B = 1) are the package default, with both constants exposed as
parameters where they enter a formula.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EnergyBelowGroundState,
    InvalidDistribution,
    InvalidState,
    NoBracket,
    NoConvergence,
    NotUnitaryBasis,
)
from .matcore import DensityOperator, _eigvalsh, require_hermitian

# Bracket expansion stops at beta = BETA_CAP_FACTOR / spectral_width.
BETA_CAP_FACTOR = 1e6
# Relative tolerance on <H>_beta = E for the Gibbs solver.
GIBBS_ENERGY_RTOL = 1e-10


def _entropy_from_probs(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """H(rho) = -tr(rho ln rho) in nats, in [0, ln d]."""
    if not isinstance(rho, DensityOperator):
        raise InvalidState("expected a DensityOperator")
    return _entropy_from_probs(rho.eigenvalues)


@dataclass(frozen=True)
class MarginalDistribution:
    """Probabilities of an observable's eigenbasis outcomes, p_x = <x|rho|x>."""

    probabilities: np.ndarray
    basis_id: str | None = None

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise InvalidDistribution(f"expected a nonempty vector, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise InvalidDistribution("non-finite probabilities")
        if np.min(p) < -1e-12:
            raise InvalidDistribution(f"negative probability {np.min(p):.3e}")
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > 1e-9:
            raise InvalidDistribution(f"probabilities sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __len__(self) -> int:
        return self.probabilities.size


def marginal(rho: DensityOperator, basis: np.ndarray, basis_id: str | None = None) -> MarginalDistribution:
    """Diagonal of rho in the given orthonormal basis (columns of ``basis``)."""
    u = np.asarray(basis, dtype=complex)
    if u.shape != (rho.dim, rho.dim):
        raise NotUnitaryBasis(f"basis shape {u.shape} does not match dim {rho.dim}")
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(rho.dim))))
    if defect > 1e-9:
        raise NotUnitaryBasis(f"unitarity defect {defect:.3e} exceeds 1e-9")
    probs = np.einsum("ji,jk,ki->i", u.conj(), rho.matrix, u).real
    return MarginalDistribution(probabilities=probs, basis_id=basis_id)


def shannon_information(dist: MarginalDistribution) -> float:
    """S_X = -sum_x p_x ln p_x in nats."""
    return _entropy_from_probs(dist.probabilities)


def boltzmann_entropy(dim: int, k_b: float = 1.0) -> float:
    """Microcanonical entropy k_B ln d of a d-dimensional accessible space."""
    if dim < 1:
        raise InvalidState(f"dim must be >= 1, got {dim}")
    return k_b * math.log(dim)


@dataclass(frozen=True)
class ThermalState:
    """Gibbs state exp(-beta H)/Z at inverse temperature beta.

    ``log_z`` is carried alongside Z because Z itself can underflow at
    large beta; F is the free energy -ln(Z)/beta, stored as -inf in the
    infinite-temperature (beta = 0) limit.
    """

    beta: float
    z: float
    log_z: float
    f: float
    e: float
    state: DensityOperator


def _gibbs_weights(levels: np.ndarray, beta: float) -> np.ndarray:
    # Shift by the ground energy so the weights never overflow.
    return np.exp(-beta * (levels - levels[0]))


def _mean_energy(levels: np.ndarray, beta: float) -> float:
    w = _gibbs_weights(levels, beta)
    return float(np.sum(levels * w) / np.sum(w))


def gibbs_spectrum_solve(levels: np.ndarray, energy: float) -> tuple[float, float, np.ndarray]:
    """Solve tr{e^{-beta H}(H - E)} = 0 on a known spectrum.

    Returns (beta, log_z, populations). beta = 0 (maximally mixed) when
    E is at or above the spectral mean; otherwise bisection on the
    strictly decreasing map beta -> <H>_beta after geometric bracket
    expansion from [0, 1].
    """
    levels = np.sort(np.asarray(levels, dtype=float))
    e_min = float(levels[0])
    e_max = float(levels[-1])
    if energy <= e_min:
        raise EnergyBelowGroundState(f"E = {energy!r} at or below ground energy {e_min!r}")

    tol = GIBBS_ENERGY_RTOL * max(abs(energy), 1e-3 * (e_max - e_min))

    def finish(beta: float) -> tuple[float, float, np.ndarray]:
        w = _gibbs_weights(levels, beta)
        zs = float(np.sum(w))
        log_z = math.log(zs) - beta * e_min
        return beta, log_z, w / zs

    if energy >= float(np.mean(levels)) - tol:
        return finish(0.0)

    beta_cap = BETA_CAP_FACTOR / max(e_max - e_min, 1e-300)
    lo, hi = 0.0, 1.0
    while _mean_energy(levels, hi) > energy:
        lo = hi
        hi *= 2.0
        if hi > beta_cap:
            raise NoBracket(f"no beta <= {beta_cap:.3e} reaches <H> = {energy!r}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        residual = _mean_energy(levels, mid) - energy
        if abs(residual) <= tol:
            return finish(mid)
        if residual > 0:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    if abs(_mean_energy(levels, mid) - energy) > tol:
        raise NoConvergence(f"bisection exhausted float resolution before |<H> - E| <= {tol:.3e}")
    return finish(mid)


def gibbs_state(hamiltonian: np.ndarray, energy: float) -> ThermalState:
    """Maximum-entropy state with mean energy E under the given Hamiltonian."""
    h = require_hermitian(hamiltonian)
    w, v = np.linalg.eigh(h)
    beta, log_z, pops = gibbs_spectrum_solve(w, energy)
    rho = DensityOperator((v * pops) @ v.conj().T)
    e_actual = float(np.sum(w * pops))
    f = -log_z / beta if beta > 0 else -math.inf
    return ThermalState(beta=beta, z=math.exp(log_z), log_z=log_z, f=f, e=e_actual, state=rho)


def gibbs_entropy(ts: ThermalState, k_b: float = 1.0) -> float:
    """S_G = k_B beta (E - F), evaluated as k_B (beta E + ln Z).

    The two forms agree identically for beta > 0 and the latter stays
    finite at beta = 0, where it reduces to k_B ln d.
    """
    return k_b * (ts.beta * ts.e + ts.log_z)


def truncated_oscillator_hamiltonian(homega: float, n_levels: int) -> np.ndarray:
    """diag(homega * (n + 1/2)), n = 0..N-1: finite stand-in for the oscillator."""
    if n_levels < 2:
        raise InvalidState(f"need at least 2 levels, got {n_levels}")
    if homega <= 0:
        raise InvalidState(f"homega must be positive, got {homega!r}")
    return np.diag(homega * (np.arange(n_levels) + 0.5)).astype(complex)


def oscillator_levels(homega: float, n_levels: int) -> np.ndarray:
    return homega * (np.arange(n_levels) + 0.5)


def oscillator_gibbs_solve(
    homega: float,
    energy: float,
    tail: float = 1e-12,
    n_start: int = 8,
    n_max: int = 1 << 22,
) -> tuple[float, float, np.ndarray, int]:
    """Gibbs spectrum solve on the oscillator, growing the cutoff until the
    top-level population drops below ``tail``.

    Returns (beta, log_z, populations, n_levels). This is how the
    infinite-dimensional energy-constrained bound is evaluated on a finite
    machine: the truncation is grown until it stops mattering.
    """
    n = max(n_start, 2)
    while True:
        beta, log_z, pops = gibbs_spectrum_solve(oscillator_levels(homega, n), energy)
        if beta > 0 and pops[-1] < tail:
            return beta, log_z, pops, n
        if n >= n_max:
            raise NoBracket(f"tail rule not met at {n} oscillator levels")
        n *= 2
