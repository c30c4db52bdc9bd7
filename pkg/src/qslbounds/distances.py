"""Trace distance, Wasserstein-p distances on marginals, and the
entropy-continuity bounds built from them.

The Wasserstein-p distance here is the vector p-norm of the difference of
two marginal distributions (the Schatten-p distance of diagonals), not the
optimal-transport quantity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import MarginalDistribution, gibbs_state, von_neumann_entropy
from .errors import DimMismatch, InvalidDistribution, LabelMismatch
from .matcore import DensityOperator, trace_norm

TWO_LN2 = 2.0 * math.log(2.0)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """ell(rho, sigma) = 1/2 tr|rho - sigma|, in [0, 1]."""
    if rho.dim != sigma.dim:
        raise DimMismatch(f"dims {rho.dim} and {sigma.dim} differ")
    return 0.5 * trace_norm(rho.matrix - sigma.matrix)


def wasserstein_p(p: MarginalDistribution, q: MarginalDistribution, order: int) -> float:
    """W_p(p, q) = (sum_x |p_x - q_x|^p)^(1/p) for p in {1, 2}."""
    if order not in (1, 2):
        raise InvalidDistribution(f"order must be 1 or 2, got {order!r}")
    if len(p) != len(q):
        raise LabelMismatch(f"label sets of size {len(p)} and {len(q)} differ")
    if p.basis_id is not None and q.basis_id is not None and p.basis_id != q.basis_id:
        raise LabelMismatch(f"bases {p.basis_id!r} and {q.basis_id!r} differ")
    diff = np.abs(p.probabilities - q.probabilities)
    if order == 1:
        return float(np.sum(diff))
    return float(np.sqrt(np.sum(diff * diff)))


def second_moment(dist: MarginalDistribution, values: np.ndarray) -> float:
    """<x^2> of the labels under the marginal."""
    x = np.asarray(values, dtype=float)
    if x.size != len(dist):
        raise LabelMismatch(f"{x.size} label values for {len(dist)} outcomes")
    return float(np.sum(dist.probabilities * x * x))


@dataclass(frozen=True)
class ContinuityCoefficients:
    """alpha = c1 (sqrt(<x^2>_rho) + sqrt(<x^2>_sigma)) + c2.

    c1 and c2 depend on the choice of observable and are caller-supplied;
    no universal values exist.
    """

    c1: float
    c2: float
    second_moment_rho: float
    second_moment_sigma: float

    def __post_init__(self):
        if not self.c1 > 0:
            raise InvalidDistribution(f"c1 must be positive, got {self.c1!r}")
        if self.c2 < 0 or self.second_moment_rho < 0 or self.second_moment_sigma < 0:
            raise InvalidDistribution("c2 and second moments must be nonnegative")

    @property
    def alpha(self) -> float:
        return self.c1 * (math.sqrt(self.second_moment_rho) + math.sqrt(self.second_moment_sigma)) + self.c2


def fannes_rhs(ell: float, dim: int) -> float:
    """Right side of the Fannes continuity bound: 2 ell ln(d) + 1/e."""
    if dim < 2:
        raise DimMismatch(f"dim must be >= 2, got {dim}")
    if not -1e-12 <= ell <= 1.0 + 1e-12:
        raise InvalidDistribution(f"trace distance {ell!r} outside [0, 1]")
    ell = min(max(ell, 0.0), 1.0)
    return 2.0 * ell * math.log(dim) + 1.0 / math.e


def winter_rhs(ell: float, hamiltonian: np.ndarray, energy: float) -> float:
    """Energy-constrained continuity bound: 2 ell H(rho_eq(E/ell)) + 2 ln 2.

    The second term is taken at its maximal value 2 ln 2. At ell = 0 the
    first term is defined to vanish (its ell -> 0 limit for fixed H).
    """
    if not -1e-12 <= ell <= 1.0 + 1e-12:
        raise InvalidDistribution(f"trace distance {ell!r} outside [0, 1]")
    ell = min(max(ell, 0.0), 1.0)
    if ell == 0.0:
        return TWO_LN2
    ts = gibbs_state(hamiltonian, energy / ell)
    return 2.0 * ell * von_neumann_entropy(ts.state) + TWO_LN2


def winter_rhs_spectrum(ell: float, levels: np.ndarray, energy: float) -> float:
    """winter_rhs evaluated directly on a known spectrum (no dense eigensolve)."""
    from .entropy import gibbs_spectrum_solve

    if not -1e-12 <= ell <= 1.0 + 1e-12:
        raise InvalidDistribution(f"trace distance {ell!r} outside [0, 1]")
    ell = min(max(ell, 0.0), 1.0)
    if ell == 0.0:
        return TWO_LN2
    _, _, pops = gibbs_spectrum_solve(np.asarray(levels, dtype=float), energy / ell)
    pops = pops[pops > 0.0]
    return 2.0 * ell * float(-np.sum(pops * np.log(pops))) + TWO_LN2


def shannon_continuity_rhs(coeffs: ContinuityCoefficients, distance: float, order: int = 1) -> float:
    """alpha * W_p bound on |S_X(rho) - S_X(sigma)|."""
    if order not in (1, 2):
        raise InvalidDistribution(f"order must be 1 or 2, got {order!r}")
    if distance < 0:
        raise InvalidDistribution(f"distance must be nonnegative, got {distance!r}")
    return coeffs.alpha * distance


@dataclass(frozen=True)
class FannesReport:
    lhs: float
    rhs: float
    satisfied: bool


def check_fannes(rho: DensityOperator, sigma: DensityOperator) -> FannesReport:
    """Evaluate |H(rho) - H(sigma)| <= 2 ell ln(d) + 1/e for a state pair."""
    if rho.dim != sigma.dim:
        raise DimMismatch(f"dims {rho.dim} and {sigma.dim} differ")
    lhs = abs(von_neumann_entropy(rho) - von_neumann_entropy(sigma))
    rhs = fannes_rhs(trace_distance(rho, sigma), rho.dim)
    return FannesReport(lhs=lhs, rhs=rhs, satisfied=lhs <= rhs + 1e-12)
