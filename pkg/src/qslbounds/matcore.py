"""Dense complex Hermitian matrix algebra underpinning the rest of the package.

Everything here is plain numpy on small dense matrices (dimensions of
interest are <= ~64). Eigenproblems are delegated to LAPACK through
``numpy.linalg``; the contracts and tolerances below are what the rest of
the package relies on.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidState, NoConvergence, NotHermitian

# Hermiticity tolerance: max entrywise |A - A^dag|.
HERMITICITY_TOL = 1e-10
# Trace-one tolerance for density operators.
TRACE_TOL = 1e-10
# Eigenvalues in [-CLIP_WINDOW, 0] are clipped to 0 and the state
# renormalized; anything more negative is an error, not noise.
CLIP_WINDOW = 1e-12


def hermiticity_defect(a: np.ndarray) -> float:
    """Max entrywise |A - A^dag|."""
    return float(np.max(np.abs(a - a.conj().T)))


def require_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NotHermitian("matrix has non-finite entries")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    return a


def _eigvalsh(a: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix; closed form for 2x2."""
    if a.shape[0] == 2:
        half_tr = 0.5 * (a[0, 0].real + a[1, 1].real)
        det = a[0, 0].real * a[1, 1].real - (a[0, 1] * a[1, 0]).real
        s = np.sqrt(max(half_tr * half_tr - det, 0.0))
        return np.array([half_tr - s, half_tr + s])
    try:
        return np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition A = V diag(w) V^dag with ascending w."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Raises NotHermitian if the input exceeds the Hermiticity tolerance and
    NoConvergence if the LAPACK iteration fails.
    """
    a = require_hermitian(a, tol)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def trace_norm(a: np.ndarray) -> float:
    """||A||_1 = tr|A| = sum of |eigenvalues| for Hermitian A."""
    a = require_hermitian(a)
    return float(np.sum(np.abs(_eigvalsh(a))))


def matrix_abs(a: np.ndarray) -> np.ndarray:
    """|A| = V diag(|w|) V^dag for Hermitian A."""
    dec = eig_hermitian(a)
    v = dec.eigenvectors
    return (v * np.abs(dec.eigenvalues)) @ v.conj().T


class DensityOperator:
    """A validated quantum state: Hermitian, unit trace, positive semidefinite.

    Construction enforces the invariants. Tiny negative eigenvalues in
    [-1e-12, 0], as produced by integration round-off, are clipped to zero
    and the state renormalized; larger negatives raise InvalidState.
    The matrix is stored read-only; instances are safe to share.
    """

    __slots__ = ("matrix", "dim", "_eigenvalues")

    def __init__(self, matrix: np.ndarray):
        a = np.asarray(matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidState(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidState("state has non-finite entries")
        defect = hermiticity_defect(a)
        if defect > HERMITICITY_TOL:
            raise InvalidState(f"Hermiticity defect {defect:.3e} exceeds {HERMITICITY_TOL:.1e}")
        tr = a.trace().real
        if abs(a.trace() - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace {tr!r} not 1 within {TRACE_TOL:.1e}")

        w = _eigvalsh(a)
        wmin = float(w[0])
        if wmin < -CLIP_WINDOW:
            raise InvalidState(f"eigenvalue {wmin:.3e} below clipping window -{CLIP_WINDOW:.1e}")
        if wmin < 0.0:
            # Rare path: re-project onto the PSD cone and renormalize.
            dec = eig_hermitian(a)
            w = np.clip(dec.eigenvalues, 0.0, None)
            w = w / np.sum(w)
            v = dec.eigenvectors
            a = (v * w) @ v.conj().T

        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "dim", a.shape[0])
        object.__setattr__(self, "_eigenvalues", w)

    def __setattr__(self, name, value):
        raise AttributeError("DensityOperator is immutable")

    @property
    def eigenvalues(self) -> np.ndarray:
        """Ascending spectrum (clipped to the PSD cone)."""
        return self._eigenvalues

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim})"


def pure_state(vector: np.ndarray) -> DensityOperator:
    """|psi><psi| for a (not necessarily normalized) state vector."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n == 0:
        raise InvalidState("zero vector")
    v = v / n
    return DensityOperator(np.outer(v, v.conj()))


def maximally_mixed(dim: int) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=complex) / dim)


def random_density_operator(dim: int, seed: int) -> DensityOperator:
    """Ginibre-induced random state G G^dag / tr(G G^dag).

    Sampling uses numpy's default PCG64 generator seeded explicitly, so a
    given (dim, seed) pair always yields the same state.
    """
    if dim < 1:
        raise InvalidState(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho /= rho.trace().real
    rho = 0.5 * (rho + rho.conj().T)
    return DensityOperator(rho)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR decomposition of a Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
