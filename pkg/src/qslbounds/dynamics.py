"""Time evolution: generic master-equation integration and the damped
Jaynes-Cummings model (qubit in a leaky cavity, Lorentzian spectral density).

The JC model is exactly solvable through its amplitude c(t), which obeys

    c'' + lam c' + (gamma0 lam / 2) c = 0,   c(0) = 1, c'(0) = 0,

obtained by differentiating the Lorentzian memory integral (the kernel
exponent is read as i (omega - omega0)(t - s); a frequency x time argument
is the only dimensionally consistent reading). The closed resonant solution

    c(t) = e^{-lam t/2} [cosh(D t/2) + (lam/D) sinh(D t/2)],
    D = sqrt(lam^2 - 2 gamma0 lam),

turns trigonometric for gamma0 > lam/2 (D imaginary). The time-dependent
rates are lam_t = -2 Im(c'/c) and gamma_t = -2 Re(c'/c); gamma_t diverges
wherever c(t) crosses zero, so the time-convolutionless (TCL) generator is
genuinely singular there and no fixed-step one-step method can integrate
across such a crossing (the state touches the boundary of the PSD cone
exactly where the coefficient blows up). For trajectories that must span
amplitude zeros, ``jc_embedded_generator`` provides the exact Markovian
dilation of the same model: one damped cavity mode (decay 2*lam, coupling
sqrt(gamma0 lam / 2)) with constant coefficients, restricted to the
single-excitation sector; partial-tracing its trajectory reproduces the
reduced qubit dynamics identically.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    AmplitudeZero,
    InvalidState,
    NonFiniteState,
    StateInvariantViolation,
)
from .matcore import (
    CLIP_WINDOW,
    DensityOperator,
    _eigvalsh,
    require_hermitian,
)

# |c(t)| below this radius: rates are excluded rather than evaluated.
AMPLITUDE_GUARD = 1e-14
# Half-step comparison threshold for the convergence flag.
CONVERGENCE_TOL = 1e-6

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|
EXCITED_PROJECTOR = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def ground_state() -> DensityOperator:
    return DensityOperator(np.diag([1.0, 0.0]).astype(complex))


def excited_state() -> DensityOperator:
    return DensityOperator(np.diag([0.0, 1.0]).astype(complex))


@dataclass(frozen=True)
class Generator:
    """Right-hand side of a master equation rho' = L(t, rho).

    ``rhs`` maps (t, rho_matrix) to a Hermitian, traceless matrix. ``kind``
    records whether the flow is unitary or dissipative.
    """

    rhs: Callable[[float, np.ndarray], np.ndarray]
    kind: str
    dim: int


@dataclass(frozen=True)
class Trajectory:
    """States and generator outputs on a uniform grid over [0, tau].

    ``halfstep_discrepancy`` is the maximum trace distance against a rerun
    at half the step size (on the shared grid points); ``converged`` is
    that discrepancy checked against the requested tolerance.
    """

    times: np.ndarray
    states: tuple
    rates: tuple
    tau: float
    halfstep_discrepancy: float | None = None
    converged: bool | None = None

    def __len__(self) -> int:
        return len(self.times)

    @property
    def initial(self) -> DensityOperator:
        return self.states[0]

    @property
    def final(self) -> DensityOperator:
        return self.states[-1]


def _project(a: np.ndarray, where: str) -> tuple[np.ndarray, np.ndarray]:
    """Re-project an integrated state onto the PSD cone via the clipping rule."""
    if not np.all(np.isfinite(a)):
        raise NonFiniteState(f"non-finite state {where}")
    w = _eigvalsh(0.5 * (a + a.conj().T))
    wmin = float(w[0])
    if wmin < -CLIP_WINDOW:
        raise StateInvariantViolation(
            f"eigenvalue {wmin:.3e} below the clipping window -{CLIP_WINDOW:.1e} {where}"
        )
    if wmin < 0.0:
        wc, v = np.linalg.eigh(0.5 * (a + a.conj().T))
        wc = np.clip(wc, 0.0, None)
        wc /= np.sum(wc)
        a = (v * wc) @ v.conj().T
        w = wc
    return a, w


def _wrap_state(a: np.ndarray, w: np.ndarray) -> DensityOperator:
    # States coming out of _project already satisfy the invariants; skip
    # the duplicate validation pass of the public constructor.
    rho = object.__new__(DensityOperator)
    a = a.copy()
    a.setflags(write=False)
    object.__setattr__(rho, "matrix", a)
    object.__setattr__(rho, "dim", a.shape[0])
    object.__setattr__(rho, "_eigenvalues", np.sort(w))
    return rho


def _rk4_run(rhs, rho0: np.ndarray, tau: float, steps: int):
    """Fixed-step classical RK4; returns per-step projected matrices and spectra."""
    h = tau / steps
    mats = [rho0]
    eigs = [_project(rho0, "at t=0")[1]]
    rates = []
    rho = rho0
    for k in range(steps):
        t = k * h
        k1 = rhs(t, rho)
        rates.append(k1)
        k2 = rhs(t + 0.5 * h, rho + (0.5 * h) * k1)
        k3 = rhs(t + 0.5 * h, rho + (0.5 * h) * k2)
        k4 = rhs(t + h, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho, w = _project(rho, f"at t={t + h:.6g}")
        mats.append(rho)
        eigs.append(w)
    rates.append(rhs(tau, rho))
    return mats, eigs, rates


def evolve(
    gen: Generator,
    rho0: DensityOperator,
    tau: float,
    steps: int,
    check_convergence: bool = True,
    convergence_tol: float = CONVERGENCE_TOL,
) -> Trajectory:
    """Propagate rho' = L(t, rho) with fixed-step classical RK4.

    Every stored state is re-projected to the PSD cone via the eigenvalue
    clipping rule; leaving the clipping window raises
    StateInvariantViolation. When ``check_convergence`` is set, the run is
    compared against a rerun at half the step size and the maximum trace
    distance on shared grid points is recorded on the trajectory.
    """
    if steps < 2:
        raise InvalidState(f"steps must be >= 2, got {steps}")
    if not tau > 0:
        raise InvalidState(f"tau must be positive, got {tau!r}")
    if rho0.dim != gen.dim:
        raise InvalidState(f"state dim {rho0.dim} does not match generator dim {gen.dim}")

    mats, eigs, rates = _rk4_run(gen.rhs, np.asarray(rho0.matrix), tau, steps)

    discrepancy = None
    converged = None
    if check_convergence:
        fine_mats, _, _ = _rk4_run(gen.rhs, np.asarray(rho0.matrix), tau, 2 * steps)
        discrepancy = 0.0
        for k in range(steps + 1):
            diff = mats[k] - fine_mats[2 * k]
            dist = 0.5 * float(np.sum(np.abs(_eigvalsh(0.5 * (diff + diff.conj().T)))))
            if dist > discrepancy:
                discrepancy = dist
        converged = discrepancy <= convergence_tol

    times = np.linspace(0.0, tau, steps + 1)
    states = tuple(_wrap_state(m, w) for m, w in zip(mats, eigs))
    return Trajectory(
        times=times,
        states=states,
        rates=tuple(rates),
        tau=tau,
        halfstep_discrepancy=discrepancy,
        converged=converged,
    )


def unitary_generator(hamiltonian, hbar: float = 1.0) -> Generator:
    """von Neumann flow rho' = -(i/hbar)[H, rho]; H constant or callable t -> H."""
    if callable(hamiltonian):
        h_of_t = hamiltonian
        require_hermitian(np.asarray(h_of_t(0.0)))
        dim = np.asarray(h_of_t(0.0)).shape[0]

        def rhs(t, rho):
            h = np.asarray(h_of_t(t))
            return (-1j / hbar) * (h @ rho - rho @ h)

    else:
        h = require_hermitian(hamiltonian)
        dim = h.shape[0]

        def rhs(t, rho):
            return (-1j / hbar) * (h @ rho - rho @ h)

    return Generator(rhs=rhs, kind="unitary", dim=dim)


# --------------------------------------------------------------------------
# Damped Jaynes-Cummings model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DampedJCParams:
    """Qubit frequency omega0, coupling gamma0, Lorentzian width lam."""

    omega0: float
    gamma0: float
    lam: float

    def __post_init__(self):
        for name in ("omega0", "gamma0", "lam"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidState(f"{name} must be positive and finite, got {v!r}")

    @property
    def d_param(self) -> complex:
        """sqrt(lam^2 - 2 gamma0 lam); imaginary in the oscillatory regime."""
        return cmath.sqrt(complex(self.lam * self.lam - 2.0 * self.gamma0 * self.lam))


@dataclass(frozen=True)
class AmplitudeSolution:
    """Amplitude c(t) and its derivative; c(0) = 1, |c(t)| <= 1 for t >= 0."""

    c: Callable
    cdot: Callable


def jc_analytic_amplitude(params: DampedJCParams) -> AmplitudeSolution:
    """Closed-form resonant amplitude; the d -> 0 removable singularity is
    handled by its series limit c = e^{-lam t/2}(1 + lam t/2)."""
    lam = params.lam
    g0 = params.gamma0
    d = params.d_param

    if abs(d) < 1e-12 * lam:

        def c(t):
            t = np.asarray(t, dtype=float)
            out = np.exp(-lam * t / 2.0) * (1.0 + lam * t / 2.0) + 0j
            return out[()] if out.ndim == 0 else out

        def cdot(t):
            t = np.asarray(t, dtype=float)
            out = np.exp(-lam * t / 2.0) * (-(lam ** 2) * t / 4.0) + 0j
            return out[()] if out.ndim == 0 else out

    else:

        def c(t):
            t = np.asarray(t, dtype=float)
            arg = d * t / 2.0
            out = np.exp(-lam * t / 2.0) * (np.cosh(arg) + (lam / d) * np.sinh(arg))
            return out[()] if out.ndim == 0 else out

        def cdot(t):
            t = np.asarray(t, dtype=float)
            out = -np.exp(-lam * t / 2.0) * (g0 * lam / d) * np.sinh(d * t / 2.0)
            return out[()] if out.ndim == 0 else out

    return AmplitudeSolution(c=c, cdot=cdot)


def jc_decay_rate_closed_form(params: DampedJCParams) -> Callable:
    """gamma_t = 2 gamma0 lam sinh(Dt/2) / (D cosh(Dt/2) + lam sinh(Dt/2))."""
    lam = params.lam
    g0 = params.gamma0
    d = params.d_param

    def gamma(t):
        if abs(d) < 1e-12 * lam:
            return g0 * lam * t / (1.0 + lam * t / 2.0)
        ch = cmath.cosh(d * t / 2.0)
        sh = cmath.sinh(d * t / 2.0)
        den = d * ch + lam * sh
        if abs(den) < AMPLITUDE_GUARD:
            raise AmplitudeZero(f"decay-rate denominator vanishes at t = {t!r}")
        return (2.0 * g0 * lam * sh / den).real

    return gamma


def jc_numerical_amplitude(params: DampedJCParams, tau: float, steps: int) -> AmplitudeSolution:
    """Independent amplitude oracle: RK4 on c'' + lam c' + (gamma0 lam/2) c = 0.

    Tabulated on the uniform grid; evaluation between grid points is
    linear interpolation.
    """
    if steps < 10:
        raise InvalidState(f"steps must be >= 10, got {steps}")
    lam = params.lam
    k_spring = params.gamma0 * params.lam / 2.0
    h = tau / steps
    n = steps + 1
    cs = np.empty(n, dtype=complex)
    vs = np.empty(n, dtype=complex)
    c, v = 1.0 + 0j, 0.0 + 0j
    cs[0], vs[0] = c, v

    def acc(ci, vi):
        return -lam * vi - k_spring * ci

    for k in range(steps):
        k1c, k1v = v, acc(c, v)
        k2c, k2v = v + 0.5 * h * k1v, acc(c + 0.5 * h * k1c, v + 0.5 * h * k1v)
        k3c, k3v = v + 0.5 * h * k2v, acc(c + 0.5 * h * k2c, v + 0.5 * h * k2v)
        k4c, k4v = v + h * k3v, acc(c + h * k3c, v + h * k3v)
        c = c + (h / 6.0) * (k1c + 2 * k2c + 2 * k3c + k4c)
        v = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (np.isfinite(c) and np.isfinite(v)):
            raise NonFiniteState(f"amplitude integration diverged at step {k}")
        cs[k + 1], vs[k + 1] = c, v

    times = np.linspace(0.0, tau, n)

    def c_of_t(t):
        return np.interp(np.asarray(t, dtype=float), times, cs.real) + 1j * np.interp(
            np.asarray(t, dtype=float), times, cs.imag
        )

    def cdot_of_t(t):
        return np.interp(np.asarray(t, dtype=float), times, vs.real) + 1j * np.interp(
            np.asarray(t, dtype=float), times, vs.imag
        )

    return AmplitudeSolution(c=c_of_t, cdot=cdot_of_t)


def jc_rates(amp: AmplitudeSolution) -> tuple[Callable, Callable]:
    """(gamma_t, lam_t) = (-2 Re(c'/c), -2 Im(c'/c)), guarded near c = 0."""

    def ratio(t):
        c = complex(amp.c(t))
        if abs(c) < AMPLITUDE_GUARD:
            raise AmplitudeZero(f"|c({t!r})| = {abs(c):.3e} inside the guard radius")
        return complex(amp.cdot(t)) / c

    def gamma(t):
        return -2.0 * ratio(t).real

    def lam_shift(t):
        return -2.0 * ratio(t).imag

    return gamma, lam_shift


def first_amplitude_zero(params: DampedJCParams) -> float | None:
    """First positive zero of c(t), or None in the monotone regime.

    For gamma0 <= lam/2 the amplitude never vanishes. Otherwise the zeros
    sit where tan(|D| t / 2) = -|D|/lam.
    """
    if params.gamma0 <= params.lam / 2.0:
        return None
    dabs = abs(params.d_param)
    return 2.0 * (math.pi - math.atan2(dabs, params.lam)) / dabs


def jc_generator(params: DampedJCParams, hbar: float = 1.0) -> Generator:
    """Time-convolutionless generator of the damped JC master equation.

    Three terms: the qubit Hamiltonian hbar*omega0*P_e, the Lamb-shift
    commutator (lam_t / 2)[P_e, .], and the gamma_t dissipator on
    sigma_minus. Identically zero (hence stationary) on the ground state.
    Evaluation raises AmplitudeZero within the guard radius of a zero of
    c(t) -- the generator is singular there.
    """
    omega0 = params.omega0
    lam = params.lam
    g0 = params.gamma0
    d = params.d_param
    critical = abs(d) < 1e-12 * lam

    def rhs(t, rho):
        # Scalar closed-form ratio c'(t)/c(t); this is the hot path of the
        # sweep, so it avoids the array-based amplitude closures.
        if critical:
            u = 1.0 + lam * t / 2.0
            ratio = complex(-(lam * lam) * t / (4.0 * u))
        else:
            sh = cmath.sinh(d * t / 2.0)
            u = cmath.cosh(d * t / 2.0) + (lam / d) * sh
            if abs(u) * math.exp(-lam * t / 2.0) < AMPLITUDE_GUARD:
                raise AmplitudeZero(f"|c({t!r})| inside the guard radius")
            ratio = -(g0 * lam / d) * sh / u
        g = -2.0 * ratio.real
        w = omega0 - ratio.imag  # omega0 + lam_t / 2
        out = np.empty((2, 2), dtype=complex)
        ree = rho[1, 1]
        out[0, 0] = g * ree
        out[1, 1] = -g * ree
        out[0, 1] = (1j * w - 0.5 * g) * rho[0, 1]
        out[1, 0] = (-1j * w - 0.5 * g) * rho[1, 0]
        return out

    return Generator(rhs=rhs, kind="dissipative", dim=2)


def jc_embedded_generator(params: DampedJCParams) -> Generator:
    """Exact Markovian dilation of the damped JC model (single excitation).

    Basis: |g,0>, |e,0>, |g,1>. The cavity pseudo-mode sits at the qubit
    frequency with decay rate 2*lam and coupling sqrt(gamma0 lam / 2);
    eliminating it reproduces the Lorentzian memory kernel exactly, so the
    partial trace of this constant-coefficient Lindblad flow equals the
    reduced qubit dynamics, with no singular coefficients anywhere.
    """
    om = params.omega0
    coupling = math.sqrt(params.gamma0 * params.lam / 2.0)
    kappa = 2.0 * params.lam
    h = np.array(
        [[0.0, 0.0, 0.0], [0.0, om, coupling], [0.0, coupling, om]], dtype=complex
    )
    jump = np.zeros((3, 3), dtype=complex)
    jump[0, 2] = math.sqrt(kappa)
    jd = jump.conj().T
    jdj = jd @ jump

    def rhs(t, rho):
        out = -1j * (h @ rho - rho @ h)
        out += jump @ rho @ jd - 0.5 * (jdj @ rho + rho @ jdj)
        return out

    return Generator(rhs=rhs, kind="dissipative", dim=3)


def embed_qubit_state(rho: DensityOperator) -> DensityOperator:
    """Qubit state with the cavity mode in vacuum, in the |g,0>,|e,0>,|g,1> basis."""
    if rho.dim != 2:
        raise InvalidState(f"expected a qubit state, got dim {rho.dim}")
    ext = np.zeros((3, 3), dtype=complex)
    ext[0, 0] = rho.matrix[0, 0]
    ext[0, 1] = rho.matrix[0, 1]
    ext[1, 0] = rho.matrix[1, 0]
    ext[1, 1] = rho.matrix[1, 1]
    return DensityOperator(ext)


def _reduce_matrix(a: np.ndarray) -> np.ndarray:
    out = np.empty((2, 2), dtype=complex)
    out[0, 0] = a[0, 0] + a[2, 2]
    out[0, 1] = a[0, 1]
    out[1, 0] = a[1, 0]
    out[1, 1] = a[1, 1]
    return out


def reduce_embedded_trajectory(traj: Trajectory) -> Trajectory:
    """Partial-trace an embedded trajectory back onto the qubit.

    Both the states and the generator outputs reduce linearly, so the
    reduced rates are exactly the time derivatives of the reduced states.
    """
    if traj.states[0].dim != 3:
        raise InvalidState("expected a single-excitation embedded trajectory")
    states = tuple(DensityOperator(_reduce_matrix(s.matrix)) for s in traj.states)
    rates = tuple(_reduce_matrix(r) for r in traj.rates)
    return Trajectory(
        times=traj.times,
        states=states,
        rates=rates,
        tau=traj.tau,
        halfstep_discrepancy=traj.halfstep_discrepancy,
        converged=traj.converged,
    )


def jc_trajectory(
    params: DampedJCParams,
    tau: float,
    steps: int,
    rho0: DensityOperator | None = None,
    method: str = "tcl",
    check_convergence: bool = True,
) -> Trajectory:
    """Reduced qubit trajectory of the damped JC model.

    method="tcl" integrates the time-convolutionless master equation
    directly and fails (AmplitudeZero / StateInvariantViolation) if the
    window contains a zero of c(t). method="embedded" integrates the exact
    Markovian dilation and partial-traces, which is regular for every
    parameter choice.
    """
    if rho0 is None:
        rho0 = excited_state()
    if method == "tcl":
        return evolve(jc_generator(params), rho0, tau, steps, check_convergence)
    if method == "embedded":
        ext = evolve(jc_embedded_generator(params), embed_qubit_state(rho0), tau, steps, check_convergence)
        return reduce_embedded_trajectory(ext)
    raise InvalidState(f"unknown method {method!r}")
