"""Command-line driver: sweep orchestration and machine-readable output.

Subcommands: jc-sweep, rabi-demo, gibbs, bounds. Each accepts
--config <file> (JSON, keys matching SweepConfig fields in snake_case)
overridable by flags. Exit codes: 0 success, 1 config error, 2 runtime
error. Identical config and seed produce byte-identical output at any
worker count; rows are always emitted in grid order.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import dynamics, rates
from .distances import ContinuityCoefficients, second_moment
from .errors import (
    AmplitudeZero,
    ConfigInvalid,
    NonFiniteState,
    QslError,
    StateInvariantViolation,
)
from .matcore import DensityOperator

CSV_COLUMNS = (
    "gamma0",
    "lambda",
    "omega0",
    "tau",
    "ell",
    "lambda_tau",
    "tau_qsl",
    "delta_H_nats",
    "info_rate_exact",
    "bound_micro",
    "bound_micro_with_additive",
    "flags",
)

_NAN = float("nan")


@dataclass(frozen=True)
class SweepConfig:
    lam: float = 1.0
    omega0: float = 1.0
    tau: float = 1.0
    gamma0_min: float = 1e-2
    gamma0_max: float = 1e2
    gamma0_count: int = 60
    dimension_for_bound: int = 2
    steps: int = 20000
    include_additive: bool = True
    seed: int = 0
    hbar: float = 1.0
    k_b: float = 1.0
    method: str = "tcl"

    def validate(self) -> "SweepConfig":
        if not (self.lam > 0 and self.omega0 > 0 and self.tau > 0):
            raise ConfigInvalid("lambda, omega0 and tau must be positive")
        if not (0 < self.gamma0_min < self.gamma0_max):
            raise ConfigInvalid("gamma0 grid needs 0 < min < max")
        if self.gamma0_count < 2:
            raise ConfigInvalid("gamma0 grid needs count >= 2")
        if self.dimension_for_bound < 2:
            raise ConfigInvalid("dimension_for_bound must be >= 2")
        if self.steps < 2:
            raise ConfigInvalid("steps must be >= 2")
        if self.method not in ("tcl", "embedded"):
            raise ConfigInvalid(f"unknown method {self.method!r}")
        if not (self.hbar > 0 and self.k_b > 0):
            raise ConfigInvalid("hbar and k_B must be positive")
        return self

    def gamma0_grid(self) -> np.ndarray:
        return np.geomspace(self.gamma0_min, self.gamma0_max, self.gamma0_count)

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        known = {
            "lambda", "omega0", "tau", "gamma0_grid", "dimension_for_bound",
            "steps", "include_additive", "seed", "constants", "method",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        if "lambda" in raw:
            kwargs["lam"] = float(raw["lambda"])
        for key in ("omega0", "tau"):
            if key in raw:
                kwargs[key] = float(raw[key])
        if "gamma0_grid" in raw:
            grid = raw["gamma0_grid"]
            try:
                kwargs["gamma0_min"] = float(grid["min"])
                kwargs["gamma0_max"] = float(grid["max"])
                kwargs["gamma0_count"] = int(grid["count"])
            except (TypeError, KeyError) as exc:
                raise ConfigInvalid("gamma0_grid needs min, max, count") from exc
        for key, cast in (
            ("dimension_for_bound", int), ("steps", int),
            ("include_additive", bool), ("seed", int), ("method", str),
        ):
            if key in raw:
                kwargs[key] = cast(raw[key])
        if "constants" in raw:
            consts = raw["constants"]
            if "hbar" in consts:
                kwargs["hbar"] = float(consts["hbar"])
            if "k_B" in consts:
                kwargs["k_b"] = float(consts["k_B"])
        return cls(**kwargs).validate()


def _nan_row(cfg: SweepConfig, gamma0: float, flags: tuple) -> rates.BoundReport:
    return rates.BoundReport(
        gamma0=gamma0, lam=cfg.lam, omega0=cfg.omega0, tau=cfg.tau,
        ell=_NAN, lambda_tau=_NAN, tau_qsl=_NAN, delta_h_nats=_NAN,
        info_rate_exact=_NAN, bound_micro=_NAN, bound_micro_with_additive=_NAN,
        flags=flags,
    )


def _sweep_row(cfg: SweepConfig, gamma0: float) -> rates.BoundReport:
    """One sweep point: an independent JC trajectory from the excited state.

    With the TCL method, windows that contain a zero of the amplitude are
    flagged AMPLITUDE_GUARD and reported as NaN: the generator is singular
    there and integrating across the singularity would fabricate numbers.
    """
    params = dynamics.DampedJCParams(omega0=cfg.omega0, gamma0=gamma0, lam=cfg.lam)
    if cfg.method == "tcl":
        t_zero = dynamics.first_amplitude_zero(params)
        if t_zero is not None and t_zero <= cfg.tau:
            return _nan_row(cfg, gamma0, (rates.FLAG_AMPLITUDE_GUARD,))
    try:
        traj = dynamics.jc_trajectory(params, cfg.tau, cfg.steps, method=cfg.method)
    except (AmplitudeZero, StateInvariantViolation, NonFiniteState):
        return _nan_row(cfg, gamma0, (rates.FLAG_AMPLITUDE_GUARD,))

    flags = []
    if traj.converged is False:
        flags.append(rates.FLAG_NONCONVERGED)
    ss = rates.speed_summary(traj)
    flags.extend(sorted(ss.flags))
    additive = cfg.include_additive
    return rates.BoundReport(
        gamma0=gamma0, lam=cfg.lam, omega0=cfg.omega0, tau=cfg.tau,
        ell=ss.ell, lambda_tau=ss.lambda_tau, tau_qsl=ss.tau_qsl,
        delta_h_nats=rates.entropy_change(traj),
        info_rate_exact=rates.info_rate_exact(traj, ss),
        bound_micro=rates.bound_micro(ss, cfg.dimension_for_bound, False, cfg.k_b),
        bound_micro_with_additive=rates.bound_micro(ss, cfg.dimension_for_bound, additive, cfg.k_b),
        flags=tuple(flags),
    )


def run_jc_sweep(cfg: SweepConfig, workers: int = 1) -> list[rates.BoundReport]:
    """One BoundReport per grid point, in grid order regardless of workers."""
    cfg.validate()
    grid = [float(g) for g in cfg.gamma0_grid()]
    if workers <= 1:
        return [_sweep_row(cfg, g) for g in grid]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_row, [cfg] * len(grid), grid))


def run_rabi_demo(omega: float, tau: float, steps: int, c1: float, c2: float) -> dict:
    """Resonantly driven qubit, H = (Omega/2) sigma_x, measured in the z basis."""
    if not (omega > 0 and tau > 0):
        raise ConfigInvalid("omega and tau must be positive")
    if steps < 2:
        raise ConfigInvalid("steps must be >= 2")
    if not (c1 > 0 and c2 >= 0):
        raise ConfigInvalid("need c1 > 0 and c2 >= 0")
    h = 0.5 * omega * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    rho0 = DensityOperator(np.diag([1.0, 0.0]).astype(complex))
    traj = dynamics.evolve(dynamics.unitary_generator(h), rho0, tau, steps)
    basis = np.eye(2, dtype=complex)
    labels = np.array([0.0, 1.0])

    from .entropy import marginal, shannon_information

    ss = rates.speed_summary(traj)
    mss = rates.marginal_speed_summary(traj, basis, basis_id="z")
    p0 = marginal(traj.initial, basis, "z")
    p1 = marginal(traj.final, basis, "z")
    coeffs = ContinuityCoefficients(
        c1=c1, c2=c2,
        second_moment_rho=second_moment(p0, labels),
        second_moment_sigma=second_moment(p1, labels),
    )
    delta_s_x = shannon_information(p1) - shannon_information(p0)
    return {
        "omega": omega,
        "tau": tau,
        "steps": steps,
        "ell": ss.ell,
        "lambda_tau": ss.lambda_tau,
        "tau_qsl": ss.tau_qsl,
        "w1": mss.w1,
        "lambda_x_tau": mss.lambda_x_tau,
        "tau_qsl_x": mss.tau_qsl_x,
        "delta_H_nats": rates.entropy_change(traj),
        "delta_S_x_nats": delta_s_x,
        "alpha": coeffs.alpha,
        "bound_shannon": rates.bound_shannon(mss, coeffs),
        "info_rate_x": (
            0.0 if mss.tau_qsl_x == 0.0 and abs(delta_s_x) < 1e-9
            else abs(delta_s_x) / (mss.tau_qsl_x * rates.LN2)
        ),
        "flags": sorted(ss.flags | mss.flags),
    }


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.15e}"


def _row_to_csv(row: rates.BoundReport) -> str:
    return ",".join(
        [
            _fmt(row.gamma0), _fmt(row.lam), _fmt(row.omega0), _fmt(row.tau),
            _fmt(row.ell), _fmt(row.lambda_tau), _fmt(row.tau_qsl),
            _fmt(row.delta_h_nats), _fmt(row.info_rate_exact),
            _fmt(row.bound_micro), _fmt(row.bound_micro_with_additive),
            "|".join(row.flags),
        ]
    )


def _json_num(x: float):
    return x if math.isfinite(x) else None


def _row_to_dict(row: rates.BoundReport) -> dict:
    return {
        "gamma0": _json_num(row.gamma0),
        "lambda": _json_num(row.lam),
        "omega0": _json_num(row.omega0),
        "tau": _json_num(row.tau),
        "ell": _json_num(row.ell),
        "lambda_tau": _json_num(row.lambda_tau),
        "tau_qsl": _json_num(row.tau_qsl),
        "delta_H_nats": _json_num(row.delta_h_nats),
        "info_rate_exact": _json_num(row.info_rate_exact),
        "bound_micro": _json_num(row.bound_micro),
        "bound_micro_with_additive": _json_num(row.bound_micro_with_additive),
        "flags": "|".join(row.flags),
    }


def emit(rows: list, fmt: str, path: str) -> None:
    """Write sweep rows as CSV (fixed column list) or JSON (same keys)."""
    if not rows:
        raise ConfigInvalid("no rows to emit")
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        lines.extend(_row_to_csv(r) for r in rows)
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        text = json.dumps([_row_to_dict(r) for r in rows], indent=2) + "\n"
    else:
        raise ConfigInvalid(f"unknown format {fmt!r}")
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def parse_rows(path: str) -> list[dict]:
    """Read back a CSV produced by emit (used by tests and plotting)."""
    with open(path, encoding="ascii") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    header = tuple(lines[0].split(","))
    if header != CSV_COLUMNS:
        raise ConfigInvalid(f"unexpected CSV header {header!r}")
    out = []
    for ln in lines[1:]:
        cells = ln.split(",")
        rec = {k: (cells[i] if k == "flags" else float(cells[i])) for i, k in enumerate(CSV_COLUMNS)}
        out.append(rec)
    return out


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigInvalid(message)


def _load_config(path: str | None) -> SweepConfig:
    if path is None:
        return SweepConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    return SweepConfig.from_dict(raw)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qslbounds")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("jc-sweep", help="damped JC sweep over gamma0")
    sweep.add_argument("--config", default=None)
    sweep.add_argument("--lambda", dest="lam", type=float)
    sweep.add_argument("--omega0", type=float)
    sweep.add_argument("--tau", type=float)
    sweep.add_argument("--gamma0-min", type=float)
    sweep.add_argument("--gamma0-max", type=float)
    sweep.add_argument("--gamma0-count", type=int)
    sweep.add_argument("--steps", type=int)
    sweep.add_argument("--dimension", dest="dimension_for_bound", type=int)
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--no-additive", action="store_true")
    sweep.add_argument("--method", choices=("tcl", "embedded"))
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.add_argument("--out", default="-")

    rabi = sub.add_parser("rabi-demo", help="driven-qubit marginal QSL record")
    rabi.add_argument("--config", default=None)
    rabi.add_argument("--omega", type=float, default=1.0)
    rabi.add_argument("--tau", type=float, default=math.pi)
    rabi.add_argument("--steps", type=int, default=None)
    rabi.add_argument("--c1", type=float, default=1.0)
    rabi.add_argument("--c2", type=float, default=0.0)
    rabi.add_argument("--out", default="-")

    gibbs = sub.add_parser("gibbs", help="solve beta for a Hamiltonian and energy")
    gibbs.add_argument("--config", default=None)
    gibbs.add_argument("--energy", type=float, required=True)
    gibbs.add_argument("--diag", help="comma-separated eigenvalues")
    gibbs.add_argument("--oscillator-homega", type=float)
    gibbs.add_argument("--levels", type=int, default=64)
    gibbs.add_argument("--out", default="-")

    bounds = sub.add_parser("bounds", help="evaluate the closed-form rate bounds")
    bounds.add_argument("--config", default=None)
    bounds.add_argument("--bekenstein-energy", type=float)
    bounds.add_argument("--pendry-power", type=float)
    bounds.add_argument("--hbar", type=float, default=None)
    bounds.add_argument("--out", default="-")

    return parser


def _write_json(payload: dict, path: str) -> None:
    text = json.dumps(payload, indent=2, allow_nan=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    overrides = {}
    for field_name in ("lam", "omega0", "tau", "steps", "dimension_for_bound", "seed", "method"):
        value = getattr(args, field_name, None)
        if value is not None:
            overrides[field_name] = value
    if args.gamma0_min is not None:
        overrides["gamma0_min"] = args.gamma0_min
    if args.gamma0_max is not None:
        overrides["gamma0_max"] = args.gamma0_max
    if args.gamma0_count is not None:
        overrides["gamma0_count"] = args.gamma0_count
    if args.no_additive:
        overrides["include_additive"] = False
    cfg = replace(cfg, **overrides).validate()
    rows = run_jc_sweep(cfg, workers=max(1, args.workers))
    emit(rows, args.format, args.out)
    return 0


def _cmd_rabi(args) -> int:
    cfg = _load_config(args.config)
    steps = args.steps if args.steps is not None else cfg.steps
    record = run_rabi_demo(args.omega, args.tau, steps, args.c1, args.c2)
    _write_json(record, args.out)
    return 0


def _cmd_gibbs(args) -> int:
    from .entropy import gibbs_spectrum_solve, oscillator_levels

    _load_config(args.config)  # validated for consistency; gibbs needs no fields

    if args.diag is not None:
        try:
            levels = np.array([float(x) for x in args.diag.split(",")])
        except ValueError as exc:
            raise ConfigInvalid(f"bad --diag value: {exc}") from exc
    elif args.oscillator_homega is not None:
        levels = oscillator_levels(args.oscillator_homega, args.levels)
    else:
        raise ConfigInvalid("need --diag or --oscillator-homega")
    beta, log_z, pops = gibbs_spectrum_solve(levels, args.energy)
    pos = pops[pops > 0]
    entropy_nats = float(-np.sum(pos * np.log(pos)))
    payload = {
        "beta": beta,
        "Z": _json_num(math.exp(log_z)),
        "log_Z": log_z,
        "F": _json_num(-log_z / beta) if beta > 0 else None,
        "E": float(np.sum(levels * pops)),
        "entropy_nats": entropy_nats,
        "entropy_bits": entropy_nats / rates.LN2,
        "n_levels": int(levels.size),
    }
    _write_json(payload, args.out)
    return 0


def _cmd_bounds(args) -> int:
    cfg = _load_config(args.config)
    hbar = args.hbar if args.hbar is not None else cfg.hbar
    payload = {"hbar": hbar}
    if args.bekenstein_energy is not None:
        payload["bekenstein_bits_per_time"] = rates.bekenstein_bound(args.bekenstein_energy, hbar)
    if args.pendry_power is not None:
        payload["pendry_bits_per_time"] = rates.pendry_bound(args.pendry_power, hbar)
    if len(payload) == 1:
        raise ConfigInvalid("need --bekenstein-energy and/or --pendry-power")
    _write_json(payload, args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    handlers = {
        "jc-sweep": _cmd_sweep,
        "rabi-demo": _cmd_rabi,
        "gibbs": _cmd_gibbs,
        "bounds": _cmd_bounds,
    }
    try:
        return handlers[args.command](args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (QslError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
