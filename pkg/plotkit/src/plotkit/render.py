"""Render figures from qslbounds sweep CSV output.

The CSV schema is the interface contract with the producer: the header
must match ``SWEEP_COLUMNS`` exactly, and referenced columns are validated
before anything is drawn. Rendering is read-only and deterministic: the
same CSV yields byte-identical SVG (fixed style, fixed hash salt, no
timestamps).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import json
import math

import matplotlib.pyplot as plt
import numpy as np

SWEEP_COLUMNS = (
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

RABI_KEYS = ("tau", "tau_qsl", "tau_qsl_x", "delta_S_x_nats", "info_rate_x", "bound_shannon")

SVG_HASH_SALT = "plotkit"


class SchemaMismatch(Exception):
    """Input file does not match the producer's schema."""


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: columns from a sweep CSV onto one figure."""

    input_path: str
    output_path: str
    x_column: str = "gamma0"
    y_columns: tuple = ("info_rate_exact", "bound_micro_with_additive")
    log_x: bool = True
    labels: tuple = ("exact rate", "upper bound")
    x_scale_column: str | None = "omega0"
    title: str = "Information rate vs coupling"
    xlabel: str = "gamma0 / omega0"
    ylabel: str = "bits per unit time"

    def validate(self) -> "PlotSpec":
        referenced = (self.x_column, *self.y_columns)
        missing = [c for c in referenced if c not in SWEEP_COLUMNS]
        if self.x_scale_column is not None and self.x_scale_column not in SWEEP_COLUMNS:
            missing.append(self.x_scale_column)
        if missing:
            raise SchemaMismatch(f"columns not in the sweep schema: {missing}")
        if len(self.labels) != len(self.y_columns):
            raise SchemaMismatch("one label per y column required")
        return self


def read_sweep_csv(path: str) -> dict:
    """Parse a sweep CSV into column arrays, strictly validating the header."""
    with open(path, encoding="ascii") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise SchemaMismatch(f"{path}: empty file")
    header = tuple(lines[0].split(","))
    if header != SWEEP_COLUMNS:
        raise SchemaMismatch(f"{path}: header {header!r} does not match the sweep schema")
    if len(lines) == 1:
        raise SchemaMismatch(f"{path}: no data rows")
    columns: dict = {name: [] for name in SWEEP_COLUMNS}
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(SWEEP_COLUMNS):
            raise SchemaMismatch(f"{path}: row with {len(cells)} cells")
        for name, cell in zip(SWEEP_COLUMNS, cells):
            columns[name].append(cell if name == "flags" else float(cell))
    out = {name: (vals if name == "flags" else np.asarray(vals)) for name, vals in columns.items()}
    return out


def _finish(fig, output_path: str) -> None:
    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    fig.savefig(output_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render(spec: PlotSpec) -> str:
    """Draw the sweep figure described by a PlotSpec; returns the output path.

    Unflagged rows become curves; flagged rows (excluded sweep points) are
    marked separately along the bottom of the axes so exclusions stay
    visible.
    """
    spec.validate()
    data = read_sweep_csv(spec.input_path)
    x = data[spec.x_column].copy()
    if spec.x_scale_column is not None:
        x = x / data[spec.x_scale_column]
    flagged = np.array([bool(f) for f in data["flags"]])

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    styles = ("--", "-", ":", "-.")
    for k, (col, label) in enumerate(zip(spec.y_columns, spec.labels)):
        y = data[col]
        keep = ~flagged & np.isfinite(y)
        ax.plot(x[keep], y[keep], styles[k % len(styles)], color=f"C{k}", label=label)
    if flagged.any():
        ax.plot(
            x[flagged],
            np.zeros(int(flagged.sum())),
            linestyle="none",
            marker="x",
            color="0.45",
            label="flagged (excluded)",
        )
    if spec.log_x:
        ax.set_xscale("log")
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.set_title(spec.title)
    ax.legend(frameon=False)
    fig.tight_layout()
    _finish(fig, spec.output_path)
    return spec.output_path


def read_rabi_record(path: str) -> dict:
    with open(path, encoding="ascii") as fh:
        try:
            record = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: not valid JSON: {exc}") from exc
    missing = [k for k in RABI_KEYS if k not in record]
    if missing:
        raise SchemaMismatch(f"{path}: missing keys {missing}")
    return record


def render_rabi_report(input_path: str, output_path: str) -> str:
    """Bar report of the driven-qubit record: speed-limit times and the
    marginal-information rate against its bound."""
    record = read_rabi_record(input_path)
    names = ["tau", "tau_qsl", "tau_qsl_x", "|dS_x|", "rate_x", "bound"]
    values = [
        record["tau"],
        record["tau_qsl"],
        record["tau_qsl_x"],
        abs(record["delta_S_x_nats"]),
        record["info_rate_x"],
        record["bound_shannon"],
    ]
    if any(not math.isfinite(v) for v in values):
        raise SchemaMismatch(f"{input_path}: non-finite record values")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    bars = ax.bar(names, values, color=["C0", "C0", "C0", "C1", "C1", "C2"])
    for bar, v in zip(bars, values):
        ax.annotate(f"{v:.4g}", (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                    ha="center", va="bottom", fontsize=8)
    ax.set_ylabel("time / nats / bits per time")
    ax.set_title("Driven-qubit speed limits and marginal-information bound")
    fig.tight_layout()
    _finish(fig, output_path)
    return output_path
