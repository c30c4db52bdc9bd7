"""Figure rendering for qslbounds sweep output."""

from .render import (
    RABI_KEYS,
    SWEEP_COLUMNS,
    PlotSpec,
    SchemaMismatch,
    read_rabi_record,
    read_sweep_csv,
    render,
    render_rabi_report,
)

__version__ = "0.1.0"
