"""Experiment harness: feeder files, sweep protocol, calibration, charts, CLI."""

from gridquant.experiments.feeders import FeederFileError, load_feeder, save_feeder, synthetic_feeder
from gridquant.experiments.sweep import (
    BoundCurve,
    OverlayReport,
    SweepConfig,
    SweepRecord,
    bound_coverage,
    calibrate_and_overlay,
    generate_voltage_data,
    read_records,
    run_sweep,
)
from gridquant.experiments.chart import emit_chart

__all__ = [
    "FeederFileError",
    "load_feeder",
    "save_feeder",
    "synthetic_feeder",
    "BoundCurve",
    "OverlayReport",
    "SweepConfig",
    "SweepRecord",
    "bound_coverage",
    "calibrate_and_overlay",
    "generate_voltage_data",
    "read_records",
    "run_sweep",
    "emit_chart",
]
