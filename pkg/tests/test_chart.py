import xml.etree.ElementTree as ET

import pytest

from gridquant.experiments.chart import emit_chart
from gridquant.experiments.sweep import (
    OverlayReport,
    SweepConfig,
    calibrate_and_overlay,
    run_sweep,
)


@pytest.fixture(scope="module")
def sweep_results():
    config = SweepConfig(
        synthetic_n=6,
        synthetic_seed=2,
        s_grid=(20, 60),
        delta_pcts=(0.05, 0.10),
        trials=2,
        master_seed=99,
    )
    records = run_sweep(config)
    return records, calibrate_and_overlay(records)


def test_writes_well_formed_svg(tmp_path, sweep_results):
    records, report = sweep_results
    out = emit_chart(records, report, tmp_path / "chart.svg")
    assert out == tmp_path / "chart.svg"
    root = ET.parse(out).getroot()
    assert root.tag.endswith("svg")


def test_text_content_present(tmp_path, sweep_results):
    records, report = sweep_results
    text = emit_chart(records, report, tmp_path / "chart.svg").read_text()
    assert "samples per node" in text
    assert f"C = {report.constant:.2f}" in text
    # one legend entry per bin width
    assert text.count("of mean |p|") >= len(report.curves)


def test_empty_records_rejected_before_write(tmp_path, sweep_results):
    _, report = sweep_results
    target = tmp_path / "chart.svg"
    with pytest.raises(ValueError):
        emit_chart([], report, target)
    assert not target.exists()


def test_all_nan_records_rejected(tmp_path, sweep_results):
    records, report = sweep_results
    import dataclasses

    broken = [dataclasses.replace(r, rel_err=float("nan")) for r in records]
    with pytest.raises(ValueError):
        emit_chart(broken, report, tmp_path / "chart.svg")
    assert not (tmp_path / "chart.svg").exists()


def test_report_without_curves_rejected(tmp_path, sweep_results):
    records, report = sweep_results
    empty = OverlayReport(
        constant=report.constant,
        w_star_norm=report.w_star_norm,
        curves=(),
        coverage=1.0,
    )
    with pytest.raises(ValueError):
        emit_chart(records, empty, tmp_path / "chart.svg")
    assert not (tmp_path / "chart.svg").exists()


def test_overwrites_existing_file(tmp_path, sweep_results):
    records, report = sweep_results
    target = tmp_path / "chart.svg"
    target.write_text("placeholder")
    emit_chart(records, report, target)
    assert target.read_text() != "placeholder"
