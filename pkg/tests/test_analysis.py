import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horizon_channels.analysis import (
    SweepGrid,
    SweepRow,
    estimate_plateau,
    evaluate_row,
    fit_exponential_decay,
    select,
    sweep,
)
from horizon_channels.errors import DomainError, InputError
from horizon_channels.quantities import ChannelQuantities
from horizon_channels.unruh import Encoding, Protocol


def synthetic(rs, values, encoding="dual_rail", protocol="quantum"):
    rows = []
    for r, v in zip(rs, values):
        q = ChannelQuantities(0.0, 0.0, -v, v, v, 1.0)
        rows.append(SweepRow(0.0, float(r), 1.0, 0.5, Encoding.parse(encoding), Protocol.parse(protocol), q))
    return rows


@pytest.mark.parametrize("kwargs", [
    dict(start=1.0, stop=1.0),
    dict(start=2.0, stop=1.0),
    dict(points=1),
    dict(axis="acceleration", start=0.0, stop=1.0),
    dict(start=-1.0, stop=1.0),
    dict(encodings=()),
])
def test_grid_validation(kwargs):
    with pytest.raises((InputError, DomainError)):
        SweepGrid(**kwargs)


def test_two_point_grid():
    rows = sweep(SweepGrid(start=0.0, stop=1.0, points=2))
    assert len(rows) == 8
    first = [row for row in rows if row.r == 0.0]
    assert len(first) == 4
    assert all(row.value("capacity_bits") == pytest.approx(1.0, abs=1e-12) for row in first)
    assert all(row.a == 0.0 for row in first)


def test_row_order():
    rows = sweep(SweepGrid(start=0.5, stop=1.0, points=3))
    keys = [(row.r, row.encoding.value, row.protocol.value) for row in rows]
    assert keys == sorted(keys)


def test_acceleration_axis_monotone():
    rows = sweep(SweepGrid("acceleration", 0.1, 20.0, 15, encodings=("single",), protocols=("classical",)))
    rs = [row.r for row in rows]
    assert np.all(np.diff(rs) > 0)
    np.testing.assert_allclose([row.a for row in rows], np.linspace(0.1, 20.0, 15))


def test_sweep_deterministic():
    grid = SweepGrid(start=0.0, stop=3.0, points=7)
    assert sweep(grid) == sweep(grid)


def test_parallel_matches_serial(monkeypatch):
    monkeypatch.setenv("HORIZON_CHANNELS_THREADS", "2")
    grid = SweepGrid(start=0.0, stop=2.0, points=4)
    assert sweep(grid, workers=2) == sweep(grid, workers=1)


def test_failed_row_is_marked():
    row = evaluate_row(0.0, -1.0, 1.0, 0.5, "single", "classical")
    assert not row.ok and row.quantities is None
    assert row.status.startswith("failed: DomainError")
    assert math.isnan(row.value("fidelity"))


def test_fit_exact_exponential():
    rs = np.linspace(3.0, 6.0, 31)
    fit = fit_exponential_decay(synthetic(rs, 3.0 * np.exp(-2.0 * rs)))
    assert fit.gamma == pytest.approx(2.0, abs=1e-9)
    assert fit.log_intercept == pytest.approx(math.log(3.0), abs=1e-9)
    assert fit.rms_residual >= 0.0 and fit.window == (3.0, 6.0)


def test_fit_constant():
    rs = np.linspace(3.0, 6.0, 10)
    assert fit_exponential_decay(synthetic(rs, np.full(10, 0.2))).gamma == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(0.0, 4.0), st.floats(0.5, 4.0))
def test_fit_sub_window(gamma, lo, width):
    rs = np.linspace(0.0, 10.0, 201)
    rows = synthetic(rs, 0.7 * np.exp(-gamma * rs))
    fit = fit_exponential_decay(rows, (lo, lo + width))
    assert fit.gamma == pytest.approx(gamma, abs=1e-6)


def test_fit_errors():
    rs = np.linspace(3.0, 6.0, 10)
    with pytest.raises(DomainError, match="smaller|below"):
        fit_exponential_decay(synthetic(rs, np.linspace(1.0, -1.0, 10)))
    with pytest.raises(InputError):
        fit_exponential_decay(synthetic(rs[:4], np.ones(4)))
    with pytest.raises(InputError):
        fit_exponential_decay(synthetic(rs, np.ones(10)), (6.0, 3.0))
    mixed = synthetic(rs, np.ones(10)) + synthetic(rs, np.ones(10), "single_rail")
    with pytest.raises(InputError):
        fit_exponential_decay(mixed)


def test_dual_quantum_decay():
    rows = sweep(SweepGrid(start=3.0, stop=6.0, points=31, encodings=("dual",), protocols=("quantum",)))
    assert fit_exponential_decay(rows).gamma == pytest.approx(2.0, abs=0.2)


def test_single_rail_rate_is_reported():
    rows = sweep(SweepGrid(start=3.0, stop=6.0, points=31, encodings=("single",), protocols=("quantum",)))
    fit = fit_exponential_decay(rows)
    assert math.isfinite(fit.gamma) and fit.gamma > 0


def test_plateau():
    rows = sweep(SweepGrid(start=0.0, stop=8.0, points=17, protocols=("classical",)))
    for enc in Encoding:
        est = estimate_plateau(select(rows, enc, "classical"))
        assert est.converged and est.r_max == 8.0 and est.reference_r == 6.0
        assert est.value > 0.05
    fid = estimate_plateau(select(rows, "single", "classical"), "fidelity")
    assert fid.value == pytest.approx(math.pi / 4, abs=1e-3)


def test_plateau_quantum_vanishes():
    rows = sweep(SweepGrid(start=6.0, stop=8.0, points=3, protocols=("quantum",)))
    for enc in Encoding:
        assert abs(estimate_plateau(select(rows, enc, "quantum"), "coherent_info_bits").value) < 1e-4


def test_plateau_unconverged_is_flagged():
    rs = np.linspace(0.0, 7.0, 15)
    est = estimate_plateau(synthetic(rs, 1.0 - rs / 7.0))
    assert not est.converged


def test_plateau_needs_large_r():
    with pytest.raises(InputError):
        estimate_plateau(synthetic([1.0, 2.0], [0.5, 0.4]))
