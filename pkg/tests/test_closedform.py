import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horizon_channels.closedform import (
    SeriesConfig,
    arithmetic_xlogx_sum,
    ce_quantum_dual,
    ce_quantum_single,
    classical_capacity,
    coherent_information,
    derived_quantities,
    fidelity_series,
    mi_classical_dual,
    mi_classical_single,
)
from horizon_channels.errors import InputError
from horizon_channels.fockcore import binary_entropy
from horizon_channels.quantities import QUANTITY_FIELDS
from horizon_channels.unruh import Encoding, Preparation, Protocol

CHANNELS = [(e, p) for e in Encoding for p in Protocol]
DIRECT = SeriesConfig(max_terms=5 * 10**6, accelerate_after=None)


def mp_fidelity(r):
    """Single-rail fidelity from the polylogarithm, at 40 digits."""
    with mpmath.workdps(40):
        r = mpmath.mpf(r)
        t = mpmath.tanh(r)
        T = t * t
        # sum_{m>=0} T^m sqrt(m+1) = Li_{-1/2}(T) / T
        s = mpmath.polylog(-0.5, T) / T
        return float((t / mpmath.cosh(r) ** 3 * s) ** 2)


@pytest.mark.parametrize("r", [0.05, 0.5, 1.0, 3.0, 6.0, 8.0, 10.0])
def test_fidelity_against_polylog(r):
    assert fidelity_series(r) == pytest.approx(mp_fidelity(r), rel=1e-12)
    assert fidelity_series(r, "dual") == pytest.approx(mp_fidelity(r) ** 2, rel=1e-12)


def test_fidelity_large_r_limit():
    assert fidelity_series(8.0) == pytest.approx(math.pi / 4, abs=1e-3)
    assert fidelity_series(8.0, "dual") == pytest.approx((math.pi / 4) ** 2, abs=2e-3)


def test_fidelity_zero_and_bounded():
    assert fidelity_series(0.0) == 0.0
    rs = np.linspace(0.0, 12.0, 121)
    vals = [fidelity_series(r) for r in rs]
    assert max(vals) < 1.0
    assert np.all(np.diff(vals) >= 0)


@pytest.mark.parametrize("func", [mi_classical_single, ce_quantum_single])
@pytest.mark.parametrize("r", [5.0, 6.0])
def test_single_rail_direct_vs_accelerated(func, r):
    assert func(0.5, r) == pytest.approx(func(0.5, r, DIRECT), abs=1e-12)


@pytest.mark.parametrize("func", [mi_classical_dual, ce_quantum_dual])
@pytest.mark.parametrize("r", [5.0, 6.0])
def test_dual_rail_direct_vs_accelerated(func, r):
    assert func(r) == pytest.approx(func(r, config=DIRECT), abs=1e-12)


@pytest.mark.parametrize("quantum", [False, True])
def test_general_dual_direct_vs_accelerated(quantum):
    func = ce_quantum_dual if quantum else mi_classical_dual
    assert func(5.0, 0.3) == pytest.approx(func(5.0, 0.3, DIRECT), abs=1e-11)


@pytest.mark.parametrize("encoding, protocol", CHANNELS)
def test_zero_squeezing_limits(encoding, protocol):
    q = derived_quantities(Preparation(0.5), encoding, protocol, 0.0)
    assert q.capacity_bits == pytest.approx(1.0, abs=1e-12)
    assert q.fidelity == 0.0
    expected_ce = -1.0 if protocol is Protocol.QUANTUM else 0.0
    assert q.conditional_entropy_bits == pytest.approx(expected_ce, abs=1e-12)


@pytest.mark.parametrize("r", [1e-9, 1e-6, 1e-3])
def test_small_r_continuity(r):
    assert mi_classical_single(0.5, r) == pytest.approx(1.0, abs=1e-4)
    assert ce_quantum_dual(r) == pytest.approx(-1.0, abs=1e-4)


@pytest.mark.parametrize("r", [0.0, 0.7, 4.0])
def test_constant_source(r):
    for a in (0.0, 1.0):
        assert mi_classical_single(a, r) == 0.0
        assert mi_classical_dual(r, a) == 0.0
        assert ce_quantum_single(a, r) == 0.0
        assert ce_quantum_dual(r, a) == 0.0


def test_alpha_domain():
    with pytest.raises(InputError):
        mi_classical_single(1.2, 1.0)


def test_general_dual_continuous_at_half():
    for f in (mi_classical_dual, ce_quantum_dual):
        assert f(1.3, 0.5 + 1e-9) == pytest.approx(f(1.3, 0.5), abs=1e-7)


def test_dual_rail_symmetric_in_alpha():
    for f in (mi_classical_dual, ce_quantum_dual):
        assert f(0.9, 0.2) == pytest.approx(f(0.9, 0.8), abs=1e-12)


@pytest.mark.parametrize("r", np.linspace(0.1, 6.0, 12))
def test_dual_outperforms_single(r):
    assert mi_classical_dual(r) >= mi_classical_single(0.5, r)
    assert -ce_quantum_dual(r) >= -ce_quantum_single(0.5, r)
    assert ce_quantum_dual(r) <= 0.0


def test_dual_quantum_decay_rate():
    ratio = ce_quantum_dual(5.0) / ce_quantum_dual(6.0)
    assert math.log(ratio) == pytest.approx(2.0, abs=0.1)


def test_capacity_dominates_half():
    for r in (0.5, 2.0, 6.0):
        cap = classical_capacity("single", r)
        assert cap.value >= mi_classical_single(0.5, r)
        assert 0.0 < cap.alpha_sq < 1.0
    assert classical_capacity("dual", 2.0).alpha_sq == 0.5


def test_classical_plateau():
    for enc in Encoding:
        c6, c8 = classical_capacity(enc, 6.0).value, classical_capacity(enc, 8.0).value
        assert abs(c8 - c6) < 1e-2 and c8 > 0.05


def test_coherent_information_maximize():
    half = coherent_information("single", 1.0)
    best = coherent_information("single", 1.0, maximize=True)
    assert half.alpha_sq == 0.5
    assert best.value >= half.value


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CHANNELS), st.floats(0.01, 0.99), st.floats(0.0, 6.0))
def test_entropy_identity(channel, alpha_sq, r):
    q = derived_quantities(Preparation(alpha_sq), *channel, r)
    assert binary_entropy(alpha_sq) - q.mutual_info_bits - q.conditional_entropy_bits == pytest.approx(
        0.0, abs=1e-9)
    assert all(math.isfinite(getattr(q, k)) for k in QUANTITY_FIELDS)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.0, 6.0))
def test_classical_mi_bounds(alpha_sq, r):
    for mi in (mi_classical_single(alpha_sq, r), mi_classical_dual(r, alpha_sq)):
        assert -1e-12 <= mi <= binary_entropy(alpha_sq) + 1e-12


@pytest.mark.parametrize("a0, b, count", [
    (1.0, 1.0, 10), (1.0, 1.0, 65), (1.0, 1.0, 5000), (0.3, 0.4, 2000),
    (700.0, -0.4, 1000), (2000.0, 1e-7, 3000), (5.0, 0.0, 400),
])
def test_arithmetic_xlogx_sum(a0, b, count):
    k = np.arange(count, dtype=float)
    w = a0 + b * k
    exact = math.fsum(w * np.log(w))
    assert arithmetic_xlogx_sum(a0, b, count)[()] == pytest.approx(exact, rel=1e-13, abs=1e-10)
