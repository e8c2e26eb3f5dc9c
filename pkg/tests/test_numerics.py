import math

import numpy as np
import pytest

from horizon_channels.errors import ConvergenceError, InputError
from horizon_channels.numerics import euler_maclaurin_tail, golden_section_max, sum_decaying_series


@pytest.mark.parametrize("kappa", [2.0, 0.1, 1e-3, 1e-6])
def test_geometric_series(kappa):
    got = sum_decaying_series(lambda n: np.exp(-kappa * n), kappa)
    assert got == pytest.approx(1.0 / -math.expm1(-kappa), rel=1e-13)


@pytest.mark.parametrize("kappa", [0.5, 1e-2, 1e-5])
def test_polynomial_times_geometric(kappa):
    # sum n^2 q^n = q (1 + q) / (1 - q)^3
    q = math.exp(-kappa)
    got = sum_decaying_series(lambda n: n * n * np.exp(-kappa * n), kappa)
    assert got == pytest.approx(q * (1 + q) / (-math.expm1(-kappa)) ** 3, rel=1e-12)


def test_start_offset():
    kappa = 0.3
    got = sum_decaying_series(lambda n: np.exp(-kappa * n), kappa, start=5)
    assert got == pytest.approx(math.exp(-5 * kappa) / -math.expm1(-kappa), rel=1e-14)


def test_direct_matches_accelerated():
    kappa = 2e-4
    term = lambda n: np.sqrt(n + 1.0) * np.log1p(n) * np.exp(-kappa * n)  # noqa: E731
    fast = sum_decaying_series(term, kappa)
    slow = sum_decaying_series(term, kappa, accelerate_after=None, max_terms=10**7)
    assert fast == pytest.approx(slow, rel=1e-12)


def test_direct_summation_raises_when_capped():
    with pytest.raises(ConvergenceError):
        sum_decaying_series(lambda n: np.exp(-1e-6 * n), 1e-6, accelerate_after=None, max_terms=1000)


def test_bad_kappa():
    with pytest.raises(InputError):
        sum_decaying_series(lambda n: n, 0.0)


def test_tail_alone():
    kappa, start = 1e-3, 5000.0
    exact = math.exp(-kappa * start) / -math.expm1(-kappa)
    assert euler_maclaurin_tail(lambda n: np.exp(-kappa * n), start, kappa) == pytest.approx(exact, rel=1e-12)


def test_returns_python_float():
    assert type(sum_decaying_series(lambda n: np.exp(-1e-5 * n), 1e-5)) is float


@pytest.mark.parametrize("peak", [0.0, 0.123, 0.5, 0.8, 1.0])
def test_golden_section_parabola(peak):
    x, fx = golden_section_max(lambda x: -(x - peak) ** 2, 0.0, 1.0)
    assert x == pytest.approx(peak, abs=1e-7)
    assert fx == pytest.approx(0.0, abs=1e-13)


def test_golden_section_monotone_and_flat():
    assert golden_section_max(lambda x: x, 0.0, 2.0)[0] == 2.0
    assert golden_section_max(lambda x: -x, -1.0, 3.0)[0] == -1.0
    # a constant ties everywhere; the smallest argument wins
    assert golden_section_max(lambda x: 1.0, 0.0, 1.0)[0] == 0.0


def test_golden_section_empty_bracket():
    with pytest.raises(InputError):
        golden_section_max(lambda x: x, 1.0, 1.0)
