import math

import numpy as np
import pytest

from horizon_channels.errors import CapacityError, DomainError, InputError
from horizon_channels.fockcore import TruncationPolicy, partial_trace, reduced_state
from horizon_channels.unruh import (
    AccelerationSpec,
    Encoding,
    Preparation,
    Protocol,
    SchwarzschildSpec,
    SqueezingParameter,
    acceleration_from_schwarzschild,
    acceleration_from_squeezing,
    channel_element,
    joint_state,
    squeezed_one_photon_vector,
    squeezed_vacuum_vector,
    squeezing_from_acceleration,
    tail_mass,
    truncation_dim,
)

R_HALF = math.atanh(math.sqrt(0.5))  # tanh^2 r = 1/2


def test_squeezing_from_acceleration_values():
    assert squeezing_from_acceleration(AccelerationSpec(math.pi)).r == pytest.approx(
        math.atanh(math.exp(-1.0)), abs=1e-12)
    assert squeezing_from_acceleration(AccelerationSpec(1e-6)).r == 0.0
    assert squeezing_from_acceleration(AccelerationSpec(1e6)).r > 6.5


def test_squeezing_monotone_in_acceleration():
    rs = [squeezing_from_acceleration(AccelerationSpec(a)).r for a in np.geomspace(0.1, 1e4, 50)]
    assert np.all(np.diff(rs) > 0)


@pytest.mark.parametrize("r", [0.01, 0.5, 2.0, 8.0, 15.0])
def test_acceleration_round_trip(r):
    a = acceleration_from_squeezing(r, omega=2.0)
    assert squeezing_from_acceleration(AccelerationSpec(a, 2.0)).r == pytest.approx(r, rel=1e-10)


@pytest.mark.parametrize("a", [0.0, -1.0, math.inf])
def test_acceleration_domain(a):
    with pytest.raises(DomainError):
        AccelerationSpec(a)


def test_schwarzschild_map():
    assert acceleration_from_schwarzschild(SchwarzschildSpec(1.0, 4.0)).a == pytest.approx(
        math.sqrt(2) / 4)
    assert acceleration_from_schwarzschild(SchwarzschildSpec(1.0, 1e12)).a == pytest.approx(0.25)
    assert acceleration_from_schwarzschild(SchwarzschildSpec(1.0, 2.0 + 1e-12)).a > 1e4
    for radius in (2.0, 1.0):
        with pytest.raises(DomainError):
            SchwarzschildSpec(1.0, radius)


def test_squeezing_parameter_factors():
    s = SqueezingParameter(8.0)
    assert s.tanh_sq < 1.0
    assert s.kappa == pytest.approx(-math.log(math.tanh(8.0) ** 2), rel=1e-6)
    assert s.cosh_sq - s.sinh_sq == pytest.approx(1.0)
    with pytest.raises(DomainError):
        SqueezingParameter(-0.1)


@pytest.mark.parametrize("value, expected", [
    ("single", Encoding.SINGLE_RAIL), ("dual-rail", Encoding.DUAL_RAIL), ("QUANTUM", Protocol.QUANTUM),
])
def test_enum_parsing(value, expected):
    assert type(expected).parse(value) is expected


def test_enum_parsing_rejects_unknown():
    with pytest.raises(InputError):
        Encoding.parse("triple")


def test_squeezed_vacuum():
    np.testing.assert_array_equal(squeezed_vacuum_vector(0.0, 4)[[0, 5]], [1.0, 0.0])
    v = squeezed_vacuum_vector(R_HALF, 30).reshape(30, 30)
    np.testing.assert_allclose(np.diag(v), np.sqrt(2.0 ** -(np.arange(30) + 1.0)), rtol=1e-12)
    for r in (0.3, 1.0):
        v = squeezed_vacuum_vector(r, 25)
        assert v @ v == pytest.approx(1.0 - math.tanh(r) ** 50, abs=1e-14)


def test_squeezed_one_photon():
    v = squeezed_one_photon_vector(0.0, 4).reshape(4, 4)
    assert v[1, 0] == 1.0 and np.count_nonzero(v) == 1
    N = truncation_dim(1.0)
    w = squeezed_one_photon_vector(1.0, N)
    assert w @ w == pytest.approx(1.0, abs=1e-13)
    for r in (0.0, 0.4, 2.0):
        assert squeezed_vacuum_vector(r, 40) @ squeezed_one_photon_vector(r, 40) == 0.0


def test_sparse_vectors_match_dense():
    dense = squeezed_one_photon_vector(0.7, 30)
    sparse = squeezed_one_photon_vector(0.7, 30, sparse=True)
    np.testing.assert_array_equal(sparse.toarray().ravel(), dense)


def test_vacuum_traces_to_thermal_diagonal():
    r, N = 0.8, 60
    rho = reduced_state(squeezed_vacuum_vector(r, N), (N, N), [0])
    n = np.arange(N)
    np.testing.assert_allclose(rho.to_dense(), np.diag(math.tanh(r) ** (2 * n) / math.cosh(r) ** 2),
                               atol=1e-15)


def test_channel_elements():
    np.testing.assert_allclose(np.diag(channel_element(0, 0, R_HALF, 6)), 2.0 ** -(np.arange(6) + 1.0))
    e = channel_element(0, 1, 0.0, 3)
    assert e[0, 1] == 1.0 and np.count_nonzero(e) == 1
    N = truncation_dim(1.5)
    assert np.trace(channel_element(1, 1, 1.5, N)) == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(InputError):
        channel_element(2, 0, 1.0, 4)


def test_channel_element_matches_reduced_operator():
    r, N = 0.6, 80
    from horizon_channels.fockcore import reduced_operator
    vac = squeezed_vacuum_vector(r, N)
    one = squeezed_one_photon_vector(r, N)
    np.testing.assert_allclose(reduced_operator(vac, one, (N, N), [0]),
                               channel_element(0, 1, r, N), atol=1e-15)


def test_truncation_dim():
    assert truncation_dim(0.0) == 2
    N = truncation_dim(1.0)
    assert tail_mass(1.0, N) < 1e-14 <= tail_mass(1.0, N - 1)
    with pytest.raises(CapacityError):
        truncation_dim(6.0)
    with pytest.raises(CapacityError):
        squeezed_vacuum_vector(0.1, 5000)


@pytest.mark.parametrize("encoding", list(Encoding))
@pytest.mark.parametrize("protocol", list(Protocol))
@pytest.mark.parametrize("alpha_sq", [0.2, 0.5])
def test_joint_state_sender_marginal(encoding, protocol, alpha_sq):
    r = 0.4
    N = truncation_dim(r)
    rho = joint_state(Preparation(alpha_sq), encoding, protocol, r, N)
    np.testing.assert_allclose(partial_trace(rho, [0]).to_dense(),
                               np.diag([alpha_sq, 1 - alpha_sq]), atol=1e-13)


def test_joint_state_zero_squeezing_quantum_single():
    rho = joint_state(Preparation(0.5), "single", "quantum", 0.0, 2).to_dense()
    # (|0,0> + |1,1>)/sqrt 2 in qubit x Fock(2)
    psi = np.zeros(4)
    psi[[0, 3]] = 1 / math.sqrt(2)
    np.testing.assert_allclose(rho, np.outer(psi, psi), atol=1e-15)


def test_joint_state_dual_goes_sparse():
    policy = TruncationPolicy(max_dim=64)
    rho = joint_state(Preparation(0.5), "dual", "quantum", 0.3, 40, policy=policy)
    assert rho.is_sparse and rho.factors == (2, 40, 40)
    assert rho.trace() == pytest.approx(1.0, abs=1e-9)


def test_preparation_domain():
    with pytest.raises(DomainError):
        Preparation(1.5)
