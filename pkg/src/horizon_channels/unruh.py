"""Two-mode squeezing seen by a uniformly accelerated receiver.

The receiver's mode and its causally disconnected partner are related to the
inertial mode by a two-mode squeezer of strength r. This module holds the
parameter maps (acceleration and hover radius to r), the squeezed vacuum and
squeezed one-photon states, the induced map on the sender's matrix elements,
and the joint sender/receiver states for single- and dual-rail encodings.

Conventions: natural units, single-mode approximation, and the two-mode
vectors are indexed ``receiver * N + partner``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, DomainError, InputError
from .fockcore import DEFAULT_POLICY, FockDensityMatrix, TruncationPolicy


class Encoding(str, enum.Enum):
    SINGLE_RAIL = "single_rail"
    DUAL_RAIL = "dual_rail"

    @classmethod
    def parse(cls, value) -> "Encoding":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"single": cls.SINGLE_RAIL, "dual": cls.DUAL_RAIL}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown encoding {value!r}") from None


class Protocol(str, enum.Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"

    @classmethod
    def parse(cls, value) -> "Protocol":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InputError(f"unknown protocol {value!r}") from None


@dataclass(frozen=True)
class SqueezingParameter:
    """Two-mode squeezing strength ``r >= 0`` with the derived hyperbolic factors."""

    r: float

    def __post_init__(self):
        r = float(self.r)
        if not math.isfinite(r) or r < 0.0:
            raise DomainError(f"squeezing parameter must be finite and >= 0, got {self.r}")
        object.__setattr__(self, "r", r)

    @property
    def tanh(self) -> float:
        return math.tanh(self.r)

    @property
    def tanh_sq(self) -> float:
        return math.exp(-self.kappa) if self.r > 0 else 0.0

    @property
    def kappa(self) -> float:
        """``-ln tanh^2 r``, accurate for large r where ``tanh^2 r`` rounds to 1."""
        if self.r == 0.0:
            return math.inf
        if self.r < 1.0:
            return -2.0 * math.log(math.tanh(self.r))
        e = math.exp(-2.0 * self.r)
        return -2.0 * (math.log1p(-e) - math.log1p(e))

    @property
    def cosh_sq(self) -> float:
        return math.cosh(self.r) ** 2

    @property
    def sinh_sq(self) -> float:
        return math.sinh(self.r) ** 2

    @property
    def sech_sq(self) -> float:
        """``1 - tanh^2 r``."""
        return 1.0 / self.cosh_sq


def as_squeezing(r) -> SqueezingParameter:
    return r if isinstance(r, SqueezingParameter) else SqueezingParameter(r)


@dataclass(frozen=True)
class AccelerationSpec:
    a: float
    omega: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise DomainError(f"proper acceleration must be > 0, got {self.a}")
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise DomainError(f"mode frequency must be > 0, got {self.omega}")


@dataclass(frozen=True)
class SchwarzschildSpec:
    """Hovering at radius ``R`` outside a black hole of mass ``M``."""

    M: float
    R: float

    def __post_init__(self):
        if not (math.isfinite(self.M) and self.M > 0.0):
            raise DomainError(f"mass must be > 0, got {self.M}")
        if not (self.R > self.R_S):
            raise DomainError(
                f"radius {self.R} is not outside the horizon R_S = {self.R_S}")

    @property
    def R_S(self) -> float:
        return 2.0 * self.M


@dataclass(frozen=True)
class Preparation:
    """Sender's input weights; ``alpha_sq`` is the weight of logical zero."""

    alpha_sq: float = 0.5

    def __post_init__(self):
        a = float(self.alpha_sq)
        if not (0.0 <= a <= 1.0):
            raise DomainError(f"alpha_sq must lie in [0, 1], got {self.alpha_sq}")
        object.__setattr__(self, "alpha_sq", a)

    @property
    def beta_sq(self) -> float:
        return 1.0 - self.alpha_sq


def squeezing_from_acceleration(spec: AccelerationSpec) -> SqueezingParameter:
    """``tanh r = exp(-omega pi / a)``."""
    x = spec.omega * math.pi / spec.a
    # atanh(exp(-x)) written to keep precision when exp(-x) is near 1
    r = 0.5 * math.log((1.0 + math.exp(-x)) / -math.expm1(-x)) if x < 745 else 0.0
    return SqueezingParameter(r)


def acceleration_from_squeezing(r, omega: float = 1.0) -> float:
    """Inverse of :func:`squeezing_from_acceleration`; r = 0 maps to a = 0."""
    s = as_squeezing(r)
    if s.r == 0.0:
        return 0.0
    return omega * math.pi / (s.kappa / 2.0)


def acceleration_from_schwarzschild(spec: SchwarzschildSpec, omega: float = 1.0) -> AccelerationSpec:
    """``1/a = 4 M sqrt(1 - R_S/R)``."""
    return AccelerationSpec(1.0 / (4.0 * spec.M * math.sqrt(1.0 - spec.R_S / spec.R)), omega)


def tail_mass(r, N: int, photons: int = 1) -> float:
    """Probability mass beyond occupation ``N - 1`` on the receiver side.

    ``photons=0`` is the squeezed vacuum (``tanh^{2N} r``); ``photons=1`` the
    squeezed one-photon state.
    """
    s = as_squeezing(r)
    if s.r == 0.0:
        return 0.0
    tn = math.exp(-s.kappa * N)
    if photons == 0:
        return tn
    return tn * (1.0 + N * s.sech_sq)


def truncation_dim(r, policy: TruncationPolicy = DEFAULT_POLICY) -> int:
    """Smallest N whose neglected mass (vacuum and one photon) is below ``tail_epsilon``.

    Raises:
        CapacityError: if that N exceeds ``policy.max_dim``.
    """
    s = as_squeezing(r)
    if s.r == 0.0:
        return 2
    eps = policy.tail_epsilon
    n = max(2, int(math.ceil(math.log(1.0 / eps) / s.kappa)))
    while tail_mass(s, n) >= eps:
        n = max(n + 1, int(n * 1.01))
    # step back in case the geometric overshoot was generous
    while n > 2 and tail_mass(s, n - 1) < eps:
        n -= 1
    if n > policy.max_dim:
        raise CapacityError(
            f"r = {s.r:g} needs N = {n} > max_dim = {policy.max_dim} for tail {eps:g}")
    return n


def _check_dim(N: int, policy: TruncationPolicy) -> int:
    N = int(N)
    if N < 2:
        raise InputError(f"truncation dimension must be >= 2, got {N}")
    if N > policy.max_dim:
        raise CapacityError(f"N = {N} exceeds max_dim = {policy.max_dim}")
    return N


def _powers(s: SqueezingParameter, n: np.ndarray) -> np.ndarray:
    """``tanh^n r`` for integer n >= 0."""
    if s.r == 0.0:
        return (n == 0).astype(float)
    return np.exp(-0.5 * s.kappa * n)


def _vector(amplitudes, rows, cols, N, sparse):
    idx = rows * N + cols
    if sparse:
        return sp.csr_array((amplitudes, (np.zeros_like(idx), idx)), shape=(1, N * N))
    out = np.zeros(N * N)
    out[idx] = amplitudes
    return out


def squeezed_vacuum_vector(r, N: int, *, sparse: bool = False,
                           policy: TruncationPolicy = DEFAULT_POLICY):
    """Squeezed vacuum ``sum_n tanh^n r / cosh r |n, n>`` truncated at n < N.

    Returns a length ``N*N`` vector (receiver index major), or a 1 x N*N
    sparse row when ``sparse`` is set.
    """
    s = as_squeezing(r)
    N = _check_dim(N, policy)
    n = np.arange(N)
    amp = _powers(s, n) / math.cosh(s.r)
    return _vector(amp, n, n, N, sparse)


def squeezed_one_photon_vector(r, N: int, *, sparse: bool = False,
                               policy: TruncationPolicy = DEFAULT_POLICY):
    """``sum_n tanh^n r sqrt(n+1) / cosh^2 r |n+1, n>`` truncated at n + 1 < N."""
    s = as_squeezing(r)
    N = _check_dim(N, policy)
    n = np.arange(N - 1)
    amp = _powers(s, n) * np.sqrt(n + 1.0) / math.cosh(s.r) ** 2
    return _vector(amp, n + 1, n, N, sparse)


def channel_element(j: int, k: int, r, N: int,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Image of the sender's ``|j><k|`` on the receiver's truncated mode.

    ``|j><k| -> sum_n tanh^{2n} r / cosh^{2+j+k} r (n+1)^{(j+k)/2} |n+j><n+k|``
    """
    if j not in (0, 1) or k not in (0, 1):
        raise InputError(f"j and k must be 0 or 1, got {j}, {k}")
    s = as_squeezing(r)
    N = _check_dim(N, policy)
    n = np.arange(N - max(j, k))
    weights = (_powers(s, 2 * n) / math.cosh(s.r) ** (2 + j + k)
               * (n + 1.0) ** (0.5 * (j + k)))
    out = np.zeros((N, N))
    out[n + j, n + k] = weights
    return out


def joint_state(prep: Preparation, encoding, protocol, r, N: int, *,
                policy: TruncationPolicy = DEFAULT_POLICY) -> FockDensityMatrix:
    """Sender qubit plus receiver modes after the channel.

    Single rail gives factors ``(2, N)``; dual rail gives ``(2, N, N)`` with
    logical zero ``|1>_a|0>_b`` and logical one ``|0>_a|1>_b``, each mode
    squeezed independently at the same r. The classical protocol keeps only
    the diagonal (in the sender index) blocks; the quantum protocol adds the
    coherence blocks with the real amplitude ``sqrt(alpha_sq beta_sq)``.
    Dual-rail states are returned sparse when they would not fit densely.
    """
    encoding = Encoding.parse(encoding)
    protocol = Protocol.parse(protocol)
    N = _check_dim(N, policy)
    amp = (math.sqrt(prep.alpha_sq), math.sqrt(prep.beta_sq))
    pairs = [(0, 0), (1, 1)]
    if protocol is Protocol.QUANTUM:
        pairs += [(0, 1), (1, 0)]
    elements = {(j, k): channel_element(j, k, r, N, policy) for j in (0, 1) for k in (0, 1)}
    if encoding is Encoding.SINGLE_RAIL:
        out = np.zeros((2 * N, 2 * N))
        for A, B in pairs:
            out[A * N:(A + 1) * N, B * N:(B + 1) * N] = amp[A] * amp[B] * elements[(A, B)]
        return FockDensityMatrix(out, (2, N))
    # logical A puts its photon in mode a when A == 0, in mode b when A == 1
    photon = {0: (1, 0), 1: (0, 1)}
    dense = 2 * N * N <= policy.max_dim
    total = None
    for A, B in pairs:
        (ja, jb), (ka, kb) = photon[A], photon[B]
        marker = np.zeros((2, 2))
        marker[A, B] = amp[A] * amp[B]
        if dense:
            term = np.kron(marker, np.kron(elements[(ja, ka)], elements[(jb, kb)]))
        else:
            term = sp.kron(sp.csr_array(marker),
                           sp.kron(sp.csr_array(elements[(ja, ka)]),
                                   sp.csr_array(elements[(jb, kb)])), format="csr")
        total = term if total is None else total + term
    return FockDensityMatrix(total, (2, N, N))
