"""Series expressions for fidelity, mutual information and conditional entropy.

Each series runs over the receiver's occupation number with a geometric
weight ``tanh^{2n} r``; they are summed by
:func:`horizon_channels.numerics.sum_decaying_series`. Single-rail formulas
hold for any ``alpha_sq``. The dual-rail formulas are written for the
symmetric input ``alpha_sq = 1/2``; other inputs go through the general
dual-rail sums below, which reduce to them at 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .fockcore import binary_entropy
from .numerics import golden_section_max, sum_decaying_series
from .quantities import ChannelQuantities
from .unruh import Encoding, Preparation, Protocol, SqueezingParameter, as_squeezing

LN2 = math.log(2.0)
# ln of the Glaisher-Kinkelin constant
LN_GLAISHER = 0.24875447703378426
_EXACT_BLOCK = 16


@dataclass(frozen=True)
class SeriesConfig:
    """Stopping rules for the series.

    Attributes:
        term_epsilon: a term and the geometric bound on the rest must both
            drop below this.
        max_terms: cap on directly summed terms.
        r_min_analytic: below this r the analytic r -> 0 limits are returned.
        accelerate_after: direct terms before the remaining tail is replaced
            by its Euler-Maclaurin expansion; ``None`` forces direct summation.
    """

    term_epsilon: float = 1e-16
    max_terms: int = 10**6
    r_min_analytic: float = 1e-8
    accelerate_after: int | None = 4096

    def __post_init__(self):
        if not 0.0 < self.term_epsilon < 1.0:
            raise InputError("term_epsilon must lie in (0, 1)")
        if self.max_terms < 100:
            raise InputError("max_terms must be >= 100")
        if self.r_min_analytic < 0.0:
            raise InputError("r_min_analytic must be >= 0")


DEFAULT_CONFIG = SeriesConfig()


def _sum(term, s: SqueezingParameter, config: SeriesConfig, smooth=None) -> float:
    return sum_decaying_series(term, s.kappa, smooth=smooth, eps=config.term_epsilon,
                               max_terms=config.max_terms,
                               accelerate_after=config.accelerate_after)


def _check_alpha(alpha_sq: float) -> float:
    alpha_sq = float(alpha_sq)
    if not 0.0 <= alpha_sq <= 1.0:
        raise InputError(f"alpha_sq must lie in [0, 1], got {alpha_sq}")
    return alpha_sq


def fidelity_series(r, encoding=Encoding.SINGLE_RAIL, config: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Fidelity between the received logical zero and one.

    Single rail: ``(sum_{n>=1} tanh^{2n-1} r sqrt(n) / cosh^3 r)^2``. Dual rail
    is its square, since both logical states are products of one vacuum and
    one photon channel output.
    """
    s = as_squeezing(r)
    encoding = Encoding.parse(encoding)
    if s.r == 0.0:
        return 0.0
    kappa = s.kappa
    # shifted index m = n - 1, so the term is tanh r * tanh^{2m} r sqrt(m+1)
    total = _sum(lambda m: np.exp(-kappa * m) * np.sqrt(m + 1.0), s, config)
    single = min((s.tanh / math.cosh(s.r) ** 3 * total) ** 2, 1.0)
    return single if encoding is Encoding.SINGLE_RAIL else single**2


def mi_classical_single(alpha_sq: float, r, config: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Mutual information of the classical single-rail channel, in bits."""
    a2 = _check_alpha(alpha_sq)
    s = as_squeezing(r)
    if a2 in (0.0, 1.0):
        return 0.0
    source = binary_entropy(a2)
    if s.r < config.r_min_analytic:
        return source
    b2 = 1.0 - a2
    kappa, c2, s2 = s.kappa, s.cosh_sq, s.sinh_sq

    def term(n):
        w = np.exp(-kappa * n)
        first = a2 / c2 * w * np.log1p(n * b2 / (a2 * s2))
        with np.errstate(divide="ignore", invalid="ignore"):
            second = np.where(n > 0, n * b2 / (c2 * s2) * w * np.log1p(a2 * s2 / (n * b2)), 0.0)
        return (first + second) / LN2

    return source - _sum(term, s, config)


def _dual_inner_exact(m: np.ndarray) -> np.ndarray:
    """``sum_{q=0}^{p} (q+1) lb((p+1)/(q+1))`` for integer m = p + 1, in nats."""
    m = np.asarray(m, dtype=np.int64)
    top = int(m.max())
    k = np.arange(1, top + 1, dtype=float)
    klnk = np.concatenate(([0.0], np.cumsum(k * np.log(k))))
    mf = m.astype(float)
    return mf * (mf + 1.0) / 2.0 * np.log(mf) - klnk[m]


def _dual_inner_smooth(m: np.ndarray) -> np.ndarray:
    """Asymptotic form of :func:`_dual_inner_exact`, valid for real m >= 100."""
    m = np.asarray(m, dtype=float)
    return (m * m / 4.0 - np.log(m) / 12.0 - LN_GLAISHER
            - 1.0 / (720.0 * m * m) + 1.0 / (5040.0 * m**4))


def mi_classical_dual(r, alpha_sq: float = 0.5, config: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Mutual information of the classical dual-rail channel, in bits.

    At ``alpha_sq = 1/2``:
    ``1 - sum_p tanh^{2p} r / cosh^6 r sum_{q<=p} (q+1) lb(1 + (p-q)/(q+1))``.
    """
    a2 = _check_alpha(alpha_sq)
    s = as_squeezing(r)
    if a2 in (0.0, 1.0):
        return 0.0
    if s.r < config.r_min_analytic:
        return binary_entropy(a2)
    if a2 != 0.5:
        return binary_entropy(a2) - _general_dual_sum(a2, s, config, quantum=False)
    kappa, c6 = s.kappa, s.cosh_sq**3

    def head(p):
        return np.exp(-kappa * p) / c6 * _dual_inner_exact(p + 1.0) / LN2

    def smooth(p):
        return np.exp(-kappa * p) / c6 * _dual_inner_smooth(p + 1.0) / LN2

    return 1.0 - _sum(head, s, config, smooth=smooth)


def ce_quantum_single(alpha_sq: float, r, config: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Conditional entropy ``S(A|R)`` of the quantum single-rail channel, in bits."""
    a2 = _check_alpha(alpha_sq)
    s = as_squeezing(r)
    if a2 in (0.0, 1.0):
        return 0.0
    if s.r < config.r_min_analytic:
        return -binary_entropy(a2)
    b2 = 1.0 - a2
    kappa, c2, s2 = s.kappa, s.cosh_sq, s.sinh_sq
    T = math.exp(-kappa)
    lb_tanh = -kappa / (2.0 * LN2)

    def term(n):
        w = np.exp(-kappa * n)
        # tanh^2 r (a2 cosh^2 + b2 (n+1)) / (a2 sinh^2 + b2 n), written as 1 + x
        ratio = np.log1p(b2 * (T - n / c2) / (a2 * s2 + b2 * n)) / LN2
        first = a2 / c2 * w * ratio
        # (n+1)/cosh^2 - n/sinh^2 = (1 - n/sinh^2)/cosh^2
        second = 2.0 * n * w * b2 / (c2 * c2) * (1.0 - n / s2) * lb_tanh
        third = b2 / c2 * w * (n + 1.0) / c2 * np.log2(a2 / c2 + b2 * (n + 1.0) / (c2 * c2))
        with np.errstate(divide="ignore", invalid="ignore"):
            fourth = np.where(
                n > 0, b2 * n / (s2 * c2) * w * np.log2(a2 / c2 + b2 * n / (s2 * c2)), 0.0)
        return first + second + third - fourth

    return -_sum(term, s, config)


def ce_quantum_dual(r, alpha_sq: float = 0.5, config: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Conditional entropy of the quantum dual-rail channel, in bits.

    At ``alpha_sq = 1/2``:
    ``-sum_p tanh^{2p} r / cosh^6 r lb((p+2)/(p+1)) sum_{q<=p} (q+1)``.
    """
    a2 = _check_alpha(alpha_sq)
    s = as_squeezing(r)
    if a2 in (0.0, 1.0):
        return 0.0
    if s.r < config.r_min_analytic:
        return -binary_entropy(a2)
    if a2 != 0.5:
        return _general_dual_sum(a2, s, config, quantum=True)
    kappa, c6 = s.kappa, s.cosh_sq**3

    def term(p):
        return (np.exp(-kappa * p) / c6 * (p + 1.0) * (p + 2.0) / 2.0
                * np.log1p(1.0 / (p + 1.0)) / LN2)

    return -_sum(term, s, config)


def _xlogx(w):
    return w * np.log(w)


def arithmetic_xlogx_sum(a0, b: float, count) -> np.ndarray:
    """``sum_{k=0}^{count-1} w_k ln w_k`` with ``w_k = a0 + b k``, all ``w_k > 0``.

    Vectorized over ``a0`` and ``count``. Counts up to 64 are summed
    exactly. Longer runs sum 16 terms exactly at each end and the middle by
    Euler-Maclaurin, which also continues the sum smoothly to real counts.
    """
    a0, count = np.broadcast_arrays(np.asarray(a0, dtype=float), np.asarray(count, dtype=float))
    out = np.empty(a0.shape)
    K = _EXACT_BLOCK
    small = count <= 4 * K
    if np.any(small):
        n = count[small]
        k = np.arange(int(np.ceil(n.max())), dtype=float)
        w = a0[small][:, None] + b * k[None, :]
        mask = k[None, :] < n[:, None]
        vals = np.where(mask, _xlogx(np.where(mask, w, 1.0)), 0.0)
        out[small] = vals.sum(axis=1)
    big = ~small
    if np.any(big):
        a, n = a0[big], count[big]
        j = np.arange(K, dtype=float)
        ends = (_xlogx(a[:, None] + b * j[None, :]).sum(axis=1)
                + _xlogx(a[:, None] + b * (n[:, None] - 1.0 - j[None, :])).sum(axis=1))
        lo, hi = float(K), n - 1.0 - K
        w_lo, w_hi = a + b * lo, a + b * hi
        span = hi - lo
        mid = (w_lo + w_hi) / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            closed = np.where(
                b != 0.0,
                ((w_hi**2 / 2 * np.log(w_hi) - w_hi**2 / 4)
                 - (w_lo**2 / 2 * np.log(w_lo) - w_lo**2 / 4)) / b,
                0.0)
        expansion = span * (_xlogx(mid) + b * b * span**2 / (24.0 * mid)
                            + b**4 * span**4 / (960.0 * mid**3))
        integral = np.where(np.abs(b) * span <= 1e-3 * mid, expansion, closed)
        em = ((_xlogx(w_lo) + _xlogx(w_hi)) / 2.0
              + b * (np.log(w_hi) - np.log(w_lo)) / 12.0
              + b**3 * (1.0 / w_hi**2 - 1.0 / w_lo**2) / 720.0
              - 6.0 * b**5 * (1.0 / w_hi**4 - 1.0 / w_lo**4) / 30240.0)
        out[big] = ends + integral + em
    return out


def _general_dual_sum(a2: float, s: SqueezingParameter, config: SeriesConfig, *, quantum: bool) -> float:
    """Dual-rail series for arbitrary ``alpha_sq`` in (0, 1).

    With ``m = p + 1`` photons at the receiver, ``W(m) = sum_{k=0}^{m} w_k lb w_k``
    over ``w_k = a2 k + b2 (m - k)``. The classical channel loses
    ``W - (a2 lb a2 + b2 lb b2) m(m+1)/2 - sum_k k lb k`` per sector and the
    quantum conditional entropy is ``W - U`` with
    ``U = sum_{k=1}^{m} u_k lb u_k``, ``u_k = a2 k + b2 (m + 1 - k)``.
    Returns the classical equivocation ``S(A|R)`` or the quantum ``S(A|R)``.
    """
    b2 = 1.0 - a2
    kappa, c6 = s.kappa, s.cosh_sq**3
    slope = a2 - b2
    mix = a2 * math.log(a2) + b2 * math.log(b2)

    def inner(p):
        m = p + 1.0
        W = arithmetic_xlogx_sum(b2 * m, slope, m + 1.0)
        if quantum:
            return W - arithmetic_xlogx_sum(a2 + b2 * m, slope, m)
        return W - mix * m * (m + 1.0) / 2.0 - arithmetic_xlogx_sum(1.0, 1.0, m)

    def term(p):
        return np.exp(-kappa * p) / c6 * inner(p) / LN2

    return _sum(term, s, config)


def mutual_information(prep: Preparation, encoding, protocol, r,
                       config: SeriesConfig = DEFAULT_CONFIG) -> float:
    """``S(A;R)`` for any channel; quantum rows use ``S(A) - S(A|R)``."""
    encoding, protocol = Encoding.parse(encoding), Protocol.parse(protocol)
    if protocol is Protocol.CLASSICAL:
        if encoding is Encoding.SINGLE_RAIL:
            return mi_classical_single(prep.alpha_sq, r, config)
        return mi_classical_dual(r, prep.alpha_sq, config)
    return binary_entropy(prep.alpha_sq) - conditional_entropy(prep, encoding, protocol, r, config)


def conditional_entropy(prep: Preparation, encoding, protocol, r,
                        config: SeriesConfig = DEFAULT_CONFIG) -> float:
    """``S(A|R)`` for any channel; classical rows use ``S(A) - S(A;R)``."""
    encoding, protocol = Encoding.parse(encoding), Protocol.parse(protocol)
    if protocol is Protocol.QUANTUM:
        if encoding is Encoding.SINGLE_RAIL:
            return ce_quantum_single(prep.alpha_sq, r, config)
        return ce_quantum_dual(r, prep.alpha_sq, config)
    return binary_entropy(prep.alpha_sq) - mutual_information(prep, encoding, protocol, r, config)


@dataclass(frozen=True)
class Optimum:
    value: float
    alpha_sq: float


def classical_capacity(encoding, r, config: SeriesConfig = DEFAULT_CONFIG,
                       tol: float = 1e-8) -> Optimum:
    """Maximum classical mutual information over the input weight.

    Dual rail is symmetric under exchanging the logical states, so its
    optimum sits at 1/2; single rail is searched by golden section.
    """
    encoding = Encoding.parse(encoding)
    if encoding is Encoding.DUAL_RAIL:
        return Optimum(mi_classical_dual(r, 0.5, config), 0.5)
    x, fx = golden_section_max(lambda a: mi_classical_single(a, r, config), 0.0, 1.0, tol)
    return Optimum(fx, x)


def coherent_information(encoding, r, config: SeriesConfig = DEFAULT_CONFIG, *,
                         maximize: bool = False, tol: float = 1e-8) -> Optimum:
    """``-S(A|R)`` of the quantum channel, at ``alpha_sq = 1/2`` unless maximized."""
    encoding = Encoding.parse(encoding)

    def coh(a):
        return -conditional_entropy(Preparation(a), encoding, Protocol.QUANTUM, r, config)

    if not maximize:
        return Optimum(coh(0.5), 0.5)
    x, fx = golden_section_max(coh, 0.0, 1.0, tol)
    return Optimum(fx, x)


def derived_quantities(prep: Preparation, encoding, protocol, r,
                       config: SeriesConfig = DEFAULT_CONFIG, *,
                       maximize_coherent: bool = False) -> ChannelQuantities:
    """Fill a :class:`ChannelQuantities` record from the series."""
    encoding, protocol = Encoding.parse(encoding), Protocol.parse(protocol)
    source = binary_entropy(prep.alpha_sq)
    if protocol is Protocol.CLASSICAL:
        mi = mutual_information(prep, encoding, protocol, r, config)
        ce = source - mi
        half_ce = ce if prep.alpha_sq == 0.5 else conditional_entropy(
            Preparation(0.5), encoding, protocol, r, config)
        coherent = -half_ce
        capacity = classical_capacity(encoding, r, config).value
    else:
        ce = conditional_entropy(prep, encoding, protocol, r, config)
        mi = source - ce
        if prep.alpha_sq == 0.5 and not maximize_coherent:
            coherent = -ce
        else:
            coherent = coherent_information(encoding, r, config, maximize=maximize_coherent).value
        capacity = coherent
    return ChannelQuantities(
        fidelity=fidelity_series(r, encoding, config),
        mutual_info_bits=mi,
        conditional_entropy_bits=ce,
        capacity_bits=capacity,
        coherent_info_bits=coherent,
        source_entropy_bits=source,
    )
