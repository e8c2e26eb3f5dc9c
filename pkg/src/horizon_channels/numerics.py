"""Scalar numerics: geometrically decaying series and golden-section search.

Every series in this package has the shape ``sum_n exp(-kappa n) h(n)`` with
``h`` of at most polynomial-times-logarithmic growth. For small ``kappa``
(large squeezing) the number of significant terms grows like ``1/kappa``,
which reaches 1e8 around r = 8. ``sum_decaying_series`` therefore sums a head
exactly and, if the head has not converged, replaces the remainder by its
Euler-Maclaurin expansion with the integral done by Gauss-Legendre panels.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import ConvergenceError, InputError

Term = Callable[[np.ndarray], np.ndarray]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

_CHUNK = 4096
_MIN_HEAD = 256
# exp(-110) times any polynomial factor met here is far below double precision
_TAIL_DECAY_STOP = 110.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _stop_index(values: np.ndarray, n: np.ndarray, kappa: float, eps: float):
    """First index where this and the next term pass both stopping tests."""
    ratio = math.exp(-kappa) * ((n + 2.0) / (n + 1.0)) ** 3
    mag = np.abs(values)
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(ratio < 1.0, mag * ratio / (1.0 - ratio), np.inf)
    ok = (mag < eps) & (bound < eps)
    both = ok[:-1] & ok[1:]
    hits = np.flatnonzero(both)
    return int(hits[0]) + 1 if hits.size else None


def _tail_panels(start: float, kappa: float) -> np.ndarray:
    """Panel edges covering [start, stop): geometric, then of length 4/kappa."""
    edges = [float(start)]
    stop = max(start, _TAIL_DECAY_STOP / kappa)
    width_cap = 4.0 / kappa
    x = float(start)
    while x < stop:
        x = x + min(x, width_cap)
        edges.append(x)
    return np.asarray(edges)


def euler_maclaurin_tail(term: Term, start: float, kappa: float) -> float:
    """``sum_{n >= start} term(n)`` for a smooth, exponentially decaying term.

    ``term`` must accept real (non-integer) arguments.
    """
    edges = _tail_panels(start, kappa)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2.0
    x = (lo + hi) / 2.0 + half * _GL_NODES[None, :]
    w = half * _GL_WEIGHTS[None, :]
    integral = float(np.sum(w * term(x.ravel()).reshape(x.shape)))
    g = term(start + np.arange(-2.0, 3.0))
    d1 = (g[3] - g[1]) / 2.0
    d3 = (g[4] - 2.0 * g[3] + 2.0 * g[1] - g[0]) / 2.0
    return integral + g[2] / 2.0 - d1 / 12.0 + d3 / 720.0


def sum_decaying_series(term: Term, kappa: float, *, start: int = 0, smooth: Term | None = None,
                        eps: float = 1e-16, max_terms: int = 10**6,
                        accelerate_after: int | None = 4096) -> float:
    """Sum ``term(n)`` for integer ``n >= start``.

    Args:
        term: vectorized term evaluator; receives float arrays of indices.
        kappa: decay rate of the geometric envelope ``exp(-kappa n)``.
        start: first index.
        smooth: real-argument continuation of ``term`` used for the tail;
            defaults to ``term`` itself.
        eps: a term and the geometric bound on everything after it must
            both fall below this before direct summation stops.
        max_terms: hard cap on directly summed terms.
        accelerate_after: number of direct terms after which the remainder
            is handled by the Euler-Maclaurin tail. ``None`` disables the
            tail and sums directly up to ``max_terms``.

    Raises:
        ConvergenceError: if direct summation alone does not converge.
    """
    if not kappa > 0.0:
        raise InputError(f"decay rate must be positive, got {kappa}")
    if accelerate_after is not None:
        limit = min(max(int(accelerate_after), _MIN_HEAD), max_terms)
    else:
        limit = max_terms
    total = 0.0
    n0 = int(start)
    end = int(start) + limit
    while n0 < end:
        size = min(_CHUNK if n0 - start < _CHUNK else 8 * _CHUNK, end - n0)
        n = np.arange(n0, n0 + size, dtype=float)
        values = term(n)
        stop = _stop_index(values, n, kappa, eps)
        if stop is not None:
            return total + float(np.sum(values[: stop + 1]))
        total += float(np.sum(values))
        n0 += size
    if accelerate_after is None:
        raise ConvergenceError(
            f"series not converged after {limit} terms (decay rate {kappa:.3g}); "
            "raise max_terms or enable acceleration")
    tail = euler_maclaurin_tail(smooth or term, float(n0), kappa)
    if not math.isfinite(tail):
        raise ConvergenceError(f"non-finite series tail from n = {n0}")
    return float(total + tail)


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-8) -> tuple[float, float]:
    """Maximize a unimodal scalar function on ``[lo, hi]``.

    The bracket is shrunk until narrower than ``tol``. Ties go to the
    smaller argument, and the endpoints are compared with the interior
    optimum so that monotone functions return the right end.

    Returns:
        ``(argmax, max)``.
    """
    if not lo < hi:
        raise InputError(f"empty bracket [{lo}, {hi}]")
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    for x, fx in ((float(hi), fb), (float(lo), fa)):
        if fx > best_f or (fx == best_f and x < best_x):
            best_x, best_f = x, fx
    return float(best_x), float(best_f)
