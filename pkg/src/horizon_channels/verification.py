"""Cross-check of the series against the brute-force pipeline."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .closedform import DEFAULT_CONFIG, SeriesConfig, derived_quantities
from .fockcore import DEFAULT_POLICY, TruncationPolicy
from .oracle import oracle_quantities
from .parallel import parallel_map
from .quantities import QUANTITY_FIELDS
from .unruh import Encoding, Preparation, Protocol, as_squeezing, truncation_dim

DEFAULT_R_VALUES = (0.1, 0.25, 0.5, 1.0, 1.5, 2.0)
DEFAULT_ALPHA_SQ = (0.25, 0.5, 0.75)
SPOT_CHECK_R = 3.0


@dataclass(frozen=True)
class GridPoint:
    r: float
    alpha_sq: float
    encoding: Encoding
    protocol: Protocol


@dataclass(frozen=True)
class VerificationReport:
    """Series-versus-oracle deltas at one point.

    ``deltas`` compare the series with the oracle at ``truncation_dim``;
    ``doubling_deltas`` compare the oracle at that truncation with the
    oracle at twice it.
    """

    point: GridPoint
    deltas: dict = field(default_factory=dict)
    doubling_deltas: dict = field(default_factory=dict)
    truncation_dim: int = 0
    tolerance: float = 1e-6
    fidelity_tolerance: float = 1e-6
    error: str | None = None

    def limit(self, name: str) -> float:
        return self.fidelity_tolerance if name == "fidelity" else self.tolerance

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        return all(v <= self.limit(k) for table in (self.deltas, self.doubling_deltas)
                   for k, v in table.items())


def verify_point(prep: Preparation, encoding, protocol, r, tolerance: float = 1e-6, *,
                 fidelity_tolerance: float | None = None,
                 policy: TruncationPolicy = DEFAULT_POLICY,
                 config: SeriesConfig = DEFAULT_CONFIG) -> VerificationReport:
    """Run both pipelines at the automatic truncation N and again at 2N.

    Failures are reported in the returned record, never raised.
    """
    ftol = tolerance if fidelity_tolerance is None else fidelity_tolerance
    point = GridPoint(r, prep.alpha_sq, encoding, protocol)
    try:
        encoding, protocol = Encoding.parse(encoding), Protocol.parse(protocol)
        s = as_squeezing(r)
        point = GridPoint(s.r, prep.alpha_sq, encoding, protocol)
        wide = TruncationPolicy(policy.tail_epsilon, 1 << 30)
        N = truncation_dim(s, wide)
        wide = TruncationPolicy(policy.tail_epsilon, max(policy.max_dim, 2 * N))
        series = derived_quantities(prep, encoding, protocol, s, config)
        base = oracle_quantities(prep, encoding, protocol, s, N, wide)
        doubled = oracle_quantities(prep, encoding, protocol, s, 2 * N, wide)
    except Exception as exc:  # reported, not raised
        return VerificationReport(point, tolerance=tolerance, fidelity_tolerance=ftol,
                                  error=f"{type(exc).__name__}: {exc}")
    deltas = {k: abs(getattr(series, k) - getattr(base, k)) for k in QUANTITY_FIELDS}
    doubling = {k: abs(getattr(base, k) - getattr(doubled, k)) for k in QUANTITY_FIELDS}
    return VerificationReport(point, deltas, doubling, N, tolerance, ftol)


def default_grid(r_max: float = SPOT_CHECK_R) -> list[GridPoint]:
    """Full grid up to r = 2 plus a spot check of all four channels at r = 3."""
    points = [GridPoint(r, a, e, p)
              for r, a, e, p in itertools.product(DEFAULT_R_VALUES, DEFAULT_ALPHA_SQ, Encoding, Protocol)
              if r <= r_max]
    if SPOT_CHECK_R <= r_max:
        points += [GridPoint(SPOT_CHECK_R, 0.5, e, p) for e, p in itertools.product(Encoding, Protocol)]
    return points


def _run(args):
    point, tolerance, ftol = args
    return verify_point(Preparation(point.alpha_sq), point.encoding, point.protocol, point.r,
                        tolerance, fidelity_tolerance=ftol)


def verify_grid(points, tolerance: float = 1e-6, fidelity_tolerance: float | None = None,
                workers: int | None = None) -> list[VerificationReport]:
    return parallel_map(_run, [(p, tolerance, fidelity_tolerance) for p in points], workers)


def max_deltas(reports) -> dict:
    """Largest series and doubling delta per quantity across reports."""
    out = {}
    for k in QUANTITY_FIELDS:
        out[k] = (max((rep.deltas.get(k, 0.0) for rep in reports), default=0.0),
                  max((rep.doubling_deltas.get(k, 0.0) for rep in reports), default=0.0))
    return out
