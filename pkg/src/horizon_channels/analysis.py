"""Parameter sweeps, plateau estimates and exponential-decay fits."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .closedform import DEFAULT_CONFIG, SeriesConfig, derived_quantities
from .errors import DomainError, InputError
from .parallel import parallel_map
from .quantities import QUANTITY_FIELDS, ChannelQuantities
from .unruh import (
    AccelerationSpec,
    Encoding,
    Preparation,
    Protocol,
    acceleration_from_squeezing,
    squeezing_from_acceleration,
)

DEFAULT_FIT_WINDOW = (3.0, 6.0)
PLATEAU_SPAN = 2.0
PLATEAU_TOL = 1e-2
MIN_FIT_POINTS = 5


class Axis(str, enum.Enum):
    ACCELERATION = "acceleration"
    SQUEEZING = "squeezing"

    @classmethod
    def parse(cls, value) -> "Axis":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"a": cls.ACCELERATION, "r": cls.SQUEEZING}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown sweep axis {value!r}") from None


@dataclass(frozen=True)
class SweepGrid:
    """Evenly spaced sweep over acceleration ``a`` or squeezing ``r``.

    Args:
        axis: which variable is spaced evenly.
        start, stop: inclusive range; ``start > 0`` on the acceleration axis.
        points: number of grid points, at least 2.
        omega: mode frequency used by the acceleration map.
        alpha_sq: input weight of logical zero.
        encodings, protocols: channel families to evaluate at each point.
    """

    axis: Axis = Axis.SQUEEZING
    start: float = 0.0
    stop: float = 6.0
    points: int = 200
    omega: float = 1.0
    alpha_sq: float = 0.5
    encodings: tuple = (Encoding.SINGLE_RAIL, Encoding.DUAL_RAIL)
    protocols: tuple = (Protocol.CLASSICAL, Protocol.QUANTUM)

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis.parse(self.axis))
        object.__setattr__(self, "encodings", tuple(sorted({Encoding.parse(e) for e in self.encodings},
                                                           key=lambda e: e.value)))
        object.__setattr__(self, "protocols", tuple(sorted({Protocol.parse(p) for p in self.protocols},
                                                           key=lambda p: p.value)))
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise InputError(f"sweep needs start < stop, got {self.start}, {self.stop}")
        if self.axis is Axis.ACCELERATION and not self.start > 0.0:
            raise DomainError(f"acceleration sweep must start above 0, got {self.start}")
        if self.axis is Axis.SQUEEZING and self.start < 0.0:
            raise DomainError(f"squeezing sweep must start at r >= 0, got {self.start}")
        if int(self.points) != self.points or self.points < 2:
            raise InputError(f"sweep needs at least 2 points, got {self.points}")
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise DomainError(f"mode frequency must be > 0, got {self.omega}")
        if not self.encodings or not self.protocols:
            raise InputError("sweep needs at least one encoding and one protocol")
        Preparation(self.alpha_sq)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.points))

    def coordinates(self) -> list[tuple[float, float]]:
        """``(a, r)`` for every grid point, in axis order."""
        out = []
        for v in self.values():
            v = float(v)
            if self.axis is Axis.ACCELERATION:
                out.append((v, squeezing_from_acceleration(AccelerationSpec(v, self.omega)).r))
            else:
                out.append((acceleration_from_squeezing(v, self.omega), v))
        return out


@dataclass(frozen=True)
class SweepRow:
    a: float
    r: float
    omega: float
    alpha_sq: float
    encoding: Encoding
    protocol: Protocol
    quantities: ChannelQuantities | None
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok" and self.quantities is not None

    def value(self, name: str) -> float:
        if name not in QUANTITY_FIELDS:
            raise InputError(f"unknown quantity {name!r}")
        return getattr(self.quantities, name) if self.ok else math.nan


def evaluate_row(a, r, omega, alpha_sq, encoding, protocol,
                 config: SeriesConfig = DEFAULT_CONFIG) -> SweepRow:
    """One sweep row; any numerical failure is recorded in ``status``."""
    try:
        q = derived_quantities(Preparation(alpha_sq), encoding, protocol, r, config)
        status = "ok"
    except Exception as exc:  # marked, not raised, so the sweep continues
        q, status = None, f"failed: {type(exc).__name__}: {exc}"
    return SweepRow(a, r, omega, alpha_sq, Encoding.parse(encoding), Protocol.parse(protocol), q, status)


def _evaluate(args):
    return evaluate_row(*args)


def sweep(grid: SweepGrid, workers: int | None = 1,
          config: SeriesConfig = DEFAULT_CONFIG) -> list[SweepRow]:
    """Evaluate every channel at every grid point.

    Rows come back ordered by the axis value, then encoding, then protocol,
    whatever the number of workers.
    """
    jobs = [(a, r, grid.omega, grid.alpha_sq, e, p, config)
            for (a, r), e, p in itertools.product(grid.coordinates(), grid.encodings, grid.protocols)]
    return parallel_map(_evaluate, jobs, workers)


def select(rows, encoding, protocol) -> list[SweepRow]:
    encoding, protocol = Encoding.parse(encoding), Protocol.parse(protocol)
    return [row for row in rows if row.encoding is encoding and row.protocol is protocol]


@dataclass(frozen=True)
class FitResult:
    gamma: float
    log_intercept: float
    rms_residual: float
    window: tuple[float, float]
    points: int = 0


def _single_channel(rows):
    kinds = {(row.encoding, row.protocol) for row in rows}
    if len(kinds) > 1:
        raise InputError("rows mix several channels; filter to one encoding and protocol first")


def fit_exponential_decay(rows, window=DEFAULT_FIT_WINDOW,
                          quantity: str = "coherent_info_bits") -> FitResult:
    """Unweighted least-squares line through ``(r, ln quantity)`` on a window.

    Args:
        rows: sweep rows of a single channel.
        window: inclusive ``(r_lo, r_hi)``.
        quantity: field to fit.

    Raises:
        InputError: bad window, mixed channels or fewer than five rows.
        DomainError: non-positive values inside the window.
    """
    lo, hi = (float(w) for w in window)
    if not lo < hi:
        raise InputError(f"fit window needs lo < hi, got ({lo}, {hi})")
    rows = [row for row in rows if lo <= row.r <= hi and row.ok]
    _single_channel(rows)
    if len(rows) < MIN_FIT_POINTS:
        raise InputError(f"need at least {MIN_FIT_POINTS} rows in [{lo}, {hi}], got {len(rows)}")
    r = np.array([row.r for row in rows])
    y = np.array([row.value(quantity) for row in rows])
    bad = r[~(y > 0.0)]
    if bad.size:
        raise DomainError(
            f"{quantity} is not positive at r = {bad[0]:g}; try a window ending below it")
    logy = np.log(y)
    design = np.column_stack([r, np.ones_like(r)])
    (slope, intercept), *_ = np.linalg.lstsq(design, logy, rcond=None)
    resid = logy - (slope * r + intercept)
    return FitResult(float(-slope), float(intercept), float(np.sqrt(np.mean(resid ** 2))),
                     (lo, hi), len(rows))


@dataclass(frozen=True)
class PlateauEstimate:
    value: float
    r_max: float
    reference_r: float
    reference_value: float
    converged: bool


def estimate_plateau(rows, quantity: str = "capacity_bits", *, min_r: float = 6.0,
                     span: float = PLATEAU_SPAN, tol: float = PLATEAU_TOL) -> PlateauEstimate:
    """Large-r limit read off the last row, with a convergence flag.

    The flag compares the last row with the row nearest ``r_max - span``;
    an unconverged estimate is reported as such, not extrapolated.
    """
    rows = [row for row in rows if row.ok]
    _single_channel(rows)
    if not rows:
        raise InputError("no successful rows to estimate a plateau from")
    last = max(rows, key=lambda row: row.r)
    if last.r < min_r:
        raise InputError(f"rows must reach r >= {min_r}, largest is {last.r:g}")
    ref = min(rows, key=lambda row: abs(row.r - (last.r - span)))
    value, ref_value = last.value(quantity), ref.value(quantity)
    return PlateauEstimate(value, last.r, ref.r, ref_value, bool(abs(value - ref_value) < tol))
